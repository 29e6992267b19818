#include "convsim/netsim.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace convsim {

const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Workstation: return "workstation";
        case NodeKind::WlanAp: return "wlan_ap";
        case NodeKind::Apgw: return "apgw";
        case NodeKind::AccessRouter: return "access_router";
        case NodeKind::NodeB: return "node_b";
        case NodeKind::Rnc: return "rnc";
        case NodeKind::Sgsn: return "sgsn";
        case NodeKind::Ggsn: return "ggsn";
        case NodeKind::AaaServer: return "aaa_server";
        case NodeKind::HlrHss: return "hlr_hss";
        case NodeKind::FtpServer: return "ftp_server";
        case NodeKind::HttpServer: return "http_server";
        case NodeKind::MmServer: return "mm_server";
        case NodeKind::BillingSystem: return "billing_system";
        case NodeKind::InternetRouter: return "internet_router";
        case NodeKind::Switch: return "switch";
    }
    return "?";
}

const char* to_string(PacketKind k) {
    switch (k) {
        case PacketKind::Auth: return "auth";
        case PacketKind::Ftp: return "ftp";
        case PacketKind::Http: return "http";
        case PacketKind::Mm: return "mm";
        case PacketKind::Billing: return "billing";
    }
    return "?";
}

Dscp dscp_for(PacketKind k) {
    return k == PacketKind::Mm ? Dscp::Ef : Dscp::Be;
}

int Topology::link_between(int a, int b) const {
    for (const auto& l : links)
        if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) return l.id;
    return -1;
}

namespace {

struct Builder {
    Topology t;
    const Scenario& sc;

    explicit Builder(const Scenario& s) : sc(s) {}

    int node(NodeKind kind, std::string name) {
        int id = static_cast<int>(t.nodes.size());
        t.nodes.push_back(Node{id, kind, std::move(name)});
        return id;
    }

    LinkConf& link(int a, int b, double bps, double delay, size_t cap) {
        LinkConf l;
        l.id = static_cast<int>(t.links.size());
        l.a = a;
        l.b = b;
        l.bps = bps;
        l.delay_s = delay;
        l.queue_cap_bytes = cap;
        t.links.push_back(l);
        return t.links.back();
    }

    LinkConf& air(int ws, int ap) {
        LinkConf& l = link(ws, ap, sc.wlan_bps, 0.0, sc.wlan_ap_queue_bytes);
        l.is_air = true;
        l.wlan_segment = true;
        return l;
    }
    LinkConf& lan(int a, int b, bool wlan_side) {
        LinkConf& l = link(a, b, sc.lan_bps, sc.lan_delay_s, sc.core_queue_bytes);
        l.wlan_segment = wlan_side;
        return l;
    }
    LinkConf& core(int a, int b, bool umts) {
        LinkConf& l = link(a, b, sc.core_bps, sc.core_delay_s, sc.core_queue_bytes);
        l.umts_domain = umts;
        return l;
    }
};

void compute_routes(Topology& t) {
    int n = static_cast<int>(t.nodes.size());
    // Adjacency sorted by link id so BFS discovery order is stable and ties
    // between equal-length paths resolve toward the lowest link id.
    std::vector<std::vector<std::pair<int, int>>> adj(n);  // (link, peer)
    for (const auto& l : t.links) {
        adj[l.a].push_back({l.id, l.b});
        adj[l.b].push_back({l.id, l.a});
    }
    for (auto& v : adj) std::sort(v.begin(), v.end());

    t.next_link.assign(2, std::vector<std::vector<int>>(n, std::vector<int>(n, -1)));
    for (int cls = 0; cls < 2; ++cls) {
        auto allowed = [&](const LinkConf& l) {
            return cls == static_cast<int>(Dscp::Ef) ? l.ef_allowed : l.be_allowed;
        };
        for (int dst = 0; dst < n; ++dst) {
            std::vector<int> dist(n, -1);
            std::queue<int> q;
            dist[dst] = 0;
            q.push(dst);
            while (!q.empty()) {
                int u = q.front();
                q.pop();
                for (auto [lid, v] : adj[u]) {
                    if (!allowed(t.links[lid])) continue;
                    if (dist[v] != -1) continue;
                    dist[v] = dist[u] + 1;
                    // First hop from v toward dst goes over lid (v's side).
                    t.next_link[cls][v][dst] = lid;
                    q.push(v);
                }
            }
        }
    }
}

}  // namespace

Topology build_topology(const Scenario& s) {
    Builder b(s);
    Topology& t = b.t;

    t.ap = b.node(NodeKind::WlanAp, "wlan_ap");
    for (int i = 0; i < s.wlan_workstations; ++i)
        t.wlan_ws.push_back(b.node(NodeKind::Workstation, "wlan_ws" + std::to_string(i)));
    t.aaa = b.node(NodeKind::AaaServer, "aaa");
    t.hlr = b.node(NodeKind::HlrHss, "hlr_hss");
    t.internet_router = b.node(NodeKind::InternetRouter, "internet_router");
    t.ftp_server = b.node(NodeKind::FtpServer, "ftp_server");
    t.http_server = b.node(NodeKind::HttpServer, "http_server");
    t.mm_server = b.node(NodeKind::MmServer, "mm_server");
    t.billing = b.node(NodeKind::BillingSystem, "billing_system");
    t.nodeb = b.node(NodeKind::NodeB, "node_b");
    t.rnc = b.node(NodeKind::Rnc, "rnc");
    t.sgsn = b.node(NodeKind::Sgsn, "sgsn");
    t.ggsn = b.node(NodeKind::Ggsn, "ggsn");
    for (int i = 0; i < s.umts_workstations; ++i)
        t.umts_ws.push_back(b.node(NodeKind::Workstation, "umts_ws" + std::to_string(i)));

    for (int ws : t.wlan_ws) b.air(ws, t.ap);

    // Cellular side is identical in every coupling mode.
    for (int ws : t.umts_ws) {
        LinkConf& l = b.link(ws, t.nodeb, s.umts_radio_bps, s.umts_radio_delay_s,
                             s.core_queue_bytes);
        l.umts_domain = true;
    }
    b.core(t.nodeb, t.rnc, true);
    b.core(t.rnc, t.sgsn, true);
    b.core(t.sgsn, t.ggsn, true);
    b.core(t.ggsn, t.internet_router, true);
    b.core(t.sgsn, t.hlr, true);

    // Inter-operator signaling path between the WLAN-side AAA and the home
    // subscriber database. It belongs to both metric domains: it is the WLAN
    // operator's backhaul and it terminates at cellular core infrastructure.
    {
        LinkConf& l = b.link(t.aaa, t.hlr, s.hlr_link_bps, s.hlr_link_delay_s,
                             s.core_queue_bytes);
        l.wlan_segment = true;
        l.umts_domain = true;
    }

    switch (s.coupling) {
        case Coupling::Loose: {
            t.lan_switch = b.node(NodeKind::Switch, "wlan_switch");
            t.access_router = b.node(NodeKind::AccessRouter, "access_router");
            b.lan(t.ap, t.lan_switch, true);
            b.lan(t.lan_switch, t.aaa, true);
            b.lan(t.lan_switch, t.access_router, true);
            b.core(t.access_router, t.internet_router, false);
            break;
        }
        case Coupling::Tight: {
            t.apgw = b.node(NodeKind::Apgw, "apgw");
            b.lan(t.ap, t.apgw, true);
            // The 3G AAA server sits in the core in tight coupling.
            b.core(t.sgsn, t.aaa, true);
            {
                LinkConf& l = b.core(t.apgw, t.sgsn, true);
                (void)l;
            }
            break;
        }
        case Coupling::Hybrid: {
            t.apgw = b.node(NodeKind::Apgw, "apgw");
            t.access_router = b.node(NodeKind::AccessRouter, "access_router");
            b.lan(t.ap, t.apgw, true);
            b.lan(t.ap, t.aaa, true);
            // The gateway's two uplinks carry disjoint traffic classes.
            {
                LinkConf& l = b.core(t.apgw, t.sgsn, true);
                l.be_allowed = false;
            }
            {
                LinkConf& l = b.lan(t.apgw, t.access_router, true);
                l.ef_allowed = false;
            }
            b.core(t.access_router, t.internet_router, false);
            break;
        }
    }

    b.core(t.internet_router, t.ftp_server, false);
    b.core(t.internet_router, t.http_server, false);
    b.core(t.internet_router, t.mm_server, false);
    b.core(t.internet_router, t.billing, false);

    compute_routes(t);
    return t;
}

}  // namespace convsim
