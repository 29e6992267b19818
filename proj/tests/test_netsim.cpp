#include "doctest.h"

#include "convsim/authflow.hpp"
#include "convsim/netsim.hpp"
#include "convsim/simrun.hpp"

using namespace convsim;

namespace {

bool touches(const Topology& t, int link_id, int node) {
    const LinkConf& l = t.links[link_id];
    return l.a == node || l.b == node;
}

}  // namespace

TEST_CASE("loose coupling wires the hotspot through its own switch and router") {
    Scenario sc;
    sc.coupling = Coupling::Loose;
    Topology t = build_topology(sc);
    CHECK(t.apgw == -1);
    CHECK(t.lan_switch != -1);
    CHECK(t.access_router != -1);
    CHECK(t.link_between(t.ap, t.lan_switch) >= 0);
    CHECK(t.link_between(t.lan_switch, t.aaa) >= 0);
    CHECK(t.link_between(t.lan_switch, t.access_router) >= 0);
    CHECK(t.link_between(t.access_router, t.internet_router) >= 0);
    CHECK(t.link_between(t.ap, t.sgsn) == -1);
    // data to the internet side never enters the cellular core
    int hop = t.route_next(Dscp::Be, t.ap, t.ftp_server);
    CHECK(hop == t.link_between(t.ap, t.lan_switch));
}

TEST_CASE("tight coupling routes hotspot traffic through the cellular core") {
    Scenario sc;
    sc.coupling = Coupling::Tight;
    Topology t = build_topology(sc);
    CHECK(t.apgw != -1);
    CHECK(t.access_router == -1);
    CHECK(t.lan_switch == -1);
    CHECK(t.link_between(t.ap, t.apgw) >= 0);
    CHECK(t.link_between(t.apgw, t.sgsn) >= 0);
    CHECK(t.link_between(t.sgsn, t.aaa) >= 0);
    CHECK(t.route_next(Dscp::Be, t.apgw, t.ftp_server) ==
          t.link_between(t.apgw, t.sgsn));
    CHECK(t.route_next(Dscp::Ef, t.apgw, t.mm_server) ==
          t.link_between(t.apgw, t.sgsn));
}

TEST_CASE("hybrid coupling splits the gateway uplinks by class") {
    Scenario sc;  // hybrid is the default
    Topology t = build_topology(sc);
    CHECK(t.apgw != -1);
    CHECK(t.access_router != -1);

    int up_sgsn = t.link_between(t.apgw, t.sgsn);
    int up_ar = t.link_between(t.apgw, t.access_router);
    REQUIRE(up_sgsn >= 0);
    REQUIRE(up_ar >= 0);
    CHECK(t.links[up_sgsn].ef_allowed);
    CHECK(!t.links[up_sgsn].be_allowed);
    CHECK(!t.links[up_ar].ef_allowed);
    CHECK(t.links[up_ar].be_allowed);

    // uplink: expedited media via the cellular side, bulk via the router
    CHECK(t.route_next(Dscp::Ef, t.apgw, t.mm_server) == up_sgsn);
    CHECK(t.route_next(Dscp::Be, t.apgw, t.ftp_server) == up_ar);
    // downlink fork at the internet router obeys the same split
    CHECK(t.route_next(Dscp::Ef, t.internet_router, t.wlan_ws[0]) ==
          t.link_between(t.internet_router, t.ggsn));
    CHECK(t.route_next(Dscp::Be, t.internet_router, t.wlan_ws[0]) ==
          t.link_between(t.internet_router, t.access_router));
}

TEST_CASE("every coupling keeps the signaling path and the radio legs") {
    for (Coupling c : {Coupling::Loose, Coupling::Tight, Coupling::Hybrid}) {
        CAPTURE(to_string(c));
        Scenario sc;
        sc.coupling = c;
        Topology t = build_topology(sc);

        int sig = t.link_between(t.aaa, t.hlr);
        REQUIRE(sig >= 0);
        CHECK(t.links[sig].wlan_segment);
        CHECK(t.links[sig].umts_domain);

        REQUIRE(t.wlan_ws.size() == 10);
        REQUIRE(t.umts_ws.size() == 10);
        for (int ws : t.wlan_ws) {
            int l = t.link_between(ws, t.ap);
            REQUIRE(l >= 0);
            CHECK(t.links[l].is_air);
            CHECK(t.links[l].wlan_segment);
        }
        for (int ue : t.umts_ws) {
            int l = t.link_between(ue, t.nodeb);
            REQUIRE(l >= 0);
            CHECK(t.links[l].umts_domain);
            CHECK(!t.links[l].is_air);
        }
        CHECK(t.link_between(t.sgsn, t.hlr) >= 0);
        CHECK(t.link_between(t.nodeb, t.rnc) >= 0);
        CHECK(t.link_between(t.rnc, t.sgsn) >= 0);
        CHECK(t.link_between(t.sgsn, t.ggsn) >= 0);
        CHECK(t.link_between(t.ggsn, t.internet_router) >= 0);
    }
}

TEST_CASE("idle wired path delivers in exactly the store-and-forward time") {
    Scenario sc;
    Topology topo = build_topology(sc);
    SimEngine eng;
    Network net(eng, 7, sc, topo);

    Packet delivered;
    double t_del = -1;
    net.on_delivered = [&](const Packet& p) {
        delivered = p;
        t_del = eng.now();
    };

    Packet p;
    p.src = topo.umts_ws[0];
    p.dst = topo.mm_server;
    p.size_bytes = 1200;
    p.kind = PacketKind::Mm;
    net.inject(p);
    eng.run_until(5.0);

    REQUIRE(t_del >= 0);
    // Walk the route the way the network does: per hop, serialization then
    // propagation, accumulated in the same order.
    double expect = 0;
    int at = topo.umts_ws[0];
    int hops = 0;
    while (at != topo.mm_server) {
        int lid = topo.route_next(Dscp::Ef, at, topo.mm_server);
        REQUIRE(lid >= 0);
        const LinkConf& l = topo.links[lid];
        expect += 1200 * 8.0 / l.bps;
        expect += l.delay_s;
        at = (l.a == at) ? l.b : l.a;
        ++hops;
    }
    CHECK(hops == 6);
    CHECK(t_del == doctest::Approx(expect).epsilon(1e-12));

    REQUIRE(delivered.hops.size() == static_cast<size_t>(hops + 1));
    CHECK(delivered.hops.front().node == topo.umts_ws[0]);
    CHECK(delivered.hops.back().node == topo.mm_server);
    for (size_t i = 1; i < delivered.hops.size(); ++i)
        CHECK(delivered.hops[i].at >= delivered.hops[i - 1].at);
    CHECK(delivered.crossed_umts);
    CHECK(!delivered.crossed_air);
    CHECK((delivered.node_mask & kind_bit(NodeKind::Sgsn)) != 0);
    CHECK((delivered.node_mask & kind_bit(NodeKind::Ggsn)) != 0);
    CHECK(net.live_packets() == 0);
    CHECK(net.counters(PacketKind::Mm).delivered == 1);
}

TEST_CASE("idle air hop costs serialization plus at most the minimum window") {
    Scenario sc;
    Topology topo = build_topology(sc);
    SimEngine eng;
    Network net(eng, 11, sc, topo);

    double t_del = -1;
    net.on_delivered = [&](const Packet&) { t_del = eng.now(); };

    Packet p;
    p.src = topo.wlan_ws[0];
    p.dst = topo.aaa;
    p.size_bytes = 1100;
    p.kind = PacketKind::Auth;
    net.inject(p);
    eng.run_until(1.0);

    REQUIRE(t_del >= 0);
    double floor_t = 1100 * 8.0 / sc.wlan_bps        // air serialization
                     + 1100 * 8.0 / sc.lan_bps       // hotspot LAN hop
                     + sc.lan_delay_s;
    double ceil_t = floor_t + sc.wlan_cw_min * sc.wlan_slot_s;
    CHECK(t_del >= floor_t);
    CHECK(t_del <= ceil_t);
    CHECK(net.air_busy_prob() == 0.0);
}

TEST_CASE("cell hold defers data frames but lets authentication through") {
    Scenario sc;
    Topology topo = build_topology(sc);
    SimEngine eng;
    Network net(eng, 3, sc, topo);

    bool mm_done = false, auth_done = false;
    net.on_delivered = [&](const Packet& p) {
        if (p.kind == PacketKind::Mm) mm_done = true;
        if (p.kind == PacketKind::Auth) auth_done = true;
    };

    net.begin_auth_hold();
    CHECK(net.cell_held());

    Packet data;
    data.src = topo.ap;
    data.dst = topo.wlan_ws[0];
    data.size_bytes = 900;
    data.kind = PacketKind::Mm;
    net.inject(data);

    Packet frame;
    frame.src = topo.wlan_ws[1];
    frame.dst = topo.aaa;
    frame.size_bytes = 200;
    frame.kind = PacketKind::Auth;
    net.inject(frame);

    eng.run_until(1.0);
    CHECK(auth_done);
    CHECK(!mm_done);

    net.end_auth_hold();
    CHECK(!net.cell_held());
    eng.run_until(2.0);
    CHECK(mm_done);
}

TEST_CASE("cell hold is a no-op when the pause knob is off") {
    Scenario sc;
    sc.cell_pause = false;
    Topology topo = build_topology(sc);
    SimEngine eng;
    Network net(eng, 3, sc, topo);

    bool mm_done = false;
    net.on_delivered = [&](const Packet& p) {
        if (p.kind == PacketKind::Mm) mm_done = true;
    };
    net.begin_auth_hold();
    CHECK(!net.cell_held());
    Packet data;
    data.src = topo.ap;
    data.dst = topo.wlan_ws[0];
    data.size_bytes = 900;
    data.kind = PacketKind::Mm;
    net.inject(data);
    eng.run_until(1.0);
    CHECK(mm_done);
    net.end_auth_hold();
}

TEST_CASE("sensed busy probability follows the offered window, capped") {
    Scenario sc;
    Topology topo = build_topology(sc);
    SimEngine eng;
    Network net(eng, 5, sc, topo);
    CHECK(net.air_busy_prob() == 0.0);

    auto offer = [&](int n) {
        for (int i = 0; i < n; ++i) {
            Packet p;
            p.src = topo.ap;
            p.dst = topo.wlan_ws[0];
            p.size_bytes = 1375;  // 11000 bits each
            p.kind = PacketKind::Auth;  // immune to the downlink byte cap
            net.inject(p);
        }
    };

    offer(200);  // 2.2 Mbit offered in this window
    net.rotate_windows();
    CHECK(net.air_busy_prob() == doctest::Approx(0.2).epsilon(1e-9));

    // windows reset: nothing offered since the last rotation
    net.rotate_windows();
    CHECK(net.air_busy_prob() == 0.0);

    offer(2000);  // 22 Mbit, twice the air rate: clamped
    net.rotate_windows();
    CHECK(net.air_busy_prob() == doctest::Approx(sc.wlan_busy_cap));
}

TEST_CASE("overload drops land on the cellular side only under tight coupling") {
    auto blast = [](Coupling coupling, PacketKind kind, uint64_t* adjacent,
                    uint64_t* elsewhere) {
        Scenario sc;
        sc.coupling = coupling;
        sc.core_bps = 1e6;  // shrink the core so a burst overflows one queue
        Topology topo = build_topology(sc);
        SimEngine eng;
        Network net(eng, 9, sc, topo);
        *adjacent = 0;
        *elsewhere = 0;
        net.on_dropped = [&](const Packet&, int link_id) {
            if (touches(net.topo(), link_id, net.topo().sgsn))
                ++*adjacent;
            else
                ++*elsewhere;
        };
        for (int i = 0; i < 300; ++i) {
            Packet p;
            p.src = topo.ggsn;
            p.dst = topo.wlan_ws[0];
            p.size_bytes = 1500;
            p.kind = kind;
            net.inject(p);
        }
        eng.run_until(60.0);
    };

    uint64_t adj = 0, other = 0;
    // Tight: the only route runs through the SGSN, so the overflowing queue
    // is adjacent to it. Media frames are not retransmitted.
    blast(Coupling::Tight, PacketKind::Mm, &adj, &other);
    CHECK(adj > 0);
    CHECK(other == 0);

    // Hybrid: best effort detours via the access router and the drops move
    // off the cellular core. Billing records are not retransmitted either.
    blast(Coupling::Hybrid, PacketKind::Billing, &adj, &other);
    CHECK(adj == 0);
    CHECK(other > 0);
}

TEST_CASE("single isolated session message counts per kind") {
    for (SimProtocol proto : {SimProtocol::Aka, SimProtocol::EcdhAka}) {
        CAPTURE(to_string(proto));
        AuthSessionStats eap = measure_auth_session(AuthKind::WlanEap, proto,
                                                    Coupling::Loose);
        CHECK(eap.completed);
        CHECK(eap.messages == 5);
        CHECK(eap.resyncs == 0);
        CHECK(eap.consults == (proto == SimProtocol::Aka ? 1 : 0));
        CHECK(eap.finished > eap.started);
    }
    AuthSessionStats open_net =
        measure_auth_session(AuthKind::WlanOpen, SimProtocol::Aka, Coupling::Loose);
    CHECK(open_net.completed);
    CHECK(open_net.messages == 3);

    AuthSessionStats attach = measure_auth_session(AuthKind::UmtsAttach,
                                                   SimProtocol::Aka, Coupling::Loose);
    CHECK(attach.completed);
    CHECK(attach.messages == 11);
    CHECK(attach.finished > attach.started);
}

TEST_CASE("short full run conserves packets and finishes its bookkeeping") {
    Scenario sc;
    sc.duration_s = 40;
    sc.traffic_stop_s = 30;
    sc.seed = 2;
    RunResult r = run_simulation(sc);

    uint64_t sent = 0, delivered = 0, dropped = 0;
    uint64_t sent_b = 0, delivered_b = 0, dropped_b = 0;
    for (const KindCounters& c : r.counters) {
        sent += c.sent;
        delivered += c.delivered;
        dropped += c.dropped;
        sent_b += c.sent_bytes;
        delivered_b += c.delivered_bytes;
        dropped_b += c.dropped_bytes;
    }
    CHECK(sent > 0);
    CHECK(sent == delivered + dropped + r.live_at_end);
    CHECK(sent_b >= delivered_b + dropped_b);
    CHECK(r.events > 0);

    CHECK(r.auth_sessions > 0);
    CHECK(r.auth_completed > 0);
    for (int m : r.auth_messages) CHECK(m >= 3);
    CHECK(r.traffic.mm_packets > 0);
    CHECK(r.traffic.billing_records > 0);

    // the class fork stayed clean for everything that crossed the gateway
    CHECK(r.purity.ef_total > 0);
    CHECK(r.purity.ef_ok == r.purity.ef_total);
    CHECK(r.purity.be_total > 0);
    CHECK(r.purity.be_ok == r.purity.be_total);

    RunResult again = run_simulation(sc);
    CHECK(again.trace_hash == r.trace_hash);
    CHECK(again.events == r.events);
}

TEST_CASE("metric series come out of a run on the one-second cadence") {
    Scenario sc;
    sc.duration_s = 12;
    sc.traffic_stop_s = 10;
    RunResult r = run_simulation(sc);
    for (const char* id : kMetricIds) {
        CAPTURE(id);
        REQUIRE(r.series.count(id) == 1);
        const MetricSeries& s = r.series.at(id);
        CHECK(s.metric_id == id);
        REQUIRE(!s.samples.empty());
        CHECK(s.samples.front().t == doctest::Approx(1.0));
        for (size_t i = 1; i < s.samples.size(); ++i)
            CHECK(s.samples[i].t - s.samples[i - 1].t == doctest::Approx(1.0));
    }
}
