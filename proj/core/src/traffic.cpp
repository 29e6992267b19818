#include "convsim/traffic.hpp"

#include <algorithm>
#include <string>

namespace convsim {

TrafficManager::TrafficManager(SimEngine& eng, Network& net, const Scenario& sc,
                               uint64_t seed)
    : eng_(eng), net_(net), sc_(sc) {
    stop_ = std::min(sc.traffic_stop_s, sc.duration_s);
    // One stream per (application, station) pair. Indices are assigned in a
    // fixed order; the streams never interleave draws, so adding an event to
    // one application cannot shift another application's schedule.
    auto add = [&](const std::string& label, int i) {
        rngs_.emplace_back(Rng::derive_seed(seed, label + "-" + std::to_string(i)));
    };
    for (int i = 0; i < sc.wlan_workstations; ++i) add("ftp", i);
    for (int i = 0; i < sc.wlan_workstations; ++i) add("http", i);
    for (int i = 0; i < sc.wlan_workstations; ++i) add("mm", i);
    for (int i = 0; i < sc.umts_workstations; ++i) add("umts-http", i);
    for (int i = 0; i < sc.wlan_workstations + sc.umts_workstations; ++i)
        add("billing", i);
}

void TrafficManager::start() {
    const Topology& t = net_.topo();
    int n_wlan = sc_.wlan_workstations;
    int n_umts = sc_.umts_workstations;
    int r = 0;

    // FTP: exponential inter-session gaps per WLAN client.
    for (int i = 0; i < n_wlan; ++i, ++r) {
        int idx = r;
        int client = t.wlan_ws[i];
        double t0 = 5.0 + rngs_[idx].uniform() * sc_.ftp_interval_s;
        // Chained scheduling keeps the pending-event set small.  The gap to
        // the next session starts after the nominal transfer time, so each
        // client runs at most one paced file at a time and the worst-case
        // offered load stays bounded by client count.
        struct Chain {
            TrafficManager* m;
            int idx, client;
            double nominal_s;
            void operator()(double at) {
                if (at >= m->stop_) return;
                m->eng_.schedule(at, [this_ = *this, at] {
                    Chain c = this_;
                    c.m->totals_.ftp_started++;
                    c.m->start_transfer(c.client, c.m->net_.topo().ftp_server,
                                        PacketKind::Ftp,
                                        static_cast<uint64_t>(c.m->sc_.ftp_file_bytes),
                                        c.m->sc_.ftp_pace_bps, false);
                    c(at + c.nominal_s +
                      c.m->rngs_[c.idx].exponential(c.m->sc_.ftp_interval_s));
                });
            }
        };
        double nominal = sc_.ftp_file_bytes * 8.0 / sc_.ftp_pace_bps;
        Chain{this, idx, client, nominal}(t0);
    }

    // HTTP: think time plus nominal page time between fetches.
    double page_bytes = sc_.http_page_bytes + sc_.http_objects * sc_.http_object_bytes;
    double page_time = page_bytes * 8.0 / sc_.http_pace_bps;
    for (int i = 0; i < n_wlan; ++i, ++r) {
        int idx = r;
        int client = t.wlan_ws[i];
        struct Chain {
            TrafficManager* m;
            int idx, client;
            uint64_t bytes;
            double page_time;
            void operator()(double at) {
                if (at >= m->stop_) return;
                m->eng_.schedule(at, [this_ = *this, at] {
                    Chain c = this_;
                    c.m->totals_.http_started++;
                    c.m->start_transfer(c.client, c.m->net_.topo().http_server,
                                        PacketKind::Http, c.bytes,
                                        c.m->sc_.http_pace_bps, false);
                    c(at + c.page_time +
                      c.m->rngs_[c.idx].exponential(c.m->sc_.http_think_s));
                });
            }
        };
        double t0 = 3.0 + rngs_[idx].uniform() * sc_.http_think_s;
        Chain{this, idx, client, static_cast<uint64_t>(page_bytes), page_time}(t0);
    }

    // Media: constant-rate downlink stream to every WLAN client.
    double mm_dt = sc_.mm_packet_bytes * 8.0 / sc_.mm_rate_bps;
    for (int i = 0; i < n_wlan; ++i, ++r) {
        int client = t.wlan_ws[i];
        uint64_t flow = net_.new_flow();
        struct Chain {
            TrafficManager* m;
            int client;
            uint64_t flow;
            double dt;
            uint32_t seq;
            void operator()(double at) {
                if (at >= m->stop_) return;
                m->eng_.schedule(at, [this_ = *this, at] {
                    Chain c = this_;
                    Packet p;
                    p.flow = c.flow;
                    p.seq = c.seq;
                    p.src = c.m->net_.topo().mm_server;
                    p.dst = c.client;
                    p.size_bytes = c.m->sc_.mm_packet_bytes;
                    p.kind = PacketKind::Mm;
                    c.m->totals_.mm_packets++;
                    c.m->net_.inject(std::move(p));
                    c.seq++;
                    c(at + c.dt);
                });
            }
        };
        Chain{this, client, flow, mm_dt, 0}(1.0 + 0.05 * i);
    }

    // UMTS web browsing through the cellular core.
    for (int i = 0; i < n_umts; ++i, ++r) {
        int idx = r;
        int client = t.umts_ws[i];
        double umts_page_time = sc_.umts_http_page_bytes * 8.0 / sc_.umts_http_pace_bps;
        struct Chain {
            TrafficManager* m;
            int idx, client;
            double page_time;
            void operator()(double at) {
                if (at >= m->stop_) return;
                m->eng_.schedule(at, [this_ = *this, at] {
                    Chain c = this_;
                    c.m->totals_.umts_pages_started++;
                    c.m->start_transfer(c.client, c.m->net_.topo().http_server,
                                        PacketKind::Http,
                                        static_cast<uint64_t>(c.m->sc_.umts_http_page_bytes),
                                        c.m->sc_.umts_http_pace_bps, true);
                    c(at + c.page_time +
                      c.m->rngs_[c.idx].exponential(c.m->sc_.umts_http_think_s));
                });
            }
        };
        double t0 = 6.0 + rngs_[idx].uniform() * sc_.umts_http_think_s;
        Chain{this, idx, client, umts_page_time}(t0);
    }

    // Billing: periodic usage records from every station.
    std::vector<int> all_ws = t.wlan_ws;
    all_ws.insert(all_ws.end(), t.umts_ws.begin(), t.umts_ws.end());
    for (size_t i = 0; i < all_ws.size(); ++i, ++r) {
        int idx = r;
        int client = all_ws[i];
        struct Chain {
            TrafficManager* m;
            int idx, client;
            void operator()(double at) {
                if (at >= m->stop_) return;
                m->eng_.schedule(at, [this_ = *this, at] {
                    Chain c = this_;
                    c.m->totals_.billing_records++;
                    uint64_t flow = c.m->net_.new_flow();
                    c.m->send_chunks(c.client, c.m->net_.topo().billing,
                                     PacketKind::Billing, flow,
                                     static_cast<uint64_t>(c.m->sc_.billing_bytes), 0);
                    c(at + c.m->sc_.billing_interval_s);
                });
            }
        };
        double t0 = 10.0 + rngs_[idx].uniform() * sc_.billing_interval_s;
        Chain{this, idx, client}(t0);
    }
}

void TrafficManager::start_transfer(int client, int server, PacketKind kind,
                                    uint64_t bytes, double pace_bps, bool is_umts) {
    uint64_t flow = net_.new_flow();
    FlowPlan plan;
    plan.client = client;
    plan.server = server;
    plan.kind = kind;
    plan.bytes = bytes;
    plan.pace_bps = pace_bps;
    plan.packets = static_cast<uint32_t>((bytes + sc_.packet_bytes - 1) / sc_.packet_bytes);
    plan.got.assign(plan.packets, false);
    plan.is_umts = is_umts;
    flows_.emplace(flow, std::move(plan));

    Packet req;
    req.flow = flow;
    req.seq = 0;
    req.src = client;
    req.dst = server;
    req.size_bytes = sc_.request_bytes;
    req.kind = kind;
    net_.inject(std::move(req));
}

void TrafficManager::serve_response(uint64_t flow, FlowPlan& plan) {
    double dt = sc_.packet_bytes * 8.0 / plan.pace_bps;
    uint64_t remaining = plan.bytes;
    double at = eng_.now();
    for (uint32_t k = 0; k < plan.packets; ++k) {
        uint32_t sz = static_cast<uint32_t>(
            std::min<uint64_t>(remaining, sc_.packet_bytes));
        remaining -= sz;
        Packet p;
        p.flow = flow;
        p.seq = k + 1;
        p.src = plan.server;
        p.dst = plan.client;
        p.size_bytes = sz;
        p.kind = plan.kind;
        eng_.schedule(at, [this, p = std::move(p)]() mutable { net_.inject(std::move(p)); });
        at += dt;
    }
}

void TrafficManager::send_chunks(int src, int dst, PacketKind kind, uint64_t flow,
                                 uint64_t bytes, uint32_t first_seq) {
    uint32_t seq = first_seq;
    while (bytes > 0) {
        uint32_t sz = static_cast<uint32_t>(std::min<uint64_t>(bytes, sc_.packet_bytes));
        bytes -= sz;
        Packet p;
        p.flow = flow;
        p.seq = seq++;
        p.src = src;
        p.dst = dst;
        p.size_bytes = sz;
        p.kind = kind;
        net_.inject(std::move(p));
    }
}

void TrafficManager::on_delivered(const Packet& pkt) {
    auto it = flows_.find(pkt.flow);
    if (it == flows_.end()) return;
    FlowPlan& plan = it->second;

    if (pkt.seq == 0) {
        // Request reached the server: pace the response out.
        if (pkt.dst == plan.server) serve_response(pkt.flow, plan);
        return;
    }
    if (pkt.dst != plan.client) return;
    uint32_t i = pkt.seq - 1;
    if (i >= plan.packets || plan.got[i]) return;  // duplicate after retransmit
    plan.got[i] = true;
    if (++plan.got_count < plan.packets) return;

    if (plan.kind == PacketKind::Ftp) totals_.ftp_completed++;
    else if (plan.is_umts) totals_.umts_pages_completed++;
    else totals_.http_completed++;
    totals_.last_completion = eng_.now();
    flows_.erase(it);
}

}  // namespace convsim
