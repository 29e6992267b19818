#include "convsim/simrun.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace convsim {

std::string code_version() { return "convsim 0.1.0"; }

RunResult run_simulation(const Scenario& sc) {
    SimEngine eng;
    Network net(eng, Rng::derive_seed(sc.seed, "air"), sc, build_topology(sc));
    TrafficManager traffic(eng, net, sc, Rng::derive_seed(sc.seed, "traffic"));
    AuthManager auth(eng, net, sc, Rng::derive_seed(sc.seed, "auth"));
    MetricsHub hub(eng, net, sc);

    RunResult r;
    r.scenario = sc;
    const Topology& topo = net.topo();
    uint32_t apgw_bit = kind_bit(NodeKind::Apgw);
    uint32_t sgsn_bit = kind_bit(NodeKind::Sgsn);
    uint32_t ar_bit = kind_bit(NodeKind::AccessRouter);

    net.on_injected = [&](const Packet& p) { hub.packet_injected(p); };
    net.on_air_access_delay = [&](double d) { hub.air_access_delay(d); };
    net.on_delivered = [&](const Packet& p) {
        hub.packet_delivered(p);
        if (p.node_mask & apgw_bit) {
            if (p.dscp == Dscp::Ef) {
                r.purity.ef_total++;
                if ((p.node_mask & sgsn_bit) && !(p.node_mask & ar_bit))
                    r.purity.ef_ok++;
            } else {
                r.purity.be_total++;
                if ((p.node_mask & ar_bit) && !(p.node_mask & sgsn_bit))
                    r.purity.be_ok++;
            }
        }
        if (p.kind == PacketKind::Auth) auth.on_delivered(p);
        else traffic.on_delivered(p);
    };
    net.on_dropped = [&](const Packet& p, int link_id) {
        (void)p;
        const LinkConf& l = topo.links[link_id];
        if (l.a == topo.sgsn || l.b == topo.sgsn) r.sgsn_adjacent_drops++;
    };

    traffic.start();
    auth.start();
    hub.start();
    eng.run_until(sc.duration_s);

    r.series = hub.take_series();
    for (int k = 0; k < 5; ++k)
        r.counters[k] = net.counters(static_cast<PacketKind>(k));
    r.live_at_end = net.live_packets();
    r.events = eng.executed();
    r.trace_hash = eng.trace_hash();

    for (const AuthSessionStats& s : auth.completed_log()) {
        r.auth_sessions++;
        if (s.completed) r.auth_completed++;
        r.auth_messages.push_back(s.messages);
    }
    r.auth_sessions += static_cast<int>(auth.active_sessions());
    r.auth_resyncs = auth.total_resyncs();
    r.auth_consults = auth.total_consults();
    r.traffic = traffic.totals();
    r.open_transfers = traffic.open_transfers();
    return r;
}

void write_run_output(const RunResult& r, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    for (const char* id : kMetricIds)
        write_csv_file(out_dir + "/" + id + ".csv", r.series.at(id));

    {
        std::ofstream f(out_dir + "/manifest.txt", std::ios::binary);
        if (!f) throw std::runtime_error("cannot write manifest");
        std::string m = render_manifest(r.scenario, code_version());
        f.write(m.data(), static_cast<std::streamsize>(m.size()));
    }

    std::string s;
    char buf[256];
    auto add = [&](const char* fmt, auto... args) {
        std::snprintf(buf, sizeof buf, fmt, args...);
        s += buf;
    };
    add("run summary (%s)\n", code_version().c_str());
    add("  protocol: %s   coupling: %s   seed: %" PRIu64 "   duration_s: %g\n",
        to_string(r.scenario.protocol), to_string(r.scenario.coupling),
        r.scenario.seed, r.scenario.duration_s);
    add("  events: %" PRIu64 "   trace_hash: %016" PRIx64
        "   live packets at end: %" PRIu64 "\n\n",
        r.events, r.trace_hash, r.live_at_end);

    s += "packets (sent / delivered / dropped, bytes in parens):\n";
    static const char* kind_names[5] = {"auth", "ftp", "http", "mm", "billing"};
    for (int k = 0; k < 5; ++k) {
        const KindCounters& c = r.counters[k];
        add("  %-8s %8" PRIu64 " / %8" PRIu64 " / %6" PRIu64
            "   (%" PRIu64 " / %" PRIu64 " / %" PRIu64 ")\n",
            kind_names[k], c.sent, c.delivered, c.dropped, c.sent_bytes,
            c.delivered_bytes, c.dropped_bytes);
    }

    int msg_min = 0, msg_max = 0;
    if (!r.auth_messages.empty()) {
        auto [lo, hi] =
            std::minmax_element(r.auth_messages.begin(), r.auth_messages.end());
        msg_min = *lo;
        msg_max = *hi;
    }
    add("\nauthentication: %d sessions, %d completed, %d resyncs, "
        "%d store consults, messages per session %d..%d\n",
        r.auth_sessions, r.auth_completed, r.auth_resyncs, r.auth_consults,
        msg_min, msg_max);
    add("traffic: ftp %" PRIu64 "/%" PRIu64 "  http %" PRIu64 "/%" PRIu64
        "  umts pages %" PRIu64 "/%" PRIu64
        "  mm packets %" PRIu64 "  billing %" PRIu64
        "  open transfers %zu\n",
        r.traffic.ftp_started, r.traffic.ftp_completed, r.traffic.http_started,
        r.traffic.http_completed, r.traffic.umts_pages_started,
        r.traffic.umts_pages_completed, r.traffic.mm_packets,
        r.traffic.billing_records, r.open_transfers);

    if (r.scenario.coupling == Coupling::Hybrid) {
        add("gateway class separation: EF %" PRIu64 "/%" PRIu64
            " via SGSN side, BE %" PRIu64 "/%" PRIu64 " via access-router side\n",
            r.purity.ef_ok, r.purity.ef_total, r.purity.be_ok,
            r.purity.be_total);
    }
    add("drops on SGSN-adjacent links: %" PRIu64 "\n\n", r.sgsn_adjacent_drops);

    s += "final time-averages:\n";
    for (const char* id : kMetricIds)
        add("  %-28s %.6g\n", id, final_time_average(r.series.at(id)));

    std::ofstream f(out_dir + "/run_summary.txt", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write run summary");
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
}

}  // namespace convsim
