#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "convsim/netsim.hpp"

namespace convsim {

// Application sources. Session start times come from per-stream generator
// clocks that never look at network state, so two runs that differ only in
// the authentication method offer byte-identical application workloads.
// Transfers are open-loop: a server paces a response out at a fixed rate
// once the request arrives, and lost FTP/HTTP segments are recovered by the
// network's source-retransmission timeout. Media streaming is constant-rate
// and unacknowledged; billing records are fire-and-forget.
class TrafficManager {
public:
    TrafficManager(SimEngine& eng, Network& net, const Scenario& sc, uint64_t seed);
    TrafficManager(const TrafficManager&) = delete;
    TrafficManager& operator=(const TrafficManager&) = delete;

    // Schedules every source. Sources emit from shortly after t=0 until
    // traffic.traffic_stop_s so the tail can drain before the run ends.
    void start();

    // Data-plane deliveries (everything except authentication signaling).
    void on_delivered(const Packet& pkt);

    struct Totals {
        uint64_t ftp_started = 0, ftp_completed = 0;
        uint64_t http_started = 0, http_completed = 0;
        uint64_t umts_pages_started = 0, umts_pages_completed = 0;
        uint64_t mm_packets = 0;
        uint64_t billing_records = 0;
        double last_completion = 0;
    };
    const Totals& totals() const { return totals_; }

    // Open transfers still waiting for data at the end of a run.
    size_t open_transfers() const { return flows_.size(); }

private:
    struct FlowPlan {
        int client, server;
        PacketKind kind;
        uint32_t packets;      // response segments
        uint64_t bytes;        // response payload total
        double pace_bps;
        std::vector<bool> got;
        uint32_t got_count = 0;
        bool is_umts = false;
    };

    void start_transfer(int client, int server, PacketKind kind, uint64_t bytes,
                        double pace_bps, bool is_umts);
    void serve_response(uint64_t flow, FlowPlan& plan);
    void send_chunks(int src, int dst, PacketKind kind, uint64_t flow,
                     uint64_t bytes, uint32_t first_seq);

    SimEngine& eng_;
    Network& net_;
    const Scenario& sc_;
    double stop_;
    std::vector<Rng> rngs_;
    std::map<uint64_t, FlowPlan> flows_;
    Totals totals_;
};

}  // namespace convsim
