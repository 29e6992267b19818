#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "convsim/bytes.hpp"
#include "convsim/engine.hpp"
#include "convsim/rng.hpp"
#include "convsim/scenario.hpp"

namespace convsim {

enum class NodeKind {
    Workstation,
    WlanAp,
    Apgw,
    AccessRouter,
    NodeB,
    Rnc,
    Sgsn,
    Ggsn,
    AaaServer,
    HlrHss,
    FtpServer,
    HttpServer,
    MmServer,
    BillingSystem,
    InternetRouter,
    Switch,
};
const char* to_string(NodeKind k);

enum class Dscp : uint8_t { Ef, Be };
enum class PacketKind : uint8_t { Auth, Ftp, Http, Mm, Billing };
const char* to_string(PacketKind k);

// Expedited forwarding for the real-time media class, best effort otherwise.
Dscp dscp_for(PacketKind k);

struct Node {
    int id;
    NodeKind kind;
    std::string name;
};

struct LinkConf {
    int id, a, b;
    double bps;
    double delay_s;
    size_t queue_cap_bytes;
    bool is_air = false;        // shares the single WLAN cell medium
    bool wlan_segment = false;  // counts toward the WLAN-side load metric
    bool umts_domain = false;   // counts toward the UMTS-side metrics
    bool ef_allowed = true;     // routing class restrictions (gateway fork)
    bool be_allowed = true;
};

struct Hop {
    int node;
    double at;
};

struct Packet {
    uint64_t id = 0;
    uint64_t flow = 0;
    uint32_t seq = 0;
    int src = -1, dst = -1;
    uint32_t size_bytes = 0;
    PacketKind kind = PacketKind::Ftp;
    Dscp dscp = Dscp::Be;
    double created_at = 0;
    bool retx = false;
    bool crossed_air = false;
    bool crossed_umts = false;
    uint32_t node_mask = 0;  // OR of (1 << NodeKind) for every node visited
    Bytes payload;           // wire bytes for protocol frames, empty for data
    std::vector<Hop> hops;
};

inline uint32_t kind_bit(NodeKind k) { return 1u << static_cast<int>(k); }

struct Topology {
    std::vector<Node> nodes;
    std::vector<LinkConf> links;

    // Well-known nodes; -1 when the coupling mode does not include them.
    int ap = -1, aaa = -1, hlr = -1, apgw = -1, access_router = -1;
    int sgsn = -1, ggsn = -1, rnc = -1, nodeb = -1, internet_router = -1;
    int lan_switch = -1;
    int ftp_server = -1, http_server = -1, mm_server = -1, billing = -1;
    std::vector<int> wlan_ws, umts_ws;

    // next_link[dscp][from][dst] -> link id (-1 unreachable).
    std::vector<std::vector<std::vector<int>>> next_link;

    int link_between(int a, int b) const;  // -1 when not adjacent
    int route_next(Dscp d, int from, int dst) const {
        return next_link[static_cast<int>(d)][from][dst];
    }
};

// Builds the node/link graph for the requested coupling mode and computes
// per-class shortest-path routes (BFS by hop count, ties resolved toward the
// lowest link id). In Hybrid mode the gateway's uplink pair is class-split:
// EF never uses the AccessRouter uplink, BE never uses the SGSN uplink.
Topology build_topology(const Scenario& s);

struct LinkStats {
    uint64_t arrived_bytes = 0;    // offered, counted before any drop
    uint64_t delivered_bytes = 0;  // counted when the far end receives
    uint64_t dropped_packets = 0;
    uint64_t dropped_bytes = 0;
    uint64_t win_arrived_bytes = 0;  // since the last window rotation
    uint64_t win_delivered_bytes = 0;
};

struct KindCounters {
    uint64_t sent = 0, delivered = 0, dropped = 0;
    uint64_t sent_bytes = 0, delivered_bytes = 0, dropped_bytes = 0;
};

// Store-and-forward packet network driven by a SimEngine. Wired links are
// full duplex with per-direction FIFO byte-capped queues; overflow drops the
// arriving packet. All WLAN air links share one cell: a single transmission
// at a time, contention backoff drawn against the sensed busy probability,
// and a byte-capped downlink buffer at the AP. Lost FTP/HTTP packets are
// re-injected at the source after a fixed timeout; authentication frames ride
// a management queue that is never dropped.
class Network {
public:
    Network(SimEngine& eng, uint64_t air_seed, const Scenario& sc, Topology topo);
    Network(const Network&) = delete;
    Network& operator=(const Network&) = delete;

    uint64_t new_flow() { return next_flow_++; }

    // Stamps id/creation time/first hop and routes from p.src. The packet
    // must have src, dst, size_bytes, kind set; dscp is derived from kind.
    void inject(Packet p);

    // While held (and auth.cell_pause is on), the cell defers data frames;
    // authentication frames still flow. Calls nest.
    void begin_auth_hold();
    void end_auth_hold();
    bool cell_held() const { return hold_depth_ > 0 && sc_.cell_pause; }

    // Rotates per-link byte windows and re-estimates the cell busy
    // probability from the finished window. Called on the metric cadence.
    void rotate_windows();

    std::function<void(const Packet&)> on_delivered;
    std::function<void(const Packet&, int link_id)> on_dropped;
    std::function<void(const Packet&)> on_injected;
    std::function<void(double)> on_air_access_delay;

    const Topology& topo() const { return topo_; }
    const std::vector<LinkStats>& link_stats() const { return stats_; }
    const KindCounters& counters(PacketKind k) const {
        return counters_[static_cast<int>(k)];
    }
    uint64_t live_packets() const { return live_; }
    double air_busy_prob() const { return busy_prob_; }
    SimEngine& engine() { return eng_; }

private:
    struct DirState {
        std::deque<Packet> q;
        size_t q_bytes = 0;
        bool busy = false;
    };
    struct WiredLink {
        DirState dir[2];  // 0: a->b, 1: b->a
    };
    struct AirFrame {
        Packet pkt;
        double ready;
        bool downlink;  // AP -> workstation
        int ws_index;   // uplink owner, -1 for downlink
        int link_id;
    };
    struct AirQueue {
        std::deque<AirFrame> q;
        size_t bytes = 0;
    };

    void enqueue_on_link(int link_id, Packet pkt, int from_node);
    void wired_start_tx(int link_id, int dir);
    void node_receive(int node, Packet pkt, int via_link);
    void deliver(Packet pkt);
    void drop(Packet pkt, int link_id);
    void air_enqueue(AirFrame f);
    void air_try_serve();
    void air_finish(AirFrame f);

    SimEngine& eng_;
    const Scenario sc_;
    Topology topo_;
    Rng air_rng_;
    std::vector<WiredLink> wired_;
    std::vector<LinkStats> stats_;
    KindCounters counters_[5];
    uint64_t next_flow_ = 1;
    uint64_t next_packet_ = 1;
    uint64_t live_ = 0;

    // WLAN cell state.
    AirQueue ap_q_;                  // downlink, data capped by scenario
    std::vector<AirQueue> ws_q_;     // uplink per WLAN workstation
    std::vector<int> ws_index_of_;   // node id -> workstation slot
    bool air_serving_ = false;
    int hold_depth_ = 0;
    double busy_prob_ = 0.0;
    uint64_t air_window_offered_bits_ = 0;
};

}  // namespace convsim
