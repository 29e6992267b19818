#pragma once

#include <map>
#include <optional>
#include <vector>

#include "convsim/netsim.hpp"
#include "convsim/protocol.hpp"

namespace convsim {

enum class AuthKind {
    WlanEap,     // full method conversation, real encoded frames
    WlanOpen,    // open-network association, scripted
    UmtsAttach,  // cellular attach with vector fetch, scripted per hop
};
const char* to_string(AuthKind k);

struct AuthSessionStats {
    uint64_t flow = 0;
    int station = -1;  // node id
    AuthKind kind = AuthKind::WlanEap;
    SimProtocol protocol = SimProtocol::Aka;
    int messages = 0;  // station<->network messages; store consults excluded
    int consults = 0;  // subscriber-store round trips that crossed the wire
    int resyncs = 0;
    bool completed = false;
    double started = 0;
    double finished = 0;
};

// Drives authentication over the simulated network. WLAN stations run the
// real EAP state machines and every frame on the wire is a real encoded
// packet. The symmetric-only method resolves vectors and resync tokens
// through request/response messages to the HLR, and while a session waits on
// that round trip the cell optionally defers data frames. The key-agreement
// method talks to the co-located subscriber store directly, so it never puts
// signaling on the HLR link and never pauses the cell.
class AuthManager {
public:
    AuthManager(SimEngine& eng, Network& net, const Scenario& sc, uint64_t seed);
    AuthManager(const AuthManager&) = delete;
    AuthManager& operator=(const AuthManager&) = delete;

    // Initial attach for every station, staggered, then re-authentication on
    // the configured period until the run ends.
    void start();

    // Single-shot starters (no re-auth chaining). Return the flow id.
    uint64_t start_wlan_eap(int ws_index);
    uint64_t start_wlan_open(int ws_index);
    uint64_t start_umts_attach(int ws_index);

    // Authentication-kind deliveries.
    void on_delivered(const Packet& pkt);

    const std::vector<AuthSessionStats>& completed_log() const {
        return completed_;
    }
    size_t active_sessions() const { return eap_.size() + script_.size(); }
    int total_resyncs() const;
    int total_consults() const;

    HssHandle& hss() { return hss_; }
    UsimHandle& usim(int ws_index) { return usims_[ws_index]; }

private:
    struct EapFlow {
        AuthSessionStats st;
        PeerSession peer;
        ServerSession server;
        int ws_index;
        std::optional<Bytes> held;  // frame parked while the HLR round trip runs
        uint32_t seq = 0;
    };
    struct ScriptLeg {
        int src, dst;
        uint32_t size;
        double pre_delay;  // service time before this leg is sent
    };
    struct ScriptFlow {
        AuthSessionStats st;
        std::vector<ScriptLeg> legs;
        size_t next = 0;
        uint32_t seq = 0;
    };

    void schedule_wlan(int i, double at);
    void schedule_umts(int i, double at);
    void send_eap(EapFlow& ef, int src, int dst, const Bytes& wire);
    void step_server(EapFlow& ef, const std::optional<Bytes>& wire);
    void step_peer(EapFlow& ef, const Bytes& wire);
    void handle_eap(EapFlow& ef, const Packet& pkt);
    uint64_t start_script(ScriptFlow sf);
    void send_leg(ScriptFlow& sf);
    void finish_eap(uint64_t flow);
    bool needs_consult(const Bytes& wire) const;

    SimEngine& eng_;
    Network& net_;
    const Scenario sc_;
    Protocol proto_;
    Rng step_rng_;
    Rng sync_rng_;
    HssHandle hss_;
    std::vector<UsimHandle> usims_;
    std::vector<std::string> imsis_;
    ServerContext ctx_;
    PeerTrust trust_;
    std::map<uint64_t, EapFlow> eap_;
    std::map<uint64_t, ScriptFlow> script_;
    std::vector<AuthSessionStats> completed_;
};

// Runs one isolated session of the given kind on an otherwise idle network
// and returns its stats. Pins the per-mode message counts.
AuthSessionStats measure_auth_session(AuthKind kind, SimProtocol proto,
                                      Coupling coupling);

}  // namespace convsim
