#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace convsim {

enum class Coupling { Loose, Tight, Hybrid };
enum class SimProtocol { Aka, EcdhAka };

const char* to_string(Coupling c);
const char* to_string(SimProtocol p);

// Resolved simulation configuration. Defaults reproduce the 20-workstation
// mixed-traffic setup; every field can be overridden from a scenario file
// (section.key = value) and the full resolved set is echoed into the run
// manifest so a run is reproducible from its output directory alone.
struct Scenario {
    // curve
    std::string curve_name = "p256";  // p256 | toy (protocol self-tests only)

    // topology
    Coupling coupling = Coupling::Hybrid;
    int wlan_workstations = 10;
    int umts_workstations = 10;

    // links
    double wlan_bps = 11e6;           // 802.11b air rate
    double wlan_slot_s = 20e-6;       // contention slot
    int wlan_cw_min = 31;
    int wlan_cw_max = 1023;
    double wlan_busy_cap = 0.9;       // clamp on sensed-busy probability
    size_t wlan_ap_queue_bytes = 49152;  // AP downlink buffer
    double umts_radio_bps = 2e6;
    double umts_radio_delay_s = 0.004;
    double core_bps = 100e6;
    double core_delay_s = 0.010;
    double lan_bps = 100e6;
    double lan_delay_s = 0.002;
    double hlr_link_bps = 100e6;
    double hlr_link_delay_s = 0.010;  // inter-operator signaling path
    size_t core_queue_bytes = 262144;

    // traffic
    uint32_t packet_bytes = 1500;     // data segment size
    uint32_t request_bytes = 300;
    double ftp_file_bytes = 524288;
    double ftp_interval_s = 30;       // mean inter-session gap per client
    double ftp_pace_bps = 200000;     // server send pacing
    double http_page_bytes = 30000;
    int http_objects = 4;
    double http_object_bytes = 25000;
    double http_think_s = 8;          // mean think time
    double http_pace_bps = 150000;
    double mm_rate_bps = 128000;      // streamed to every WLAN workstation
    uint32_t mm_packet_bytes = 1000;
    double billing_bytes = 2048;
    double billing_interval_s = 60;
    double retx_timeout_s = 0.8;      // source retransmit after a loss
    double umts_http_page_bytes = 40000;
    double umts_http_think_s = 20;
    double umts_http_pace_bps = 200000;
    double traffic_stop_s = 560;      // sources stop; tail drains before t_end

    // auth
    SimProtocol protocol = SimProtocol::Aka;
    double reauth_period_s = 300;
    double p_sync = 0.05;             // per-auth resync probability (AKA only)
    double hlr_service_s = 0.25;      // vector generation time at the HLR
    uint32_t hlr_msg_bytes = 400;     // vector request/response size
    uint32_t framing_bytes = 48;      // per-message link framing overhead
    bool cell_pause = true;           // AP defers data while auth waits on the HLR
    double auth_stagger_s = 1.0;      // spacing of initial attaches
    uint32_t umts_attach_msg_bytes = 120;
    uint32_t open_auth_msg_bytes = 96;

    // sim
    uint64_t seed = 1;
    double duration_s = 600;
};

struct ScenarioError {
    int line = 0;  // 0 when not tied to a specific line
    std::string message;
};

using ParseScenarioResult = std::variant<Scenario, ScenarioError>;

// Parses `section.key = value` lines. '#' starts a comment, blank lines are
// skipped, unknown sections or keys are errors. Values never depend on the
// process locale.
ParseScenarioResult parse_scenario(const std::string& text);
ParseScenarioResult load_scenario(const std::string& path);

// Renders the fully resolved configuration as a scenario file. Feeding the
// output back through parse_scenario yields an identical Scenario, which is
// what makes run manifests re-runnable.
std::string render_manifest(const Scenario& s, const std::string& code_version);

bool operator==(const Scenario& a, const Scenario& b);
inline bool operator!=(const Scenario& a, const Scenario& b) { return !(a == b); }

}  // namespace convsim
