#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "convsim/authflow.hpp"
#include "convsim/metrics.hpp"
#include "convsim/traffic.hpp"

namespace convsim {

// Per-hop class separation at the gateway fork. Counted over delivered
// packets that visited the gateway: expedited traffic must have come through
// the SGSN side and never the access-router side, best effort the converse.
struct PurityAudit {
    uint64_t ef_total = 0, ef_ok = 0;
    uint64_t be_total = 0, be_ok = 0;
};

struct RunResult {
    Scenario scenario;
    std::map<std::string, MetricSeries> series;
    std::array<KindCounters, 5> counters{};
    uint64_t live_at_end = 0;
    uint64_t events = 0;
    uint64_t trace_hash = 0;
    PurityAudit purity;
    uint64_t sgsn_adjacent_drops = 0;

    int auth_sessions = 0;
    int auth_completed = 0;
    int auth_resyncs = 0;
    int auth_consults = 0;
    std::vector<int> auth_messages;  // per completed session

    TrafficManager::Totals traffic;
    size_t open_transfers = 0;
};

std::string code_version();

// Builds the full stack (topology, network, traffic, authentication,
// metrics) for the scenario, runs it to the configured duration and collects
// everything a report needs. Deterministic: same scenario, same result.
RunResult run_simulation(const Scenario& sc);

// Writes one CSV per metric plus manifest.txt (the re-runnable resolved
// configuration) and run_summary.txt into out_dir, creating it if needed.
void write_run_output(const RunResult& r, const std::string& out_dir);

}  // namespace convsim
