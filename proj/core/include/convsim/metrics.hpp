#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "convsim/netsim.hpp"

namespace convsim {

struct NonMonotonicTime : std::runtime_error {
    NonMonotonicTime(double t, double last)
        : std::runtime_error("sample time " + std::to_string(t) +
                             " not after " + std::to_string(last)) {}
};
struct EmptySeries : std::runtime_error {
    EmptySeries() : std::runtime_error("empty series") {}
};
struct ScenarioMismatch : std::runtime_error {
    explicit ScenarioMismatch(const std::string& what)
        : std::runtime_error(what) {}
};

struct Sample {
    double t;
    double v;
    bool operator==(const Sample&) const = default;
};

// The eight plotted quantities. Loads and throughputs are bits per second
// over one-second windows; the two delay series are running means in seconds.
inline constexpr std::array<const char*, 8> kMetricIds = {
    "wlan_load_bps",
    "wlan_media_access_delay_s",
    "wlan_delay_s",
    "wlan_throughput_bps",
    "ftp_traffic_sent_bps",
    "http_traffic_sent_bps",
    "umts_rx_throughput_bps",
    "umts_tx_load_bps",
};

struct MetricSeries {
    std::string metric_id;
    std::vector<Sample> samples;

    // Strictly increasing times only.
    void record(double t, double v);
};

// Running time-weighted mean under zero-order hold: output k is
// (1/t_k) * integral of v over [0, t_k], where each sample's value holds
// until the next sample and the first sample's value extends back to t = 0
// (so a constant series averages to itself everywhere). A sample at t = 0
// contributes its own value as the mean at that instant.
MetricSeries time_average(const MetricSeries& in);

// Final value of the running mean; 0 for an empty series.
double final_time_average(const MetricSeries& in);

// "time_s,value" header, one row per sample, '.' decimal separator, '\n'
// newlines, shortest round-trip formatting. Byte-deterministic.
std::string to_csv(const MetricSeries& in);
void write_csv_file(const std::string& path, const MetricSeries& in);

// Inverse of to_csv. Throws std::runtime_error on malformed input; the
// metric id is taken from the caller since the file name carries it.
MetricSeries parse_csv(const std::string& metric_id, const std::string& text);

// Samples the simulation on the one-second cadence and owns the series.
class MetricsHub {
public:
    MetricsHub(SimEngine& eng, Network& net, const Scenario& sc);
    MetricsHub(const MetricsHub&) = delete;
    MetricsHub& operator=(const MetricsHub&) = delete;

    void start();

    // Event feeds, wired by the run driver.
    void packet_injected(const Packet& p);
    void packet_delivered(const Packet& p);
    void air_access_delay(double d);

    const MetricSeries& series(const std::string& metric_id) const;
    std::map<std::string, MetricSeries> take_series();

private:
    void tick(double t);

    SimEngine& eng_;
    Network& net_;
    const Scenario sc_;
    std::map<std::string, MetricSeries> series_;

    // Window accumulators (reset each tick).
    uint64_t win_ftp_bytes_ = 0;
    uint64_t win_http_bytes_ = 0;
    uint64_t win_umts_rx_bytes_ = 0;

    // Cumulative-mean accumulators.
    double mad_sum_ = 0;
    uint64_t mad_n_ = 0;
    double delay_sum_ = 0;
    uint64_t delay_n_ = 0;
};

struct ComparisonRow {
    std::string metric_id;
    double final_a = 0;
    double final_b = 0;
    double delta = 0;           // final_a - final_b
    std::string expectation;    // "lower", "higher" or "" when not evaluated
    bool satisfied = true;      // meaningful only when expectation set
};

struct ComparisonReport {
    std::string label_a, label_b;
    std::vector<ComparisonRow> rows;
    bool directions_evaluated = false;
    int violations = 0;

    std::string render() const;
    std::string to_csv() const;
};

// Compares two finished runs. The scenarios must be identical except for the
// protocol axis, the coupling axis, or neither; anything else throws
// ScenarioMismatch. When the protocols differ, directional expectations are
// evaluated with the key-agreement side as the hypothesis: its wlan_load,
// media access delay, end-to-end delay, ftp/http sent and umts_tx_load are
// expected lower, its wlan_throughput and umts_rx_throughput higher.
ComparisonReport compare(const Scenario& sa,
                         const std::map<std::string, MetricSeries>& a,
                         const Scenario& sb,
                         const std::map<std::string, MetricSeries>& b);

}  // namespace convsim
