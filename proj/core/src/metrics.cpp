#include "convsim/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <string_view>

namespace convsim {

namespace {

std::string num(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

}  // namespace

void MetricSeries::record(double t, double v) {
    if (!samples.empty() && t <= samples.back().t)
        throw NonMonotonicTime(t, samples.back().t);
    samples.push_back({t, v});
}

MetricSeries time_average(const MetricSeries& in) {
    if (in.samples.empty()) throw EmptySeries();
    MetricSeries out;
    out.metric_id = in.metric_id;
    double integral = 0;
    double prev_t = 0;
    double held = in.samples.front().v;  // backward extension to t = 0
    for (const Sample& s : in.samples) {
        integral += held * (s.t - prev_t);
        prev_t = s.t;
        held = s.v;
        out.samples.push_back({s.t, s.t > 0 ? integral / s.t : s.v});
    }
    return out;
}

double final_time_average(const MetricSeries& in) {
    if (in.samples.empty()) return 0;
    return time_average(in).samples.back().v;
}

std::string to_csv(const MetricSeries& in) {
    std::string s = "time_s,value\n";
    for (const Sample& x : in.samples) {
        s += num(x.t);
        s += ',';
        s += num(x.v);
        s += '\n';
    }
    return s;
}

void write_csv_file(const std::string& path, const MetricSeries& in) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    std::string s = to_csv(in);
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
}

MetricSeries parse_csv(const std::string& metric_id, const std::string& text) {
    MetricSeries out;
    out.metric_id = metric_id;
    size_t pos = 0;
    auto next_line = [&]() -> std::optional<std::string_view> {
        if (pos >= text.size()) return std::nullopt;
        size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        std::string_view line(text.data() + pos, nl - pos);
        pos = nl + 1;
        return line;
    };
    auto header = next_line();
    if (!header || *header != "time_s,value")
        throw std::runtime_error("bad csv header");
    while (auto line = next_line()) {
        if (line->empty()) continue;
        size_t comma = line->find(',');
        if (comma == std::string_view::npos)
            throw std::runtime_error("bad csv row");
        double t = 0, v = 0;
        auto r1 = std::from_chars(line->data(), line->data() + comma, t);
        auto r2 = std::from_chars(line->data() + comma + 1,
                                  line->data() + line->size(), v);
        if (r1.ec != std::errc() || r1.ptr != line->data() + comma ||
            r2.ec != std::errc() || r2.ptr != line->data() + line->size())
            throw std::runtime_error("bad csv number");
        out.record(t, v);
    }
    return out;
}

MetricsHub::MetricsHub(SimEngine& eng, Network& net, const Scenario& sc)
    : eng_(eng), net_(net), sc_(sc) {
    for (const char* id : kMetricIds) {
        MetricSeries s;
        s.metric_id = id;
        series_.emplace(id, std::move(s));
    }
}

void MetricsHub::start() {
    if (sc_.duration_s >= 1.0) eng_.schedule(1.0, [this] { tick(1.0); });
}

void MetricsHub::packet_injected(const Packet& p) {
    if (p.kind == PacketKind::Ftp) win_ftp_bytes_ += p.size_bytes;
    else if (p.kind == PacketKind::Http) win_http_bytes_ += p.size_bytes;
}

void MetricsHub::packet_delivered(const Packet& p) {
    if (p.crossed_umts) win_umts_rx_bytes_ += p.size_bytes;
    if (p.crossed_air) {
        delay_sum_ += eng_.now() - p.created_at;
        delay_n_++;
    }
}

void MetricsHub::air_access_delay(double d) {
    mad_sum_ += d;
    mad_n_++;
}

void MetricsHub::tick(double t) {
    uint64_t wlan_arrived = 0, air_delivered = 0, umts_arrived = 0;
    const auto& stats = net_.link_stats();
    const auto& links = net_.topo().links;
    for (size_t i = 0; i < links.size(); ++i) {
        if (links[i].wlan_segment) wlan_arrived += stats[i].win_arrived_bytes;
        if (links[i].is_air) air_delivered += stats[i].win_delivered_bytes;
        if (links[i].umts_domain) umts_arrived += stats[i].win_arrived_bytes;
    }

    series_.at("wlan_load_bps").record(t, static_cast<double>(wlan_arrived) * 8);
    series_.at("wlan_throughput_bps")
        .record(t, static_cast<double>(air_delivered) * 8);
    series_.at("umts_tx_load_bps")
        .record(t, static_cast<double>(umts_arrived) * 8);
    series_.at("umts_rx_throughput_bps")
        .record(t, static_cast<double>(win_umts_rx_bytes_) * 8);
    series_.at("ftp_traffic_sent_bps")
        .record(t, static_cast<double>(win_ftp_bytes_) * 8);
    series_.at("http_traffic_sent_bps")
        .record(t, static_cast<double>(win_http_bytes_) * 8);
    series_.at("wlan_media_access_delay_s")
        .record(t, mad_n_ ? mad_sum_ / static_cast<double>(mad_n_) : 0.0);
    series_.at("wlan_delay_s")
        .record(t, delay_n_ ? delay_sum_ / static_cast<double>(delay_n_) : 0.0);

    win_ftp_bytes_ = win_http_bytes_ = win_umts_rx_bytes_ = 0;
    net_.rotate_windows();
    if (t + 1.0 <= sc_.duration_s)
        eng_.schedule(t + 1.0, [this, t] { tick(t + 1.0); });
}

const MetricSeries& MetricsHub::series(const std::string& metric_id) const {
    return series_.at(metric_id);
}

std::map<std::string, MetricSeries> MetricsHub::take_series() {
    return std::move(series_);
}

namespace {

// Expected sign of (key-agreement minus symmetric-only) per metric.
bool expected_lower(const std::string& id) {
    static const std::set<std::string> lower = {
        "wlan_load_bps",     "wlan_media_access_delay_s",
        "wlan_delay_s",      "ftp_traffic_sent_bps",
        "http_traffic_sent_bps", "umts_tx_load_bps",
    };
    return lower.count(id) > 0;
}

std::string run_label(const Scenario& s) {
    return std::string(to_string(s.protocol)) + "/" + to_string(s.coupling);
}

}  // namespace

ComparisonReport compare(const Scenario& sa,
                         const std::map<std::string, MetricSeries>& a,
                         const Scenario& sb,
                         const std::map<std::string, MetricSeries>& b) {
    bool proto_differs = sa.protocol != sb.protocol;
    bool coupling_differs = sa.coupling != sb.coupling;
    if (proto_differs && coupling_differs)
        throw ScenarioMismatch("runs differ on both protocol and coupling");
    Scenario nb = sb;
    nb.protocol = sa.protocol;
    nb.coupling = sa.coupling;
    if (sa != nb)
        throw ScenarioMismatch(
            "runs differ outside the protocol/coupling axis");

    ComparisonReport rep;
    rep.label_a = run_label(sa);
    rep.label_b = run_label(sb);
    rep.directions_evaluated = proto_differs;

    for (const char* id : kMetricIds) {
        auto ia = a.find(id);
        auto ib = b.find(id);
        if (ia == a.end() || ib == b.end())
            throw ScenarioMismatch(std::string("missing metric ") + id);
        ComparisonRow row;
        row.metric_id = id;
        row.final_a = final_time_average(ia->second);
        row.final_b = final_time_average(ib->second);
        row.delta = row.final_a - row.final_b;
        if (proto_differs) {
            // The key-agreement run is the hypothesis side.
            double prop = sa.protocol == SimProtocol::EcdhAka ? row.final_a
                                                              : row.final_b;
            double base = sa.protocol == SimProtocol::EcdhAka ? row.final_b
                                                              : row.final_a;
            bool lower = expected_lower(id);
            row.expectation = lower ? "lower" : "higher";
            row.satisfied = lower ? prop < base : prop > base;
            if (!row.satisfied) rep.violations++;
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

std::string ComparisonReport::render() const {
    std::string s;
    s += "comparison: A=" + label_a + "  B=" + label_b + "\n\n";
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-28s %16s %16s %16s %-7s %s\n",
                  "metric", "final_A", "final_B", "delta(A-B)", "expect",
                  "ok");
    s += buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-28s %16.6g %16.6g %16.6g %-7s %s\n",
                      r.metric_id.c_str(), r.final_a, r.final_b, r.delta,
                      r.expectation.empty() ? "-" : r.expectation.c_str(),
                      r.expectation.empty() ? "-" : (r.satisfied ? "yes" : "NO"));
        s += buf;
    }
    s += "\n";
    if (directions_evaluated) {
        s += "directional expectations (key-agreement side vs baseline): ";
        s += violations == 0 ? "all satisfied" :
             std::to_string(violations) + " violated";
        s += "\n";
    } else {
        s += "directional expectations: not evaluated (same protocol)\n";
    }
    return s;
}

std::string ComparisonReport::to_csv() const {
    std::string s = "metric_id,final_a,final_b,delta,expectation,satisfied\n";
    for (const auto& r : rows) {
        s += r.metric_id + "," + num(r.final_a) + "," + num(r.final_b) + "," +
             num(r.delta) + ",";
        s += r.expectation.empty() ? "-" : r.expectation;
        s += ",";
        s += r.expectation.empty() ? "-" : (r.satisfied ? "yes" : "no");
        s += "\n";
    }
    return s;
}

}  // namespace convsim
