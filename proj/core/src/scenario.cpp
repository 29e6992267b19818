#include "convsim/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace convsim {

const char* to_string(Coupling c) {
    switch (c) {
        case Coupling::Loose: return "loose";
        case Coupling::Tight: return "tight";
        case Coupling::Hybrid: return "hybrid";
    }
    return "?";
}

const char* to_string(SimProtocol p) {
    return p == SimProtocol::Aka ? "aka" : "ecdh-aka";
}

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& v, double& out) {
    const char* b = v.data();
    const char* e = b + v.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e && std::isfinite(out);
}

bool parse_u64(const std::string& v, uint64_t& out) {
    const char* b = v.data();
    const char* e = b + v.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e;
}

// Formats a double so that from_chars round-trips it exactly.
std::string num(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

struct Field {
    // Returns empty string on success, otherwise the complaint.
    std::function<std::string(Scenario&, const std::string&)> set;
    std::function<std::string(const Scenario&)> get;
};

Field f_double(double Scenario::*m) {
    return {
        [m](Scenario& s, const std::string& v) -> std::string {
            double d;
            if (!parse_double(v, d)) return "expected a number";
            s.*m = d;
            return "";
        },
        [m](const Scenario& s) { return num(s.*m); },
    };
}

Field f_int(int Scenario::*m) {
    return {
        [m](Scenario& s, const std::string& v) -> std::string {
            double d;
            if (!parse_double(v, d) || d != std::floor(d)) return "expected an integer";
            s.*m = static_cast<int>(d);
            return "";
        },
        [m](const Scenario& s) { return num(s.*m); },
    };
}

Field f_u32(uint32_t Scenario::*m) {
    return {
        [m](Scenario& s, const std::string& v) -> std::string {
            uint64_t d;
            if (!parse_u64(v, d) || d > 0xffffffffu) return "expected an unsigned integer";
            s.*m = static_cast<uint32_t>(d);
            return "";
        },
        [m](const Scenario& s) { return std::to_string(s.*m); },
    };
}

Field f_u64(uint64_t Scenario::*m) {
    return {
        [m](Scenario& s, const std::string& v) -> std::string {
            uint64_t d;
            if (!parse_u64(v, d)) return "expected an unsigned integer";
            s.*m = d;
            return "";
        },
        [m](const Scenario& s) { return std::to_string(s.*m); },
    };
}

Field f_size(size_t Scenario::*m) {
    return {
        [m](Scenario& s, const std::string& v) -> std::string {
            uint64_t d;
            if (!parse_u64(v, d)) return "expected an unsigned integer";
            s.*m = static_cast<size_t>(d);
            return "";
        },
        [m](const Scenario& s) { return std::to_string(s.*m); },
    };
}

Field f_bool(bool Scenario::*m) {
    return {
        [m](Scenario& s, const std::string& v) -> std::string {
            if (v == "on" || v == "true" || v == "1") { s.*m = true; return ""; }
            if (v == "off" || v == "false" || v == "0") { s.*m = false; return ""; }
            return "expected on|off";
        },
        [m](const Scenario& s) { return (s.*m) ? std::string("on") : std::string("off"); },
    };
}

Field f_curve() {
    return {
        [](Scenario& s, const std::string& v) -> std::string {
            if (v != "p256" && v != "toy") return "expected p256|toy";
            s.curve_name = v;
            return "";
        },
        [](const Scenario& s) { return s.curve_name; },
    };
}

Field f_coupling() {
    return {
        [](Scenario& s, const std::string& v) -> std::string {
            if (v == "loose") s.coupling = Coupling::Loose;
            else if (v == "tight") s.coupling = Coupling::Tight;
            else if (v == "hybrid") s.coupling = Coupling::Hybrid;
            else return "expected loose|tight|hybrid";
            return "";
        },
        [](const Scenario& s) { return std::string(to_string(s.coupling)); },
    };
}

Field f_protocol() {
    return {
        [](Scenario& s, const std::string& v) -> std::string {
            if (v == "aka") s.protocol = SimProtocol::Aka;
            else if (v == "ecdh-aka") s.protocol = SimProtocol::EcdhAka;
            else return "expected aka|ecdh-aka";
            return "";
        },
        [](const Scenario& s) { return std::string(to_string(s.protocol)); },
    };
}

// Ordered: the manifest is rendered section by section in this order.
const std::vector<std::pair<std::string, Field>>& field_table() {
    static const std::vector<std::pair<std::string, Field>> table = {
        {"curve.name", f_curve()},

        {"topology.coupling", f_coupling()},
        {"topology.wlan_workstations", f_int(&Scenario::wlan_workstations)},
        {"topology.umts_workstations", f_int(&Scenario::umts_workstations)},

        {"links.wlan_bps", f_double(&Scenario::wlan_bps)},
        {"links.wlan_slot_s", f_double(&Scenario::wlan_slot_s)},
        {"links.wlan_cw_min", f_int(&Scenario::wlan_cw_min)},
        {"links.wlan_cw_max", f_int(&Scenario::wlan_cw_max)},
        {"links.wlan_busy_cap", f_double(&Scenario::wlan_busy_cap)},
        {"links.wlan_ap_queue_bytes", f_size(&Scenario::wlan_ap_queue_bytes)},
        {"links.umts_radio_bps", f_double(&Scenario::umts_radio_bps)},
        {"links.umts_radio_delay_s", f_double(&Scenario::umts_radio_delay_s)},
        {"links.core_bps", f_double(&Scenario::core_bps)},
        {"links.core_delay_s", f_double(&Scenario::core_delay_s)},
        {"links.lan_bps", f_double(&Scenario::lan_bps)},
        {"links.lan_delay_s", f_double(&Scenario::lan_delay_s)},
        {"links.hlr_link_bps", f_double(&Scenario::hlr_link_bps)},
        {"links.hlr_link_delay_s", f_double(&Scenario::hlr_link_delay_s)},
        {"links.core_queue_bytes", f_size(&Scenario::core_queue_bytes)},

        {"traffic.packet_bytes", f_u32(&Scenario::packet_bytes)},
        {"traffic.request_bytes", f_u32(&Scenario::request_bytes)},
        {"traffic.ftp_file_bytes", f_double(&Scenario::ftp_file_bytes)},
        {"traffic.ftp_interval_s", f_double(&Scenario::ftp_interval_s)},
        {"traffic.ftp_pace_bps", f_double(&Scenario::ftp_pace_bps)},
        {"traffic.http_page_bytes", f_double(&Scenario::http_page_bytes)},
        {"traffic.http_objects", f_int(&Scenario::http_objects)},
        {"traffic.http_object_bytes", f_double(&Scenario::http_object_bytes)},
        {"traffic.http_think_s", f_double(&Scenario::http_think_s)},
        {"traffic.http_pace_bps", f_double(&Scenario::http_pace_bps)},
        {"traffic.mm_rate_bps", f_double(&Scenario::mm_rate_bps)},
        {"traffic.mm_packet_bytes", f_u32(&Scenario::mm_packet_bytes)},
        {"traffic.billing_bytes", f_double(&Scenario::billing_bytes)},
        {"traffic.billing_interval_s", f_double(&Scenario::billing_interval_s)},
        {"traffic.retx_timeout_s", f_double(&Scenario::retx_timeout_s)},
        {"traffic.umts_http_page_bytes", f_double(&Scenario::umts_http_page_bytes)},
        {"traffic.umts_http_think_s", f_double(&Scenario::umts_http_think_s)},
        {"traffic.umts_http_pace_bps", f_double(&Scenario::umts_http_pace_bps)},
        {"traffic.traffic_stop_s", f_double(&Scenario::traffic_stop_s)},

        {"auth.protocol", f_protocol()},
        {"auth.reauth_period_s", f_double(&Scenario::reauth_period_s)},
        {"auth.p_sync", f_double(&Scenario::p_sync)},
        {"auth.hlr_service_s", f_double(&Scenario::hlr_service_s)},
        {"auth.hlr_msg_bytes", f_u32(&Scenario::hlr_msg_bytes)},
        {"auth.framing_bytes", f_u32(&Scenario::framing_bytes)},
        {"auth.cell_pause", f_bool(&Scenario::cell_pause)},
        {"auth.auth_stagger_s", f_double(&Scenario::auth_stagger_s)},
        {"auth.umts_attach_msg_bytes", f_u32(&Scenario::umts_attach_msg_bytes)},
        {"auth.open_auth_msg_bytes", f_u32(&Scenario::open_auth_msg_bytes)},

        {"sim.seed", f_u64(&Scenario::seed)},
        {"sim.duration_s", f_double(&Scenario::duration_s)},
    };
    return table;
}

std::string validate(const Scenario& s) {
    if (s.wlan_workstations < 1 || s.wlan_workstations > 200) return "topology.wlan_workstations out of range";
    if (s.umts_workstations < 1 || s.umts_workstations > 200) return "topology.umts_workstations out of range";
    if (s.wlan_bps <= 0 || s.core_bps <= 0 || s.lan_bps <= 0 || s.umts_radio_bps <= 0 || s.hlr_link_bps <= 0)
        return "link rates must be positive";
    if (s.wlan_slot_s <= 0) return "links.wlan_slot_s must be positive";
    if (s.wlan_cw_min < 1 || s.wlan_cw_max < s.wlan_cw_min) return "contention window bounds invalid";
    if (s.wlan_busy_cap < 0 || s.wlan_busy_cap > 0.99) return "links.wlan_busy_cap out of [0, 0.99]";
    if (s.packet_bytes < 64 || s.mm_packet_bytes < 64) return "packet sizes must be >= 64";
    if (s.p_sync < 0 || s.p_sync > 1) return "auth.p_sync out of [0, 1]";
    if (s.duration_s < 0) return "sim.duration_s must be >= 0";
    if (s.traffic_stop_s < 0) return "traffic.traffic_stop_s must be >= 0";
    if (s.reauth_period_s <= 0) return "auth.reauth_period_s must be positive";
    if (s.ftp_pace_bps <= 0 || s.http_pace_bps <= 0 || s.umts_http_pace_bps <= 0 || s.mm_rate_bps <= 0)
        return "pacing rates must be positive";
    return "";
}

}  // namespace

ParseScenarioResult parse_scenario(const std::string& text) {
    static std::map<std::string, const Field*> index = [] {
        std::map<std::string, const Field*> m;
        for (const auto& [k, f] : field_table()) m[k] = &f;
        return m;
    }();

    Scenario s;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            return ScenarioError{line_no, "expected section.key = value"};
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        auto it = index.find(key);
        if (it == index.end())
            return ScenarioError{line_no, "unknown key '" + key + "'"};
        if (value.empty())
            return ScenarioError{line_no, "missing value for '" + key + "'"};
        std::string err = it->second->set(s, value);
        if (!err.empty())
            return ScenarioError{line_no, key + ": " + err};
    }
    std::string err = validate(s);
    if (!err.empty()) return ScenarioError{0, err};
    return s;
}

ParseScenarioResult load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return ScenarioError{0, "cannot open scenario file '" + path + "'"};
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string render_manifest(const Scenario& s, const std::string& code_version) {
    std::ostringstream out;
    out << "# convsim run manifest (re-runnable scenario file)\n";
    out << "# code version: " << code_version << "\n";
    out << "# Directional QoS results depend on the declared overhead model:\n";
    out << "# per-auth HLR vector fetch on the wire for aka (auth.hlr_msg_bytes,\n";
    out << "# auth.hlr_service_s, links.hlr_link_delay_s), resynchronization rate\n";
    out << "# auth.p_sync (aka only), data deferral during authentication\n";
    out << "# (auth.cell_pause) against the AP buffer links.wlan_ap_queue_bytes,\n";
    out << "# and loss recovery after traffic.retx_timeout_s.\n";
    std::string section;
    for (const auto& [key, field] : field_table()) {
        std::string sec = key.substr(0, key.find('.'));
        if (sec != section) {
            out << "\n# [" << sec << "]\n";
            section = sec;
        }
        out << key << " = " << field.get(s) << "\n";
    }
    return out.str();
}

bool operator==(const Scenario& a, const Scenario& b) {
    for (const auto& [key, field] : field_table())
        if (field.get(a) != field.get(b)) return false;
    return true;
}

}  // namespace convsim
