// Acceptance harness: one pass/fail line per criterion, nonzero exit when
// anything fails. Tolerances and budgets are pinned here, not configurable.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "convsim/authflow.hpp"
#include "convsim/ec.hpp"
#include "convsim/metrics.hpp"
#include "convsim/seceval.hpp"
#include "convsim/simrun.hpp"

using namespace convsim;

namespace {

int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

void report(int n, bool ok, const std::string& detail) {
    std::printf("CRITERION %d %s - %s\n", n, ok ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

struct Fixture {
    HssHandle hss;
    UsimHandle usim;
    ServerContext ctx;
    PeerTrust trust;

    explicit Fixture(uint64_t seed, const CurveParams& curve)
        : usim("001011234567890", SubscriberKey::from_bytes(Bytes(16, 0x3C))) {
        hss.provision("001011234567890", SubscriberKey::from_bytes(Bytes(16, 0x3C)));
        Rng r(Rng::derive_seed(seed, "ctx"));
        ctx = ServerContext::make(from_string("home-aaa"), from_string("hotspot-1"),
                                  curve, r);
        trust.server_ids = {from_string("home-aaa")};
        trust.ap_ids = {from_string("hotspot-1")};
        trust.curve = curve;
    }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// --------------------------------------------------------------- criterion 1

void criterion_1() {
    auto t0 = std::chrono::steady_clock::now();
    std::string base = CONVSIM_CLI_PATH;
    int rc_aka =
        std::system((base + " attack --protocol aka >/dev/null 2>&1").c_str());
    int rc_ecdh = std::system(
        (base + " attack --protocol ecdh-aka >/dev/null 2>&1").c_str());

    PropertyReport aka = evaluate_matrix(Protocol::Aka);
    PropertyReport ecdh = evaluate_matrix(Protocol::EcdhAka);
    ReferenceTable ref = reference_table();

    bool aka_row = !aka.identity_protection && aka.replay_resistant &&
                   !aka.mitm_resistant && !aka.pfs && aka.needs_sqn_sync;
    bool ecdh_row = ecdh.identity_protection && ecdh.replay_resistant &&
                    ecdh.mitm_resistant && ecdh.pfs && !ecdh.needs_sqn_sync;
    double dt = seconds_since(t0);
    bool ok = rc_aka == 0 && rc_ecdh == 0 && aka.seeds_total >= 20 &&
              ecdh.seeds_total >= 20 && aka_row && ecdh_row &&
              matches_reference(ref.eap_aka, aka) &&
              matches_reference(ref.proposed, ecdh) && dt < 10.0;

    std::string detail = "property matrix exact for both methods, " +
                         std::to_string(aka.seeds_total) + " seeds each, cli rc " +
                         std::to_string(rc_aka) + "/" + std::to_string(rc_ecdh) +
                         fmt(", %.2fs (budget 10s)", dt);
    report(1, ok, detail);
}

// --------------------------------------------------------------- criterion 2

void criterion_2() {
    auto t0 = std::chrono::steady_clock::now();
    CurveParams toy = CurveParams::toy();
    bool ok = true;

    // Exhaustive scalar multiplication against plain repeated addition.
    ECPoint acc = ECPoint::at_infinity();
    for (unsigned k = 1; k <= 18; ++k) {
        acc = point_add(acc, toy.g, toy);
        if (!(scalar_mul(k, toy.g, toy) == acc)) ok = false;
    }
    if (!(point_add(acc, toy.g, toy) == ECPoint::at_infinity())) ok = false;

    // Shared-secret symmetry on the default curve.
    CurveParams p256 = CurveParams::p256();
    Rng rng(20240816);
    int pairs = 0;
    for (int i = 0; i < 1000; ++i) {
        Scalar a = random_scalar(rng, p256);
        Scalar b = random_scalar(rng, p256);
        ECPoint pub_a = scalar_mul(a, p256.g, p256);
        ECPoint pub_b = scalar_mul(b, p256.g, p256);
        auto s_ab = ecdh_shared(a, pub_b, p256);
        auto s_ba = ecdh_shared(b, pub_a, p256);
        if (!std::holds_alternative<Bytes>(s_ab) ||
            !std::holds_alternative<Bytes>(s_ba) ||
            std::get<Bytes>(s_ab) != std::get<Bytes>(s_ba) ||
            std::get<Bytes>(s_ab).size() != 32) {
            ok = false;
            break;
        }
        ++pairs;
    }
    double dt = seconds_since(t0);
    if (dt >= 5.0) ok = false;
    report(2, ok,
           "18/18 toy scalars equal the repeated-addition oracle, " +
               std::to_string(pairs) + "/1000 default-curve pairs symmetric" +
               fmt(", %.2fs (budget 5s)", dt));
}

// --------------------------------------------------------------- criterion 3

void criterion_3() {
    auto t0 = std::chrono::steady_clock::now();
    CurveParams p256 = CurveParams::p256();
    bool ok = true;
    int honest = 0;

    for (Protocol proto : {Protocol::Aka, Protocol::EcdhAka}) {
        Fixture f(1, p256);
        for (uint64_t seed = 1; seed <= 1000 && ok; ++seed) {
            Rng rng(Rng::derive_seed(seed, "honest"));
            DialogResult r = run_dialog(proto, f.hss, f.usim, f.ctx, f.trust, rng);
            if (!r.both_done() || !r.msk_equal() || r.frames.size() != 5)
                ok = false;
            else
                ++honest;
        }
    }

    // Every byte of one honest transcript per protocol, flipped one at a
    // time in an otherwise identical conversation.
    int injections = 0;
    for (Protocol proto : {Protocol::Aka, Protocol::EcdhAka}) {
        std::vector<size_t> sizes;
        {
            Fixture f(7, p256);
            Rng rng(4242);
            DialogResult honest_run =
                run_dialog(proto, f.hss, f.usim, f.ctx, f.trust, rng);
            if (!honest_run.both_done() || honest_run.frames.size() != 5) {
                ok = false;
                break;
            }
            for (const DialogFrame& fr : honest_run.frames)
                sizes.push_back(fr.wire.size());
        }
        for (size_t frame = 0; frame < sizes.size() && ok; ++frame) {
            for (size_t pos = 0; pos < sizes[frame] && ok; ++pos) {
                Fixture f(7, p256);
                Rng rng(4242);
                DialogResult r = run_dialog(
                    proto, f.hss, f.usim, f.ctx, f.trust, rng,
                    [&](int idx, bool, const Bytes& wire) -> std::optional<Bytes> {
                        if (idx != static_cast<int>(frame)) return std::nullopt;
                        Bytes bad = wire;
                        bad[pos] ^= 0xFF;
                        return bad;
                    });
                ++injections;
                if (r.both_done() && !r.msk_equal()) ok = false;
            }
        }
    }
    double dt = seconds_since(t0);
    if (dt >= 60.0) ok = false;
    report(3, ok,
           std::to_string(honest) + "/2000 honest runs of 5 frames with equal keys, " +
               std::to_string(injections) +
               " single-byte faults without done-with-unequal-keys" +
               fmt(", %.1fs (budget 60s)", dt));
}

// --------------------------------------------------------------- criterion 4

void criterion_4() {
    AuthSessionStats eap_aka = measure_auth_session(
        AuthKind::WlanEap, SimProtocol::Aka, Coupling::Loose);
    AuthSessionStats eap_ecdh = measure_auth_session(
        AuthKind::WlanEap, SimProtocol::EcdhAka, Coupling::Loose);
    AuthSessionStats open_net = measure_auth_session(
        AuthKind::WlanOpen, SimProtocol::Aka, Coupling::Loose);
    AuthSessionStats attach = measure_auth_session(
        AuthKind::UmtsAttach, SimProtocol::Aka, Coupling::Loose);

    bool ok = eap_aka.completed && eap_aka.messages == 5 &&
              eap_ecdh.completed && eap_ecdh.messages == 5 &&
              open_net.completed && open_net.messages == 3 &&
              attach.completed && attach.messages == 11;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "measured messages: wlan eap %d/%d (want 5), open %d (want 3), "
                  "umts attach %d (want 11)",
                  eap_aka.messages, eap_ecdh.messages, open_net.messages,
                  attach.messages);
    report(4, ok, buf);
}

// --------------------------------------------------------------- criterion 5

void criterion_5() {
    Scenario sc;  // defaults: hybrid coupling, 600 s
    RunResult r = run_simulation(sc);
    bool ok = r.purity.ef_total > 0 && r.purity.be_total > 0 &&
              r.purity.ef_ok == r.purity.ef_total &&
              r.purity.be_ok == r.purity.be_total;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "EF %llu/%llu via SGSN side, BE %llu/%llu via access-router side",
                  (unsigned long long)r.purity.ef_ok,
                  (unsigned long long)r.purity.ef_total,
                  (unsigned long long)r.purity.be_ok,
                  (unsigned long long)r.purity.be_total);
    report(5, ok, buf);
}

// ----------------------------------------------------- criteria 6, 7 and 8

std::map<uint64_t, uint64_t> hybrid_drops;  // seed -> sgsn-adjacent drops (aka run)

void criterion_6() {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string bad;

    for (uint64_t seed = 1; seed <= 5; ++seed) {
        Scenario base;  // aka over hybrid coupling
        base.seed = seed;
        Scenario prop = base;
        prop.protocol = SimProtocol::EcdhAka;

        RunResult ra = run_simulation(base);
        RunResult rp = run_simulation(prop);
        hybrid_drops[seed] = ra.sgsn_adjacent_drops;

        ComparisonReport rep =
            compare(rp.scenario, rp.series, ra.scenario, ra.series);
        if (!rep.directions_evaluated) ok = false;
        if (rep.violations != 0) {
            ok = false;
            for (const ComparisonRow& row : rep.rows)
                if (!row.satisfied)
                    bad += " seed" + std::to_string(seed) + ":" + row.metric_id;
        }
    }

    // The caveat must travel with every run output.
    std::string manifest = render_manifest(Scenario{}, code_version());
    if (manifest.find("Directional QoS results depend on the declared overhead "
                      "model") == std::string::npos)
        ok = false;

    double dt = seconds_since(t0);
    if (dt >= 300.0) ok = false;
    std::string detail =
        "all 8 directions strict on 5 seeds, caveat present in manifest" +
        fmt(", %.1fs (budget 300s)", dt);
    if (!bad.empty()) detail = "violated:" + bad;
    report(6, ok, detail);
}

void criterion_7() {
    Scenario sc;
    sc.seed = 9;
    RunResult a = run_simulation(sc);
    RunResult b = run_simulation(sc);

    bool ok = a.trace_hash == b.trace_hash && a.events == b.events;
    int identical = 0;
    for (const char* id : kMetricIds) {
        if (to_csv(a.series.at(id)) == to_csv(b.series.at(id)))
            ++identical;
        else
            ok = false;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%d/8 metric csv files byte-identical across repeat runs, "
                  "trace hash %016llx%s",
                  identical, (unsigned long long)a.trace_hash,
                  a.trace_hash == b.trace_hash ? " matches" : " DIFFERS");
    report(7, ok, buf);
}

void criterion_8() {
    bool ok = true;
    std::string detail = "sgsn-adjacent drops hybrid<=tight per seed:";
    for (uint64_t seed = 1; seed <= 5; ++seed) {
        Scenario tight;
        tight.coupling = Coupling::Tight;
        tight.seed = seed;
        RunResult rt = run_simulation(tight);
        uint64_t hybrid = hybrid_drops.count(seed) ? hybrid_drops[seed] : 0;
        if (hybrid > rt.sgsn_adjacent_drops) ok = false;
        detail += " " + std::to_string(hybrid) + "<=" +
                  std::to_string(rt.sgsn_adjacent_drops);
    }
    report(8, ok, detail);
}

}  // namespace

int main() {
    std::printf("acceptance checks, %s\n", code_version().c_str());
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    if (failures == 0) {
        std::printf("ACCEPTANCE: all 8 criteria passed\n");
        return 0;
    }
    std::printf("ACCEPTANCE: %d criteria FAILED\n", failures);
    return 1;
}
