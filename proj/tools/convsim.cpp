// Scenario-driven entry point: run one simulation, compare two
// configurations, evaluate the attack property matrix, or self-test the
// crypto layer. Exit codes: 0 ok, 2 configuration error, 3 simulation
// runtime error, 4 directional comparison failure, 5 property matrix
// mismatch, 6 self-test failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>

#include "convsim/metrics.hpp"
#include "convsim/seceval.hpp"
#include "convsim/simrun.hpp"

using namespace convsim;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSimError = 3;
constexpr int kExitDirectional = 4;
constexpr int kExitMatrixMismatch = 5;
constexpr int kExitSelfTest = 6;

struct CommonFlags {
    std::string scenario_path;
    std::string protocol;  // empty = scenario value
    std::string coupling;
    std::optional<uint64_t> seed;
    std::optional<double> duration;
    std::string out_dir;
    bool force = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool out_required) {
    cmd->add_option("--scenario", f.scenario_path,
                    "Scenario file (section.key = value); defaults used when omitted");
    cmd->add_option("--protocol", f.protocol, "aka | ecdh-aka")
        ->check(CLI::IsMember({"aka", "ecdh-aka"}));
    cmd->add_option("--coupling", f.coupling, "loose | tight | hybrid")
        ->check(CLI::IsMember({"loose", "tight", "hybrid"}));
    cmd->add_option("--seed", f.seed, "Root random seed");
    cmd->add_option("--duration", f.duration, "Simulated seconds");
    auto* out = cmd->add_option("--out", f.out_dir, "Output directory");
    if (out_required) out->required();
    cmd->add_flag("--force", f.force, "Write into an existing non-empty directory");
}

// Resolves flags over the scenario file over built-in defaults.
// Returns nullopt after printing the error (config failure).
std::optional<Scenario> resolve(const CommonFlags& f) {
    Scenario sc;
    if (!f.scenario_path.empty()) {
        auto parsed = load_scenario(f.scenario_path);
        if (std::holds_alternative<ScenarioError>(parsed)) {
            const auto& e = std::get<ScenarioError>(parsed);
            if (e.line > 0)
                std::cerr << f.scenario_path << ":" << e.line << ": "
                          << e.message << "\n";
            else
                std::cerr << f.scenario_path << ": " << e.message << "\n";
            return std::nullopt;
        }
        sc = std::get<Scenario>(parsed);
    }
    if (!f.protocol.empty())
        sc.protocol = f.protocol == "aka" ? SimProtocol::Aka : SimProtocol::EcdhAka;
    if (!f.coupling.empty()) {
        if (f.coupling == "loose") sc.coupling = Coupling::Loose;
        else if (f.coupling == "tight") sc.coupling = Coupling::Tight;
        else sc.coupling = Coupling::Hybrid;
    }
    if (f.seed) sc.seed = *f.seed;
    if (f.duration) {
        if (*f.duration < 0) {
            std::cerr << "duration must be >= 0\n";
            return std::nullopt;
        }
        sc.duration_s = *f.duration;
    }
    return sc;
}

// True if dir is ready to receive output (fresh, empty, or force).
bool claim_out_dir(const std::string& dir, bool force) {
    std::error_code ec;
    if (fs::exists(dir, ec)) {
        if (!fs::is_directory(dir, ec)) {
            std::cerr << dir << " exists and is not a directory\n";
            return false;
        }
        if (!force && fs::directory_iterator(dir, ec) != fs::directory_iterator{}) {
            std::cerr << dir
                      << " exists and is not empty (use --force to overwrite)\n";
            return false;
        }
    }
    fs::create_directories(dir, ec);
    if (ec) {
        std::cerr << "cannot create " << dir << ": " << ec.message() << "\n";
        return false;
    }
    return true;
}

int cmd_run(const CommonFlags& f) {
    auto sc = resolve(f);
    if (!sc) return kExitConfig;
    if (!claim_out_dir(f.out_dir, f.force)) return kExitConfig;
    try {
        RunResult r = run_simulation(*sc);
        write_run_output(r, f.out_dir);
        std::cout << "run complete: " << to_string(sc->protocol) << "/"
                  << to_string(sc->coupling) << " seed " << sc->seed << ", "
                  << r.events << " events, outputs in " << f.out_dir << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return kExitSimError;
    }
}

int cmd_compare(const CommonFlags& f) {
    auto base = resolve(f);
    if (!base) return kExitConfig;
    if (!claim_out_dir(f.out_dir, f.force)) return kExitConfig;

    // Default comparison: key-agreement method (A) against the
    // symmetric-only baseline (B) on an otherwise identical scenario.
    // An explicit --protocol pins both sides (self-comparison).
    Scenario sa = *base, sb = *base;
    if (f.protocol.empty()) {
        sa.protocol = SimProtocol::EcdhAka;
        sb.protocol = SimProtocol::Aka;
    }

    try {
        auto fa = std::async(std::launch::async,
                             [&] { return run_simulation(sa); });
        RunResult rb = run_simulation(sb);
        RunResult ra = fa.get();
        write_run_output(ra, f.out_dir + "/a");
        write_run_output(rb, f.out_dir + "/b");

        ComparisonReport rep =
            compare(ra.scenario, ra.series, rb.scenario, rb.series);
        std::string text = rep.render();
        std::ofstream(f.out_dir + "/comparison.txt", std::ios::binary) << text;
        std::ofstream(f.out_dir + "/comparison.csv", std::ios::binary)
            << rep.to_csv();
        std::cout << text;
        if (rep.directions_evaluated && rep.violations > 0)
            return kExitDirectional;
        return kExitOk;
    } catch (const ScenarioMismatch& e) {
        std::cerr << "comparison error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return kExitSimError;
    }
}

const char* yn(bool b) { return b ? "yes" : "no"; }

std::string property_report_text(const PropertyReport& r,
                                 const MatrixColumn& ref, int seeds) {
    std::string s;
    char buf[256];
    auto add = [&](const char* fmt, auto... args) {
        std::snprintf(buf, sizeof buf, fmt, args...);
        s += buf;
    };
    add("property matrix for %s, %d seeds per scenario\n\n",
        to_string(r.protocol).c_str(), seeds);
    struct Row {
        const char* name;
        bool measured;
        bool expected;
    };
    Row rows[] = {
        {"identity_protection", r.identity_protection, ref.identity_protection},
        {"replay_resistant", r.replay_resistant, ref.replay_resistant},
        {"mitm_resistant", r.mitm_resistant, ref.mitm_resistant},
        {"pfs", r.pfs, ref.pfs},
        {"needs_sqn_sync", r.needs_sqn_sync, ref.needs_sqn_sync},
    };
    for (const Row& row : rows) {
        auto sp = r.seeds_passed.find(row.name);
        int passed = sp == r.seeds_passed.end() ? 0 : sp->second;
        add("  %-22s measured %-3s  reference %-3s  (%d/%d seeds)  %s\n",
            row.name, yn(row.measured), yn(row.expected), passed,
            r.seeds_total, row.measured == row.expected ? "match" : "MISMATCH");
        auto ev = r.evidence.find(row.name);
        if (ev != r.evidence.end()) add("      %s\n", ev->second.c_str());
    }
    add("\nreference column: %s (%s, %s)\n", ref.name.c_str(),
        ref.cryptosystem.c_str(), ref.subscriber_management.c_str());
    return s;
}

std::string property_report_csv(const PropertyReport& r,
                                const MatrixColumn& ref) {
    std::string s = "protocol,property,measured,reference,seeds_passed,seeds_total\n";
    auto row = [&](const char* name, bool measured, bool expected) {
        auto sp = r.seeds_passed.find(name);
        int passed = sp == r.seeds_passed.end() ? 0 : sp->second;
        s += to_string(r.protocol) + "," + name + "," + yn(measured) + "," +
             yn(expected) + "," + std::to_string(passed) + "," +
             std::to_string(r.seeds_total) + "\n";
    };
    row("identity_protection", r.identity_protection, ref.identity_protection);
    row("replay_resistant", r.replay_resistant, ref.replay_resistant);
    row("mitm_resistant", r.mitm_resistant, ref.mitm_resistant);
    row("pfs", r.pfs, ref.pfs);
    row("needs_sqn_sync", r.needs_sqn_sync, ref.needs_sqn_sync);
    return s;
}

int cmd_attack(const std::string& protocol, int seeds,
               const std::string& out_dir, bool force) {
    Protocol proto = protocol == "aka" ? Protocol::Aka : Protocol::EcdhAka;
    if (seeds < 20) {
        std::cerr << "at least 20 seeds are required for a verdict\n";
        return kExitConfig;
    }
    if (!out_dir.empty() && !claim_out_dir(out_dir, force)) return kExitConfig;

    PropertyReport rep = evaluate_matrix(proto, seeds);
    ReferenceTable table = reference_table();
    const MatrixColumn& ref =
        proto == Protocol::Aka ? table.eap_aka : table.proposed;

    std::string text = property_report_text(rep, ref, seeds);
    bool match = matches_reference(ref, rep);
    text += match ? "verdict: matches the reference column\n"
                  : "verdict: DOES NOT match the reference column\n";
    std::cout << text;
    if (!out_dir.empty()) {
        std::ofstream(out_dir + "/property_report.txt", std::ios::binary) << text;
        std::ofstream(out_dir + "/property_matrix.csv", std::ios::binary)
            << property_report_csv(rep, ref);
    }
    return match ? kExitOk : kExitMatrixMismatch;
}

int cmd_validate() {
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        std::cout << (ok ? "ok:   " : "FAIL: ") << name << "\n";
        if (!ok) ++failures;
    };

    CurveParams toy = CurveParams::toy();
    CurveParams p256 = CurveParams::p256();
    check("toy curve parameters validate", !toy.validate().has_value());
    check("default curve parameters validate", !p256.validate().has_value());

    // Exhaustive scalar multiples against iterated addition.
    {
        bool ok = true;
        ECPoint acc = ECPoint::at_infinity();
        for (mpz_class k = 1; k < toy.n; ++k) {
            acc = point_add(acc, toy.g, toy);
            if (scalar_mul(k, toy.g, toy) != acc) ok = false;
        }
        if (!point_add(acc, toy.g, toy).infinity) ok = false;  // n*G = identity
        check("scalar multiples match iterated addition (all scalars)", ok);
    }

    // Group laws over the whole toy group.
    {
        std::vector<ECPoint> pts{ECPoint::at_infinity()};
        ECPoint acc = ECPoint::at_infinity();
        for (mpz_class k = 1; k < toy.n; ++k) {
            acc = point_add(acc, toy.g, toy);
            pts.push_back(acc);
        }
        bool comm = true, assoc = true, inverse = true;
        for (const auto& p : pts)
            for (const auto& q : pts)
                if (!(point_add(p, q, toy) == point_add(q, p, toy))) comm = false;
        for (size_t i = 0; i < pts.size(); i += 3)
            for (size_t j = 0; j < pts.size(); j += 2)
                for (size_t k = 0; k < pts.size(); ++k) {
                    ECPoint l = point_add(point_add(pts[i], pts[j], toy), pts[k], toy);
                    ECPoint r = point_add(pts[i], point_add(pts[j], pts[k], toy), toy);
                    if (!(l == r)) assoc = false;
                }
        for (const auto& p : pts)
            if (!point_add(p, point_neg(p, toy), toy).infinity) inverse = false;
        check("toy group commutativity", comm);
        check("toy group associativity (sampled triples)", assoc);
        check("toy group inverses", inverse);
    }

    // Key agreement symmetry on the default curve.
    {
        Rng rng(20240811);
        bool ok = true;
        for (int i = 0; i < 50 && ok; ++i) {
            Scalar a = random_scalar(rng, p256);
            Scalar b = random_scalar(rng, p256);
            ECPoint pa = scalar_mul(a, p256.g, p256);
            ECPoint pb = scalar_mul(b, p256.g, p256);
            auto s1 = ecdh_shared(a, pb, p256);
            auto s2 = ecdh_shared(b, pa, p256);
            ok = std::holds_alternative<Bytes>(s1) &&
                 std::holds_alternative<Bytes>(s2) &&
                 std::get<Bytes>(s1) == std::get<Bytes>(s2);
        }
        check("key agreement symmetry (50 pairs, default curve)", ok);
    }

    // PRF domain separation and the sealed-payload round trip.
    {
        Rng rng(99);
        Bytes k = rng.bytes(16), msg = rng.bytes(23), nonce = rng.bytes(16);
        check("prf tag separation",
              prf(k, PrfTag::F1, msg, 128) != prf(k, PrfTag::F2, msg, 128));
        Bytes ct = sym_encrypt(k, nonce, msg);
        auto pt = sym_decrypt(k, nonce, ct);
        check("cipher round trip", pt.has_value() && *pt == msg);
        Bytes bad = ct;
        bad[3] ^= 0x20;
        check("cipher rejects tampering", !sym_decrypt(k, nonce, bad));
    }

    // Codec: canonical success frame and a request round trip.
    {
        Bytes success = encode_eap(EapMessage::success(7));
        check("success frame is 03 07 00 04",
              success == Bytes({0x03, 0x07, 0x00, 0x04}));
        EapMessage m;
        m.code = EapCode::Request;
        m.identifier = 42;
        m.method = EapMethod::Aka;
        m.subtype = static_cast<uint8_t>(EapSubtype::Challenge);
        Rng rng(5);
        m.add_attr(AT_RAND, rng.bytes(16));
        m.add_attr(AT_AUTN, rng.bytes(16));
        m.add_attr(AT_MAC, rng.bytes(16));
        auto back = decode_eap(encode_eap(m));
        check("codec round trip",
              std::holds_alternative<EapMessage>(back) &&
                  std::get<EapMessage>(back) == m);
    }

    std::cout << (failures == 0 ? "self-test passed\n" : "self-test FAILED\n");
    return failures == 0 ? kExitOk : kExitSelfTest;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"converged-network authentication simulator"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    CLI::App* run = app.add_subcommand("run", "Run one simulation");
    add_common(run, run_flags, true);

    CommonFlags cmp_flags;
    CLI::App* cmp = app.add_subcommand(
        "compare", "Run two configurations and report metric deltas");
    add_common(cmp, cmp_flags, true);

    std::string atk_protocol;
    int atk_seeds = 20;
    std::string atk_out;
    bool atk_force = false;
    CLI::App* atk = app.add_subcommand(
        "attack", "Evaluate the security property matrix");
    atk->add_option("--protocol", atk_protocol, "aka | ecdh-aka")
        ->required()
        ->check(CLI::IsMember({"aka", "ecdh-aka"}));
    atk->add_option("--seeds", atk_seeds, "Seeds per scenario (>= 20)");
    atk->add_option("--out", atk_out, "Optional report directory");
    atk->add_flag("--force", atk_force, "Write into an existing directory");

    CLI::App* val = app.add_subcommand("validate", "Crypto self-tests");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    if (run->parsed()) return cmd_run(run_flags);
    if (cmp->parsed()) return cmd_compare(cmp_flags);
    if (atk->parsed())
        return cmd_attack(atk_protocol, atk_seeds, atk_out, atk_force);
    if (val->parsed()) return cmd_validate();
    return kExitConfig;
}
