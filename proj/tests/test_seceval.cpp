#include "doctest.h"

#include <variant>

#include "convsim/prf.hpp"
#include "convsim/seceval.hpp"

using namespace convsim;

namespace {

// Shared honest-dialog fixture on the small curve so the PFS boundary case
// can brute-force the discrete log.
struct ToyDialog {
    HssHandle hss;
    UsimHandle usim;
    ServerContext ctx;
    PeerTrust trust;
    DialogResult result;

    explicit ToyDialog(Protocol proto, uint64_t seed = 5)
        : usim("001011234567890", SubscriberKey::from_bytes(Bytes(16, 0x5A))) {
        hss.provision("001011234567890", SubscriberKey::from_bytes(Bytes(16, 0x5A)));
        Rng ctx_rng(Rng::derive_seed(seed, "ctx"));
        ctx = ServerContext::make(from_string("home-aaa"), from_string("hotspot-1"),
                                  CurveParams::toy(), ctx_rng);
        trust.server_ids = {from_string("home-aaa")};
        trust.ap_ids = {from_string("hotspot-1")};
        trust.curve = CurveParams::toy();
        Rng rng(Rng::derive_seed(seed, "dialog"));
        result = run_dialog(proto, hss, usim, ctx, trust, rng);
    }
};

Bytes attr_of(const std::vector<DialogFrame>& frames, size_t idx, uint8_t id) {
    auto d = decode_eap(frames.at(idx).wire);
    REQUIRE(std::holds_alternative<EapMessage>(d));
    const Bytes* v = std::get<EapMessage>(d).find_attr(id);
    REQUIRE(v != nullptr);
    return *v;
}

}  // namespace

TEST_CASE("measured matrix for the symmetric-only method") {
    PropertyReport r = evaluate_matrix(Protocol::Aka);
    CHECK(r.protocol == Protocol::Aka);
    CHECK(!r.identity_protection);
    CHECK(r.replay_resistant);
    CHECK(!r.mitm_resistant);
    CHECK(!r.pfs);
    CHECK(r.needs_sqn_sync);
    CHECK(r.seeds_total >= 20);
    for (const char* prop : {"identity_protection", "replay_resistant",
                             "mitm_resistant", "pfs", "needs_sqn_sync"}) {
        CAPTURE(prop);
        CHECK(r.evidence.count(prop) == 1);
        CHECK(!r.evidence.at(prop).empty());
    }
    CHECK(matches_reference(reference_table().eap_aka, r));
    CHECK(!matches_reference(reference_table().proposed, r));
}

TEST_CASE("measured matrix for the key-agreement method") {
    PropertyReport r = evaluate_matrix(Protocol::EcdhAka);
    CHECK(r.identity_protection);
    CHECK(r.replay_resistant);
    CHECK(r.mitm_resistant);
    CHECK(r.pfs);
    CHECK(!r.needs_sqn_sync);
    CHECK(matches_reference(reference_table().proposed, r));
    CHECK(!matches_reference(reference_table().eap_aka, r));
}

TEST_CASE("attack outcomes are deterministic per (protocol, scenario, seed)") {
    for (Protocol proto : {Protocol::Aka, Protocol::EcdhAka}) {
        for (AttackScenario s : all_scenarios()) {
            AttackOutcome a = run_attack(proto, s, 42);
            AttackOutcome b = run_attack(proto, s, 42);
            CHECK(a.kind == b.kind);
            CHECK(a.extra_messages == b.extra_messages);
            CHECK(a.detail == b.detail);
            CHECK(!a.detail.empty());
        }
    }
}

TEST_CASE("identity capture works against cleartext, not against the encrypted round") {
    AttackOutcome aka = run_attack(Protocol::Aka, AttackScenario::IdentityCatch, 1);
    CHECK(aka.kind == AttackOutcomeKind::AttackerLearnedImsi);
    AttackOutcome ecdh = run_attack(Protocol::EcdhAka, AttackScenario::IdentityCatch, 1);
    CHECK(ecdh.kind == AttackOutcomeKind::NoEffect);
}

TEST_CASE("counter desynchronisation costs the symmetric method a resync round") {
    AttackOutcome aka = run_attack(Protocol::Aka, AttackScenario::SqnDesyncCost, 1);
    CHECK(aka.kind == AttackOutcomeKind::ExtraMessages);
    CHECK(aka.extra_messages == 2);
    // Same measurement for the key-agreement method, but the count is zero:
    // no window consultation, so the desync is invisible on the wire.
    AttackOutcome ecdh = run_attack(Protocol::EcdhAka, AttackScenario::SqnDesyncCost, 1);
    CHECK(ecdh.kind == AttackOutcomeKind::ExtraMessages);
    CHECK(ecdh.extra_messages == 0);
}

TEST_CASE("adversary models are well formed") {
    for (AttackScenario s : all_scenarios()) {
        AdversaryModel m = AdversaryModel::for_scenario(s);
        CHECK(m.valid());
        CHECK(!m.capabilities.empty());
    }
    AdversaryModel bogus;
    bogus.capabilities = {Capability::ActiveRelay, Capability::Eavesdrop};
    CHECK(!bogus.valid());  // a relay must declare both read and write
}

TEST_CASE("post-compromise derivation recovers the symmetric master key only") {
    for (Protocol proto : {Protocol::Aka, Protocol::EcdhAka}) {
        CAPTURE(to_string(proto));
        ToyDialog d(proto);
        REQUIRE(d.result.both_done());
        Bytes k = *d.hss.longterm_key("001011234567890");
        auto derived = derive_from_longterm(proto, k, d.result.frames);
        if (proto == Protocol::Aka) {
            REQUIRE(derived.has_value());
            CHECK(*derived == d.result.server_keys->msk);
        } else {
            CHECK(!derived.has_value());
        }
    }
}

TEST_CASE("forward secrecy on the small curve falls exactly when the log is solved") {
    // Everything below uses only what an eavesdropper records plus the
    // long-term key disclosed afterwards. The single missing ingredient is
    // the discrete log of one ephemeral point; on the 19-element group it is
    // enumerable, and recovering it reproduces the session keys bit for bit.
    ToyDialog d(Protocol::EcdhAka);
    REQUIRE(d.result.both_done());
    CurveParams curve = CurveParams::toy();

    Bytes spub_wire = attr_of(d.result.frames, 0, AT_SPUB);
    Bytes cpub_wire = attr_of(d.result.frames, 1, AT_CPUB);
    Bytes nonce_p = attr_of(d.result.frames, 1, AT_NONCE_P);
    Bytes rand = attr_of(d.result.frames, 2, AT_RAND);
    Bytes nonce_s = attr_of(d.result.frames, 2, AT_NONCE_S);

    auto spub = decode_point(spub_wire, curve);
    auto cpub = decode_point(cpub_wire, curve);
    REQUIRE(spub.has_value());
    REQUIRE(cpub.has_value());

    // Brute-force the client's ephemeral scalar.
    std::optional<Scalar> solved;
    for (unsigned k = 1; k < 19; ++k) {
        if (scalar_mul(k, curve.g, curve) == *cpub) {
            solved = Scalar(k);
            break;
        }
    }
    REQUIRE(solved.has_value());

    auto shared = ecdh_shared(*solved, *spub, curve);
    REQUIRE(std::holds_alternative<Bytes>(shared));

    Bytes k_long = *d.hss.longterm_key("001011234567890");
    SubscriberKey sk = SubscriberKey::from_bytes(k_long);
    Bytes ck = f3(sk, rand);
    Bytes ik = f4(sk, rand);
    SessionKeys rebuilt =
        derive_keys_ecdh(std::get<Bytes>(shared), ck, ik, nonce_p, nonce_s);
    CHECK(rebuilt.msk == d.result.server_keys->msk);
    CHECK(rebuilt == *d.result.server_keys);
}

TEST_CASE("reference table shape") {
    ReferenceTable t = reference_table();
    CHECK(t.proposed.pfs);
    CHECK(t.proposed.identity_protection);
    CHECK(t.proposed.mitm_resistant);
    CHECK(!t.proposed.needs_sqn_sync);
    CHECK(!t.eap_aka.identity_protection);
    CHECK(!t.eap_aka.pfs);
    CHECK(t.eap_aka.needs_sqn_sync);
    CHECK(!t.eap_sim.pfs);
    CHECK(t.eap_tls.mitm_resistant);
    for (const MatrixColumn* c : {&t.proposed, &t.eap_aka, &t.eap_sim, &t.eap_tls, &t.eap_ttls}) {
        CHECK(!c->name.empty());
        CHECK(!c->cryptosystem.empty());
    }
}
