#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "convsim/protocol.hpp"

namespace convsim {

// ---------------------------------------------------------------------------
// Dialog harness: drives one peer and one server over a loopback wire with an
// optional tamper hook between them. Everything the adversary model needs
// (eavesdropping, substitution, replay material) comes out of `frames`.

struct DialogFrame {
    bool from_server = false;
    Bytes wire;
};

// Returns a replacement frame, or nullopt to pass the original through.
// index counts delivered frames from 0.
using TamperFn =
    std::function<std::optional<Bytes>(int index, bool from_server, const Bytes& wire)>;

struct DialogResult {
    SessionState peer_state = SessionState::Idle;
    SessionState server_state = SessionState::Idle;
    std::optional<SessionKeys> peer_keys;
    std::optional<SessionKeys> server_keys;
    std::vector<DialogFrame> frames;  // as delivered, tampering applied

    bool both_done() const {
        return peer_state == SessionState::Done &&
               server_state == SessionState::Done;
    }
    bool msk_equal() const {
        return peer_keys && server_keys && peer_keys->msk == server_keys->msk;
    }
};

DialogResult run_dialog(Protocol proto, HssHandle& hss, UsimHandle& usim,
                        ServerContext& ctx, const PeerTrust& trust, Rng& rng,
                        const TamperFn& tamper = nullptr);

// True if the byte string occurs contiguously in any frame; reports where.
bool frames_contain(const std::vector<DialogFrame>& frames, const Bytes& needle,
                    size_t* frame_idx = nullptr, size_t* offset = nullptr);

// True if any decodable frame carries the attribute.
bool frames_carry_attr(const std::vector<DialogFrame>& frames, uint8_t attr_id);

// ---------------------------------------------------------------------------
// Adversary scenarios.

enum class AttackScenario {
    IdentityCatch,     // passive capture of the identity round
    ReplayChallenge,   // stored challenge re-injected into a fresh session
    RelaySubstitute,   // active relay substituting values in messages 1-2
    KeyCompromisePfs,  // long-term key disclosed after the session
    SqnDesyncCost,     // counter desynchronisation, measured in extra frames
};

std::string to_string(AttackScenario s);
std::vector<AttackScenario> all_scenarios();

enum class Capability { Eavesdrop, Inject, ReplayStore, ActiveRelay, CompromiseK };

struct AdversaryModel {
    std::set<Capability> capabilities;
    bool compromise_after_session = false;

    // ActiveRelay subsumes reading and writing the channel.
    bool valid() const;
    static AdversaryModel for_scenario(AttackScenario s);
};

enum class AttackOutcomeKind {
    AttackerLearnedImsi,
    AttackerLearnedMsk,
    Detected,    // an honest party refused or failed before key use
    NoEffect,    // attack ran, adversary gained nothing
    ExtraMessages,
};

struct AttackOutcome {
    AttackOutcomeKind kind = AttackOutcomeKind::NoEffect;
    int extra_messages = 0;  // ExtraMessages only
    std::string detail;      // evidence: what happened, with frame references
};

std::string to_string(AttackOutcomeKind k);

// Deterministic per (protocol, scenario, seed).
AttackOutcome run_attack(Protocol proto, AttackScenario scenario, uint64_t seed);

// Post-session derivation attempt from the long-term key plus recorded
// frames only. Succeeds for the symmetric-only method (CK/IK/identity are
// all recomputable from K and public frame fields); returns nullopt for the
// key-agreement method, whose master key needs the ephemeral shared secret.
std::optional<Bytes> derive_from_longterm(Protocol proto, const Bytes& k,
                                          const std::vector<DialogFrame>& frames);

// ---------------------------------------------------------------------------
// Property matrix.

struct PropertyReport {
    Protocol protocol = Protocol::Aka;
    bool identity_protection = false;
    bool replay_resistant = false;
    bool mitm_resistant = false;
    bool pfs = false;
    bool needs_sqn_sync = false;
    // property name -> transcript-backed evidence line
    std::map<std::string, std::string> evidence;
    // property name -> seeds on which the property-supporting outcome held
    std::map<std::string, int> seeds_passed;
    int seeds_total = 0;
};

// Runs every scenario over a fixed seed set (at least 20) and aggregates.
// A property holds only if it holds on every seed.
PropertyReport evaluate_matrix(Protocol proto, int seed_count = 20);

// ---------------------------------------------------------------------------
// Reference comparison matrix (static data for the methods this library does
// not implement; the two implemented columns must match evaluate_matrix).

struct MatrixColumn {
    std::string name;
    std::string cryptosystem;
    std::string subscriber_management;
    bool identity_protection = false;
    bool interworking = false;
    bool mitm_resistant = false;
    bool replay_resistant = false;
    bool pfs = false;
    bool needs_sqn_sync = false;  // rendered as a dash when false
};

struct ReferenceTable {
    MatrixColumn proposed;
    MatrixColumn eap_aka;
    MatrixColumn eap_sim;
    MatrixColumn eap_tls;
    MatrixColumn eap_ttls;
};

ReferenceTable reference_table();

// The five boolean rows of a column against a measured report.
bool matches_reference(const MatrixColumn& col, const PropertyReport& r);

}  // namespace convsim
