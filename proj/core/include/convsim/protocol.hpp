#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "convsim/bytes.hpp"
#include "convsim/eap.hpp"
#include "convsim/ec.hpp"
#include "convsim/identity.hpp"
#include "convsim/keys.hpp"
#include "convsim/rng.hpp"
#include "convsim/subscriber.hpp"

namespace convsim {

enum class Protocol {
    Aka,      // symmetric-only method, cleartext first identity
    EcdhAka,  // ephemeral key agreement folded into the same envelope
};

std::string to_string(Protocol p);

// Both roles walk the same ladder and never move backwards.
enum class SessionState {
    Idle,
    IdentitySent,        // identity round done (peer: sent; server: requested)
    ChallengeProcessed,  // challenge round done
    Done,
    Failed,
};

// What a step produced: at most one outgoing message plus a terminal marker.
struct StepOutput {
    std::optional<EapMessage> send;
    bool done = false;
    bool failed = false;
};

// Server-side state shared across sessions: the authenticator identity
// advertised in message 1, the per-epoch key pair for the key-agreement
// method, and the issued-token tables that let a later session map a
// pseudonym or fast re-auth token back to a subscriber.
struct ServerContext {
    Bytes server_id;
    Bytes ap_id;
    CurveParams curve;
    Scalar epoch_priv;  // b
    Bytes epoch_pub;    // encode_point(b*G)
    std::map<Bytes, std::string> pseudonyms;
    std::map<Bytes, std::string> reauth_ids;

    static ServerContext make(Bytes server_id, Bytes ap_id, CurveParams curve,
                              Rng& rng);
    void rotate_epoch(Rng& rng);
};

// What the peer is willing to talk to, plus the curve it validates points
// against. Checked before anything sensitive leaves the peer.
struct PeerTrust {
    std::vector<Bytes> server_ids;
    std::vector<Bytes> ap_ids;
    CurveParams curve;

    bool accepts(const Bytes& server_id, const Bytes& ap_id) const;
};

struct PeerSession {
    Protocol protocol = Protocol::Aka;
    SessionState state = SessionState::Idle;
    std::vector<Bytes> transcript;  // raw wire bytes, exchange order
    std::optional<SessionKeys> keys;

    Bytes sent_identity;  // encoded Identity from message 2
    int resyncs_sent = 0;

    // Key-agreement method only.
    std::optional<Scalar> eph_priv;  // a
    Bytes eph_pub;                   // encoded a*G as sent
    Bytes server_pub;                // encoded b*G as received
    Bytes shared;                    // x-coordinate bytes of ab*G
    Bytes nonce_p;
    Bytes nonce_s;

    explicit PeerSession(Protocol p) : protocol(p) {}
};

struct ServerSession {
    Protocol protocol = Protocol::Aka;
    SessionState state = SessionState::Idle;
    ServerContext* ctx = nullptr;
    std::vector<Bytes> transcript;
    std::optional<SessionKeys> keys;

    std::string imsi;          // resolved subscriber
    Bytes presented_identity;  // encoded Identity as received
    Bytes rand;                // outstanding challenge material
    Bytes xres;
    Bytes autn;
    int resyncs_seen = 0;

    Bytes client_pub;  // encoded a*G as received
    Bytes shared;
    Bytes nonce_p;
    Bytes nonce_s;

    uint8_t pending_id = 0;  // identifier the next Response must echo

    ServerSession(Protocol p, ServerContext& c) : protocol(p), ctx(&c) {}
};

// Steps take raw wire bytes and decode internally, so the transcript holds
// exactly what crossed the link and tampering tests operate on real frames.
// A server step with no incoming frame starts the conversation.

StepOutput aka_server_step(ServerSession& s, const std::optional<Bytes>& wire,
                           HssHandle& hss, Rng& rng);
StepOutput aka_peer_step(PeerSession& s, const Bytes& wire, UsimHandle& usim,
                         Rng& rng);

StepOutput ecdh_server_step(ServerSession& s, const std::optional<Bytes>& wire,
                            HssHandle& hss, Rng& rng);
StepOutput ecdh_peer_step(PeerSession& s, const Bytes& wire, UsimHandle& usim,
                          const PeerTrust& trust, Rng& rng);

// Protocol-dispatching wrappers.
StepOutput server_step(ServerSession& s, const std::optional<Bytes>& wire,
                       HssHandle& hss, Rng& rng);
StepOutput peer_step(PeerSession& s, const Bytes& wire, UsimHandle& usim,
                     const PeerTrust& trust, Rng& rng);

// AT_MAC input: the message with the MAC value zeroed, re-encoded, plus (for
// the final peer response of the key-agreement method) the concatenation of
// every prior frame, binding the whole conversation.
Bytes mac_input(const EapMessage& m);
Bytes mac_input_with_transcript(const EapMessage& m,
                                const std::vector<Bytes>& transcript);

}  // namespace convsim
