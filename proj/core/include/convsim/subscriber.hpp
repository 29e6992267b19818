#pragma once

#include <map>
#include <optional>
#include <string>

#include "convsim/aka.hpp"
#include "convsim/bytes.hpp"
#include "convsim/identity.hpp"
#include "convsim/rng.hpp"

namespace convsim {

// Challenge material for the key-agreement variant. No sequence number is
// involved: freshness comes from the nonces and the ephemeral points, and
// network authentication from mac_k, which only holders of K can produce.
struct EcdhMaterial {
    Bytes rand;   // 16
    Bytes xres;   // 8
    Bytes ck;     // 16
    Bytes ik;     // 16
    Bytes mac_k;  // 16, binds client point, server point, rand and nonces
};

Bytes compute_mac_k(const SubscriberKey& k, const Bytes& client_pub,
                    const Bytes& server_pub, const Bytes& rand,
                    const Bytes& nonce_p, const Bytes& nonce_s);

// Home subscriber database. Owns long-term keys and the per-subscriber
// sequence counter; all randomness comes from the caller so runs replay.
class HssHandle {
public:
    void provision(const std::string& imsi, SubscriberKey k,
                   uint64_t initial_sqn = 0);
    bool known(const std::string& imsi) const;

    // Advances the subscriber's counter and builds a fresh quintet.
    std::optional<AuthVector> generate_vector(const std::string& imsi, Rng& rng);

    // Recovers the peer's counter from AUTS. False if the token fails
    // validation against rand.
    bool resynchronize(const std::string& imsi, const Bytes& rand,
                       const Bytes& auts);

    std::optional<EcdhMaterial> ecdh_material(const std::string& imsi,
                                              const Bytes& client_pub,
                                              const Bytes& server_pub,
                                              const Bytes& nonce_p,
                                              const Bytes& nonce_s, Rng& rng);

    // Deliberate disclosure used by the key-compromise evaluation. Nothing
    // in the protocol path calls this.
    std::optional<Bytes> longterm_key(const std::string& imsi) const;

    uint64_t sqn_of(const std::string& imsi) const;
    void force_sqn(const std::string& imsi, uint64_t sqn);

private:
    struct Record {
        SubscriberKey k;
        uint64_t sqn = 0;
    };
    std::map<std::string, Record> subs_;
};

struct EcdhPeerResult {
    Bytes res;  // 8
    Bytes ck;   // 16
    Bytes ik;   // 16
};

// Peer-side credential holder: the long-term key, the identity namespace
// state and the acceptance window live here, not in the session objects.
class UsimHandle {
public:
    UsimHandle(std::string imsi, SubscriberKey k);

    const std::string& imsi() const { return imsi_; }

    // Pseudonym if one has been issued, otherwise the permanent identity.
    Identity choose_identity() const;
    void store_pseudonym(Bytes handle) { pseudonym_ = std::move(handle); }
    void store_reauth_id(Bytes handle) { reauth_id_ = std::move(handle); }
    const std::optional<Bytes>& pseudonym() const { return pseudonym_; }
    const std::optional<Bytes>& reauth_id() const { return reauth_id_; }

    VerifyAutnResult process_challenge(const Bytes& rand, const Bytes& autn);

    // Checks mac_k and, on success, runs the response functions. nullopt
    // means the challenge was not produced by a holder of K for these
    // exact points and nonces.
    std::optional<EcdhPeerResult> verify_ecdh_challenge(
        const Bytes& rand, const Bytes& client_pub, const Bytes& server_pub,
        const Bytes& nonce_p, const Bytes& nonce_s, const Bytes& mac_k);

    // Exposed so tests can assert the window is untouched by runs that
    // must not consult it.
    SqnState sqn;

private:
    std::string imsi_;
    SubscriberKey k_;
    std::optional<Bytes> pseudonym_;
    std::optional<Bytes> reauth_id_;
};

}  // namespace convsim
