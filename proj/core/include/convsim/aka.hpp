#pragma once

#include <cstdint>
#include <variant>

#include "convsim/bytes.hpp"
#include "convsim/prf.hpp"

namespace convsim {

// 128-bit long-term subscriber key, shared between USIM and home subscriber
// store and never sent anywhere.
struct SubscriberKey {
    Bytes k;  // 16 bytes

    static SubscriberKey from_bytes(Bytes b);
};

constexpr uint64_t kSqnMask = (1ull << 48) - 1;
constexpr uint64_t kSqnDeltaMax = 1ull << 28;

// Peer-side sequence acceptance window. last_accepted is the highest SQN the
// peer has accepted; a fresh challenge must satisfy
// last_accepted < SQN <= last_accepted + delta_max. ops counts every
// consultation or update so tests can prove a protocol never touched it.
struct SqnState {
    uint64_t last_accepted = 0;
    uint64_t delta_max = kSqnDeltaMax;
    uint64_t ops = 0;

    bool accepts(uint64_t sqn) {
        ++ops;
        return sqn > last_accepted && sqn - last_accepted <= delta_max;
    }
    void advance(uint64_t sqn) {
        ++ops;
        last_accepted = sqn;
    }
};

// One authentication vector as issued by the subscriber store.
// autn layout: SQN^AK (6 bytes) || AMF (2 bytes) || MAC-A (8 bytes).
struct AuthVector {
    Bytes rand;  // 16 bytes
    Bytes xres;  // 8 bytes
    Bytes ck;    // 16 bytes
    Bytes ik;    // 16 bytes
    Bytes autn;  // 16 bytes
    uint64_t sqn = 0;  // store-side bookkeeping; not part of the wire value
};

// The function family is one PRF under six domain tags.
Bytes f1(const SubscriberKey& k, const Bytes& rand, uint64_t sqn, uint16_t amf);  // 64 bit
Bytes f2(const SubscriberKey& k, const Bytes& rand);                              // 64 bit
Bytes f3(const SubscriberKey& k, const Bytes& rand);                              // 128 bit
Bytes f4(const SubscriberKey& k, const Bytes& rand);                              // 128 bit
Bytes f5(const SubscriberKey& k, const Bytes& rand);                              // 48 bit
Bytes f1_star(const SubscriberKey& k, const Bytes& rand, uint64_t sqn);           // 64 bit

AuthVector aka_generate_vector(const SubscriberKey& k, uint64_t sqn, uint16_t amf,
                               const Bytes& rand);

struct AkaOk {
    Bytes res;
    Bytes ck;
    Bytes ik;
    uint64_t sqn = 0;
};
struct MacFailure {};
struct SyncFailure {
    Bytes auts;  // SQN_ms^AK (6 bytes) || MAC-S (8 bytes)
};

using VerifyAutnResult = std::variant<AkaOk, MacFailure, SyncFailure>;

// Peer-side check of a challenge. A valid MAC with a stale SQN produces
// SyncFailure carrying AUTS for the resynchronisation round; a fresh SQN
// advances the window and releases RES/CK/IK.
VerifyAutnResult verify_autn(const SubscriberKey& k, const Bytes& rand,
                             const Bytes& autn, SqnState& state);

struct RejectAuts {};

// Store-side handling of AUTS. Returns the peer's sequence number if the
// resync MAC verifies against this rand; RejectAuts otherwise (in particular
// when AUTS is replayed against a different rand).
std::variant<uint64_t, RejectAuts> resynchronize(const SubscriberKey& k,
                                                 const Bytes& rand, const Bytes& auts);

}  // namespace convsim
