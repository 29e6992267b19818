#pragma once

#include "convsim/bytes.hpp"

namespace convsim {

struct SessionKeys {
    Bytes mk;      // 32 bytes, master key
    Bytes k_aut;   // 16 bytes, keys AT_MAC
    Bytes k_encr;  // 16 bytes, keys AT_ENCR_DATA
    Bytes msk;     // 64 bytes, exported to the link layer

    bool operator==(const SessionKeys&) const = default;
};

// Master key binds CK||IK to the peer identity actually authenticated.
SessionKeys derive_keys_aka(const Bytes& ck, const Bytes& ik,
                            const Bytes& identity);

// Master key folds the ECDH shared secret in ahead of CK||IK and binds both
// session nonces, so it changes even when the AKA quintet repeats.
SessionKeys derive_keys_ecdh(const Bytes& shared, const Bytes& ck,
                             const Bytes& ik, const Bytes& nonce_p,
                             const Bytes& nonce_s);

}  // namespace convsim
