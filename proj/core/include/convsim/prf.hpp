#pragma once

#include <cstdint>
#include <optional>

#include "convsim/bytes.hpp"

namespace convsim {

// Domain-separation tags. One keyed PRF underlies every MAC, key-derivation
// and cipher-function instance in the library; the tag keeps the instances
// independent. Values are wire-stable: they are mixed into derived keys, so
// renumbering them changes every derived artifact.
enum class PrfTag : uint8_t {
    F1 = 1,        // network authentication code over (RAND, SQN, AMF)
    F2 = 2,        // subscriber response RES
    F3 = 3,        // cipher key CK
    F4 = 4,        // integrity key IK
    F5 = 5,        // anonymity key AK
    F1Star = 6,    // resynchronisation authentication code

    Mac = 16,      // generic 128-bit message authentication
    Stream = 17,   // keystream blocks for sym_encrypt
    StreamMac = 18,// authentication tag over ciphertext
    IdKey = 19,    // identity-encryption key from an ECDH shared secret
    HssBind = 20,  // subscriber-key-derived binding over session ephemerals
    MasterAka = 21,   // master key for the symmetric-only method
    MasterEcdh = 22,  // master key mixing the ECDH shared secret
    KAut = 23,     // per-session authentication key
    KEncr = 24,    // per-session encryption key
    Msk = 25,      // exported master session key
    Password = 26, // standalone username/password digest
};

// Keyed pseudo-random function. Expansion is HMAC-SHA256 in counter mode:
// block_i = HMAC(key, tag || i || out_bits || data). out_bits must be a
// multiple of 8 and at most 512.
Bytes prf(const Bytes& key, PrfTag tag, const Bytes& data, unsigned out_bits);

// 128-bit message authentication code.
Bytes mac(const Bytes& key, const Bytes& msg);

// Constant-time tag check.
bool verify_mac(const Bytes& key, const Bytes& msg, const Bytes& tag);

// Authenticated symmetric encryption: PRF keystream XOR plaintext, then a
// 128-bit tag over (nonce || ciphertext). Output is ciphertext || tag.
// The nonce must be unique per (key, message); callers here derive fresh
// keys per session so a random 16-byte nonce is plenty.
Bytes sym_encrypt(const Bytes& key, const Bytes& nonce, const Bytes& plaintext);

// Returns the plaintext, or nullopt if the tag does not verify (AuthFail).
std::optional<Bytes> sym_decrypt(const Bytes& key, const Bytes& nonce,
                                 const Bytes& ciphertext);

}  // namespace convsim
