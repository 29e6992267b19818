#include "convsim/prf.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <cassert>
#include <stdexcept>

namespace convsim {

static Bytes hmac_sha256(const Bytes& key, const Bytes& data) {
    Bytes out(32);
    unsigned int out_len = 32;
    // One-shot HMAC; the deprecated-in-3.0 EVP_MAC dance is not worth the
    // extra allocation churn on this hot path.
    if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
              data.data(), data.size(), out.data(), &out_len) ||
        out_len != 32) {
        throw std::runtime_error("hmac_sha256 failed");
    }
    return out;
}

Bytes prf(const Bytes& key, PrfTag tag, const Bytes& data, unsigned out_bits) {
    if (out_bits == 0 || out_bits > 512 || out_bits % 8 != 0)
        throw std::invalid_argument("prf: out_bits must be 8..512 and byte-aligned");
    const unsigned out_len = out_bits / 8;
    Bytes out;
    out.reserve(out_len);
    uint32_t counter = 1;
    while (out.size() < out_len) {
        Bytes block_input;
        block_input.reserve(data.size() + 9);
        block_input.push_back(static_cast<uint8_t>(tag));
        append_u32be(block_input, counter++);
        append_u32be(block_input, out_bits);
        append(block_input, data);
        Bytes block = hmac_sha256(key, block_input);
        size_t take = std::min(block.size(), out_len - out.size());
        out.insert(out.end(), block.begin(), block.begin() + take);
    }
    return out;
}

Bytes mac(const Bytes& key, const Bytes& msg) {
    return prf(key, PrfTag::Mac, msg, 128);
}

bool verify_mac(const Bytes& key, const Bytes& msg, const Bytes& tag) {
    return ct_equal(mac(key, msg), tag);
}

static Bytes keystream(const Bytes& key, const Bytes& nonce, size_t n) {
    Bytes ks;
    ks.reserve(n);
    uint64_t block = 0;
    while (ks.size() < n) {
        Bytes input = nonce;
        append_u64be(input, block++);
        Bytes chunk = prf(key, PrfTag::Stream, input, 512);
        size_t take = std::min(chunk.size(), n - ks.size());
        ks.insert(ks.end(), chunk.begin(), chunk.begin() + take);
    }
    return ks;
}

Bytes sym_encrypt(const Bytes& key, const Bytes& nonce, const Bytes& plaintext) {
    Bytes ct = xor_bytes(plaintext, keystream(key, nonce, plaintext.size()));
    Bytes tag_input = nonce;
    append(tag_input, ct);
    Bytes tag = prf(key, PrfTag::StreamMac, tag_input, 128);
    append(ct, tag);
    return ct;
}

std::optional<Bytes> sym_decrypt(const Bytes& key, const Bytes& nonce,
                                 const Bytes& ciphertext) {
    if (ciphertext.size() < 16) return std::nullopt;
    Bytes ct(ciphertext.begin(), ciphertext.end() - 16);
    Bytes tag(ciphertext.end() - 16, ciphertext.end());
    Bytes tag_input = nonce;
    append(tag_input, ct);
    if (!ct_equal(prf(key, PrfTag::StreamMac, tag_input, 128), tag))
        return std::nullopt;
    return xor_bytes(ct, keystream(key, nonce, ct.size()));
}

}  // namespace convsim
