#include "doctest.h"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <stdexcept>

#include "convsim/bytes.hpp"
#include "convsim/prf.hpp"

using namespace convsim;

namespace {

// Straight-line recomputation of the documented expansion for outputs up to
// one block: HMAC-SHA256(key, tag || counter=1 (u32be) || out_bits (u32be)
// || data), truncated. Anything the library changes in the layout breaks
// every derived key, so this pins it independently.
Bytes oracle_one_block(const Bytes& key, uint8_t tag, const Bytes& data,
                       unsigned out_bits) {
    Bytes input;
    input.push_back(tag);
    append_u32be(input, 1);
    append_u32be(input, out_bits);
    append(input, data);
    Bytes out(32);
    unsigned int n = 32;
    REQUIRE(HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
                 input.data(), input.size(), out.data(), &n));
    out.resize(std::min(32u, out_bits / 8));
    return out;
}

}  // namespace

TEST_CASE("expansion layout matches the documented counter-mode construction") {
    Bytes key = from_hex("000102030405060708090a0b0c0d0e0f");
    Bytes data = from_string("sample input");
    for (unsigned bits : {8u, 64u, 128u, 256u}) {
        CHECK(prf(key, PrfTag::Mac, data, bits) ==
              oracle_one_block(key, 16, data, bits));
    }
    // multi-block output: first 32 bytes must still equal block 1
    Bytes big = prf(key, PrfTag::Stream, data, 512);
    CHECK(big.size() == 64);
    CHECK(Bytes(big.begin(), big.begin() + 32) ==
          oracle_one_block(key, 17, data, 512));
}

TEST_CASE("output length follows out_bits and bad sizes throw") {
    Bytes key(16, 0x42);
    CHECK(prf(key, PrfTag::F2, {}, 64).size() == 8);
    CHECK(prf(key, PrfTag::F5, {}, 48).size() == 6);
    CHECK(prf(key, PrfTag::Msk, {}, 512).size() == 64);
    CHECK_THROWS_AS(prf(key, PrfTag::F1, {}, 0), std::invalid_argument);
    CHECK_THROWS_AS(prf(key, PrfTag::F1, {}, 12), std::invalid_argument);
    CHECK_THROWS_AS(prf(key, PrfTag::F1, {}, 520), std::invalid_argument);
}

TEST_CASE("domain tags separate instances of the same key and data") {
    Bytes key(16, 0x11);
    Bytes data = from_string("same bytes");
    Bytes f1 = prf(key, PrfTag::F1, data, 128);
    Bytes f2 = prf(key, PrfTag::F2, data, 128);
    Bytes m = prf(key, PrfTag::Mac, data, 128);
    CHECK(f1 != f2);
    CHECK(f1 != m);
    CHECK(f2 != m);
    // and tags are the only difference: repeat calls agree
    CHECK(f1 == prf(key, PrfTag::F1, data, 128));
}

TEST_CASE("key and data changes both change the output") {
    Bytes k1(16, 1), k2(16, 2);
    Bytes d1 = from_string("a"), d2 = from_string("b");
    CHECK(prf(k1, PrfTag::Mac, d1, 128) != prf(k2, PrfTag::Mac, d1, 128));
    CHECK(prf(k1, PrfTag::Mac, d1, 128) != prf(k1, PrfTag::Mac, d2, 128));
}

TEST_CASE("mac verifies and rejects") {
    Bytes key(16, 0x77);
    Bytes msg = from_string("the quick brown fox");
    Bytes tag = mac(key, msg);
    CHECK(tag.size() == 16);
    CHECK(verify_mac(key, msg, tag));

    Bytes other = msg;
    other[0] ^= 1;
    CHECK(!verify_mac(key, other, tag));
    Bytes bad_tag = tag;
    bad_tag[15] ^= 0x80;
    CHECK(!verify_mac(key, msg, bad_tag));
    CHECK(!verify_mac(Bytes(16, 0x78), msg, tag));
}

TEST_CASE("authenticated encryption round trips") {
    Bytes key(16, 0x05);
    Bytes nonce(16, 0xA0);
    Bytes pt = from_string("identity:001011234567890");
    Bytes ct = sym_encrypt(key, nonce, pt);
    CHECK(ct.size() == pt.size() + 16);
    auto back = sym_decrypt(key, nonce, ct);
    REQUIRE(back.has_value());
    CHECK(*back == pt);

    // empty plaintext still authenticates
    Bytes ct0 = sym_encrypt(key, nonce, {});
    CHECK(ct0.size() == 16);
    auto back0 = sym_decrypt(key, nonce, ct0);
    REQUIRE(back0.has_value());
    CHECK(back0->empty());
}

TEST_CASE("every single-byte flip of the ciphertext is rejected") {
    Bytes key(16, 0x05);
    Bytes nonce(16, 0xA0);
    Bytes pt = from_string("forty-two bytes of plaintext padding..!");
    Bytes ct = sym_encrypt(key, nonce, pt);
    for (size_t i = 0; i < ct.size(); ++i) {
        Bytes bad = ct;
        bad[i] ^= 0xFF;
        CHECK(!sym_decrypt(key, nonce, bad).has_value());
    }
    CHECK(!sym_decrypt(Bytes(16, 0x06), nonce, ct).has_value());
    CHECK(!sym_decrypt(key, Bytes(16, 0xA1), ct).has_value());
    CHECK(!sym_decrypt(key, nonce, Bytes(8, 0)).has_value());  // shorter than a tag
}

TEST_CASE("ciphertext is deterministic per key and nonce, fresh per nonce") {
    Bytes key(16, 0x31);
    Bytes pt = from_string("stable bytes");
    Bytes n1(16, 1), n2(16, 2);
    CHECK(sym_encrypt(key, n1, pt) == sym_encrypt(key, n1, pt));
    CHECK(sym_encrypt(key, n1, pt) != sym_encrypt(key, n2, pt));
}

TEST_CASE("constant-time compare agrees with equality") {
    CHECK(ct_equal({}, {}));
    CHECK(ct_equal({1, 2, 3}, {1, 2, 3}));
    CHECK(!ct_equal({1, 2, 3}, {1, 2, 4}));
    CHECK(!ct_equal({1, 2, 3}, {1, 2}));
}
