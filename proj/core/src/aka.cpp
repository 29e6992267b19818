#include "convsim/aka.hpp"

#include <stdexcept>

namespace convsim {

SubscriberKey SubscriberKey::from_bytes(Bytes b) {
    if (b.size() != 16) throw std::invalid_argument("SubscriberKey: need 16 bytes");
    return SubscriberKey{std::move(b)};
}

static Bytes sqn_to_bytes(uint64_t sqn) {
    Bytes out(6);
    for (int i = 5; i >= 0; --i) {
        out[static_cast<size_t>(i)] = static_cast<uint8_t>(sqn);
        sqn >>= 8;
    }
    return out;
}

static uint64_t sqn_from_bytes(const Bytes& b) {
    uint64_t v = 0;
    for (size_t i = 0; i < 6; ++i) v = v << 8 | b[i];
    return v;
}

Bytes f1(const SubscriberKey& k, const Bytes& rand, uint64_t sqn, uint16_t amf) {
    Bytes data = rand;
    append(data, sqn_to_bytes(sqn & kSqnMask));
    append_u16be(data, amf);
    return prf(k.k, PrfTag::F1, data, 64);
}

Bytes f2(const SubscriberKey& k, const Bytes& rand) {
    return prf(k.k, PrfTag::F2, rand, 64);
}

Bytes f3(const SubscriberKey& k, const Bytes& rand) {
    return prf(k.k, PrfTag::F3, rand, 128);
}

Bytes f4(const SubscriberKey& k, const Bytes& rand) {
    return prf(k.k, PrfTag::F4, rand, 128);
}

Bytes f5(const SubscriberKey& k, const Bytes& rand) {
    return prf(k.k, PrfTag::F5, rand, 48);
}

Bytes f1_star(const SubscriberKey& k, const Bytes& rand, uint64_t sqn) {
    Bytes data = rand;
    append(data, sqn_to_bytes(sqn & kSqnMask));
    return prf(k.k, PrfTag::F1Star, data, 64);
}

AuthVector aka_generate_vector(const SubscriberKey& k, uint64_t sqn, uint16_t amf,
                               const Bytes& rand) {
    if (rand.size() != 16) throw std::invalid_argument("aka_generate_vector: rand size");
    sqn &= kSqnMask;
    AuthVector v;
    v.rand = rand;
    v.xres = f2(k, rand);
    v.ck = f3(k, rand);
    v.ik = f4(k, rand);
    v.sqn = sqn;
    Bytes ak = f5(k, rand);
    Bytes mac_a = f1(k, rand, sqn, amf);
    v.autn = xor_bytes(sqn_to_bytes(sqn), ak);
    append_u16be(v.autn, amf);
    append(v.autn, mac_a);
    return v;
}

VerifyAutnResult verify_autn(const SubscriberKey& k, const Bytes& rand,
                             const Bytes& autn, SqnState& state) {
    if (rand.size() != 16 || autn.size() != 16) return MacFailure{};
    Bytes concealed(autn.begin(), autn.begin() + 6);
    uint16_t amf = read_u16be(autn.data() + 6);
    Bytes mac_a(autn.begin() + 8, autn.end());

    Bytes ak = f5(k, rand);
    uint64_t sqn = sqn_from_bytes(xor_bytes(concealed, ak));
    if (!ct_equal(f1(k, rand, sqn, amf), mac_a)) return MacFailure{};

    if (!state.accepts(sqn)) {
        // Stale or too-far-ahead sequence number with a genuine MAC: report
        // our own counter, concealed and authenticated, so the store can
        // resynchronise.
        uint64_t sqn_ms = state.last_accepted;
        Bytes auts = xor_bytes(sqn_to_bytes(sqn_ms), ak);
        append(auts, f1_star(k, rand, sqn_ms));
        return SyncFailure{std::move(auts)};
    }
    state.advance(sqn);
    return AkaOk{f2(k, rand), f3(k, rand), f4(k, rand), sqn};
}

std::variant<uint64_t, RejectAuts> resynchronize(const SubscriberKey& k,
                                                 const Bytes& rand, const Bytes& auts) {
    if (rand.size() != 16 || auts.size() != 14) return RejectAuts{};
    Bytes concealed(auts.begin(), auts.begin() + 6);
    Bytes mac_s(auts.begin() + 6, auts.end());
    Bytes ak = f5(k, rand);
    uint64_t sqn_ms = sqn_from_bytes(xor_bytes(concealed, ak));
    if (!ct_equal(f1_star(k, rand, sqn_ms), mac_s)) return RejectAuts{};
    return sqn_ms;
}

}  // namespace convsim
