#include "convsim/subscriber.hpp"

#include <stdexcept>

#include "convsim/prf.hpp"

namespace convsim {

Bytes compute_mac_k(const SubscriberKey& k, const Bytes& client_pub,
                    const Bytes& server_pub, const Bytes& rand,
                    const Bytes& nonce_p, const Bytes& nonce_s) {
    return prf(k.k, PrfTag::HssBind,
               concat({client_pub, server_pub, rand, nonce_p, nonce_s}), 128);
}

void HssHandle::provision(const std::string& imsi, SubscriberKey k,
                          uint64_t initial_sqn) {
    if (!valid_imsi(imsi)) throw std::invalid_argument("IMSI must be 15 digits");
    subs_[imsi] = Record{std::move(k), initial_sqn & kSqnMask};
}

bool HssHandle::known(const std::string& imsi) const {
    return subs_.count(imsi) != 0;
}

std::optional<AuthVector> HssHandle::generate_vector(const std::string& imsi,
                                                     Rng& rng) {
    auto it = subs_.find(imsi);
    if (it == subs_.end()) return std::nullopt;
    it->second.sqn = (it->second.sqn + 1) & kSqnMask;
    return aka_generate_vector(it->second.k, it->second.sqn, 0, rng.bytes(16));
}

bool HssHandle::resynchronize(const std::string& imsi, const Bytes& rand,
                              const Bytes& auts) {
    auto it = subs_.find(imsi);
    if (it == subs_.end()) return false;
    auto r = convsim::resynchronize(it->second.k, rand, auts);
    if (std::holds_alternative<RejectAuts>(r)) return false;
    it->second.sqn = std::get<uint64_t>(r);
    return true;
}

std::optional<EcdhMaterial> HssHandle::ecdh_material(
    const std::string& imsi, const Bytes& client_pub, const Bytes& server_pub,
    const Bytes& nonce_p, const Bytes& nonce_s, Rng& rng) {
    auto it = subs_.find(imsi);
    if (it == subs_.end()) return std::nullopt;
    const SubscriberKey& k = it->second.k;
    EcdhMaterial m;
    m.rand = rng.bytes(16);
    m.xres = f2(k, m.rand);
    m.ck = f3(k, m.rand);
    m.ik = f4(k, m.rand);
    m.mac_k = compute_mac_k(k, client_pub, server_pub, m.rand, nonce_p, nonce_s);
    return m;
}

std::optional<Bytes> HssHandle::longterm_key(const std::string& imsi) const {
    auto it = subs_.find(imsi);
    if (it == subs_.end()) return std::nullopt;
    return it->second.k.k;
}

uint64_t HssHandle::sqn_of(const std::string& imsi) const {
    auto it = subs_.find(imsi);
    if (it == subs_.end()) throw std::out_of_range("unknown IMSI");
    return it->second.sqn;
}

void HssHandle::force_sqn(const std::string& imsi, uint64_t sqn) {
    auto it = subs_.find(imsi);
    if (it == subs_.end()) throw std::out_of_range("unknown IMSI");
    it->second.sqn = sqn & kSqnMask;
}

UsimHandle::UsimHandle(std::string imsi, SubscriberKey k)
    : imsi_(std::move(imsi)), k_(std::move(k)) {
    if (!valid_imsi(imsi_)) throw std::invalid_argument("IMSI must be 15 digits");
}

Identity UsimHandle::choose_identity() const {
    if (pseudonym_) return Identity::pseudonym(*pseudonym_);
    return Identity::permanent(imsi_);
}

VerifyAutnResult UsimHandle::process_challenge(const Bytes& rand,
                                               const Bytes& autn) {
    return verify_autn(k_, rand, autn, sqn);
}

std::optional<EcdhPeerResult> UsimHandle::verify_ecdh_challenge(
    const Bytes& rand, const Bytes& client_pub, const Bytes& server_pub,
    const Bytes& nonce_p, const Bytes& nonce_s, const Bytes& mac_k) {
    Bytes expect =
        compute_mac_k(k_, client_pub, server_pub, rand, nonce_p, nonce_s);
    if (!ct_equal(expect, mac_k)) return std::nullopt;
    EcdhPeerResult r;
    r.res = f2(k_, rand);
    r.ck = f3(k_, rand);
    r.ik = f4(k_, rand);
    return r;
}

}  // namespace convsim
