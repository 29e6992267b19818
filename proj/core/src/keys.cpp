#include "convsim/keys.hpp"

#include "convsim/prf.hpp"

namespace convsim {

namespace {

SessionKeys expand(const Bytes& mk) {
    SessionKeys k;
    k.mk = mk;
    k.k_aut = prf(mk, PrfTag::KAut, {}, 128);
    k.k_encr = prf(mk, PrfTag::KEncr, {}, 128);
    k.msk = prf(mk, PrfTag::Msk, {}, 512);
    return k;
}

}  // namespace

SessionKeys derive_keys_aka(const Bytes& ck, const Bytes& ik,
                            const Bytes& identity) {
    Bytes mk = prf(concat({ck, ik}), PrfTag::MasterAka, identity, 256);
    return expand(mk);
}

SessionKeys derive_keys_ecdh(const Bytes& shared, const Bytes& ck,
                             const Bytes& ik, const Bytes& nonce_p,
                             const Bytes& nonce_s) {
    Bytes mk = prf(concat({shared, ck, ik}), PrfTag::MasterEcdh,
                   concat({nonce_p, nonce_s}), 256);
    return expand(mk);
}

}  // namespace convsim
