#include "convsim/protocol.hpp"

#include <algorithm>
#include <stdexcept>

#include "convsim/aka.hpp"
#include "convsim/prf.hpp"

namespace convsim {

std::string to_string(Protocol p) {
    return p == Protocol::Aka ? "AKA" : "ECDH_AKA";
}

ServerContext ServerContext::make(Bytes server_id, Bytes ap_id,
                                  CurveParams curve, Rng& rng) {
    ServerContext ctx;
    ctx.server_id = std::move(server_id);
    ctx.ap_id = std::move(ap_id);
    ctx.curve = std::move(curve);
    ctx.rotate_epoch(rng);
    return ctx;
}

void ServerContext::rotate_epoch(Rng& rng) {
    epoch_priv = random_scalar(rng, curve);
    epoch_pub = encode_point(scalar_mul(epoch_priv, curve.g, curve), curve);
}

bool PeerTrust::accepts(const Bytes& server_id, const Bytes& ap_id) const {
    return std::find(server_ids.begin(), server_ids.end(), server_id) !=
               server_ids.end() &&
           std::find(ap_ids.begin(), ap_ids.end(), ap_id) != ap_ids.end();
}

namespace {

EapMessage zeroed_mac_copy(const EapMessage& m) {
    EapMessage z = m;
    for (auto& a : z.attrs)
        if (a.id == AT_MAC) a.value.assign(16, 0);
    return z;
}

Bytes transcript_concat(const std::vector<Bytes>& transcript) {
    Bytes all;
    for (const auto& t : transcript) append(all, t);
    return all;
}

// Builds AT_MAC for an outgoing message that already carries a zero
// placeholder in the attribute list.
void seal(EapMessage& m, const Bytes& k_aut, const std::vector<Bytes>* prior) {
    Bytes input = encode_eap(zeroed_mac_copy(m));
    if (prior) append(input, transcript_concat(*prior));
    Bytes tag = mac(k_aut, input);
    for (auto& a : m.attrs)
        if (a.id == AT_MAC) a.value = tag;
}

bool check_seal(const EapMessage& m, const Bytes& k_aut,
                const std::vector<Bytes>* prior) {
    const Bytes* tag = m.find_attr(AT_MAC);
    if (!tag) return false;
    Bytes input = encode_eap(zeroed_mac_copy(m));
    if (prior) append(input, transcript_concat(*prior));
    return verify_mac(k_aut, input, *tag);
}

EapMessage make_request(EapMethod method, uint8_t identifier, EapSubtype sub) {
    EapMessage m;
    m.code = EapCode::Request;
    m.identifier = identifier;
    m.method = method;
    m.subtype = static_cast<uint8_t>(sub);
    return m;
}

EapMessage make_response(EapMethod method, uint8_t identifier, EapSubtype sub) {
    EapMessage m;
    m.code = EapCode::Response;
    m.identifier = identifier;
    m.method = method;
    m.subtype = static_cast<uint8_t>(sub);
    return m;
}

// Terminal helpers. The failing side records what it sends so transcripts
// stay complete for post-mortem analysis.
StepOutput server_fail(ServerSession& s, uint8_t identifier) {
    s.state = SessionState::Failed;
    s.keys.reset();
    StepOutput out;
    out.failed = true;
    out.send = EapMessage::failure(identifier);
    s.transcript.push_back(encode_eap(*out.send));
    return out;
}

StepOutput peer_fail(PeerSession& s, EapMethod method, uint8_t identifier) {
    s.state = SessionState::Failed;
    s.keys.reset();
    StepOutput out;
    out.failed = true;
    out.send = make_response(method, identifier, EapSubtype::ClientError);
    s.transcript.push_back(encode_eap(*out.send));
    return out;
}

StepOutput peer_fail_silent(PeerSession& s) {
    s.state = SessionState::Failed;
    s.keys.reset();
    StepOutput out;
    out.failed = true;
    return out;
}

// Pseudonym plus fast re-auth token, sealed under the session encryption
// key with the challenge RAND as cipher nonce (fresh per challenge).
Bytes issue_tokens(ServerSession& s, Rng& rng) {
    Bytes pseudonym = rng.bytes(16);
    Bytes reauth = rng.bytes(16);
    s.ctx->pseudonyms[pseudonym] = s.imsi;
    s.ctx->reauth_ids[reauth] = s.imsi;
    return sym_encrypt(s.keys->k_encr, s.rand, concat({pseudonym, reauth}));
}

// Maps a presented identity to the subscriber it belongs to. Pseudonyms and
// fast re-auth tokens resolve through the issuance tables; a fast re-auth
// identity simply falls back to a full authentication here.
bool resolve_identity(ServerSession& s, const Identity& id,
                      const HssHandle& hss) {
    switch (id.kind) {
        case IdentityKind::Permanent:
            s.imsi = id.imsi();
            break;
        case IdentityKind::Pseudonym: {
            auto it = s.ctx->pseudonyms.find(id.value);
            if (it == s.ctx->pseudonyms.end()) return false;
            s.imsi = it->second;
            break;
        }
        case IdentityKind::FastReauth: {
            auto it = s.ctx->reauth_ids.find(id.value);
            if (it == s.ctx->reauth_ids.end()) return false;
            s.imsi = it->second;
            break;
        }
    }
    return hss.known(s.imsi);
}

}  // namespace

Bytes mac_input(const EapMessage& m) {
    return encode_eap(zeroed_mac_copy(m));
}

Bytes mac_input_with_transcript(const EapMessage& m,
                                const std::vector<Bytes>& transcript) {
    Bytes input = encode_eap(zeroed_mac_copy(m));
    append(input, transcript_concat(transcript));
    return input;
}

// ---------------------------------------------------------------------------
// Symmetric-only method.

StepOutput aka_server_step(ServerSession& s, const std::optional<Bytes>& wire,
                           HssHandle& hss, Rng& rng) {
    StepOutput out;
    if (!wire) {
        if (s.state != SessionState::Idle)
            throw std::logic_error("start on active session");
        s.pending_id = 1;
        EapMessage m = make_request(EapMethod::Aka, s.pending_id,
                                    EapSubtype::Identity);
        out.send = m;
        s.transcript.push_back(encode_eap(m));
        s.state = SessionState::IdentitySent;
        return out;
    }

    auto decoded = decode_eap(*wire);
    s.transcript.push_back(*wire);
    if (std::holds_alternative<CodecError>(decoded))
        return server_fail(s, s.pending_id);
    const EapMessage& m = std::get<EapMessage>(decoded);

    if (m.code != EapCode::Response || m.method != EapMethod::Aka ||
        m.identifier != s.pending_id)
        return server_fail(s, s.pending_id);
    if (m.subtype == static_cast<uint8_t>(EapSubtype::ClientError))
        return server_fail(s, s.pending_id);

    if (s.state == SessionState::IdentitySent &&
        m.subtype == static_cast<uint8_t>(EapSubtype::Identity)) {
        const Bytes* idb = m.find_attr(AT_IDENTITY);
        if (!idb) return server_fail(s, s.pending_id);
        auto id = Identity::decode(*idb);
        if (!id || !resolve_identity(s, *id, hss))
            return server_fail(s, s.pending_id);
        s.presented_identity = *idb;

        auto vec = hss.generate_vector(s.imsi, rng);
        if (!vec) return server_fail(s, s.pending_id);
        s.rand = vec->rand;
        s.xres = vec->xres;
        s.autn = vec->autn;
        s.keys = derive_keys_aka(vec->ck, vec->ik, s.presented_identity);

        EapMessage ch = make_request(EapMethod::Aka, ++s.pending_id,
                                     EapSubtype::Challenge);
        ch.add_attr(AT_RAND, s.rand);
        ch.add_attr(AT_AUTN, s.autn);
        ch.add_attr(AT_ENCR_DATA, issue_tokens(s, rng));
        ch.add_attr(AT_MAC, Bytes(16, 0));
        seal(ch, s.keys->k_aut, nullptr);
        out.send = ch;
        s.transcript.push_back(encode_eap(ch));
        s.state = SessionState::ChallengeProcessed;
        return out;
    }

    if (s.state == SessionState::ChallengeProcessed &&
        m.subtype == static_cast<uint8_t>(EapSubtype::SyncFailure)) {
        const Bytes* auts = m.find_attr(AT_AUTS);
        if (!auts || ++s.resyncs_seen > 1)
            return server_fail(s, s.pending_id);
        if (!hss.resynchronize(s.imsi, s.rand, *auts))
            return server_fail(s, s.pending_id);

        auto vec = hss.generate_vector(s.imsi, rng);
        if (!vec) return server_fail(s, s.pending_id);
        s.rand = vec->rand;
        s.xres = vec->xres;
        s.autn = vec->autn;
        s.keys = derive_keys_aka(vec->ck, vec->ik, s.presented_identity);

        EapMessage ch = make_request(EapMethod::Aka, ++s.pending_id,
                                     EapSubtype::Challenge);
        ch.add_attr(AT_RAND, s.rand);
        ch.add_attr(AT_AUTN, s.autn);
        ch.add_attr(AT_ENCR_DATA, issue_tokens(s, rng));
        ch.add_attr(AT_MAC, Bytes(16, 0));
        seal(ch, s.keys->k_aut, nullptr);
        out.send = ch;
        s.transcript.push_back(encode_eap(ch));
        return out;  // state stays ChallengeProcessed
    }

    if (s.state == SessionState::ChallengeProcessed &&
        m.subtype == static_cast<uint8_t>(EapSubtype::Challenge)) {
        const Bytes* res = m.find_attr(AT_RES);
        if (!res || !check_seal(m, s.keys->k_aut, nullptr))
            return server_fail(s, s.pending_id);
        if (!ct_equal(*res, s.xres)) return server_fail(s, s.pending_id);

        EapMessage ok = EapMessage::success(s.pending_id);
        out.send = ok;
        out.done = true;
        s.transcript.push_back(encode_eap(ok));
        s.state = SessionState::Done;
        return out;
    }

    return server_fail(s, s.pending_id);
}

StepOutput aka_peer_step(PeerSession& s, const Bytes& wire, UsimHandle& usim,
                         Rng& rng) {
    (void)rng;
    StepOutput out;
    auto decoded = decode_eap(wire);
    s.transcript.push_back(wire);
    if (std::holds_alternative<CodecError>(decoded))
        return peer_fail(s, EapMethod::Aka, 0);
    const EapMessage& m = std::get<EapMessage>(decoded);

    if (m.code == EapCode::Failure) return peer_fail_silent(s);
    if (m.code == EapCode::Success) {
        if (s.state == SessionState::ChallengeProcessed && s.keys) {
            s.state = SessionState::Done;
            out.done = true;
            return out;
        }
        return peer_fail_silent(s);
    }
    if (m.code != EapCode::Request || m.method != EapMethod::Aka)
        return peer_fail(s, EapMethod::Aka, m.identifier);

    if (s.state == SessionState::Idle &&
        m.subtype == static_cast<uint8_t>(EapSubtype::Identity)) {
        s.sent_identity = usim.choose_identity().encode();
        EapMessage r = make_response(EapMethod::Aka, m.identifier,
                                     EapSubtype::Identity);
        r.add_attr(AT_IDENTITY, s.sent_identity);
        out.send = r;
        s.transcript.push_back(encode_eap(r));
        s.state = SessionState::IdentitySent;
        return out;
    }

    if (s.state == SessionState::IdentitySent &&
        m.subtype == static_cast<uint8_t>(EapSubtype::Challenge)) {
        const Bytes* rand = m.find_attr(AT_RAND);
        const Bytes* autn = m.find_attr(AT_AUTN);
        if (!rand || !autn || !m.has_attr(AT_MAC))
            return peer_fail(s, EapMethod::Aka, m.identifier);

        auto result = usim.process_challenge(*rand, *autn);
        if (std::holds_alternative<MacFailure>(result))
            return peer_fail(s, EapMethod::Aka, m.identifier);
        if (std::holds_alternative<SyncFailure>(result)) {
            if (++s.resyncs_sent > 1)
                return peer_fail(s, EapMethod::Aka, m.identifier);
            EapMessage r = make_response(EapMethod::Aka, m.identifier,
                                         EapSubtype::SyncFailure);
            r.add_attr(AT_AUTS, std::get<SyncFailure>(result).auts);
            out.send = r;
            s.transcript.push_back(encode_eap(r));
            return out;  // awaiting the reissued challenge
        }

        const AkaOk& ok = std::get<AkaOk>(result);
        s.keys = derive_keys_aka(ok.ck, ok.ik, s.sent_identity);
        if (!check_seal(m, s.keys->k_aut, nullptr))
            return peer_fail(s, EapMethod::Aka, m.identifier);

        if (const Bytes* encr = m.find_attr(AT_ENCR_DATA)) {
            auto blob = sym_decrypt(s.keys->k_encr, *rand, *encr);
            if (!blob || blob->size() != 32)
                return peer_fail(s, EapMethod::Aka, m.identifier);
            usim.store_pseudonym(Bytes(blob->begin(), blob->begin() + 16));
            usim.store_reauth_id(Bytes(blob->begin() + 16, blob->end()));
        }

        EapMessage r = make_response(EapMethod::Aka, m.identifier,
                                     EapSubtype::Challenge);
        r.add_attr(AT_RES, ok.res);
        r.add_attr(AT_MAC, Bytes(16, 0));
        seal(r, s.keys->k_aut, nullptr);
        out.send = r;
        s.transcript.push_back(encode_eap(r));
        s.state = SessionState::ChallengeProcessed;
        return out;
    }

    return peer_fail(s, EapMethod::Aka, m.identifier);
}

// ---------------------------------------------------------------------------
// Key-agreement method.

StepOutput ecdh_server_step(ServerSession& s, const std::optional<Bytes>& wire,
                            HssHandle& hss, Rng& rng) {
    StepOutput out;
    if (!wire) {
        if (s.state != SessionState::Idle)
            throw std::logic_error("start on active session");
        s.pending_id = 1;
        EapMessage m = make_request(EapMethod::EcdhAka, s.pending_id,
                                    EapSubtype::Identity);
        m.add_attr(AT_SERVER_ID, s.ctx->server_id);
        m.add_attr(AT_AP_ID, s.ctx->ap_id);
        m.add_attr(AT_SPUB, s.ctx->epoch_pub);
        out.send = m;
        s.transcript.push_back(encode_eap(m));
        s.state = SessionState::IdentitySent;
        return out;
    }

    auto decoded = decode_eap(*wire);
    s.transcript.push_back(*wire);
    if (std::holds_alternative<CodecError>(decoded))
        return server_fail(s, s.pending_id);
    const EapMessage& m = std::get<EapMessage>(decoded);

    if (m.code != EapCode::Response || m.method != EapMethod::EcdhAka ||
        m.identifier != s.pending_id)
        return server_fail(s, s.pending_id);
    if (m.subtype == static_cast<uint8_t>(EapSubtype::ClientError))
        return server_fail(s, s.pending_id);

    if (s.state == SessionState::IdentitySent &&
        m.subtype == static_cast<uint8_t>(EapSubtype::Identity)) {
        const Bytes* cpub = m.find_attr(AT_CPUB);
        const Bytes* nonce_p = m.find_attr(AT_NONCE_P);
        const Bytes* encr = m.find_attr(AT_ENCR_DATA);
        if (!cpub || !nonce_p || !encr) return server_fail(s, s.pending_id);

        auto apt = decode_point(*cpub, s.ctx->curve);
        if (!apt) return server_fail(s, s.pending_id);
        auto sh = ecdh_shared(s.ctx->epoch_priv, *apt, s.ctx->curve);
        if (std::holds_alternative<EcError>(sh))
            return server_fail(s, s.pending_id);
        s.client_pub = *cpub;
        s.shared = std::get<Bytes>(sh);
        s.nonce_p = *nonce_p;

        Bytes id_key = prf(s.shared, PrfTag::IdKey, {}, 128);
        auto plain = sym_decrypt(id_key, s.nonce_p, *encr);
        if (!plain) return server_fail(s, s.pending_id);
        auto id = Identity::decode(*plain);
        if (!id || id->kind != IdentityKind::Permanent ||
            !resolve_identity(s, *id, hss))
            return server_fail(s, s.pending_id);
        s.presented_identity = *plain;

        s.nonce_s = rng.bytes(16);
        auto mat = hss.ecdh_material(s.imsi, s.client_pub, s.ctx->epoch_pub,
                                     s.nonce_p, s.nonce_s, rng);
        if (!mat) return server_fail(s, s.pending_id);
        s.rand = mat->rand;
        s.xres = mat->xres;
        s.keys = derive_keys_ecdh(s.shared, mat->ck, mat->ik, s.nonce_p,
                                  s.nonce_s);

        EapMessage ch = make_request(EapMethod::EcdhAka, ++s.pending_id,
                                     EapSubtype::Challenge);
        ch.add_attr(AT_RAND, s.rand);
        ch.add_attr(AT_NONCE_S, s.nonce_s);
        ch.add_attr(AT_MAC_K, mat->mac_k);
        ch.add_attr(AT_MAC, Bytes(16, 0));
        seal(ch, s.keys->k_aut, nullptr);
        out.send = ch;
        s.transcript.push_back(encode_eap(ch));
        s.state = SessionState::ChallengeProcessed;
        return out;
    }

    if (s.state == SessionState::ChallengeProcessed &&
        m.subtype == static_cast<uint8_t>(EapSubtype::Challenge)) {
        const Bytes* res = m.find_attr(AT_RES);
        // The final response binds the whole prior conversation; transcript
        // here holds exactly messages 1..3.
        std::vector<Bytes> prior(s.transcript.begin(), s.transcript.end() - 1);
        if (!res || !check_seal(m, s.keys->k_aut, &prior))
            return server_fail(s, s.pending_id);
        if (!ct_equal(*res, s.xres)) return server_fail(s, s.pending_id);

        EapMessage ok = EapMessage::success(s.pending_id);
        out.send = ok;
        out.done = true;
        s.transcript.push_back(encode_eap(ok));
        s.state = SessionState::Done;
        return out;
    }

    return server_fail(s, s.pending_id);
}

StepOutput ecdh_peer_step(PeerSession& s, const Bytes& wire, UsimHandle& usim,
                          const PeerTrust& trust, Rng& rng) {
    StepOutput out;
    auto decoded = decode_eap(wire);
    s.transcript.push_back(wire);
    if (std::holds_alternative<CodecError>(decoded))
        return peer_fail(s, EapMethod::EcdhAka, 0);
    const EapMessage& m = std::get<EapMessage>(decoded);

    if (m.code == EapCode::Failure) return peer_fail_silent(s);
    if (m.code == EapCode::Success) {
        if (s.state == SessionState::ChallengeProcessed && s.keys) {
            s.state = SessionState::Done;
            out.done = true;
            return out;
        }
        return peer_fail_silent(s);
    }
    if (m.code != EapCode::Request || m.method != EapMethod::EcdhAka)
        return peer_fail(s, EapMethod::EcdhAka, m.identifier);

    if (s.state == SessionState::Idle &&
        m.subtype == static_cast<uint8_t>(EapSubtype::Identity)) {
        const Bytes* server_id = m.find_attr(AT_SERVER_ID);
        const Bytes* ap_id = m.find_attr(AT_AP_ID);
        const Bytes* spub = m.find_attr(AT_SPUB);
        if (!server_id || !ap_id || !spub)
            return peer_fail(s, EapMethod::EcdhAka, m.identifier);
        // Unknown authenticator: refuse before any identity material or
        // ephemeral leaves this side.
        if (!trust.accepts(*server_id, *ap_id))
            return peer_fail(s, EapMethod::EcdhAka, m.identifier);
        auto bpt = decode_point(*spub, trust.curve);
        if (!bpt) return peer_fail(s, EapMethod::EcdhAka, m.identifier);
        s.server_pub = *spub;

        s.eph_priv = random_scalar(rng, trust.curve);
        s.eph_pub = encode_point(scalar_mul(*s.eph_priv, trust.curve.g,
                                            trust.curve), trust.curve);
        auto sh = ecdh_shared(*s.eph_priv, *bpt, trust.curve);
        if (std::holds_alternative<EcError>(sh))
            return peer_fail(s, EapMethod::EcdhAka, m.identifier);
        s.shared = std::get<Bytes>(sh);
        s.nonce_p = rng.bytes(16);

        s.sent_identity = Identity::permanent(usim.imsi()).encode();
        Bytes id_key = prf(s.shared, PrfTag::IdKey, {}, 128);
        Bytes encr = sym_encrypt(id_key, s.nonce_p, s.sent_identity);

        EapMessage r = make_response(EapMethod::EcdhAka, m.identifier,
                                     EapSubtype::Identity);
        r.add_attr(AT_CPUB, s.eph_pub);
        r.add_attr(AT_NONCE_P, s.nonce_p);
        r.add_attr(AT_ENCR_DATA, encr);
        out.send = r;
        s.transcript.push_back(encode_eap(r));
        s.state = SessionState::IdentitySent;
        return out;
    }

    if (s.state == SessionState::IdentitySent &&
        m.subtype == static_cast<uint8_t>(EapSubtype::Challenge)) {
        const Bytes* rand = m.find_attr(AT_RAND);
        const Bytes* nonce_s = m.find_attr(AT_NONCE_S);
        const Bytes* mac_k = m.find_attr(AT_MAC_K);
        if (!rand || !nonce_s || !mac_k || !m.has_attr(AT_MAC))
            return peer_fail(s, EapMethod::EcdhAka, m.identifier);
        s.nonce_s = *nonce_s;

        // Subscriber-key binding over both public points and both nonces.
        // A substituted point on either side fails here.
        auto r = usim.verify_ecdh_challenge(*rand, s.eph_pub, s.server_pub,
                                            s.nonce_p, s.nonce_s, *mac_k);
        if (!r) return peer_fail(s, EapMethod::EcdhAka, m.identifier);

        s.keys = derive_keys_ecdh(s.shared, r->ck, r->ik, s.nonce_p, s.nonce_s);
        if (!check_seal(m, s.keys->k_aut, nullptr))
            return peer_fail(s, EapMethod::EcdhAka, m.identifier);

        EapMessage resp = make_response(EapMethod::EcdhAka, m.identifier,
                                        EapSubtype::Challenge);
        resp.add_attr(AT_RES, r->res);
        resp.add_attr(AT_MAC, Bytes(16, 0));
        std::vector<Bytes> prior = s.transcript;  // messages 1..3
        seal(resp, s.keys->k_aut, &prior);
        out.send = resp;
        s.transcript.push_back(encode_eap(resp));
        s.state = SessionState::ChallengeProcessed;
        return out;
    }

    return peer_fail(s, EapMethod::EcdhAka, m.identifier);
}

StepOutput server_step(ServerSession& s, const std::optional<Bytes>& wire,
                       HssHandle& hss, Rng& rng) {
    return s.protocol == Protocol::Aka ? aka_server_step(s, wire, hss, rng)
                                       : ecdh_server_step(s, wire, hss, rng);
}

StepOutput peer_step(PeerSession& s, const Bytes& wire, UsimHandle& usim,
                     const PeerTrust& trust, Rng& rng) {
    return s.protocol == Protocol::Aka
               ? aka_peer_step(s, wire, usim, rng)
               : ecdh_peer_step(s, wire, usim, trust, rng);
}

}  // namespace convsim
