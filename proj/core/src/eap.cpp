#include "convsim/eap.hpp"

#include <stdexcept>

namespace convsim {

namespace {

// -1 means the attribute carries a 16-bit length prefix.
int fixed_size_of(uint8_t id) {
    switch (id) {
        case AT_RAND:
        case AT_AUTN:
        case AT_MAC:
        case AT_MAC_K:
        case AT_NONCE_P:
        case AT_NONCE_S:
            return 16;
        case AT_AUTS:
            return 14;
        case AT_RES:
        case AT_IDENTITY:
        case AT_ENCR_DATA:
        case AT_CPUB:
        case AT_SPUB:
        case AT_SERVER_ID:
        case AT_AP_ID:
            return -1;
        default:
            return -2;  // unknown id
    }
}

bool known_method(uint8_t m) {
    return m == static_cast<uint8_t>(EapMethod::Aka) ||
           m == static_cast<uint8_t>(EapMethod::EcdhAka);
}

}  // namespace

const Bytes* EapMessage::find_attr(uint8_t id) const {
    for (const auto& a : attrs)
        if (a.id == id) return &a.value;
    return nullptr;
}

EapMessage EapMessage::success(uint8_t identifier) {
    EapMessage m;
    m.code = EapCode::Success;
    m.identifier = identifier;
    return m;
}

EapMessage EapMessage::failure(uint8_t identifier) {
    EapMessage m;
    m.code = EapCode::Failure;
    m.identifier = identifier;
    return m;
}

std::string to_string(CodecError e) {
    switch (e) {
        case CodecError::Truncated: return "truncated";
        case CodecError::BadLength: return "bad length";
        case CodecError::DuplicateAttr: return "duplicate attribute";
        case CodecError::UnknownCode: return "unknown code";
    }
    return "?";
}

Bytes encode_eap(const EapMessage& m) {
    if (m.code == EapCode::Success || m.code == EapCode::Failure) {
        if (!m.attrs.empty())
            throw std::invalid_argument("success/failure carries no attributes");
        Bytes out;
        out.push_back(static_cast<uint8_t>(m.code));
        out.push_back(m.identifier);
        append_u16be(out, 4);
        return out;
    }
    if (m.code != EapCode::Request && m.code != EapCode::Response)
        throw std::invalid_argument("bad EAP code");
    if (!known_method(static_cast<uint8_t>(m.method)))
        throw std::invalid_argument("bad EAP method");

    Bytes body;
    body.push_back(static_cast<uint8_t>(m.method));
    body.push_back(m.subtype);
    append_u16be(body, 0);  // reserved

    for (size_t i = 0; i < m.attrs.size(); ++i) {
        const auto& a = m.attrs[i];
        for (size_t j = 0; j < i; ++j)
            if (m.attrs[j].id == a.id)
                throw std::invalid_argument("duplicate attribute");
        int fixed = fixed_size_of(a.id);
        if (fixed == -2) throw std::invalid_argument("unknown attribute id");

        Bytes payload;
        if (fixed >= 0) {
            if (a.value.size() != static_cast<size_t>(fixed))
                throw std::invalid_argument("fixed attribute size mismatch");
            payload = a.value;
        } else {
            if (a.value.size() > 0xffff)
                throw std::invalid_argument("attribute value too long");
            append_u16be(payload, static_cast<uint16_t>(a.value.size()));
            append(payload, a.value);
        }
        size_t total = 2 + payload.size();
        size_t words = (total + 3) / 4;
        if (words > 0xff) throw std::invalid_argument("attribute too long");
        body.push_back(a.id);
        body.push_back(static_cast<uint8_t>(words));
        append(body, payload);
        body.resize(body.size() + (words * 4 - total), 0);  // zero pad
    }

    size_t total_len = 4 + body.size();
    if (total_len > 0xffff) throw std::invalid_argument("message too long");
    Bytes out;
    out.push_back(static_cast<uint8_t>(m.code));
    out.push_back(m.identifier);
    append_u16be(out, static_cast<uint16_t>(total_len));
    append(out, body);
    return out;
}

std::variant<EapMessage, CodecError> decode_eap(const Bytes& wire) {
    if (wire.size() < 4) return CodecError::Truncated;
    uint16_t declared = read_u16be(wire.data() + 2);
    if (declared > wire.size()) return CodecError::Truncated;
    if (declared != wire.size() || declared < 4) return CodecError::BadLength;

    EapMessage m;
    uint8_t code = wire[0];
    m.identifier = wire[1];
    switch (code) {
        case 1: m.code = EapCode::Request; break;
        case 2: m.code = EapCode::Response; break;
        case 3: m.code = EapCode::Success; break;
        case 4: m.code = EapCode::Failure; break;
        default: return CodecError::UnknownCode;
    }
    if (m.code == EapCode::Success || m.code == EapCode::Failure) {
        if (wire.size() != 4) return CodecError::BadLength;
        return m;
    }

    if (wire.size() < 8) return CodecError::Truncated;
    if (!known_method(wire[4])) return CodecError::UnknownCode;
    m.method = static_cast<EapMethod>(wire[4]);
    m.subtype = wire[5];
    if (wire[6] != 0 || wire[7] != 0) return CodecError::BadLength;

    size_t pos = 8;
    while (pos < wire.size()) {
        if (wire.size() - pos < 2) return CodecError::Truncated;
        uint8_t id = wire[pos];
        size_t words = wire[pos + 1];
        int fixed = fixed_size_of(id);
        if (fixed == -2) return CodecError::UnknownCode;
        if (words == 0) return CodecError::BadLength;
        size_t attr_total = words * 4;
        if (wire.size() - pos < attr_total) return CodecError::Truncated;

        size_t payload_len;
        size_t value_off;
        if (fixed >= 0) {
            payload_len = static_cast<size_t>(fixed);
            value_off = pos + 2;
        } else {
            if (attr_total < 4) return CodecError::BadLength;
            payload_len = 2 + read_u16be(wire.data() + pos + 2);
            value_off = pos + 4;
        }
        if ((2 + payload_len + 3) / 4 != words) return CodecError::BadLength;
        size_t value_len = fixed >= 0 ? payload_len : payload_len - 2;
        for (size_t i = pos + 2 + payload_len; i < pos + attr_total; ++i)
            if (wire[i] != 0) return CodecError::BadLength;

        if (m.has_attr(id)) return CodecError::DuplicateAttr;
        m.add_attr(id, Bytes(wire.begin() + value_off,
                             wire.begin() + value_off + value_len));
        pos += attr_total;
    }
    return m;
}

}  // namespace convsim
