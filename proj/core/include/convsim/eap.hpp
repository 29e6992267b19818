#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "convsim/bytes.hpp"

namespace convsim {

enum class EapCode : uint8_t {
    Request = 1,
    Response = 2,
    Success = 3,
    Failure = 4,
};

enum class EapMethod : uint8_t {
    Aka = 23,
    EcdhAka = 254,
};

// Method-layer subtypes. The codec carries the raw octet; these are the
// values the state machines emit and accept.
enum class EapSubtype : uint8_t {
    Challenge = 1,
    SyncFailure = 4,
    Identity = 5,
    ClientError = 14,
};

enum AttrId : uint8_t {
    AT_RAND = 1,
    AT_AUTN = 2,
    AT_RES = 3,
    AT_AUTS = 4,
    AT_MAC = 11,
    AT_ENCR_DATA = 12,
    AT_IDENTITY = 14,
    AT_NONCE_P = 20,
    AT_NONCE_S = 21,
    AT_CPUB = 130,
    AT_SPUB = 131,
    AT_SERVER_ID = 132,
    AT_AP_ID = 133,
    AT_MAC_K = 134,
};

struct EapAttr {
    uint8_t id = 0;
    Bytes value;

    bool operator==(const EapAttr&) const = default;
};

// One EAP packet. Success/Failure carry no method layer at all; Request and
// Response carry method, subtype and an ordered attribute list.
struct EapMessage {
    EapCode code = EapCode::Request;
    uint8_t identifier = 0;
    EapMethod method = EapMethod::Aka;
    uint8_t subtype = 0;
    std::vector<EapAttr> attrs;

    bool operator==(const EapMessage&) const = default;

    const Bytes* find_attr(uint8_t id) const;
    bool has_attr(uint8_t id) const { return find_attr(id) != nullptr; }
    void add_attr(uint8_t id, Bytes value) { attrs.push_back({id, std::move(value)}); }

    static EapMessage success(uint8_t identifier);
    static EapMessage failure(uint8_t identifier);
};

enum class CodecError {
    Truncated,
    BadLength,
    DuplicateAttr,
    UnknownCode,
};

std::string to_string(CodecError e);

// Canonical encoding:
//   code(1) || identifier(1) || total_length(2, big-endian)
//   then, for Request/Response only:
//   method(1) || subtype(1) || reserved(2, zero) || attributes
// Attribute: id(1) || length(1, in 4-byte words, header and padding
// included) || payload || zero padding to a 4-byte boundary. Fixed-size
// attributes carry the raw value as payload; variable-size ones prefix the
// value with its 16-bit byte count so decoding recovers exact lengths.
// Throws std::invalid_argument on messages that violate the schema; the
// protocol layer never builds such a message.
Bytes encode_eap(const EapMessage& m);

// Strict inverse of encode_eap over the full input buffer. Unknown code,
// method or attribute id decodes to UnknownCode; structural damage to
// lengths, reserved octets or padding decodes to BadLength.
std::variant<EapMessage, CodecError> decode_eap(const Bytes& wire);

}  // namespace convsim
