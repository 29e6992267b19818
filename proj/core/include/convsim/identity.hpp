#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "convsim/bytes.hpp"

namespace convsim {

enum class IdentityKind : uint8_t {
    Permanent = 0,   // IMSI, 15 ASCII digits
    Pseudonym = 1,   // server-issued opaque handle
    FastReauth = 2,  // server-issued, single use
};

// What travels inside AT_IDENTITY: one kind octet followed by the value, so
// the receiver never guesses which namespace a string belongs to.
struct Identity {
    IdentityKind kind = IdentityKind::Permanent;
    Bytes value;

    bool operator==(const Identity&) const = default;

    Bytes encode() const;
    static std::optional<Identity> decode(const Bytes& wire);

    static Identity permanent(const std::string& imsi);
    static Identity pseudonym(Bytes handle);
    static Identity fast_reauth(Bytes handle);

    std::string imsi() const;  // valid only for Permanent
};

bool valid_imsi(const std::string& s);

}  // namespace convsim
