#include "convsim/identity.hpp"

#include <stdexcept>

namespace convsim {

bool valid_imsi(const std::string& s) {
    if (s.size() != 15) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

Bytes Identity::encode() const {
    Bytes out;
    out.push_back(static_cast<uint8_t>(kind));
    append(out, value);
    return out;
}

std::optional<Identity> Identity::decode(const Bytes& wire) {
    if (wire.empty()) return std::nullopt;
    if (wire[0] > 2) return std::nullopt;
    Identity id;
    id.kind = static_cast<IdentityKind>(wire[0]);
    id.value.assign(wire.begin() + 1, wire.end());
    if (id.kind == IdentityKind::Permanent) {
        std::string s(id.value.begin(), id.value.end());
        if (!valid_imsi(s)) return std::nullopt;
    } else if (id.value.empty()) {
        return std::nullopt;
    }
    return id;
}

Identity Identity::permanent(const std::string& imsi) {
    if (!valid_imsi(imsi)) throw std::invalid_argument("IMSI must be 15 digits");
    Identity id;
    id.kind = IdentityKind::Permanent;
    id.value.assign(imsi.begin(), imsi.end());
    return id;
}

Identity Identity::pseudonym(Bytes handle) {
    if (handle.empty()) throw std::invalid_argument("empty pseudonym");
    Identity id;
    id.kind = IdentityKind::Pseudonym;
    id.value = std::move(handle);
    return id;
}

Identity Identity::fast_reauth(Bytes handle) {
    if (handle.empty()) throw std::invalid_argument("empty fast re-auth id");
    Identity id;
    id.kind = IdentityKind::FastReauth;
    id.value = std::move(handle);
    return id;
}

std::string Identity::imsi() const {
    if (kind != IdentityKind::Permanent)
        throw std::logic_error("not a permanent identity");
    return std::string(value.begin(), value.end());
}

}  // namespace convsim
