#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace convsim {

using Bytes = std::vector<uint8_t>;

Bytes from_hex(std::string_view hex);
std::string to_hex(const Bytes& b);

inline Bytes from_string(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

// Appends in place; used all over message/key-material assembly.
void append(Bytes& out, const Bytes& more);
void append_u16be(Bytes& out, uint16_t v);
void append_u32be(Bytes& out, uint32_t v);
void append_u64be(Bytes& out, uint64_t v);

uint16_t read_u16be(const uint8_t* p);
uint32_t read_u32be(const uint8_t* p);
uint64_t read_u64be(const uint8_t* p);

Bytes concat(std::initializer_list<Bytes> parts);

// Comparison that does not shortcut on the first differing byte.
// Verdicts on authentication tags must not leak the mismatch position.
bool ct_equal(const Bytes& a, const Bytes& b);

// XOR of equal-length buffers.
Bytes xor_bytes(const Bytes& a, const Bytes& b);

}  // namespace convsim
