#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <variant>

#include "convsim/bytes.hpp"
#include "convsim/rng.hpp"

namespace convsim {

// Affine point on a short-Weierstrass curve y^2 = x^3 + ax + b over F_p.
// infinity == true means the group identity; x and y are then ignored.
struct ECPoint {
    bool infinity = true;
    mpz_class x;
    mpz_class y;

    static ECPoint at_infinity() { return ECPoint{}; }
    static ECPoint affine(mpz_class px, mpz_class py) {
        return ECPoint{false, std::move(px), std::move(py)};
    }
    bool operator==(const ECPoint& o) const {
        if (infinity || o.infinity) return infinity == o.infinity;
        return x == o.x && y == o.y;
    }
};

// Scalars live in [1, n-1]; the ops that consume one enforce the range.
using Scalar = mpz_class;

struct CurveParams {
    mpz_class p;
    mpz_class a;
    mpz_class b;
    ECPoint g;
    mpz_class n;        // order of g (prime)
    unsigned cofactor = 1;

    // Width of one field element in bytes; fixed-width encodings use this.
    size_t field_bytes() const;

    // Returns an error description if the parameter set is unusable:
    // p not (probably) prime, singular curve, generator off-curve, or
    // n*G != infinity.
    std::optional<std::string> validate() const;

    // Built-in parameter sets. toy() is small enough to enumerate the whole
    // group in tests; p256() is the published 256-bit prime-field set used
    // as the default for everything else.
    static CurveParams toy();
    static CurveParams p256();
};

bool point_on_curve(const ECPoint& pt, const CurveParams& c);

ECPoint point_neg(const ECPoint& pt, const CurveParams& c);

// Full affine group law including identity, inverse and tangent cases.
// Inputs must be on the curve.
ECPoint point_add(const ECPoint& lhs, const ECPoint& rhs, const CurveParams& c);

// k*P via double-and-add (Jacobian coordinates internally, one final
// inversion). Throws std::invalid_argument unless 1 <= k <= n-1. Not
// constant-time; this library is simulation-grade, not a production
// implementation.
ECPoint scalar_mul(const Scalar& k, const ECPoint& pt, const CurveParams& c);

enum class EcError {
    PointNotOnCurve,
    InfinityResult,
};

// x-coordinate of priv * peer_pub as fixed-width big-endian bytes.
// Validates the peer point against the curve equation first, which is what
// blocks invalid-point key-extraction attempts.
std::variant<Bytes, EcError> ecdh_shared(const Scalar& priv, const ECPoint& peer_pub,
                                         const CurveParams& c);

// Uniform scalar in [1, n-1] by rejection sampling.
Scalar random_scalar(Rng& rng, const CurveParams& c);

// Uncompressed point encoding: 0x04 || x || y, fixed field width.
Bytes encode_point(const ECPoint& pt, const CurveParams& c);

// Decodes and checks curve membership; nullopt on any malformation.
std::optional<ECPoint> decode_point(const Bytes& wire, const CurveParams& c);

// Fixed-width big-endian of an arbitrary non-negative value.
Bytes mpz_to_bytes(const mpz_class& v, size_t width);
mpz_class bytes_to_mpz(const Bytes& b);

}  // namespace convsim
