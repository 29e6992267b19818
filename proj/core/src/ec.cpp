#include "convsim/ec.hpp"

#include <stdexcept>

namespace convsim {

namespace {

mpz_class mod(const mpz_class& v, const mpz_class& p) {
    mpz_class r = v % p;
    if (r < 0) r += p;
    return r;
}

mpz_class inv_mod(const mpz_class& v, const mpz_class& p) {
    mpz_class out;
    if (mpz_invert(out.get_mpz_t(), v.get_mpz_t(), p.get_mpz_t()) == 0)
        throw std::domain_error("inv_mod: not invertible");
    return out;
}

// Jacobian representation used inside the ladder; (X, Y, Z) with Z == 0 as
// the identity. Affine equivalent is (X/Z^2, Y/Z^3).
struct Jac {
    mpz_class x, y, z;
    bool is_inf() const { return z == 0; }
};

Jac to_jac(const ECPoint& pt) {
    if (pt.infinity) return Jac{0, 1, 0};
    return Jac{pt.x, pt.y, 1};
}

ECPoint from_jac(const Jac& j, const CurveParams& c) {
    if (j.is_inf()) return ECPoint::at_infinity();
    mpz_class zi = inv_mod(j.z, c.p);
    mpz_class zi2 = mod(zi * zi, c.p);
    mpz_class x = mod(j.x * zi2, c.p);
    mpz_class y = mod(j.y * zi2 * zi, c.p);
    return ECPoint::affine(x, y);
}

Jac jac_double(const Jac& pt, const CurveParams& c) {
    if (pt.is_inf() || pt.y == 0) return Jac{0, 1, 0};
    const mpz_class& p = c.p;
    mpz_class y2 = mod(pt.y * pt.y, p);
    mpz_class s = mod(4 * pt.x * y2, p);
    mpz_class z2 = mod(pt.z * pt.z, p);
    mpz_class m = mod(3 * pt.x * pt.x + c.a * z2 * z2, p);
    mpz_class x3 = mod(m * m - 2 * s, p);
    mpz_class y3 = mod(m * (s - x3) - 8 * y2 * y2, p);
    mpz_class z3 = mod(2 * pt.y * pt.z, p);
    return Jac{x3, y3, z3};
}

Jac jac_add(const Jac& lhs, const Jac& rhs, const CurveParams& c) {
    if (lhs.is_inf()) return rhs;
    if (rhs.is_inf()) return lhs;
    const mpz_class& p = c.p;
    mpz_class z1z1 = mod(lhs.z * lhs.z, p);
    mpz_class z2z2 = mod(rhs.z * rhs.z, p);
    mpz_class u1 = mod(lhs.x * z2z2, p);
    mpz_class u2 = mod(rhs.x * z1z1, p);
    mpz_class s1 = mod(lhs.y * z2z2 * rhs.z, p);
    mpz_class s2 = mod(rhs.y * z1z1 * lhs.z, p);
    if (u1 == u2) {
        if (s1 != s2) return Jac{0, 1, 0};
        return jac_double(lhs, c);
    }
    mpz_class h = mod(u2 - u1, p);
    mpz_class r = mod(s2 - s1, p);
    mpz_class h2 = mod(h * h, p);
    mpz_class h3 = mod(h2 * h, p);
    mpz_class u1h2 = mod(u1 * h2, p);
    mpz_class x3 = mod(r * r - h3 - 2 * u1h2, p);
    mpz_class y3 = mod(r * (u1h2 - x3) - s1 * h3, p);
    mpz_class z3 = mod(h * lhs.z * rhs.z, p);
    return Jac{x3, y3, z3};
}

}  // namespace

size_t CurveParams::field_bytes() const {
    return (mpz_sizeinbase(p.get_mpz_t(), 2) + 7) / 8;
}

std::optional<std::string> CurveParams::validate() const {
    if (mpz_probab_prime_p(p.get_mpz_t(), 30) == 0) return "p is not prime";
    if (a < 0 || a >= p || b < 0 || b >= p) return "a or b out of field range";
    mpz_class disc = mod(4 * a * a * a + 27 * b * b, p);
    if (disc == 0) return "curve is singular";
    if (g.infinity) return "generator is the identity";
    if (!point_on_curve(g, *this)) return "generator not on curve";
    if (n < 2 || mpz_probab_prime_p(n.get_mpz_t(), 30) == 0) return "n is not prime";
    if (cofactor < 1) return "cofactor must be positive";
    // n*G must land on the identity; computed via the ladder on n-1 to stay
    // inside the scalar range, then one affine add.
    ECPoint almost = scalar_mul(n - 1, g, *this);
    if (!(point_add(almost, g, *this) == ECPoint::at_infinity()))
        return "n*G is not the identity";
    return std::nullopt;
}

CurveParams CurveParams::toy() {
    CurveParams c;
    c.p = 17;
    c.a = 2;
    c.b = 2;
    c.g = ECPoint::affine(5, 1);
    c.n = 19;
    c.cofactor = 1;
    return c;
}

CurveParams CurveParams::p256() {
    CurveParams c;
    c.p = mpz_class("0xffffffff00000001000000000000000000000000ffffffffffffffffffffffff");
    c.a = mpz_class("0xffffffff00000001000000000000000000000000fffffffffffffffffffffffc");
    c.b = mpz_class("0x5ac635d8aa3a93e7b3ebbd55769886bc651d06b0cc53b0f63bce3c3e27d2604b");
    c.g = ECPoint::affine(
        mpz_class("0x6b17d1f2e12c4247f8bce6e563a440f277037d812deb33a0f4a13945d898c296"),
        mpz_class("0x4fe342e2fe1a7f9b8ee7eb4a7c0f9e162bce33576b315ececbb6406837bf51f5"));
    c.n = mpz_class("0xffffffff00000000ffffffffffffffffbce6faada7179e84f3b9cac2fc632551");
    c.cofactor = 1;
    return c;
}

bool point_on_curve(const ECPoint& pt, const CurveParams& c) {
    if (pt.infinity) return true;
    if (pt.x < 0 || pt.x >= c.p || pt.y < 0 || pt.y >= c.p) return false;
    mpz_class lhs = mod(pt.y * pt.y, c.p);
    mpz_class rhs = mod(pt.x * pt.x * pt.x + c.a * pt.x + c.b, c.p);
    return lhs == rhs;
}

ECPoint point_neg(const ECPoint& pt, const CurveParams& c) {
    if (pt.infinity) return pt;
    return ECPoint::affine(pt.x, mod(-pt.y, c.p));
}

ECPoint point_add(const ECPoint& lhs, const ECPoint& rhs, const CurveParams& c) {
    if (lhs.infinity) return rhs;
    if (rhs.infinity) return lhs;
    const mpz_class& p = c.p;
    if (lhs.x == rhs.x) {
        if (mod(lhs.y + rhs.y, p) == 0) return ECPoint::at_infinity();
        // Tangent case. y == 0 was caught above (it is its own inverse).
        mpz_class lambda = mod((3 * lhs.x * lhs.x + c.a) * inv_mod(2 * lhs.y, p), p);
        mpz_class x3 = mod(lambda * lambda - 2 * lhs.x, p);
        mpz_class y3 = mod(lambda * (lhs.x - x3) - lhs.y, p);
        return ECPoint::affine(x3, y3);
    }
    mpz_class lambda = mod((rhs.y - lhs.y) * inv_mod(mod(rhs.x - lhs.x, p), p), p);
    mpz_class x3 = mod(lambda * lambda - lhs.x - rhs.x, p);
    mpz_class y3 = mod(lambda * (lhs.x - x3) - lhs.y, p);
    return ECPoint::affine(x3, y3);
}

ECPoint scalar_mul(const Scalar& k, const ECPoint& pt, const CurveParams& c) {
    if (k < 1 || k >= c.n)
        throw std::invalid_argument("scalar_mul: scalar outside [1, n-1]");
    Jac acc{0, 1, 0};
    Jac base = to_jac(pt);
    size_t bits = mpz_sizeinbase(k.get_mpz_t(), 2);
    for (size_t i = bits; i-- > 0;) {
        acc = jac_double(acc, c);
        if (mpz_tstbit(k.get_mpz_t(), static_cast<mp_bitcnt_t>(i)))
            acc = jac_add(acc, base, c);
    }
    return from_jac(acc, c);
}

std::variant<Bytes, EcError> ecdh_shared(const Scalar& priv, const ECPoint& peer_pub,
                                         const CurveParams& c) {
    if (peer_pub.infinity || !point_on_curve(peer_pub, c))
        return EcError::PointNotOnCurve;
    ECPoint shared = scalar_mul(priv, peer_pub, c);
    if (shared.infinity) return EcError::InfinityResult;
    return mpz_to_bytes(shared.x, c.field_bytes());
}

Scalar random_scalar(Rng& rng, const CurveParams& c) {
    size_t bits = mpz_sizeinbase(c.n.get_mpz_t(), 2);
    size_t bytes = (bits + 7) / 8;
    unsigned top_mask = bits % 8 ? (1u << (bits % 8)) - 1 : 0xffu;
    for (;;) {
        Bytes raw = rng.bytes(bytes);
        raw[0] &= static_cast<uint8_t>(top_mask);
        mpz_class v = bytes_to_mpz(raw);
        if (v >= 1 && v < c.n) return v;
    }
}

Bytes encode_point(const ECPoint& pt, const CurveParams& c) {
    if (pt.infinity) throw std::invalid_argument("encode_point: identity not encodable");
    size_t w = c.field_bytes();
    Bytes out;
    out.reserve(1 + 2 * w);
    out.push_back(0x04);
    append(out, mpz_to_bytes(pt.x, w));
    append(out, mpz_to_bytes(pt.y, w));
    return out;
}

std::optional<ECPoint> decode_point(const Bytes& wire, const CurveParams& c) {
    size_t w = c.field_bytes();
    if (wire.size() != 1 + 2 * w || wire[0] != 0x04) return std::nullopt;
    mpz_class x = bytes_to_mpz(Bytes(wire.begin() + 1, wire.begin() + 1 + w));
    mpz_class y = bytes_to_mpz(Bytes(wire.begin() + 1 + w, wire.end()));
    ECPoint pt = ECPoint::affine(std::move(x), std::move(y));
    if (!point_on_curve(pt, c)) return std::nullopt;
    return pt;
}

Bytes mpz_to_bytes(const mpz_class& v, size_t width) {
    if (v < 0) throw std::invalid_argument("mpz_to_bytes: negative");
    Bytes out(width, 0);
    size_t count = 0;
    mpz_export(out.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
    if (count > width) throw std::invalid_argument("mpz_to_bytes: value too wide");
    // mpz_export writes from the front; shift right for fixed width.
    if (count < width) {
        std::copy_backward(out.begin(), out.begin() + count, out.begin() + width);
        std::fill(out.begin(), out.begin() + (width - count), 0);
    }
    return out;
}

mpz_class bytes_to_mpz(const Bytes& b) {
    mpz_class v;
    if (!b.empty()) mpz_import(v.get_mpz_t(), b.size(), 1, 1, 1, 0, b.data());
    return v;
}

}  // namespace convsim
