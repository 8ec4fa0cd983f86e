#include "gfd/field.hpp"

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace gfd {

namespace {

// Tail (poly minus the leading x^k term) of the canonical reduction
// polynomial per width. Entry k-1 is for GF(2^k): the lexicographically
// smallest irreducible polynomial of degree k, except k=8 (0x11B).
// Irreducibility of every entry is asserted by the unit tests.
constexpr std::array<std::uint64_t, 64> kPolyTail = {
    0x0ull,  0x3ull,  0x3ull,  0x3ull,  0x5ull,  0x3ull,  0x3ull,  0x1Bull,
    0x3ull,  0x9ull,  0x5ull,  0x9ull,  0x1Bull, 0x21ull, 0x3ull,  0x2Bull,
    0x9ull,  0x9ull,  0x27ull, 0x9ull,  0x5ull,  0x3ull,  0x21ull, 0x1Bull,
    0x9ull,  0x1Bull, 0x27ull, 0x3ull,  0x5ull,  0x3ull,  0x9ull,  0x8Dull,
    0x4Bull, 0x1Bull, 0x5ull,  0x35ull, 0x3Full, 0x63ull, 0x11ull, 0x39ull,
    0x9ull,  0x27ull, 0x59ull, 0x21ull, 0x1Bull, 0x3ull,  0x21ull, 0x2Dull,
    0x71ull, 0x1Dull, 0x4Bull, 0x9ull,  0x47ull, 0x7Dull, 0x47ull, 0x95ull,
    0x11ull, 0x63ull, 0x7Bull, 0x3ull,  0x27ull, 0x69ull, 0x3ull,  0x1Bull,
};

using u128 = unsigned __int128;

int deg128(u128 p) {
    if (p == 0) return -1;
    int d = 0;
    while (p >> 1) {
        p >>= 1;
        ++d;
    }
    return d;
}

u128 pmod128(u128 a, u128 m) {
    int dm = deg128(m);
    int da = deg128(a);
    while (da >= dm) {
        a ^= m << (da - dm);
        da = deg128(a);
    }
    return a;
}

u128 pmulmod128(u128 a, u128 b, u128 m) {
    u128 r = 0;
    while (b) {
        if (b & 1) r ^= a;
        b >>= 1;
        a <<= 1;
        if (deg128(a) >= deg128(m)) a ^= m << (deg128(a) - deg128(m));
    }
    return pmod128(r, m);
}

u128 pgcd128(u128 a, u128 b) {
    while (b) {
        u128 t = pmod128(a, b);
        a = b;
        b = t;
    }
    return a;
}

// x^(2^e) mod m.
u128 pow_x_2e(unsigned e, u128 m) {
    u128 r = 2;  // x
    for (unsigned i = 0; i < e; ++i) r = pmulmod128(r, r, m);
    return r;
}

u128 full_poly(const FieldSpec& spec) { return (u128{1} << spec.k) | u128{spec.poly_tail}; }

bool irreducible_trial_division(const FieldSpec& spec) {
    const u128 f = full_poly(spec);
    const unsigned half = spec.k / 2;
    for (unsigned d = 1; d <= half; ++d) {
        for (std::uint64_t tail = 0; tail < (1ull << d); ++tail) {
            u128 g = (u128{1} << d) | u128{tail};
            if (pmod128(f, g) == 0) return false;
        }
    }
    return true;
}

bool irreducible_rabin(const FieldSpec& spec) {
    const u128 f = full_poly(spec);
    const unsigned n = spec.k;
    // x^(2^n) == x mod f
    if (pow_x_2e(n, f) != pmod128(2, f)) return false;
    // gcd(x^(2^(n/q)) - x, f) = 1 for every prime q | n
    unsigned rem = n;
    for (unsigned q = 2; q * q <= rem; ++q) {
        if (rem % q) continue;
        while (rem % q == 0) rem /= q;
        u128 h = pmod128(pow_x_2e(n / q, f) ^ u128{2}, f);
        if (pgcd128(f, h) != 1) return false;
    }
    if (rem > 1 && rem < n) {
        u128 h = pmod128(pow_x_2e(n / rem, f) ^ u128{2}, f);
        if (pgcd128(f, h) != 1) return false;
    }
    return true;
}

}  // namespace

FieldSpec default_spec(unsigned k) {
    if (k < 1 || k > 64) throw UnsupportedFieldWidth(k);
    return FieldSpec{k, kPolyTail[k - 1]};
}

const Field& field_for(const FieldSpec& spec) {
    static std::mutex mu;
    static std::map<std::pair<std::uint32_t, std::uint64_t>, std::unique_ptr<Field>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{spec.k, spec.poly_tail}];
    if (!slot) slot = std::make_unique<Field>(spec);
    return *slot;
}

bool is_irreducible(const FieldSpec& spec) {
    if (spec.k < 1 || spec.k > 64) return false;
    if (spec.k == 1) return true;  // both degree-1 polynomials are irreducible
    if ((spec.poly_tail >> spec.k) != 0 && spec.k < 64) return false;
    if ((spec.poly_tail & 1) == 0) return false;  // divisible by x
    return spec.k <= 16 ? irreducible_trial_division(spec) : irreducible_rabin(spec);
}

Field::Field(FieldSpec spec) : spec_(spec) {
    if (spec.k < 1 || spec.k > 64) throw UnsupportedFieldWidth(spec.k);
    mask_ = (spec.k == 64) ? ~0ull : ((1ull << spec.k) - 1);
    if ((spec.poly_tail & ~mask_) != 0) {
        throw InvalidArgument("reduction polynomial tail exceeds field width");
    }
    if (spec.k >= 2 && spec.k <= 16) {
        // log/antilog tables from a generator. x generates the group for the
        // canonical polynomials (checked below; fall back to slow path if a
        // custom polynomial's x is a non-generator).
        order_ = (1u << spec.k) - 1;
        std::vector<std::uint32_t> lg(std::size_t{1} << spec.k, 0);
        std::vector<std::uint64_t> ex;
        ex.reserve(2 * order_);
        FieldElem v = 1;
        bool generator = true;
        for (std::uint32_t i = 0; i < order_; ++i) {
            if (i > 0 && v == 1) {
                generator = false;
                break;
            }
            lg[v] = i;
            ex.push_back(v);
            v = mul_x(v);
        }
        if (generator && v == 1) {
            ex.insert(ex.end(), ex.begin(), ex.end());
            log_ = std::move(lg);
            exp_ = std::move(ex);
        }
    }
}

FieldElem Field::mul_slow(FieldElem a, FieldElem b) const {
    FieldElem r = 0;
    while (b) {
        if (b & 1) r ^= a;
        b >>= 1;
        a = mul_x(a);
    }
    return r;
}

FieldElem Field::pow(FieldElem a, std::uint64_t e) const {
    FieldElem r = 1;
    FieldElem base = a & mask_;
    while (e) {
        if (e & 1) r = mul(r, base);
        base = mul(base, base);
        e >>= 1;
    }
    return r;
}

FieldElem Field::inv(FieldElem a) const {
    if ((a & mask_) == 0) throw DivisionByZero();
    // a^(2^k - 2); mask is 2^k - 1, so the exponent is mask - 1 (k = 64 included).
    return pow(a, mask_ - 1);
}

FieldElem Field::dot(std::span<const FieldElem> row, std::span<const FieldElem> b) const {
    if (row.size() != b.size()) throw DimensionMismatch(row.size(), b.size());
    FieldElem acc = 0;
    for (std::size_t i = 0; i < row.size(); ++i) acc ^= mul(row[i], b[i]);
    return acc;
}

void Field::mul_matrix_columns(FieldElem c, std::span<FieldElem> out) const {
    FieldElem v = c & mask_;
    for (std::uint32_t i = 0; i < spec_.k; ++i) {
        out[i] = v;
        v = mul_x(v);
    }
}

}  // namespace gfd
