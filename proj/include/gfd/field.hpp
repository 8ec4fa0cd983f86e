#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gfd/errors.hpp"

namespace gfd {

// A field element is stored in the low k bits of a machine word, read as a
// polynomial over GF(2) of degree < k.
using FieldElem = std::uint64_t;

// Parameters of GF(2^k), 1 <= k <= 64. The reduction polynomial has degree
// exactly k; since bit k of a degree-64 polynomial does not fit in 64 bits,
// we store the tail (the polynomial with the leading x^k term stripped) and
// keep bit k implied.
struct FieldSpec {
    std::uint32_t k = 0;
    std::uint64_t poly_tail = 0;  // reduction polynomial minus x^k

    friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

// Canonical spec for a given width: the lexicographically smallest
// irreducible polynomial of degree k, except k=8 where the familiar
// 0x11B (x^8+x^4+x^3+x+1) is used. Throws UnsupportedFieldWidth.
FieldSpec default_spec(unsigned k);

// True iff x^k + poly_tail is irreducible over GF(2). Trial division for
// small k, Rabin's test above that.
bool is_irreducible(const FieldSpec& spec);

class Field;

// Process-wide cache of arithmetic engines keyed by the spec, so query
// paths do not rebuild multiplication tables. Thread-safe.
const Field& field_for(const FieldSpec& spec);

// Arithmetic engine for one field. Multiplication uses log/antilog tables
// for k <= 16 and a shift-and-reduce loop above that. All operations are
// pure; a constructed Field is immutable and safe to share across threads.
class Field {
public:
    explicit Field(FieldSpec spec);

    const FieldSpec& spec() const { return spec_; }
    std::uint32_t k() const { return spec_.k; }
    std::uint64_t mask() const { return mask_; }

    static FieldElem add(FieldElem a, FieldElem b) { return a ^ b; }

    FieldElem mul(FieldElem a, FieldElem b) const {
        if (!log_.empty()) {
            if (a == 0 || b == 0) return 0;
            std::uint32_t s = log_[a] + log_[b];
            if (s >= order_) s -= order_;
            return exp_[s];
        }
        return mul_slow(a, b);
    }

    // Multiplicative inverse via a^(2^k - 2) (square and multiply).
    // Throws DivisionByZero for a = 0.
    FieldElem inv(FieldElem a) const;

    FieldElem pow(FieldElem a, std::uint64_t e) const;

    // Dot product sum_i row[i]*b[i]. Throws DimensionMismatch.
    FieldElem dot(std::span<const FieldElem> row, std::span<const FieldElem> b) const;

    // a * x mod poly; one reduction step.
    FieldElem mul_x(FieldElem a) const {
        std::uint64_t carry = (spec_.k == 64) ? (a >> 63) : ((a >> (spec_.k - 1)) & 1u);
        a = (a << 1) & mask_;
        if (carry) a ^= spec_.poly_tail;
        return a;
    }

    // Columns of the multiply-by-c matrix over GF(2): out[i] = c * x^i.
    // Used by the bit-sliced solver.
    void mul_matrix_columns(FieldElem c, std::span<FieldElem> out) const;

private:
    FieldElem mul_slow(FieldElem a, FieldElem b) const;

    FieldSpec spec_;
    std::uint64_t mask_ = 0;
    std::uint32_t order_ = 0;            // 2^k - 1 (table path only)
    std::vector<std::uint32_t> log_;     // index: element, value: discrete log
    std::vector<std::uint64_t> exp_;     // index: exponent (doubled to skip a mod)
};

}  // namespace gfd
