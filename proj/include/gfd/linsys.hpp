#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gfd/field.hpp"
#include "gfd/prf.hpp"

namespace gfd {

using DenseRow = std::vector<FieldElem>;

struct SparseEntry {
    std::uint32_t index;
    FieldElem coeff;  // nonzero

    friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

// Indices strictly increasing, coefficients nonzero, at most t entries.
using SparseRow = std::vector<SparseEntry>;

using SolutionVector = std::vector<FieldElem>;

struct DenseSystem {
    std::size_t m = 0;  // variable count
    std::vector<DenseRow> rows;
    std::vector<FieldElem> rhs;
};

struct SparseSystem {
    std::size_t m = 0;
    std::vector<SparseRow> rows;
    std::vector<FieldElem> rhs;
};

// Gaussian elimination over GF(2^k) on a bit-sliced representation.
// Returns a solution whenever the system is consistent (free variables are
// set to zero), nullopt when it is not. Pivots are the first nonzero
// element in column order.
std::optional<SolutionVector> solve_dense(const Field& f, const DenseSystem& sys);

// Same contract for sparse rows. Columns occurring in exactly one active
// row are peeled first (back-substitution order); the residual core, if
// any, is solved by dense elimination over its own columns.
std::optional<SolutionVector> solve_sparse(const Field& f, const SparseSystem& sys);

// Rank of the coefficient matrix. rank == rows.size() iff the equation set
// is independent (solvable for every right-hand side).
std::size_t rank(const Field& f, const DenseSystem& sys);
std::size_t rank(const Field& f, const SparseSystem& sys);

bool verify_solution(const Field& f, const DenseSystem& sys, std::span<const FieldElem> b);
bool verify_solution(const Field& f, const SparseSystem& sys, std::span<const FieldElem> b);

// Inverse of a square matrix, or nullopt if singular. Scalar Gauss-Jordan;
// meant for the small per-sub-bucket systems.
std::optional<std::vector<DenseRow>> invert_dense(const Field& f,
                                                  const std::vector<DenseRow>& mat);

// Lower bound on the probability that n random dense equations on n + c
// variables over GF(2^k) are independent: 1 - 1/(2^{kc} (2^k - 1)),
// clamped to [0, 1].
double independence_bound(unsigned k, unsigned c);

// Expected number of unused variables when n t-sparse equations are drawn
// on m variables: m (1 - 1/m)^{tn}.
double expected_empty_cells(std::uint64_t m, std::uint64_t t, std::uint64_t n);

// Default variable count for t-sparse systems: ceil(n (1 + e^{-t})).
std::uint64_t min_variables(std::uint64_t t, std::uint64_t n);

// Deterministic pseudorandom equation rows keyed by (seed, key digest).
DenseRow sample_dense_row(const FieldSpec& spec, std::size_t m, const Digest& d,
                          std::uint64_t seed);

// Exactly t distinct indices (uniform over [0,m), or over a contiguous
// window of the given size whose start is derived from the digest), each
// with a uniform nonzero coefficient.
SparseRow sample_sparse_row(const FieldSpec& spec, std::size_t m, std::size_t t,
                            std::optional<std::size_t> locality_window, const Digest& d,
                            std::uint64_t seed);

}  // namespace gfd
