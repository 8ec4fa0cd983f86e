#include "gfd/linsys.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "gfd/errors.hpp"

namespace gfd {

namespace {

// Bit-sliced working matrix: k planes per row, plane j holds bit j of every
// entry, columns packed 64 per word. The right-hand side is carried as one
// extra column so row operations cover it automatically.
class PackedEliminator {
public:
    PackedEliminator(const Field& f, std::size_t n_rows, std::size_t n_cols)
        : f_(f),
          k_(f.k()),
          n_rows_(n_rows),
          n_cols_(n_cols),
          blocks_((n_cols + 1 + 63) / 64),
          stride_(k_ * blocks_),
          data_(n_rows * stride_, 0),
          cols_buf_(k_),
          tmp_row_(stride_) {}

    void set_entry(std::size_t r, std::size_t c, FieldElem v) {
        std::uint64_t* row = row_ptr(r);
        const std::size_t word = c >> 6;
        const std::uint64_t bit = 1ull << (c & 63);
        for (std::uint32_t j = 0; j < k_; ++j) {
            if ((v >> j) & 1) row[j * blocks_ + word] |= bit;
        }
    }

    void set_rhs(std::size_t r, FieldElem v) { set_entry(r, n_cols_, v); }

    FieldElem get_entry(std::size_t r, std::size_t c) const {
        const std::uint64_t* row = row_ptr(r);
        const std::size_t word = c >> 6;
        const unsigned sh = c & 63;
        FieldElem v = 0;
        for (std::uint32_t j = 0; j < k_; ++j) {
            v |= ((row[j * blocks_ + word] >> sh) & 1ull) << j;
        }
        return v;
    }

    FieldElem get_rhs(std::size_t r) const { return get_entry(r, n_cols_); }

    // Forward elimination. Returns pivot columns in increasing order;
    // rank = pivots.size(). Pivot rows end up in positions 0..rank-1 with
    // unit pivot coefficients.
    std::vector<std::uint32_t> eliminate() {
        std::vector<std::uint32_t> pivots;
        pivots.reserve(std::min(n_rows_, n_cols_));
        std::size_t filled = 0;
        for (std::size_t col = 0; col < n_cols_ && filled < n_rows_; ++col) {
            std::size_t r = filled;
            while (r < n_rows_ && get_entry(r, col) == 0) ++r;
            if (r == n_rows_) continue;
            if (r != filled) swap_rows(r, filled);
            FieldElem v = get_entry(filled, col);
            if (v != 1) scale_row(filled, f_.inv(v));
            const std::size_t from_word = col >> 6;
            for (std::size_t r2 = filled + 1; r2 < n_rows_; ++r2) {
                FieldElem w = get_entry(r2, col);
                if (w) axpy(r2, filled, w, from_word);
            }
            pivots.push_back(static_cast<std::uint32_t>(col));
            ++filled;
        }
        return pivots;
    }

    // After eliminate(): rows at index >= rank have all-zero coefficients;
    // the system is consistent iff their reduced rhs is zero too.
    bool consistent_after(std::size_t rank) const {
        for (std::size_t r = rank; r < n_rows_; ++r) {
            if (get_rhs(r) != 0) return false;
        }
        return true;
    }

    // Back substitution into b (size n_cols); free columns stay zero.
    void back_substitute(const std::vector<std::uint32_t>& pivots,
                         std::span<FieldElem> b) const {
        for (std::size_t i = pivots.size(); i-- > 0;) {
            const std::uint32_t col = pivots[i];
            const std::uint64_t* row = row_ptr(i);
            FieldElem acc = get_rhs(i);
            for (std::size_t word = col >> 6; word < blocks_; ++word) {
                std::uint64_t any = 0;
                for (std::uint32_t j = 0; j < k_; ++j) any |= row[j * blocks_ + word];
                if (word == (col >> 6)) any &= ~((2ull << (col & 63)) - 1);  // cols > pivot
                while (any) {
                    const unsigned bit = std::countr_zero(any);
                    any &= any - 1;
                    const std::size_t c = (word << 6) | bit;
                    if (c >= n_cols_) continue;  // rhs column
                    acc ^= f_.mul(get_entry(i, c), b[c]);
                }
            }
            b[col] = acc;
        }
    }

private:
    std::uint64_t* row_ptr(std::size_t r) { return data_.data() + r * stride_; }
    const std::uint64_t* row_ptr(std::size_t r) const { return data_.data() + r * stride_; }

    void swap_rows(std::size_t a, std::size_t b) {
        std::swap_ranges(row_ptr(a), row_ptr(a) + stride_, row_ptr(b));
    }

    // dst += c * src, on all columns from from_word on.
    void axpy(std::size_t dst, std::size_t src, FieldElem c, std::size_t from_word) {
        f_.mul_matrix_columns(c, cols_buf_);
        std::uint64_t* d = row_ptr(dst);
        const std::uint64_t* s = row_ptr(src);
        const std::size_t nw = blocks_ - from_word;
        for (std::uint32_t i = 0; i < k_; ++i) {
            std::uint64_t col = cols_buf_[i];
            const std::uint64_t* sp = s + i * blocks_ + from_word;
            while (col) {
                const unsigned j = std::countr_zero(col);
                col &= col - 1;
                std::uint64_t* dp = d + j * blocks_ + from_word;
                for (std::size_t w = 0; w < nw; ++w) dp[w] ^= sp[w];
            }
        }
    }

    // row *= c
    void scale_row(std::size_t r, FieldElem c) {
        f_.mul_matrix_columns(c, cols_buf_);
        std::uint64_t* d = row_ptr(r);
        std::copy(d, d + stride_, tmp_row_.begin());
        std::fill(d, d + stride_, 0);
        for (std::uint32_t i = 0; i < k_; ++i) {
            std::uint64_t col = cols_buf_[i];
            const std::uint64_t* sp = tmp_row_.data() + i * blocks_;
            while (col) {
                const unsigned j = std::countr_zero(col);
                col &= col - 1;
                std::uint64_t* dp = d + j * blocks_;
                for (std::size_t w = 0; w < blocks_; ++w) dp[w] ^= sp[w];
            }
        }
    }

    const Field& f_;
    std::uint32_t k_;
    std::size_t n_rows_;
    std::size_t n_cols_;
    std::size_t blocks_;
    std::size_t stride_;
    std::vector<std::uint64_t> data_;
    std::vector<FieldElem> cols_buf_;
    std::vector<std::uint64_t> tmp_row_;
};

void check_dense(const Field& f, const DenseSystem& sys) {
    if (sys.rows.size() != sys.rhs.size()) throw DimensionMismatch(sys.rows.size(), sys.rhs.size());
    for (const auto& row : sys.rows) {
        if (row.size() != sys.m) throw DimensionMismatch(row.size(), sys.m);
    }
    (void)f;
}

void check_sparse(const Field& f, const SparseSystem& sys) {
    if (sys.rows.size() != sys.rhs.size()) throw DimensionMismatch(sys.rows.size(), sys.rhs.size());
    for (const auto& row : sys.rows) {
        std::uint32_t prev = 0;
        bool first = true;
        for (const auto& e : row) {
            if (e.index >= sys.m) throw DimensionMismatch(e.index, sys.m);
            if (!first && e.index <= prev) throw InvalidArgument("sparse row indices not increasing");
            if ((e.coeff & f.mask()) == 0) throw InvalidArgument("sparse row has zero coefficient");
            prev = e.index;
            first = false;
        }
    }
}

PackedEliminator load_dense(const Field& f, const DenseSystem& sys) {
    PackedEliminator e(f, sys.rows.size(), sys.m);
    for (std::size_t r = 0; r < sys.rows.size(); ++r) {
        for (std::size_t c = 0; c < sys.m; ++c) {
            if (sys.rows[r][c]) e.set_entry(r, c, sys.rows[r][c] & f.mask());
        }
        e.set_rhs(r, sys.rhs[r] & f.mask());
    }
    return e;
}

struct PeelResult {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> order;  // (row, pivot col)
    std::vector<std::uint32_t> core_rows;
};

PeelResult peel(const SparseSystem& sys) {
    const std::size_t n = sys.rows.size();
    std::vector<std::uint32_t> degree(sys.m, 0);
    for (const auto& row : sys.rows) {
        for (const auto& e : row) ++degree[e.index];
    }
    // Per-column row lists; rows are marked dead as they are peeled.
    std::vector<std::vector<std::uint32_t>> col_rows(sys.m);
    for (std::size_t r = 0; r < n; ++r) {
        for (const auto& e : sys.rows[r]) col_rows[e.index].push_back(static_cast<std::uint32_t>(r));
    }
    std::vector<char> alive(n, 1);
    std::vector<std::uint32_t> stack;
    for (std::uint32_t c = 0; c < sys.m; ++c) {
        if (degree[c] == 1) stack.push_back(c);
    }
    PeelResult out;
    out.order.reserve(n);
    while (!stack.empty()) {
        const std::uint32_t col = stack.back();
        stack.pop_back();
        if (degree[col] != 1) continue;
        std::uint32_t row = 0;
        for (std::uint32_t r : col_rows[col]) {
            if (alive[r]) {
                row = r;
                break;
            }
        }
        alive[row] = 0;
        out.order.emplace_back(row, col);
        for (const auto& e : sys.rows[row]) {
            if (--degree[e.index] == 1) stack.push_back(e.index);
        }
    }
    for (std::uint32_t r = 0; r < n; ++r) {
        if (alive[r]) out.core_rows.push_back(r);
    }
    return out;
}

// Dense elimination of the unpeelable core over its own column set.
// Returns (rank, consistent, solution-written) — solution only when solve.
struct CoreOutcome {
    std::size_t rank = 0;
    bool consistent = true;
};

CoreOutcome solve_core(const Field& f, const SparseSystem& sys,
                       const std::vector<std::uint32_t>& core_rows, SolutionVector* b) {
    std::vector<std::uint32_t> cols;
    for (std::uint32_t r : core_rows) {
        for (const auto& e : sys.rows[r]) cols.push_back(e.index);
    }
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    std::vector<std::uint32_t> local(sys.m, 0);
    for (std::size_t i = 0; i < cols.size(); ++i) local[cols[i]] = static_cast<std::uint32_t>(i);

    PackedEliminator e(f, core_rows.size(), cols.size());
    for (std::size_t r = 0; r < core_rows.size(); ++r) {
        for (const auto& entry : sys.rows[core_rows[r]]) {
            e.set_entry(r, local[entry.index], entry.coeff & f.mask());
        }
        e.set_rhs(r, sys.rhs[core_rows[r]] & f.mask());
    }
    const auto pivots = e.eliminate();
    CoreOutcome out;
    out.rank = pivots.size();
    out.consistent = e.consistent_after(out.rank);
    if (b && out.consistent) {
        std::vector<FieldElem> local_b(cols.size(), 0);
        e.back_substitute(pivots, local_b);
        for (std::size_t i = 0; i < cols.size(); ++i) (*b)[cols[i]] = local_b[i];
    }
    return out;
}

}  // namespace

std::optional<SolutionVector> solve_dense(const Field& f, const DenseSystem& sys) {
    check_dense(f, sys);
    PackedEliminator e = load_dense(f, sys);
    const auto pivots = e.eliminate();
    if (!e.consistent_after(pivots.size())) return std::nullopt;
    SolutionVector b(sys.m, 0);
    e.back_substitute(pivots, b);
    return b;
}

std::size_t rank(const Field& f, const DenseSystem& sys) {
    check_dense(f, sys);
    PackedEliminator e = load_dense(f, sys);
    return e.eliminate().size();
}

std::optional<SolutionVector> solve_sparse(const Field& f, const SparseSystem& sys) {
    check_sparse(f, sys);
    const PeelResult p = peel(sys);
    SolutionVector b(sys.m, 0);
    if (!p.core_rows.empty()) {
        const CoreOutcome core = solve_core(f, sys, p.core_rows, &b);
        if (!core.consistent) return std::nullopt;
    }
    for (std::size_t i = p.order.size(); i-- > 0;) {
        const auto [row, col] = p.order[i];
        FieldElem acc = sys.rhs[row] & f.mask();
        FieldElem pivot_coeff = 1;
        for (const auto& e : sys.rows[row]) {
            if (e.index == col) {
                pivot_coeff = e.coeff;
            } else {
                acc ^= f.mul(e.coeff, b[e.index]);
            }
        }
        b[col] = pivot_coeff == 1 ? acc : f.mul(f.inv(pivot_coeff), acc);
    }
    return b;
}

std::size_t rank(const Field& f, const SparseSystem& sys) {
    check_sparse(f, sys);
    const PeelResult p = peel(sys);
    std::size_t r = p.order.size();
    if (!p.core_rows.empty()) r += solve_core(f, sys, p.core_rows, nullptr).rank;
    return r;
}

bool verify_solution(const Field& f, const DenseSystem& sys, std::span<const FieldElem> b) {
    for (std::size_t r = 0; r < sys.rows.size(); ++r) {
        if (f.dot(sys.rows[r], b) != (sys.rhs[r] & f.mask())) return false;
    }
    return true;
}

bool verify_solution(const Field& f, const SparseSystem& sys, std::span<const FieldElem> b) {
    for (std::size_t r = 0; r < sys.rows.size(); ++r) {
        FieldElem acc = 0;
        for (const auto& e : sys.rows[r]) acc ^= f.mul(e.coeff, b[e.index]);
        if (acc != (sys.rhs[r] & f.mask())) return false;
    }
    return true;
}

std::optional<std::vector<DenseRow>> invert_dense(const Field& f,
                                                  const std::vector<DenseRow>& mat) {
    const std::size_t n = mat.size();
    std::vector<DenseRow> a = mat;
    std::vector<DenseRow> inv(n, DenseRow(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].size() != n) throw DimensionMismatch(a[i].size(), n);
        inv[i][i] = 1;
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t r = col;
        while (r < n && (a[r][col] & f.mask()) == 0) ++r;
        if (r == n) return std::nullopt;
        std::swap(a[r], a[col]);
        std::swap(inv[r], inv[col]);
        const FieldElem scale = f.inv(a[col][col]);
        if (scale != 1) {
            for (std::size_t c = 0; c < n; ++c) {
                a[col][c] = f.mul(a[col][c], scale);
                inv[col][c] = f.mul(inv[col][c], scale);
            }
        }
        for (std::size_t r2 = 0; r2 < n; ++r2) {
            if (r2 == col) continue;
            const FieldElem w = a[r2][col] & f.mask();
            if (!w) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a[r2][c] ^= f.mul(w, a[col][c]);
                inv[r2][c] ^= f.mul(w, inv[col][c]);
            }
        }
    }
    return inv;
}

double independence_bound(unsigned k, unsigned c) {
    const long double kc = static_cast<long double>(k) * c;
    const long double denom = std::exp2l(kc) * (std::exp2l(static_cast<long double>(k)) - 1.0L);
    if (!std::isfinite(static_cast<double>(denom)) || denom <= 0.0L) return 1.0;
    long double bound = 1.0L - 1.0L / denom;
    if (bound < 0.0L) bound = 0.0L;
    if (bound > 1.0L) bound = 1.0L;
    return static_cast<double>(bound);
}

double expected_empty_cells(std::uint64_t m, std::uint64_t t, std::uint64_t n) {
    if (m == 0) return 0.0;
    const double md = static_cast<double>(m);
    return md * std::pow(1.0 - 1.0 / md, static_cast<double>(t) * static_cast<double>(n));
}

std::uint64_t min_variables(std::uint64_t t, std::uint64_t n) {
    const double m = static_cast<double>(n) * (1.0 + std::exp(-static_cast<double>(t)));
    return static_cast<std::uint64_t>(std::ceil(m));
}

DenseRow sample_dense_row(const FieldSpec& spec, std::size_t m, const Digest& d,
                          std::uint64_t seed) {
    const std::uint64_t mask = (spec.k == 64) ? ~0ull : ((1ull << spec.k) - 1);
    DenseRow row(m);
    for (std::size_t i = 0; i < m; ++i) {
        row[i] = prf64(seed, Tag::dense_row, d.lo, d.hi, i) & mask;
    }
    return row;
}

SparseRow sample_sparse_row(const FieldSpec& spec, std::size_t m, std::size_t t,
                            std::optional<std::size_t> locality_window, const Digest& d,
                            std::uint64_t seed) {
    if (t == 0 || t > m) throw InvalidArgument("sparse row needs 1 <= t <= m");
    std::size_t lo = 0;
    std::size_t range = m;
    if (locality_window) {
        const std::size_t w = *locality_window;
        if (w < t || w > m) throw InvalidArgument("locality window must satisfy t <= w <= m");
        lo = prf64(seed, Tag::sparse_window, d.lo, d.hi) % (m - w + 1);
        range = w;
    }
    std::vector<std::uint32_t> idx;
    idx.reserve(t);
    std::uint64_t ctr = 0;
    while (idx.size() < t) {
        const std::uint32_t cand =
            static_cast<std::uint32_t>(lo + prf64(seed, Tag::sparse_index, d.lo, d.hi, ctr++) % range);
        if (std::find(idx.begin(), idx.end(), cand) == idx.end()) idx.push_back(cand);
    }
    std::sort(idx.begin(), idx.end());

    const std::uint64_t mask = (spec.k == 64) ? ~0ull : ((1ull << spec.k) - 1);
    SparseRow row;
    row.reserve(t);
    std::uint64_t cctr = 0;
    for (std::uint32_t i : idx) {
        FieldElem v = 0;
        while (v == 0) v = prf64(seed, Tag::sparse_coeff, d.lo, d.hi, cctr++) & mask;
        row.push_back(SparseEntry{i, v});
    }
    return row;
}

}  // namespace gfd
