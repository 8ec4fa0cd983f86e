#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "gfd/field.hpp"
#include "gfd/linsys.hpp"
#include "gfd/prf.hpp"
#include "gfd/report.hpp"

namespace gfd {

struct KeyValue {
    Digest digest;
    std::uint64_t value = 0;
};

// Sort by digest, collapse exact duplicates, reject conflicting ones, and
// range-check values against the field width. Every build goes through
// this, so results are independent of input order.
std::vector<KeyValue> canonicalize_pairs(std::vector<KeyValue> pairs, const Field& f);

enum class CoreMode : std::uint8_t { dense = 0, sparse = 1, pure = 2 };

// One linear system over GF(2^k), one equation per key; the payload is the
// solution vector. Queries re-derive the key's row and take a dot product.
struct CoreDict {
    FieldSpec spec;
    CoreMode mode = CoreMode::dense;
    std::uint32_t t = 0;  // row weight for sparse/pure
    std::optional<std::size_t> locality_window;
    std::uint64_t seed = 0;  // effective row seed (already attempt-mixed)
    std::uint64_t n = 0;
    SolutionVector b;  // m words of k bits

    std::size_t m() const { return b.size(); }
};

struct CoreOptions {
    unsigned k = 8;
    CoreMode mode = CoreMode::dense;
    std::uint32_t t = 3;                        // sparse mode only
    std::optional<std::size_t> locality_window;  // sparse mode only
    std::uint64_t slack = 0;                    // extra variables c
    std::uint64_t seed = 0;
    unsigned max_attempts = 16;
    // Pure mode solves one n x n system by elimination; O(n^3) worst case,
    // so it is capped unless explicitly unlocked.
    bool allow_large_pure = false;
};

inline constexpr std::uint64_t kPureModeDefaultCap = 4096;

// Row weight used by pure mode: ceil(ln n), bumped to the next odd value
// for k = 1 where an even weight makes every GF(2) row sum to zero and the
// system can never reach full rank.
std::uint32_t pure_mode_weight(std::uint64_t n, unsigned k);

std::pair<CoreDict, BuildReport> build_core(std::vector<KeyValue> pairs, const CoreOptions& opt);

std::uint64_t query_core(const CoreDict& d, const Digest& key);
inline std::uint64_t query_core(const CoreDict& d, std::string_view key) {
    return query_core(d, digest_key(key));
}

// Same as query_core but also reports how many payload words the query
// touched (the row's support).
std::pair<std::uint64_t, std::size_t> query_core_probed(const CoreDict& d, const Digest& key);

// (payload_bits, total_bits): payload is m*k; total adds the descriptor
// fields (spec, mode, seed, sizes) at their serialized width.
std::pair<std::uint64_t, std::uint64_t> core_bits(const CoreDict& d);

}  // namespace gfd
