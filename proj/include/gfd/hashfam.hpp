#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gfd/prf.hpp"

namespace gfd {

// Modulus for the pairwise family: the Mersenne prime 2^61 - 1.
inline constexpr std::uint64_t kPairwisePrime = (1ull << 61) - 1;

// x -> ((a x + b) mod p) mod range, x being the key digest folded into
// [0, p). Pairwise independent up to the negligible fold/range skew.
struct PairwiseHash {
    std::uint64_t a = 1;  // 1 <= a < p
    std::uint64_t b = 0;  // 0 <= b < p
    std::uint64_t range = 1;

    friend bool operator==(const PairwiseHash&, const PairwiseHash&) = default;
};

PairwiseHash pairwise_new(std::uint64_t seed, std::uint64_t range);  // throws EmptyRange
std::uint64_t pairwise_eval(const PairwiseHash& h, const Digest& d);

// Simulated-uniform hash: a table of random values indexed by a pairwise
// hash. On any key set that the inner hash maps injectively into the table,
// the composition behaves like a fully random function.
struct SimUniformHash {
    PairwiseHash inner;               // range = table.size()
    std::vector<std::uint32_t> table;  // values < value_range
    std::uint64_t value_range = 0;

    friend bool operator==(const SimUniformHash&, const SimUniformHash&) = default;
};

SimUniformHash sim_uniform_new(std::uint64_t seed, std::uint64_t table_size,
                               std::uint64_t value_range);
std::uint64_t sim_uniform_eval(const SimUniformHash& h, const Digest& d);

// Which table cell a digest lands in (the "random number" a key draws).
inline std::uint64_t sim_uniform_cell(const SimUniformHash& h, const Digest& d) {
    return pairwise_eval(h.inner, d);
}

inline constexpr std::uint32_t kNoBucketHash = 0xFFFFFFFFu;  // bad-bucket sentinel

// Candidate functions shared by all buckets plus the per-bucket choice.
struct HashBank {
    std::vector<SimUniformHash> candidates;
    std::vector<std::uint32_t> chosen;  // per bucket; kNoBucketHash marks a bad bucket
};

std::vector<SimUniformHash> bank_candidates(std::uint64_t seed, std::size_t bank_size,
                                            std::uint64_t table_size, std::uint64_t value_range);

// Smallest candidate index whose evaluations, reduced into [0, slot_range),
// are pairwise distinct on the given keys. nullopt = NoGoodFunction, which
// tells the builder to redraw the whole bank.
std::optional<std::size_t> select_bucket_hash(std::span<const Digest> bucket_keys,
                                              std::span<const SimUniformHash> candidates,
                                              std::uint64_t slot_range);

}  // namespace gfd
