#include "gfd/hashfam.hpp"

#include <algorithm>

#include "gfd/errors.hpp"

namespace gfd {

namespace {

using u128 = unsigned __int128;

inline std::uint64_t mod_p(u128 x) {
    // Mersenne reduction for p = 2^61 - 1.
    std::uint64_t r = static_cast<std::uint64_t>(x & kPairwisePrime) +
                      static_cast<std::uint64_t>(x >> 61);
    r = (r & kPairwisePrime) + (r >> 61);
    if (r >= kPairwisePrime) r -= kPairwisePrime;
    return r;
}

inline std::uint64_t fold_digest(const Digest& d) {
    return mod_p((u128{d.hi} << 64) | d.lo);
}

}  // namespace

PairwiseHash pairwise_new(std::uint64_t seed, std::uint64_t range) {
    if (range == 0) throw EmptyRange();
    PairwiseHash h;
    h.a = 1 + prf64(seed, Tag::bank_pairwise, 0) % (kPairwisePrime - 1);
    h.b = prf64(seed, Tag::bank_pairwise, 1) % kPairwisePrime;
    h.range = range;
    return h;
}

std::uint64_t pairwise_eval(const PairwiseHash& h, const Digest& d) {
    const std::uint64_t x = fold_digest(d);
    const std::uint64_t y = mod_p(u128{h.a} * x + h.b);
    return y % h.range;
}

SimUniformHash sim_uniform_new(std::uint64_t seed, std::uint64_t table_size,
                               std::uint64_t value_range) {
    if (table_size == 0) throw EmptyRange();
    if (value_range == 0 || value_range > (1ull << 32)) {
        throw InvalidArgument("sim-uniform value range must be in [1, 2^32]");
    }
    SimUniformHash h;
    h.inner = pairwise_new(prf64(seed, Tag::bank_pairwise, 2), table_size);
    h.value_range = value_range;
    h.table.resize(table_size);
    for (std::uint64_t i = 0; i < table_size; ++i) {
        h.table[i] = static_cast<std::uint32_t>(prf64(seed, Tag::bank_table, i) % value_range);
    }
    return h;
}

std::uint64_t sim_uniform_eval(const SimUniformHash& h, const Digest& d) {
    return h.table[pairwise_eval(h.inner, d)];
}

std::vector<SimUniformHash> bank_candidates(std::uint64_t seed, std::size_t bank_size,
                                            std::uint64_t table_size, std::uint64_t value_range) {
    std::vector<SimUniformHash> out;
    out.reserve(bank_size);
    for (std::size_t i = 0; i < bank_size; ++i) {
        out.push_back(sim_uniform_new(prf64(seed, Tag::bank_table, 1, i), table_size, value_range));
    }
    return out;
}

std::optional<std::size_t> select_bucket_hash(std::span<const Digest> bucket_keys,
                                              std::span<const SimUniformHash> candidates,
                                              std::uint64_t slot_range) {
    if (slot_range == 0) throw EmptyRange();
    std::vector<std::uint64_t> slots;
    slots.reserve(bucket_keys.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        slots.clear();
        for (const Digest& d : bucket_keys) {
            slots.push_back(sim_uniform_eval(candidates[c], d) % slot_range);
        }
        std::sort(slots.begin(), slots.end());
        if (std::adjacent_find(slots.begin(), slots.end()) == slots.end()) return c;
    }
    return std::nullopt;
}

}  // namespace gfd
