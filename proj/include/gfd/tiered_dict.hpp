#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gfd/core_dict.hpp"
#include "gfd/field.hpp"
#include "gfd/hashfam.hpp"
#include "gfd/linsys.hpp"
#include "gfd/prf.hpp"
#include "gfd/report.hpp"

namespace gfd {

// Sizing of the two-level structure. The asymptotic formulas degenerate at
// small n, so every knob has an explicit floor and every knob can be
// overridden; whatever was used is recorded in the file header.
struct LayoutParams {
    std::uint64_t bucket_count = 1;
    std::uint64_t bad_bucket_capacity = 1;
    std::uint64_t sub_bucket_target = 4;    // s
    std::uint64_t sub_bucket_capacity = 8;  // hard cap per sub-bucket
    std::uint64_t slot_range = 64;          // collision-free slot domain per sub-bucket
    std::uint64_t bank_size = 2;
    std::uint64_t table_size = 64;          // sim-uniform table cells per candidate

    friend bool operator==(const LayoutParams&, const LayoutParams&) = default;
};

struct LayoutOverrides {
    std::optional<std::uint64_t> bucket_count;
    std::optional<std::uint64_t> bad_bucket_capacity;
    std::optional<std::uint64_t> sub_bucket_target;
    std::optional<std::uint64_t> sub_bucket_capacity;
    std::optional<std::uint64_t> slot_range;
    std::optional<std::uint64_t> bank_size;
    std::optional<std::uint64_t> table_size;
};

LayoutParams plan_layout(std::uint64_t n, unsigned k, const LayoutOverrides& o = {});

// Per-bucket record, one 64-bit word: where the bucket's sub-buckets start,
// which bank candidate it uses (kNoBucketHash16 = bad bucket), and how many
// sub-buckets it has. One memory probe fetches all three at query time.
struct BucketRec {
    std::uint32_t sub_start = 0;
    std::uint16_t chosen = 0;
    std::uint16_t sub_count = 0;
};
inline constexpr std::uint16_t kNoBucketHash16 = 0xFFFF;

// Per-sub-bucket record, one 64-bit word: payload offset, word count, and
// the slot-hash variant that made the sub-bucket's system invertible.
struct SubRec {
    std::uint32_t offset = 0;
    std::uint8_t len = 0;
    std::uint8_t variant = 0;
};

struct TieredDict {
    FieldSpec spec;
    LayoutParams params;
    std::uint64_t seed = 0;  // slot/coefficient prf seed
    std::uint64_t n = 0;
    PairwiseHash h1;  // range = bucket_count
    HashBank bank;    // candidates + per-bucket chosen (mirrored in buckets[].chosen)
    std::vector<BucketRec> buckets;
    std::vector<SubRec> subs;
    std::vector<FieldElem> payload;                     // k-bit words
    std::vector<std::pair<Digest, std::uint64_t>> bad_map;  // sorted by digest
};

struct TieredOptions {
    unsigned k = 8;
    std::uint64_t seed = 0;
    unsigned max_attempts = 16;  // bank redraws
    bool use_cache = true;
    LayoutOverrides layout;
};

// Coefficient of payload word `col` in the row of a key sitting at slot
// `slot` under variant `variant`. Rows depend only on (variant, slot), so
// sub-buckets with equal slot sets share one matrix.
FieldElem sub_coefficient(const Field& f, std::uint64_t seed, std::uint8_t variant,
                          std::uint64_t slot, std::uint64_t col);

// Memoizes inverses of the per-sub-bucket matrices, keyed by (sorted slot
// set, variant). solve() multiplies the cached inverse by the rhs; nullopt
// reports a singular matrix and tells the caller to advance the variant.
class MatrixCache {
public:
    MatrixCache(const Field& f, std::uint64_t seed, bool memoize)
        : f_(f), seed_(seed), memoize_(memoize) {}

    std::optional<SolutionVector> solve(std::span<const std::uint64_t> sorted_slots,
                                        std::uint8_t variant, std::span<const FieldElem> rhs);

    std::uint64_t hits() const { return hits_; }
    std::uint64_t misses() const { return misses_; }

private:
    struct Key {
        std::vector<std::uint64_t> slots;
        std::uint8_t variant;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const;
    };

    std::optional<std::vector<DenseRow>> invert(const Key& key) const;

    const Field& f_;
    std::uint64_t seed_;
    bool memoize_;
    std::uint64_t hits_ = 0;
    std::uint64_t misses_ = 0;
    std::unordered_map<Key, std::optional<std::vector<DenseRow>>, KeyHash> map_;
};

std::pair<TieredDict, BuildReport> build_tiered(std::vector<KeyValue> pairs,
                                                const TieredOptions& opt);

std::uint64_t query_tiered(const TieredDict& d, const Digest& key);
inline std::uint64_t query_tiered(const TieredDict& d, std::string_view key) {
    return query_tiered(d, digest_key(key));
}

struct ProbeResult {
    std::uint64_t value = 0;
    std::size_t probes = 0;  // distinct payload/offset/bank words read
    bool bad_path = false;   // answered from the bad-key fallback table
};
ProbeResult query_tiered_probed(const TieredDict& d, const Digest& key);

inline std::size_t probe_count(const TieredDict& d, const Digest& key) {
    return query_tiered_probed(d, key).probes;
}

struct TieredBits {
    std::uint64_t payload_bits = 0;
    std::uint64_t overhead_bits = 0;
    std::uint64_t total_bits = 0;
};
TieredBits tiered_bits(const TieredDict& d);

}  // namespace gfd
