#pragma once

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "gfd/core_dict.hpp"
#include "gfd/prf.hpp"
#include "gfd/report.hpp"
#include "gfd/tiered_dict.hpp"

namespace gfd {

// Pairwise-independent fingerprint family over GF(2^64), masked to k bits:
// g(x) = (a * fold(x) + b) restricted to the low k bits. Its seed stream
// (Tag::fingerprint) is disjoint from every draw the dictionaries make, so
// the fingerprint is independent of the stored answer for non-members.
struct FingerprintHash {
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    std::uint32_t k = 8;

    friend bool operator==(const FingerprintHash&, const FingerprintHash&) = default;
};

FingerprintHash fingerprint_new(std::uint64_t seed, unsigned k);
std::uint64_t fingerprint_eval(const FingerprintHash& g, const Digest& d);

enum class MemberBackend : std::uint8_t { auto_pick = 0, core_dense = 1, tiered = 2 };

// Set-membership with no false negatives: a dictionary mapping each key to
// its fingerprint; a query compares the stored value with the recomputed
// fingerprint, so a non-member passes with probability about 2^-k.
struct MemberFilter {
    std::variant<CoreDict, TieredDict> dict;
    FingerprintHash g;
};

struct MemberOptions {
    unsigned k = 8;
    MemberBackend backend = MemberBackend::auto_pick;
    std::uint64_t seed = 0;
    unsigned max_attempts = 16;
};

// auto_pick builds tiered from this size up, core-dense below.
inline constexpr std::size_t kMemberTieredThreshold = 4096;

std::pair<MemberFilter, BuildReport> member_build(const std::vector<Digest>& keys,
                                                  const MemberOptions& opt);

bool member_query(const MemberFilter& mf, const Digest& key);
inline bool member_query(const MemberFilter& mf, std::string_view key) {
    return member_query(mf, digest_key(key));
}

struct FprEstimate {
    double rate = 0.0;
    double ci_lo = 0.0;  // 95% Wilson interval
    double ci_hi = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t hits = 0;
};

// Empirical false-positive rate over `trials` probe keys drawn from a
// dedicated namespace (callers keep stored keys out of it). Throws
// EmptyTrial for trials = 0.
FprEstimate fpr_measure(const MemberFilter& mf, std::uint64_t trials, std::uint64_t seed);

// Wilson 95% confidence interval for a binomial proportion.
std::pair<double, double> wilson_ci95(std::uint64_t hits, std::uint64_t trials);

}  // namespace gfd
