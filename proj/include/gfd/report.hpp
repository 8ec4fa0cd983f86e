#pragma once

#include <cstdint>

namespace gfd {

// What a build did: attempt counts per level and the space it ended up
// using. bits_total is the in-memory descriptor accounting; the CLI adds
// file-level framing on top when it serializes.
struct BuildReport {
    unsigned attempts = 1;         // top-level (re-seed / bank redraw) attempts
    std::uint64_t final_seed = 0;  // effective seed of the successful attempt
    std::uint64_t m = 0;           // payload word count
    std::uint64_t bits_payload = 0;
    std::uint64_t bits_total = 0;

    // tiered-only detail
    unsigned h1_draws = 0;
    std::uint64_t sub_variant_retries = 0;
    std::uint64_t cache_hits = 0;
    std::uint64_t cache_misses = 0;
    std::uint64_t bad_keys = 0;
};

}  // namespace gfd
