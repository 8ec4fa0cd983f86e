#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace gfd {

// 128-bit key digest. Every key is reduced to this before any hashing or
// row sampling; all structures operate on digests only.
struct Digest {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;

    friend bool operator==(const Digest&, const Digest&) = default;
    friend auto operator<=>(const Digest&, const Digest&) = default;
};

// SipHash-2-4 with key (k0, k1). Reference output, stable across platforms.
std::uint64_t siphash24(std::uint64_t k0, std::uint64_t k1, const void* data, std::size_t len);

// Fixed-key digest of an arbitrary byte string: two independent SipHash-2-4
// instances. The keys are compile-time constants, so digests are stable
// across runs, platforms and versions of this library.
Digest digest_key(std::string_view key);
Digest digest_key(const void* data, std::size_t len);

// Domain-separation tags. Every pseudorandom draw in the library goes
// through prf64() with one of these, so streams never collide across
// subsystems (the membership fingerprint in particular is independent of
// all dictionary-internal draws by tag disjointness).
enum class Tag : std::uint64_t {
    dense_row = 1,
    sparse_index = 2,
    sparse_coeff = 3,
    sparse_window = 4,
    core_attempt = 5,
    h1_draw = 6,
    bank_pairwise = 7,
    bank_table = 8,
    sub_slot = 9,
    sub_coeff = 10,
    fingerprint = 11,
    bench_negative = 12,
    value_sample = 13,
};

// Keyed PRF: SipHash-2-4 over the argument block, keyed by (seed, tag).
std::uint64_t prf64(std::uint64_t seed, Tag tag, std::uint64_t a = 0, std::uint64_t b = 0,
                    std::uint64_t c = 0, std::uint64_t d = 0);

}  // namespace gfd
