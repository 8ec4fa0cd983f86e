#include "gfd/prf.hpp"

#include <cstring>

namespace gfd {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int b) { return (x << b) | (x >> (64 - b)); }

inline void sipround(std::uint64_t& v0, std::uint64_t& v1, std::uint64_t& v2, std::uint64_t& v3) {
    v0 += v1;
    v1 = rotl(v1, 13);
    v1 ^= v0;
    v0 = rotl(v0, 32);
    v2 += v3;
    v3 = rotl(v3, 16);
    v3 ^= v2;
    v0 += v3;
    v3 = rotl(v3, 21);
    v3 ^= v0;
    v2 += v1;
    v1 = rotl(v1, 17);
    v1 ^= v2;
    v2 = rotl(v2, 32);
}

inline std::uint64_t load_le64(const unsigned char* p) {
    std::uint64_t v;
    std::memcpy(&v, p, 8);
    // memcpy assumes little-endian hosts; all supported targets are LE.
    return v;
}

}  // namespace

std::uint64_t siphash24(std::uint64_t k0, std::uint64_t k1, const void* data, std::size_t len) {
    const unsigned char* in = static_cast<const unsigned char*>(data);
    std::uint64_t v0 = 0x736f6d6570736575ull ^ k0;
    std::uint64_t v1 = 0x646f72616e646f6dull ^ k1;
    std::uint64_t v2 = 0x6c7967656e657261ull ^ k0;
    std::uint64_t v3 = 0x7465646279746573ull ^ k1;

    const std::size_t full = len & ~std::size_t{7};
    for (std::size_t i = 0; i < full; i += 8) {
        std::uint64_t m = load_le64(in + i);
        v3 ^= m;
        sipround(v0, v1, v2, v3);
        sipround(v0, v1, v2, v3);
        v0 ^= m;
    }

    std::uint64_t last = std::uint64_t(len & 0xff) << 56;
    for (std::size_t i = 0; i < (len & 7); ++i) {
        last |= std::uint64_t(in[full + i]) << (8 * i);
    }
    v3 ^= last;
    sipround(v0, v1, v2, v3);
    sipround(v0, v1, v2, v3);
    v0 ^= last;

    v2 ^= 0xff;
    sipround(v0, v1, v2, v3);
    sipround(v0, v1, v2, v3);
    sipround(v0, v1, v2, v3);
    sipround(v0, v1, v2, v3);
    return v0 ^ v1 ^ v2 ^ v3;
}

Digest digest_key(const void* data, std::size_t len) {
    // Two fixed, unrelated 128-bit keys; the digest is the pair of outputs.
    return Digest{
        siphash24(0x6b6579206c6f7765ull, 0x7220686173682030ull, data, len),
        siphash24(0x9e3779b97f4a7c15ull, 0xd1b54a32d192ed03ull, data, len),
    };
}

Digest digest_key(std::string_view key) { return digest_key(key.data(), key.size()); }

std::uint64_t prf64(std::uint64_t seed, Tag tag, std::uint64_t a, std::uint64_t b, std::uint64_t c,
                    std::uint64_t d) {
    unsigned char msg[32];
    std::memcpy(msg + 0, &a, 8);
    std::memcpy(msg + 8, &b, 8);
    std::memcpy(msg + 16, &c, 8);
    std::memcpy(msg + 24, &d, 8);
    const std::uint64_t k0 = seed ^ 0x417f1a3c5b8e9d27ull;
    const std::uint64_t k1 = static_cast<std::uint64_t>(tag) * 0x9e3779b97f4a7c15ull;
    return siphash24(k0, k1, msg, sizeof msg);
}

}  // namespace gfd
