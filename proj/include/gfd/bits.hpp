#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gfd {

// k-bit words packed contiguously, little-endian bit order within bytes:
// bit j of word w lives at global bit w*k + j, byte idx/8, bit idx%8.
std::vector<std::uint8_t> pack_words(std::span<const std::uint64_t> words, unsigned k);
std::vector<std::uint64_t> unpack_words(std::span<const std::uint8_t> bytes, std::size_t count,
                                        unsigned k);

// Little-endian byte buffer helpers for the container format.
class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
    void raw(const void* p, std::size_t n);

    std::size_t size() const { return buf_.size(); }
    std::vector<std::uint8_t> take() { return std::move(buf_); }
    const std::vector<std::uint8_t>& data() const { return buf_; }

private:
    std::vector<std::uint8_t> buf_;
};

// Bounds-checked reader; throws FileFormatError past the end.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> b) : buf_(b) {}

    std::uint8_t u8();
    std::uint16_t u16();
    std::uint32_t u32();
    std::uint64_t u64();
    std::span<const std::uint8_t> bytes(std::size_t n);
    std::size_t remaining() const { return buf_.size() - pos_; }

private:
    std::span<const std::uint8_t> buf_;
    std::size_t pos_ = 0;
};

}  // namespace gfd
