#include "gfd/bits.hpp"

#include <cstring>

#include "gfd/errors.hpp"

namespace gfd {

std::vector<std::uint8_t> pack_words(std::span<const std::uint64_t> words, unsigned k) {
    const std::size_t total_bits = words.size() * k;
    std::vector<std::uint8_t> out((total_bits + 7) / 8, 0);
    std::size_t bit = 0;
    for (std::uint64_t w : words) {
        for (unsigned j = 0; j < k; ++j, ++bit) {
            if ((w >> j) & 1) out[bit >> 3] |= static_cast<std::uint8_t>(1u << (bit & 7));
        }
    }
    return out;
}

std::vector<std::uint64_t> unpack_words(std::span<const std::uint8_t> bytes, std::size_t count,
                                        unsigned k) {
    // order matters: bound count before computing count*k or allocating
    if (count > bytes.size() * 8 || count * k > bytes.size() * 8) {
        throw FileFormatError("payload shorter than declared");
    }
    std::vector<std::uint64_t> out(count, 0);
    std::size_t bit = 0;
    for (std::size_t w = 0; w < count; ++w) {
        std::uint64_t v = 0;
        for (unsigned j = 0; j < k; ++j, ++bit) {
            v |= std::uint64_t((bytes[bit >> 3] >> (bit & 7)) & 1u) << j;
        }
        out[w] = v;
    }
    return out;
}

void ByteWriter::u16(std::uint16_t v) {
    buf_.push_back(static_cast<std::uint8_t>(v));
    buf_.push_back(static_cast<std::uint8_t>(v >> 8));
}

void ByteWriter::u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
}

std::uint8_t ByteReader::u8() {
    if (pos_ + 1 > buf_.size()) throw FileFormatError("unexpected end of section");
    return buf_[pos_++];
}

std::uint16_t ByteReader::u16() {
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(u8()) << (8 * i);
    return v;
}

std::uint32_t ByteReader::u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
}

std::uint64_t ByteReader::u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
}

std::span<const std::uint8_t> ByteReader::bytes(std::size_t n) {
    if (pos_ + n > buf_.size()) throw FileFormatError("unexpected end of section");
    auto s = buf_.subspan(pos_, n);
    pos_ += n;
    return s;
}

}  // namespace gfd
