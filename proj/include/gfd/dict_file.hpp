#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gfd/core_dict.hpp"
#include "gfd/member.hpp"
#include "gfd/report.hpp"
#include "gfd/tiered_dict.hpp"

namespace gfd {

// Single-file container: magic "GFD1", version, a section table of
// (tag, offset, length) entries, then section bytes. All integers are
// little-endian; payload words are packed k bits each with little-endian
// bit order within bytes, no padding between words.
//
// Sections: FLDS (field spec), MODE (structure kind), CORE or TIER
// (structure body), MEMB (membership fingerprint, optional), META (build
// report JSON, optional).
inline constexpr char kDictMagic[4] = {'G', 'F', 'D', '1'};
inline constexpr std::uint16_t kDictVersion = 1;

enum class DictKind : std::uint8_t { dense = 0, sparse = 1, pure = 2, tiered = 3 };

struct DictFile {
    std::variant<CoreDict, TieredDict> dict;
    std::optional<FingerprintHash> member;  // MEMB section
    std::string meta_json;                  // META section, may be empty

    DictKind kind() const;
    const FieldSpec& spec() const;
    std::uint64_t key_count() const;

    std::uint64_t query(const Digest& d) const;
    bool is_member(const Digest& d) const;  // throws NotAMembershipFilter without MEMB
};

std::vector<std::uint8_t> serialize_dict(const DictFile& f);
DictFile deserialize_dict(std::span<const std::uint8_t> bytes);

void write_dict_file(const std::string& path, const DictFile& f);
DictFile read_dict_file(const std::string& path);

}  // namespace gfd
