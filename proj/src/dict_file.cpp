#include "gfd/dict_file.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "gfd/bits.hpp"
#include "gfd/errors.hpp"

namespace gfd {

namespace {

struct Section {
    char tag[4];
    std::vector<std::uint8_t> body;
};

std::vector<std::uint8_t> encode_core(const CoreDict& d) {
    ByteWriter w;
    w.u64(d.seed);
    w.u64(d.b.size());
    w.u64(d.n);
    w.u32(d.t);
    w.u8(d.locality_window ? 1 : 0);
    w.u64(d.locality_window.value_or(0));
    const auto packed = pack_words(d.b, d.spec.k);
    w.u64(packed.size());
    w.bytes(packed);
    return w.take();
}

CoreDict decode_core(ByteReader r, const FieldSpec& spec, DictKind kind) {
    CoreDict d;
    d.spec = spec;
    d.mode = kind == DictKind::dense  ? CoreMode::dense
             : kind == DictKind::pure ? CoreMode::pure
                                      : CoreMode::sparse;
    d.seed = r.u64();
    const std::uint64_t m = r.u64();
    d.n = r.u64();
    d.t = r.u32();
    const bool has_window = r.u8() != 0;
    const std::uint64_t window = r.u64();
    if (has_window) d.locality_window = window;
    const std::uint64_t packed_len = r.u64();
    d.b = unpack_words(r.bytes(packed_len), m, spec.k);
    if ((d.mode != CoreMode::dense) && d.t == 0 && d.n > 0) {
        throw FileFormatError("sparse dictionary with zero row weight");
    }
    return d;
}

std::vector<std::uint8_t> encode_tiered(const TieredDict& d) {
    ByteWriter w;
    w.u64(d.seed);
    w.u64(d.n);
    const LayoutParams& p = d.params;
    w.u64(p.bucket_count);
    w.u64(p.bad_bucket_capacity);
    w.u64(p.sub_bucket_target);
    w.u64(p.sub_bucket_capacity);
    w.u64(p.slot_range);
    w.u64(p.bank_size);
    w.u64(p.table_size);
    w.u64(d.h1.a);
    w.u64(d.h1.b);
    for (const auto& cand : d.bank.candidates) {
        w.u64(cand.inner.a);
        w.u64(cand.inner.b);
        for (std::uint32_t v : cand.table) w.u32(v);
    }
    for (const auto& b : d.buckets) {
        w.u32(b.sub_start);
        w.u16(b.chosen);
        w.u16(b.sub_count);
    }
    w.u64(d.subs.size());
    for (const auto& s : d.subs) {
        w.u32(s.offset);
        w.u8(s.len);
        w.u8(s.variant);
        w.u16(0);
    }
    w.u64(d.payload.size());
    const auto packed = pack_words(d.payload, d.spec.k);
    w.u64(packed.size());
    w.bytes(packed);
    w.u64(d.bad_map.size());
    for (const auto& [dg, val] : d.bad_map) {
        w.u64(dg.lo);
        w.u64(dg.hi);
        w.u64(val);
    }
    return w.take();
}

TieredDict decode_tiered(ByteReader r, const FieldSpec& spec) {
    TieredDict d;
    d.spec = spec;
    d.seed = r.u64();
    d.n = r.u64();
    LayoutParams& p = d.params;
    p.bucket_count = r.u64();
    p.bad_bucket_capacity = r.u64();
    p.sub_bucket_target = r.u64();
    p.sub_bucket_capacity = r.u64();
    p.slot_range = r.u64();
    p.bank_size = r.u64();
    p.table_size = r.u64();
    if (p.bucket_count == 0 || p.slot_range == 0 || p.table_size == 0) {
        throw FileFormatError("tiered layout has zero-sized fields");
    }
    // size fields must be covered by the section before anything allocates
    const std::uint64_t remaining = r.remaining();
    if (p.table_size > remaining / 4 || p.bank_size > remaining / (16 + 4 * p.table_size) ||
        p.bucket_count > remaining / 8) {
        throw FileFormatError("declared sizes exceed section");
    }
    d.h1.a = r.u64();
    d.h1.b = r.u64();
    d.h1.range = p.bucket_count;
    d.bank.candidates.resize(p.bank_size);
    for (auto& cand : d.bank.candidates) {
        cand.inner.a = r.u64();
        cand.inner.b = r.u64();
        cand.inner.range = p.table_size;
        cand.value_range = 1ull << 32;
        cand.table.resize(p.table_size);
        for (auto& v : cand.table) v = r.u32();
    }
    d.buckets.resize(p.bucket_count);
    d.bank.chosen.assign(p.bucket_count, kNoBucketHash);
    for (std::size_t i = 0; i < p.bucket_count; ++i) {
        auto& b = d.buckets[i];
        b.sub_start = r.u32();
        b.chosen = r.u16();
        b.sub_count = r.u16();
        if (b.chosen != kNoBucketHash16) {
            if (b.chosen >= p.bank_size) throw FileFormatError("bucket candidate out of range");
            d.bank.chosen[i] = b.chosen;
        }
    }
    const std::uint64_t sub_count = r.u64();
    if (sub_count > r.remaining() / 8) throw FileFormatError("declared sizes exceed section");
    d.subs.resize(sub_count);
    for (auto& s : d.subs) {
        s.offset = r.u32();
        s.len = r.u8();
        s.variant = r.u8();
        (void)r.u16();
    }
    const std::uint64_t payload_words = r.u64();
    const std::uint64_t packed_len = r.u64();
    d.payload = unpack_words(r.bytes(packed_len), payload_words, spec.k);
    const std::uint64_t bad_count = r.u64();
    if (bad_count > r.remaining() / 24) throw FileFormatError("declared sizes exceed section");
    d.bad_map.resize(bad_count);
    for (auto& [dg, val] : d.bad_map) {
        dg.lo = r.u64();
        dg.hi = r.u64();
        val = r.u64();
    }
    // structural checks: records inside payload, buckets inside subs
    for (const auto& b : d.buckets) {
        if (std::uint64_t(b.sub_start) + b.sub_count > sub_count) {
            throw FileFormatError("bucket sub range out of bounds");
        }
    }
    for (const auto& s : d.subs) {
        if (std::uint64_t(s.offset) + s.len > payload_words) {
            throw FileFormatError("sub-bucket payload range out of bounds");
        }
    }
    if (!std::is_sorted(d.bad_map.begin(), d.bad_map.end())) {
        throw FileFormatError("bad-key table not sorted");
    }
    return d;
}

}  // namespace

DictKind DictFile::kind() const {
    if (std::holds_alternative<TieredDict>(dict)) return DictKind::tiered;
    switch (std::get<CoreDict>(dict).mode) {
        case CoreMode::dense:
            return DictKind::dense;
        case CoreMode::sparse:
            return DictKind::sparse;
        case CoreMode::pure:
            return DictKind::pure;
    }
    return DictKind::dense;
}

const FieldSpec& DictFile::spec() const {
    return std::holds_alternative<TieredDict>(dict) ? std::get<TieredDict>(dict).spec
                                                    : std::get<CoreDict>(dict).spec;
}

std::uint64_t DictFile::key_count() const {
    return std::holds_alternative<TieredDict>(dict) ? std::get<TieredDict>(dict).n
                                                    : std::get<CoreDict>(dict).n;
}

std::uint64_t DictFile::query(const Digest& d) const {
    return std::holds_alternative<TieredDict>(dict) ? query_tiered(std::get<TieredDict>(dict), d)
                                                    : query_core(std::get<CoreDict>(dict), d);
}

bool DictFile::is_member(const Digest& d) const {
    if (!member) throw NotAMembershipFilter();
    return query(d) == fingerprint_eval(*member, d);
}

std::vector<std::uint8_t> serialize_dict(const DictFile& f) {
    std::vector<Section> sections;

    {
        ByteWriter w;
        w.u32(f.spec().k);
        w.u64(f.spec().poly_tail);
        sections.push_back({{'F', 'L', 'D', 'S'}, w.take()});
    }
    {
        ByteWriter w;
        w.u8(static_cast<std::uint8_t>(f.kind()));
        for (int i = 0; i < 7; ++i) w.u8(0);
        sections.push_back({{'M', 'O', 'D', 'E'}, w.take()});
    }
    if (std::holds_alternative<TieredDict>(f.dict)) {
        sections.push_back({{'T', 'I', 'E', 'R'}, encode_tiered(std::get<TieredDict>(f.dict))});
    } else {
        sections.push_back({{'C', 'O', 'R', 'E'}, encode_core(std::get<CoreDict>(f.dict))});
    }
    if (f.member) {
        ByteWriter w;
        w.u64(f.member->a);
        w.u64(f.member->b);
        w.u32(f.member->k);
        sections.push_back({{'M', 'E', 'M', 'B'}, w.take()});
    }
    if (!f.meta_json.empty()) {
        ByteWriter w;
        w.raw(f.meta_json.data(), f.meta_json.size());
        sections.push_back({{'M', 'E', 'T', 'A'}, w.take()});
    }

    ByteWriter out;
    out.raw(kDictMagic, 4);
    out.u16(kDictVersion);
    out.u16(static_cast<std::uint16_t>(sections.size()));
    std::uint64_t offset = 8 + sections.size() * 20;
    for (const auto& s : sections) {
        out.raw(s.tag, 4);
        out.u64(offset);
        out.u64(s.body.size());
        offset += s.body.size();
    }
    for (const auto& s : sections) out.bytes(s.body);
    return out.take();
}

DictFile deserialize_dict(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kDictMagic, 4) != 0) {
        throw FileFormatError("bad magic");
    }
    ByteReader hdr(bytes.subspan(4));
    const std::uint16_t version = hdr.u16();
    if (version != kDictVersion) {
        throw FileFormatError("unsupported version " + std::to_string(version));
    }
    const std::uint16_t count = hdr.u16();
    struct Entry {
        char tag[5] = {};
        std::uint64_t offset = 0;
        std::uint64_t length = 0;
    };
    std::vector<Entry> entries(count);
    ByteReader tab(bytes.subspan(8));
    if (bytes.size() < 8 + std::size_t{count} * 20) throw FileFormatError("truncated section table");
    for (auto& e : entries) {
        auto t = tab.bytes(4);
        std::memcpy(e.tag, t.data(), 4);
        e.offset = tab.u64();
        e.length = tab.u64();
        if (e.offset > bytes.size() || e.length > bytes.size() - e.offset) {
            throw FileFormatError("section out of bounds");
        }
    }
    // non-overlap check
    auto sorted = entries;
    std::sort(sorted.begin(), sorted.end(),
              [](const Entry& a, const Entry& b) { return a.offset < b.offset; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i - 1].offset + sorted[i - 1].length > sorted[i].offset) {
            throw FileFormatError("sections overlap");
        }
    }

    auto find = [&](const char* tag) -> const Entry* {
        for (const auto& e : entries) {
            if (std::memcmp(e.tag, tag, 4) == 0) return &e;
        }
        return nullptr;
    };
    auto body = [&](const Entry& e) { return bytes.subspan(e.offset, e.length); };

    const Entry* flds = find("FLDS");
    const Entry* mode = find("MODE");
    if (!flds || !mode) throw FileFormatError("missing FLDS/MODE section");

    ByteReader fr(body(*flds));
    FieldSpec spec;
    spec.k = fr.u32();
    spec.poly_tail = fr.u64();
    if (spec.k < 1 || spec.k > 64) throw FileFormatError("field width out of range");

    ByteReader mr(body(*mode));
    const auto kind = static_cast<DictKind>(mr.u8());

    DictFile f;
    if (kind == DictKind::tiered) {
        const Entry* tier = find("TIER");
        if (!tier) throw FileFormatError("missing TIER section");
        f.dict = decode_tiered(ByteReader(body(*tier)), spec);
    } else if (kind == DictKind::dense || kind == DictKind::sparse || kind == DictKind::pure) {
        const Entry* core = find("CORE");
        if (!core) throw FileFormatError("missing CORE section");
        f.dict = decode_core(ByteReader(body(*core)), spec, kind);
    } else {
        throw FileFormatError("unknown structure kind");
    }
    if (const Entry* memb = find("MEMB")) {
        ByteReader r(body(*memb));
        FingerprintHash g;
        g.a = r.u64();
        g.b = r.u64();
        g.k = r.u32();
        if (g.k != spec.k) throw FileFormatError("fingerprint width disagrees with field");
        f.member = g;
    }
    if (const Entry* meta = find("META")) {
        auto b = body(*meta);
        f.meta_json.assign(b.begin(), b.end());
    }
    return f;
}

void write_dict_file(const std::string& path, const DictFile& f) {
    const auto bytes = serialize_dict(f);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InvalidArgument("write failed: " + path);
}

DictFile read_dict_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw InvalidArgument("cannot open: " + path);
    const std::streamsize size = in.tellg();
    in.seekg(0);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
    in.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!in) throw InvalidArgument("read failed: " + path);
    return deserialize_dict(bytes);
}

}  // namespace gfd
