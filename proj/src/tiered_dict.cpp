#include "gfd/tiered_dict.hpp"

#include <algorithm>
#include <cmath>

#include "gfd/errors.hpp"

namespace gfd {

namespace {

double log2n(std::uint64_t n) { return std::log2(static_cast<double>(std::max<std::uint64_t>(n, 2))); }

std::uint64_t expected_bucket_load(std::uint64_t n, std::uint64_t bucket_count) {
    if (n == 0) return 0;
    return (n + bucket_count - 1) / bucket_count;
}

// Sub-bucket count for a bucket of B keys: expected load a little under the
// target so the 2s cap is comfortably rare even for s = 4.
std::uint64_t sub_count_for(std::uint64_t B, const LayoutParams& p) {
    if (B == 0) return 0;
    const std::uint64_t d = std::max<std::uint64_t>(1, p.sub_bucket_target - 1);
    return (B + d - 1) / d;
}

}  // namespace

LayoutParams plan_layout(std::uint64_t n, unsigned k, const LayoutOverrides& o) {
    if (k < 1 || k > 64) throw UnsupportedFieldWidth(k);
    const double L = log2n(n);
    LayoutParams p;
    const double l2 = std::ceil(L * L);
    p.bucket_count = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(std::llround(static_cast<double>(n) / l2)));
    const std::uint64_t load = expected_bucket_load(n, p.bucket_count);
    p.bad_bucket_capacity =
        std::max<std::uint64_t>(2 * static_cast<std::uint64_t>(std::ceil(L * L * L * L)), 4 * load);
    p.sub_bucket_target = std::max<std::uint64_t>(
        4, static_cast<std::uint64_t>(std::llround(0.5 * std::sqrt(L / k))));
    p.sub_bucket_capacity = 2 * p.sub_bucket_target;
    p.slot_range = 4 * p.sub_bucket_target * p.sub_bucket_target;
    p.bank_size = 2 * static_cast<std::uint64_t>(std::ceil(L));
    p.table_size = std::max<std::uint64_t>(64, load * load);

    if (o.bucket_count) p.bucket_count = *o.bucket_count;
    if (o.bad_bucket_capacity) p.bad_bucket_capacity = *o.bad_bucket_capacity;
    if (o.sub_bucket_target) p.sub_bucket_target = *o.sub_bucket_target;
    if (o.sub_bucket_capacity) p.sub_bucket_capacity = *o.sub_bucket_capacity;
    if (o.slot_range) p.slot_range = *o.slot_range;
    if (o.bank_size) p.bank_size = *o.bank_size;
    if (o.table_size) p.table_size = *o.table_size;

    if (p.bucket_count == 0 || p.bank_size == 0 || p.table_size == 0) {
        throw InvalidArgument("layout sizes must be nonzero");
    }
    if (p.sub_bucket_capacity < p.sub_bucket_target || p.sub_bucket_target == 0) {
        throw InvalidArgument("need sub_bucket_capacity >= sub_bucket_target >= 1");
    }
    if (p.slot_range < p.sub_bucket_capacity) {
        throw InvalidArgument("slot_range must be at least sub_bucket_capacity");
    }
    if (p.sub_bucket_capacity > 255) {
        throw InvalidArgument("sub_bucket_capacity must fit in one byte");
    }
    if (p.bank_size >= kNoBucketHash16) {
        throw InvalidArgument("bank_size must be below 65535");
    }
    return p;
}

FieldElem sub_coefficient(const Field& f, std::uint64_t seed, std::uint8_t variant,
                          std::uint64_t slot, std::uint64_t col) {
    return prf64(seed, Tag::sub_coeff, variant, slot, col) & f.mask();
}

std::size_t MatrixCache::KeyHash::operator()(const Key& k) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull ^ k.variant;
    for (std::uint64_t s : k.slots) {
        h ^= s + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
}

std::optional<std::vector<DenseRow>> MatrixCache::invert(const Key& key) const {
    const std::size_t m = key.slots.size();
    std::vector<DenseRow> mat(m, DenseRow(m, 0));
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < m; ++c) {
            mat[r][c] = sub_coefficient(f_, seed_, key.variant, key.slots[r], c);
        }
    }
    return invert_dense(f_, mat);
}

std::optional<SolutionVector> MatrixCache::solve(std::span<const std::uint64_t> sorted_slots,
                                                 std::uint8_t variant,
                                                 std::span<const FieldElem> rhs) {
    Key key{{sorted_slots.begin(), sorted_slots.end()}, variant};
    const std::optional<std::vector<DenseRow>>* inv = nullptr;
    std::optional<std::vector<DenseRow>> local;
    if (memoize_) {
        auto it = map_.find(key);
        if (it == map_.end()) {
            ++misses_;
            auto inverse = invert(key);
            it = map_.emplace(std::move(key), std::move(inverse)).first;
        } else {
            ++hits_;
        }
        inv = &it->second;
    } else {
        ++misses_;
        local = invert(key);
        inv = &local;
    }
    if (!inv->has_value()) return std::nullopt;  // singular: caller advances the variant
    const auto& M = **inv;
    SolutionVector out(rhs.size(), 0);
    for (std::size_t r = 0; r < M.size(); ++r) {
        FieldElem acc = 0;
        for (std::size_t c = 0; c < M.size(); ++c) acc ^= f_.mul(M[r][c], rhs[c]);
        out[r] = acc;
    }
    return out;
}

namespace {

struct BucketKeys {
    std::vector<std::uint32_t> key_idx;  // indices into the canonical pair list
};

}  // namespace

std::pair<TieredDict, BuildReport> build_tiered(std::vector<KeyValue> pairs,
                                                const TieredOptions& opt) {
    const Field f(default_spec(opt.k));
    pairs = canonicalize_pairs(std::move(pairs), f);
    const std::uint64_t n = pairs.size();

    TieredDict dict;
    dict.spec = f.spec();
    dict.params = plan_layout(n, opt.k, opt.layout);
    dict.n = n;
    dict.seed = prf64(opt.seed, Tag::sub_slot, 0xA11CE);
    const LayoutParams& P = dict.params;

    BuildReport report;

    // Level 1: draw h1 until few enough keys land in oversized buckets.
    const std::uint64_t l2 = static_cast<std::uint64_t>(std::ceil(log2n(n) * log2n(n)));
    const std::uint64_t bad_threshold = std::max<std::uint64_t>(n / std::max<std::uint64_t>(l2, 1), 64);
    std::vector<BucketKeys> buckets(P.bucket_count);
    constexpr unsigned kMaxH1Draws = 64;
    bool h1_ok = false;
    for (unsigned draw = 0; draw < kMaxH1Draws; ++draw) {
        dict.h1 = pairwise_new(prf64(opt.seed, Tag::h1_draw, draw), P.bucket_count);
        for (auto& b : buckets) b.key_idx.clear();
        for (std::uint32_t i = 0; i < n; ++i) {
            buckets[pairwise_eval(dict.h1, pairs[i].digest)].key_idx.push_back(i);
        }
        std::uint64_t bad_keys = 0;
        for (const auto& b : buckets) {
            if (b.key_idx.size() > P.bad_bucket_capacity) bad_keys += b.key_idx.size();
        }
        report.h1_draws = draw + 1;
        if (bad_keys <= bad_threshold) {
            report.bad_keys = bad_keys;
            h1_ok = true;
            break;
        }
    }
    if (!h1_ok) throw BuildFailed("h1", kMaxH1Draws);

    // Level 2 + solves, retried whole-bank on any NoGoodFunction.
    MatrixCache cache(f, dict.seed, opt.use_cache);
    for (unsigned attempt = 0; attempt < opt.max_attempts; ++attempt) {
        const std::uint64_t bank_seed = prf64(opt.seed, Tag::bank_table, 0xB44F, attempt);
        dict.bank.candidates = bank_candidates(bank_seed, P.bank_size, P.table_size, 1ull << 32);
        dict.bank.chosen.assign(P.bucket_count, kNoBucketHash);
        dict.buckets.assign(P.bucket_count, BucketRec{});
        dict.subs.clear();
        dict.payload.clear();
        dict.bad_map.clear();

        bool bank_ok = true;
        std::vector<std::uint64_t> vals;
        std::vector<std::uint32_t> order;
        std::vector<std::uint64_t> slots;
        std::vector<FieldElem> rhs;

        for (std::uint64_t bi = 0; bi < P.bucket_count && bank_ok; ++bi) {
            const auto& bucket = buckets[bi];
            BucketRec rec;
            rec.sub_start = static_cast<std::uint32_t>(dict.subs.size());

            if (bucket.key_idx.size() > P.bad_bucket_capacity) {
                rec.chosen = kNoBucketHash16;
                rec.sub_count = 0;
                dict.buckets[bi] = rec;
                for (std::uint32_t i : bucket.key_idx) {
                    dict.bad_map.emplace_back(pairs[i].digest, pairs[i].value);
                }
                continue;
            }
            const std::uint64_t B = bucket.key_idx.size();
            const std::uint64_t q = sub_count_for(B, P);
            if (q > 0xFFFF) throw BuildFailed("sub-count-overflow", attempt + 1);
            rec.sub_count = static_cast<std::uint16_t>(q);
            if (B == 0) {
                rec.chosen = 0;
                dict.bank.chosen[bi] = 0;
                dict.buckets[bi] = rec;
                continue;
            }

            // Pick the smallest candidate giving every key a distinct value
            // and no sub-bucket above capacity.
            std::size_t chosen = P.bank_size;
            for (std::size_t c = 0; c < P.bank_size; ++c) {
                vals.clear();
                for (std::uint32_t i : bucket.key_idx) {
                    vals.push_back(sim_uniform_eval(dict.bank.candidates[c], pairs[i].digest));
                }
                auto sorted = vals;
                std::sort(sorted.begin(), sorted.end());
                if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;
                std::vector<std::uint32_t> load(q, 0);
                bool fits = true;
                for (std::uint64_t v : vals) {
                    if (++load[v % q] > P.sub_bucket_capacity) {
                        fits = false;
                        break;
                    }
                }
                if (fits) {
                    chosen = c;
                    break;
                }
            }
            if (chosen == P.bank_size) {
                bank_ok = false;  // NoGoodFunction: redraw the whole bank
                break;
            }
            rec.chosen = static_cast<std::uint16_t>(chosen);
            dict.bank.chosen[bi] = static_cast<std::uint32_t>(chosen);
            dict.buckets[bi] = rec;

            // Group keys by sub-bucket, keys in canonical digest order.
            std::vector<std::vector<std::uint32_t>> groups(q);
            for (std::size_t j = 0; j < bucket.key_idx.size(); ++j) {
                groups[vals[j] % q].push_back(static_cast<std::uint32_t>(j));
            }
            for (std::uint64_t sj = 0; sj < q; ++sj) {
                const auto& g = groups[sj];
                SubRec sub;
                sub.offset = static_cast<std::uint32_t>(dict.payload.size());
                sub.len = static_cast<std::uint8_t>(g.size());
                if (g.empty()) {
                    dict.subs.push_back(sub);
                    continue;
                }
                // Find a variant whose slots are injective and whose matrix
                // is invertible; expected a couple of tries.
                bool solved = false;
                for (unsigned variant = 0; variant < 256; ++variant) {
                    slots.clear();
                    for (std::uint32_t j : g) {
                        slots.push_back(prf64(dict.seed, Tag::sub_slot, variant, vals[j]) %
                                        P.slot_range);
                    }
                    order.assign(g.size(), 0);
                    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
                    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
                        return slots[a] < slots[b];
                    });
                    bool distinct = true;
                    for (std::size_t i = 1; i < order.size(); ++i) {
                        if (slots[order[i - 1]] == slots[order[i]]) {
                            distinct = false;
                            break;
                        }
                    }
                    if (!distinct) {
                        ++report.sub_variant_retries;
                        continue;
                    }
                    std::vector<std::uint64_t> sorted_slots(order.size());
                    rhs.assign(order.size(), 0);
                    for (std::size_t i = 0; i < order.size(); ++i) {
                        sorted_slots[i] = slots[order[i]];
                        rhs[i] = pairs[bucket.key_idx[g[order[i]]]].value;
                    }
                    auto sol = cache.solve(sorted_slots, static_cast<std::uint8_t>(variant), rhs);
                    if (!sol) {
                        ++report.sub_variant_retries;
                        continue;
                    }
                    sub.variant = static_cast<std::uint8_t>(variant);
                    dict.payload.insert(dict.payload.end(), sol->begin(), sol->end());
                    solved = true;
                    break;
                }
                if (!solved) throw BuildFailed("sub-bucket", attempt + 1);
                dict.subs.push_back(sub);
            }
        }
        if (!bank_ok) continue;

        std::sort(dict.bad_map.begin(), dict.bad_map.end());
        report.attempts = attempt + 1;
        report.final_seed = dict.seed;
        report.m = dict.payload.size();
        report.cache_hits = cache.hits();
        report.cache_misses = cache.misses();
        const TieredBits bits = tiered_bits(dict);
        report.bits_payload = bits.payload_bits;
        report.bits_total = bits.total_bits;

        // Exact retrieval for every build key, on every build.
        for (const auto& kv : pairs) {
            if (query_tiered(dict, kv.digest) != kv.value) {
                throw BuildFailed("post-check", attempt + 1);
            }
        }
        return {std::move(dict), report};
    }
    throw BuildFailed("bank", opt.max_attempts);
}

std::uint64_t query_tiered(const TieredDict& d, const Digest& key) {
    return query_tiered_probed(d, key).value;
}

ProbeResult query_tiered_probed(const TieredDict& d, const Digest& key) {
    ProbeResult res;
    if (d.buckets.empty()) return res;
    const Field& f = field_for(d.spec);
    const std::uint64_t bi = pairwise_eval(d.h1, key);
    const BucketRec& rec = d.buckets[bi];
    res.probes += 1;  // bucket record word

    if (rec.chosen == kNoBucketHash16) {
        res.bad_path = true;
        auto it = std::lower_bound(d.bad_map.begin(), d.bad_map.end(), key,
                                   [](const auto& p, const Digest& k) { return p.first < k; });
        // binary search over fixed-width records; count each step as a probe
        std::size_t steps = 1;
        for (std::size_t sz = d.bad_map.size(); sz > 1; sz >>= 1) ++steps;
        res.probes += steps;
        if (it != d.bad_map.end() && it->first == key) res.value = it->second;
        return res;
    }
    if (rec.sub_count == 0) return res;  // empty bucket: zero by convention

    const SimUniformHash& cand = d.bank.candidates[rec.chosen];
    const std::uint64_t v = sim_uniform_eval(cand, key);
    res.probes += 1;  // table cell

    const std::uint64_t sub_idx = rec.sub_start + v % rec.sub_count;
    const SubRec& sub = d.subs[sub_idx];
    res.probes += 1;  // sub record word
    if (sub.len == 0) return res;

    const std::uint64_t slot = prf64(d.seed, Tag::sub_slot, sub.variant, v) % d.params.slot_range;
    FieldElem acc = 0;
    for (std::uint64_t c = 0; c < sub.len; ++c) {
        acc ^= f.mul(sub_coefficient(f, d.seed, sub.variant, slot, c), d.payload[sub.offset + c]);
    }
    res.probes += sub.len;  // payload words
    res.value = acc;
    return res;
}

TieredBits tiered_bits(const TieredDict& d) {
    TieredBits out;
    out.payload_bits = static_cast<std::uint64_t>(d.payload.size()) * d.spec.k;
    std::uint64_t overhead = 0;
    overhead += 8 * (4 + 8);            // field spec
    overhead += 8 * (7 * 8);            // layout params
    overhead += 8 * (8 + 8 + 8);        // seed, n, h1 (a, b)
    overhead += d.bank.candidates.size() * (8 * 16 + 32 * d.params.table_size);  // inner a,b + table
    overhead += 64 * d.buckets.size();  // bucket records
    overhead += 64 * d.subs.size();     // sub records
    overhead += d.bad_map.size() * 8 * (16 + 8);  // digest + value records
    out.overhead_bits = overhead;
    out.total_bits = out.payload_bits + out.overhead_bits;
    return out;
}

}  // namespace gfd
