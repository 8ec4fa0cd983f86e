#include "gfd/member.hpp"

#include <cmath>

#include "gfd/errors.hpp"

namespace gfd {

namespace {

const Field& gf64() {
    static const Field f(default_spec(64));
    return f;
}

inline std::uint64_t rotl64(std::uint64_t x, int r) { return (x << r) | (x >> (64 - r)); }

inline std::uint64_t fold64(const Digest& d) { return d.lo ^ rotl64(d.hi, 31); }

}  // namespace

FingerprintHash fingerprint_new(std::uint64_t seed, unsigned k) {
    if (k < 1 || k > 64) throw UnsupportedFieldWidth(k);
    FingerprintHash g;
    g.a = prf64(seed, Tag::fingerprint, 0);
    g.b = prf64(seed, Tag::fingerprint, 1);
    g.k = k;
    return g;
}

std::uint64_t fingerprint_eval(const FingerprintHash& g, const Digest& d) {
    const std::uint64_t mask = (g.k == 64) ? ~0ull : ((1ull << g.k) - 1);
    return (gf64().mul(g.a, fold64(d)) ^ g.b) & mask;
}

std::pair<MemberFilter, BuildReport> member_build(const std::vector<Digest>& keys,
                                                  const MemberOptions& opt) {
    MemberFilter mf;
    mf.g = fingerprint_new(opt.seed, opt.k);

    std::vector<KeyValue> pairs;
    pairs.reserve(keys.size());
    for (const Digest& d : keys) pairs.push_back(KeyValue{d, fingerprint_eval(mf.g, d)});

    MemberBackend backend = opt.backend;
    if (backend == MemberBackend::auto_pick) {
        backend = keys.size() >= kMemberTieredThreshold ? MemberBackend::tiered
                                                        : MemberBackend::core_dense;
    }
    BuildReport report;
    if (backend == MemberBackend::tiered) {
        TieredOptions topt;
        topt.k = opt.k;
        topt.seed = opt.seed;
        topt.max_attempts = opt.max_attempts;
        auto [dict, rep] = build_tiered(std::move(pairs), topt);
        mf.dict = std::move(dict);
        report = rep;
    } else {
        CoreOptions copt;
        copt.k = opt.k;
        copt.mode = CoreMode::dense;
        copt.seed = opt.seed;
        copt.max_attempts = opt.max_attempts;
        auto [dict, rep] = build_core(std::move(pairs), copt);
        mf.dict = std::move(dict);
        report = rep;
    }
    return {std::move(mf), report};
}

bool member_query(const MemberFilter& mf, const Digest& key) {
    const std::uint64_t stored = std::holds_alternative<TieredDict>(mf.dict)
                                     ? query_tiered(std::get<TieredDict>(mf.dict), key)
                                     : query_core(std::get<CoreDict>(mf.dict), key);
    return stored == fingerprint_eval(mf.g, key);
}

std::pair<double, double> wilson_ci95(std::uint64_t hits, std::uint64_t trials) {
    if (trials == 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(hits) / n;
    const double z2n = z * z / n;
    const double center = (p + z2n / 2) / (1 + z2n);
    const double half = z * std::sqrt(p * (1 - p) / n + z2n / (4 * n)) / (1 + z2n);
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

FprEstimate fpr_measure(const MemberFilter& mf, std::uint64_t trials, std::uint64_t seed) {
    if (trials == 0) throw EmptyTrial();
    FprEstimate est;
    est.trials = trials;
    for (std::uint64_t i = 0; i < trials; ++i) {
        // Probe digests from a dedicated stream; callers keep build keys
        // out of this namespace.
        Digest d{prf64(seed, Tag::bench_negative, i, 0), prf64(seed, Tag::bench_negative, i, 1)};
        if (member_query(mf, d)) ++est.hits;
    }
    est.rate = static_cast<double>(est.hits) / static_cast<double>(trials);
    std::tie(est.ci_lo, est.ci_hi) = wilson_ci95(est.hits, trials);
    return est;
}

}  // namespace gfd
