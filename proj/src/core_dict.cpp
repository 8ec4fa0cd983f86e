#include "gfd/core_dict.hpp"

#include <algorithm>
#include <cmath>

#include "gfd/errors.hpp"

namespace gfd {

std::vector<KeyValue> canonicalize_pairs(std::vector<KeyValue> pairs, const Field& f) {
    for (auto& kv : pairs) {
        if ((kv.value & ~f.mask()) != 0) throw ValueOutOfRange(kv.value, f.k());
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const KeyValue& a, const KeyValue& b) { return a.digest < b.digest; });
    std::vector<KeyValue> out;
    out.reserve(pairs.size());
    for (const auto& kv : pairs) {
        if (!out.empty() && out.back().digest == kv.digest) {
            if (out.back().value != kv.value) {
                throw DuplicateKey("same key digest maps to " + std::to_string(out.back().value) +
                                   " and " + std::to_string(kv.value));
            }
            continue;  // equal duplicate collapses
        }
        out.push_back(kv);
    }
    return out;
}

std::uint32_t pure_mode_weight(std::uint64_t n, unsigned k) {
    if (n <= 2) return 1;
    auto t = static_cast<std::uint32_t>(std::ceil(std::log(static_cast<double>(n))));
    if (k == 1 && t % 2 == 0) ++t;
    return t;
}

namespace {

std::size_t pick_m(const CoreOptions& opt, std::size_t n) {
    switch (opt.mode) {
        case CoreMode::dense:
            return n + opt.slack;
        case CoreMode::sparse:
            return std::max<std::size_t>(min_variables(opt.t, n), n + opt.slack);
        case CoreMode::pure:
            return n;
    }
    return n;
}

}  // namespace

std::pair<CoreDict, BuildReport> build_core(std::vector<KeyValue> pairs, const CoreOptions& opt) {
    const Field f(default_spec(opt.k));
    pairs = canonicalize_pairs(std::move(pairs), f);
    const std::size_t n = pairs.size();

    CoreDict dict;
    dict.spec = f.spec();
    dict.mode = opt.mode;
    dict.n = n;
    if (opt.mode == CoreMode::sparse) {
        if (opt.t == 0) throw InvalidArgument("sparse mode needs t >= 1");
        dict.t = opt.t;
        dict.locality_window = opt.locality_window;
    } else if (opt.mode == CoreMode::pure) {
        if (n > kPureModeDefaultCap && !opt.allow_large_pure) {
            throw InvalidArgument("pure mode is elimination-backed and capped at n <= " +
                                  std::to_string(kPureModeDefaultCap) +
                                  "; pass allow_large_pure to override");
        }
        dict.t = pure_mode_weight(n, opt.k);
    }

    const std::size_t m = pick_m(opt, n);
    if (dict.t > 0 && m > 0 && dict.t > m) throw InvalidArgument("row weight t exceeds m");

    BuildReport report;
    report.m = m;
    report.bits_payload = static_cast<std::uint64_t>(m) * f.k();

    if (n == 0) {
        dict.seed = prf64(opt.seed, Tag::core_attempt, 0);
        dict.b.assign(m, 0);
        report.final_seed = dict.seed;
        report.bits_total = core_bits(dict).second;
        return {std::move(dict), report};
    }

    for (unsigned attempt = 0; attempt < opt.max_attempts; ++attempt) {
        const std::uint64_t eff_seed = prf64(opt.seed, Tag::core_attempt, attempt);
        std::optional<SolutionVector> sol;
        if (opt.mode == CoreMode::dense) {
            DenseSystem sys;
            sys.m = m;
            sys.rows.reserve(n);
            sys.rhs.reserve(n);
            for (const auto& kv : pairs) {
                sys.rows.push_back(sample_dense_row(f.spec(), m, kv.digest, eff_seed));
                sys.rhs.push_back(kv.value);
            }
            sol = solve_dense(f, sys);
        } else {
            SparseSystem sys;
            sys.m = m;
            sys.rows.reserve(n);
            sys.rhs.reserve(n);
            for (const auto& kv : pairs) {
                sys.rows.push_back(
                    sample_sparse_row(f.spec(), m, dict.t, dict.locality_window, kv.digest, eff_seed));
                sys.rhs.push_back(kv.value);
            }
            sol = solve_sparse(f, sys);
        }
        if (!sol) continue;

        dict.seed = eff_seed;
        dict.b = std::move(*sol);
        report.attempts = attempt + 1;
        report.final_seed = eff_seed;

        // Exact retrieval for every build key, on every build.
        for (const auto& kv : pairs) {
            if (query_core(dict, kv.digest) != kv.value) {
                throw BuildFailed("post-check", attempt + 1);
            }
        }
        report.bits_total = core_bits(dict).second;
        return {std::move(dict), report};
    }
    throw BuildFailed("solve", opt.max_attempts);
}

std::uint64_t query_core(const CoreDict& d, const Digest& key) {
    return query_core_probed(d, key).first;
}

std::pair<std::uint64_t, std::size_t> query_core_probed(const CoreDict& d, const Digest& key) {
    const Field& f = field_for(d.spec);
    const std::size_t m = d.b.size();
    if (m == 0) return {0, 0};
    if (d.mode == CoreMode::dense) {
        const DenseRow row = sample_dense_row(d.spec, m, key, d.seed);
        return {f.dot(row, d.b), m};
    }
    const SparseRow row = sample_sparse_row(d.spec, m, d.t, d.locality_window, key, d.seed);
    FieldElem acc = 0;
    for (const auto& e : row) acc ^= f.mul(e.coeff, d.b[e.index]);
    return {acc, row.size()};
}

std::pair<std::uint64_t, std::uint64_t> core_bits(const CoreDict& d) {
    const std::uint64_t payload = static_cast<std::uint64_t>(d.b.size()) * d.spec.k;
    // Descriptor at serialized width: spec (k u32 + poly u64), mode byte,
    // t u32, window flag + u64, seed u64, m u64, n u64.
    const std::uint64_t descriptor_bits = 8ull * (4 + 8 + 1 + 4 + 1 + 8 + 8 + 8 + 8);
    return {payload, payload + descriptor_bits};
}

}  // namespace gfd
