// gfd: build, query, check and benchmark GF(2^k) linear-system dictionaries
// and the membership filters derived from them.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gfd/core_dict.hpp"
#include "gfd/dict_file.hpp"
#include "gfd/errors.hpp"
#include "gfd/member.hpp"
#include "gfd/tiered_dict.hpp"

using json = nlohmann::json;

namespace {

std::vector<std::string> read_keys(const std::string& path, const std::string& format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw gfd::InvalidArgument("cannot open key file: " + path);
    std::vector<std::string> keys;
    if (format == "text") {
        std::string line;
        while (std::getline(in, line)) keys.push_back(line);
    } else if (format == "bin") {
        while (true) {
            std::uint8_t lenb[4];
            in.read(reinterpret_cast<char*>(lenb), 4);
            if (in.gcount() == 0) break;
            if (in.gcount() != 4) throw gfd::InvalidArgument("truncated binary key record");
            std::uint32_t len = 0;
            for (int i = 0; i < 4; ++i) len |= std::uint32_t(lenb[i]) << (8 * i);
            std::string key(len, '\0');
            in.read(key.data(), len);
            if (static_cast<std::uint32_t>(in.gcount()) != len) {
                throw gfd::InvalidArgument("truncated binary key record");
            }
            keys.push_back(std::move(key));
        }
    } else {
        throw gfd::InvalidArgument("key format must be text or bin");
    }
    return keys;
}

std::vector<std::uint64_t> read_values(const std::string& path, const std::string& format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw gfd::InvalidArgument("cannot open value file: " + path);
    std::vector<std::uint64_t> values;
    if (format == "text") {
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) throw gfd::InvalidArgument("empty value line " + std::to_string(lineno));
            try {
                values.push_back(std::stoull(line));
            } catch (const std::exception&) {
                throw gfd::InvalidArgument("bad value on line " + std::to_string(lineno) + ": " + line);
            }
        }
    } else if (format == "bin") {
        while (true) {
            std::uint8_t b[8];
            in.read(reinterpret_cast<char*>(b), 8);
            if (in.gcount() == 0) break;
            if (in.gcount() != 8) throw gfd::InvalidArgument("truncated binary value record");
            std::uint64_t v = 0;
            for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
            values.push_back(v);
        }
    } else {
        throw gfd::InvalidArgument("value format must be text or bin");
    }
    return values;
}

std::vector<gfd::KeyValue> make_pairs(const std::vector<std::string>& keys,
                                      const std::vector<std::uint64_t>& values) {
    if (keys.size() != values.size()) {
        throw gfd::InvalidArgument("key count " + std::to_string(keys.size()) +
                                   " != value count " + std::to_string(values.size()));
    }
    std::vector<gfd::KeyValue> pairs;
    pairs.reserve(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        pairs.push_back({gfd::digest_key(keys[i]), values[i]});
    }
    return pairs;
}

gfd::LayoutOverrides parse_layout(const std::vector<std::string>& kvs) {
    gfd::LayoutOverrides o;
    for (const auto& kv : kvs) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw gfd::InvalidArgument("--layout expects key=value: " + kv);
        const std::string key = kv.substr(0, eq);
        std::uint64_t val = 0;
        try {
            val = std::stoull(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw gfd::InvalidArgument("bad layout value: " + kv);
        }
        if (key == "bucket_count") o.bucket_count = val;
        else if (key == "bad_bucket_capacity") o.bad_bucket_capacity = val;
        else if (key == "s" || key == "sub_bucket_target") o.sub_bucket_target = val;
        else if (key == "sub_bucket_capacity") o.sub_bucket_capacity = val;
        else if (key == "slot_range") o.slot_range = val;
        else if (key == "bank_size") o.bank_size = val;
        else if (key == "table_size") o.table_size = val;
        else throw gfd::InvalidArgument("unknown layout key: " + key);
    }
    return o;
}

json report_to_json(const gfd::BuildReport& r, const gfd::DictFile& f, std::uint64_t file_bytes) {
    const std::uint64_t n = f.key_count();
    json j{
        {"attempts", r.attempts},
        {"seed", r.final_seed},
        {"m", r.m},
        {"n", n},
        {"bits_payload", r.bits_payload},
        {"bits_total", r.bits_total},
        {"file_bytes", file_bytes},
        {"bits_per_key", n ? static_cast<double>(r.bits_total) / static_cast<double>(n) : 0.0},
    };
    if (f.kind() == gfd::DictKind::tiered) {
        j["h1_draws"] = r.h1_draws;
        j["sub_variant_retries"] = r.sub_variant_retries;
        j["cache_hits"] = r.cache_hits;
        j["cache_misses"] = r.cache_misses;
        j["bad_keys"] = r.bad_keys;
    }
    return j;
}

int cmd_build(const std::string& keys_path, const std::string& values_path,
              const std::string& key_format, const std::string& value_format, unsigned k,
              const std::string& mode, std::uint32_t t, std::uint64_t slack,
              std::optional<std::uint64_t> locality, std::uint64_t seed, unsigned max_attempts,
              bool no_cache, const std::vector<std::string>& layout, const std::string& out) {
    auto pairs = make_pairs(read_keys(keys_path, key_format), read_values(values_path, value_format));

    gfd::DictFile file;
    gfd::BuildReport report;
    if (mode == "tiered") {
        gfd::TieredOptions opt;
        opt.k = k;
        opt.seed = seed;
        opt.max_attempts = max_attempts;
        opt.use_cache = !no_cache;
        opt.layout = parse_layout(layout);
        auto [dict, rep] = gfd::build_tiered(std::move(pairs), opt);
        file.dict = std::move(dict);
        report = rep;
    } else {
        gfd::CoreOptions opt;
        opt.k = k;
        opt.t = t;
        opt.slack = slack;
        opt.seed = seed;
        opt.max_attempts = max_attempts;
        if (locality) opt.locality_window = *locality;
        if (mode == "dense") opt.mode = gfd::CoreMode::dense;
        else if (mode == "sparse") opt.mode = gfd::CoreMode::sparse;
        else if (mode == "pure") opt.mode = gfd::CoreMode::pure;
        else throw gfd::InvalidArgument("mode must be dense|sparse|pure|tiered");
        auto [dict, rep] = gfd::build_core(std::move(pairs), opt);
        file.dict = std::move(dict);
        report = rep;
    }

    json meta = report_to_json(report, file, 0);
    file.meta_json = meta.dump();
    const auto bytes = gfd::serialize_dict(file);
    meta["file_bytes"] = bytes.size();
    file.meta_json = meta.dump();
    gfd::write_dict_file(out, file);
    std::cout << meta.dump() << "\n";
    return 0;
}

int cmd_query(const std::string& dict_path, const std::vector<std::string>& single_keys,
              const std::string& keys_path, const std::string& key_format) {
    const gfd::DictFile f = gfd::read_dict_file(dict_path);
    std::vector<std::string> keys = single_keys;
    if (!keys_path.empty()) {
        auto more = read_keys(keys_path, key_format);
        keys.insert(keys.end(), more.begin(), more.end());
    }
    std::string out;
    for (const auto& key : keys) {
        out += std::to_string(f.query(gfd::digest_key(key)));
        out += '\n';
    }
    std::cout << out;
    return 0;
}

int cmd_check(const std::string& dict_path, const std::string& keys_path,
              const std::string& values_path, const std::string& key_format,
              const std::string& value_format) {
    const gfd::DictFile f = gfd::read_dict_file(dict_path);
    const auto keys = read_keys(keys_path, key_format);
    const auto values = read_values(values_path, value_format);
    if (keys.size() != values.size()) {
        throw gfd::InvalidArgument("key count != value count");
    }
    std::uint64_t mismatches = 0;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (f.query(gfd::digest_key(keys[i])) != values[i]) ++mismatches;
    }
    json j{{"checked", keys.size()}, {"mismatches", mismatches}};
    std::cout << j.dump() << "\n";
    return mismatches == 0 ? 0 : 4;
}

int cmd_bench(const std::string& dict_path, std::uint64_t negatives, std::uint64_t seed,
              const std::string& report) {
    const gfd::DictFile f = gfd::read_dict_file(dict_path);
    const unsigned k = f.spec().k;

    // False-positive rate: against the stored fingerprint for filters,
    // against an independent reference fingerprint for plain dictionaries.
    const gfd::FingerprintHash ref =
        f.member ? *f.member : gfd::fingerprint_new(seed ^ 0xFEEDull, k);
    std::uint64_t fp = 0;
    std::size_t probes_max = 0;
    double probes_sum = 0;
    std::uint64_t good_path = 0;
    for (std::uint64_t i = 0; i < negatives; ++i) {
        const std::string key = "neg:" + std::to_string(seed) + ":" + std::to_string(i);
        const gfd::Digest d = gfd::digest_key(key);
        std::uint64_t value;
        if (std::holds_alternative<gfd::TieredDict>(f.dict)) {
            const auto pr = gfd::query_tiered_probed(std::get<gfd::TieredDict>(f.dict), d);
            value = pr.value;
            if (!pr.bad_path) {
                probes_max = std::max(probes_max, pr.probes);
                probes_sum += static_cast<double>(pr.probes);
                ++good_path;
            }
        } else {
            const auto pr = gfd::query_core_probed(std::get<gfd::CoreDict>(f.dict), d);
            value = pr.first;
            probes_max = std::max(probes_max, pr.second);
            probes_sum += static_cast<double>(pr.second);
            ++good_path;
        }
        if (value == gfd::fingerprint_eval(ref, d)) ++fp;
    }
    const double fpr = negatives ? static_cast<double>(fp) / static_cast<double>(negatives) : 0.0;
    const auto [ci_lo, ci_hi] = gfd::wilson_ci95(fp, negatives);

    std::uint64_t payload_bits = 0;
    std::uint64_t overhead_bits = 0;
    if (std::holds_alternative<gfd::TieredDict>(f.dict)) {
        const auto bits = gfd::tiered_bits(std::get<gfd::TieredDict>(f.dict));
        payload_bits = bits.payload_bits;
        overhead_bits = bits.overhead_bits;
    } else {
        const auto [p, total] = gfd::core_bits(std::get<gfd::CoreDict>(f.dict));
        payload_bits = p;
        overhead_bits = total - p;
    }
    const std::uint64_t n = f.key_count();
    const double bits_per_key =
        n ? static_cast<double>(payload_bits + overhead_bits) / static_cast<double>(n) : 0.0;
    const double probes_mean = good_path ? probes_sum / static_cast<double>(good_path) : 0.0;

    if (report == "csv") {
        std::cout << "fpr,fpr_ci95_lo,fpr_ci95_hi,probes_max,probes_mean,payload_bits,"
                     "overhead_bits,bits_per_key\n";
        std::cout << fpr << "," << ci_lo << "," << ci_hi << "," << probes_max << "," << probes_mean
                  << "," << payload_bits << "," << overhead_bits << "," << bits_per_key << "\n";
    } else {
        json j{
            {"fpr", fpr},
            {"fpr_ci95", json::array({ci_lo, ci_hi})},
            {"probes_max", probes_max},
            {"probes_mean", probes_mean},
            {"payload_bits", payload_bits},
            {"overhead_bits", overhead_bits},
            {"bits_per_key", bits_per_key},
            {"negatives", negatives},
            {"false_positives", fp},
        };
        std::cout << j.dump() << "\n";
    }
    return 0;
}

int cmd_member_build(const std::string& keys_path, const std::string& key_format, unsigned k,
                     const std::string& backend, std::uint64_t seed, unsigned max_attempts,
                     const std::string& out) {
    const auto keys = read_keys(keys_path, key_format);
    std::vector<gfd::Digest> digests;
    digests.reserve(keys.size());
    for (const auto& key : keys) digests.push_back(gfd::digest_key(key));

    gfd::MemberOptions opt;
    opt.k = k;
    opt.seed = seed;
    opt.max_attempts = max_attempts;
    if (backend == "core") opt.backend = gfd::MemberBackend::core_dense;
    else if (backend == "tiered") opt.backend = gfd::MemberBackend::tiered;
    else if (backend == "auto") opt.backend = gfd::MemberBackend::auto_pick;
    else throw gfd::InvalidArgument("backend must be core|tiered|auto");

    auto [filter, report] = gfd::member_build(digests, opt);
    gfd::DictFile file;
    if (std::holds_alternative<gfd::TieredDict>(filter.dict)) {
        file.dict = std::move(std::get<gfd::TieredDict>(filter.dict));
    } else {
        file.dict = std::move(std::get<gfd::CoreDict>(filter.dict));
    }
    file.member = filter.g;
    json meta = report_to_json(report, file, 0);
    file.meta_json = meta.dump();
    const auto bytes = gfd::serialize_dict(file);
    meta["file_bytes"] = bytes.size();
    file.meta_json = meta.dump();
    gfd::write_dict_file(out, file);
    std::cout << meta.dump() << "\n";
    return 0;
}

int cmd_member_query(const std::string& dict_path, const std::vector<std::string>& single_keys,
                     const std::string& keys_path, const std::string& key_format) {
    const gfd::DictFile f = gfd::read_dict_file(dict_path);
    if (!f.member) throw gfd::NotAMembershipFilter();
    std::vector<std::string> keys = single_keys;
    if (!keys_path.empty()) {
        auto more = read_keys(keys_path, key_format);
        keys.insert(keys.end(), more.begin(), more.end());
    }
    std::string out;
    for (const auto& key : keys) {
        out += f.is_member(gfd::digest_key(key)) ? "1\n" : "0\n";
    }
    std::cout << out;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GF(2^k) linear-system dictionaries and membership filters"};
    app.require_subcommand(1);

    std::string keys_path, values_path, out_path, dict_path;
    std::string key_format = "text", value_format = "text";
    std::string mode = "tiered", report = "json", backend = "auto";
    unsigned k = 8;
    std::uint32_t t = 3;
    std::uint64_t slack = 0, seed = 0, negatives = 100000;
    std::optional<std::uint64_t> locality;
    unsigned max_attempts = 16;
    bool no_cache = false;
    std::vector<std::string> layout;
    std::vector<std::string> single_keys;

    auto* build = app.add_subcommand("build", "build a dictionary from key/value files");
    build->add_option("--keys", keys_path)->required();
    build->add_option("--values", values_path)->required();
    build->add_option("--key-format", key_format)->check(CLI::IsMember({"text", "bin"}));
    build->add_option("--value-format", value_format)->check(CLI::IsMember({"text", "bin"}));
    build->add_option("--k", k)->required();
    build->add_option("--mode", mode)->check(CLI::IsMember({"dense", "sparse", "pure", "tiered"}));
    build->add_option("--t", t);
    build->add_option("--slack", slack);
    build->add_option("--locality", locality);
    build->add_option("--seed", seed);
    build->add_option("--max-attempts", max_attempts);
    build->add_flag("--no-cache", no_cache);
    build->add_option("--layout", layout);
    build->add_option("--out", out_path)->required();

    auto* query = app.add_subcommand("query", "look keys up in a dictionary file");
    query->add_option("--dict", dict_path)->required();
    query->add_option("--key", single_keys);
    query->add_option("--keys", keys_path);
    query->add_option("--key-format", key_format)->check(CLI::IsMember({"text", "bin"}));

    auto* check = app.add_subcommand("check", "verify stored keys return their exact values");
    check->add_option("--dict", dict_path)->required();
    check->add_option("--keys", keys_path)->required();
    check->add_option("--values", values_path)->required();
    check->add_option("--key-format", key_format)->check(CLI::IsMember({"text", "bin"}));
    check->add_option("--value-format", value_format)->check(CLI::IsMember({"text", "bin"}));

    auto* bench = app.add_subcommand("bench", "measure FPR, probes and space");
    bench->add_option("--dict", dict_path)->required();
    bench->add_option("--negatives", negatives);
    bench->add_option("--seed", seed);
    bench->add_option("--report", report)->check(CLI::IsMember({"json", "csv"}));

    auto* mbuild = app.add_subcommand("member-build", "build a membership filter from keys");
    mbuild->add_option("--keys", keys_path)->required();
    mbuild->add_option("--key-format", key_format)->check(CLI::IsMember({"text", "bin"}));
    mbuild->add_option("--k", k)->required();
    mbuild->add_option("--backend", backend)->check(CLI::IsMember({"core", "tiered", "auto"}));
    mbuild->add_option("--seed", seed);
    mbuild->add_option("--max-attempts", max_attempts);
    mbuild->add_option("--out", out_path)->required();

    auto* mquery = app.add_subcommand("member-query", "test keys against a membership filter");
    mquery->add_option("--dict", dict_path)->required();
    mquery->add_option("--key", single_keys);
    mquery->add_option("--keys", keys_path);
    mquery->add_option("--key-format", key_format)->check(CLI::IsMember({"text", "bin"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) {
            return cmd_build(keys_path, values_path, key_format, value_format, k, mode, t, slack,
                             locality, seed, max_attempts, no_cache, layout, out_path);
        }
        if (query->parsed()) {
            return cmd_query(dict_path, single_keys, keys_path, key_format);
        }
        if (check->parsed()) {
            return cmd_check(dict_path, keys_path, values_path, key_format, value_format);
        }
        if (bench->parsed()) {
            return cmd_bench(dict_path, negatives, seed, report);
        }
        if (mbuild->parsed()) {
            return cmd_member_build(keys_path, key_format, k, backend, seed, max_attempts, out_path);
        }
        if (mquery->parsed()) {
            return cmd_member_query(dict_path, single_keys, keys_path, key_format);
        }
    } catch (const gfd::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
