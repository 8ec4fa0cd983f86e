#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "gfd/errors.hpp"
#include "gfd/member.hpp"

using namespace gfd;

namespace {

std::vector<Digest> make_keys(std::size_t n, const char* ns = "mk") {
    std::vector<Digest> keys;
    keys.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        keys.push_back(digest_key(std::string(ns) + "-" + std::to_string(i)));
    }
    return keys;
}

}  // namespace

TEST_CASE("fingerprint family") {
    const FingerprintHash g = fingerprint_new(5, 8);
    CHECK(fingerprint_new(5, 8) == g);
    CHECK(fingerprint_eval(g, digest_key("a")) < 256);
    CHECK_THROWS_AS(fingerprint_new(5, 0), UnsupportedFieldWidth);
    CHECK_THROWS_AS(fingerprint_new(5, 65), UnsupportedFieldWidth);

    SUBCASE("collision rate across seeds is ~2^-k") {
        const Digest x = digest_key("fpx"), y = digest_key("fpy");
        int hits = 0;
        const int seeds = 100000;
        for (int s = 0; s < seeds; ++s) {
            const FingerprintHash h = fingerprint_new(s, 8);
            if (fingerprint_eval(h, x) == fingerprint_eval(h, y)) ++hits;
        }
        const double expect = seeds / 256.0;
        CHECK(std::abs(hits - expect) <= 3 * std::sqrt(expect) + 1);
    }
}

TEST_CASE("tag-disjoint seed domains keep the fingerprint independent") {
    // the fingerprint stream must not reuse any dictionary tag
    const Tag dict_tags[] = {Tag::dense_row,   Tag::sparse_index, Tag::sparse_coeff,
                             Tag::sparse_window, Tag::core_attempt, Tag::h1_draw,
                             Tag::bank_pairwise, Tag::bank_table,   Tag::sub_slot,
                             Tag::sub_coeff};
    for (Tag t : dict_tags) CHECK(t != Tag::fingerprint);
    // same user seed, two backends: the fingerprint is identical while the
    // dictionaries differ, i.e. g depends on nothing the dictionary draws
    const auto keys = make_keys(64);
    MemberOptions a;
    a.k = 8;
    a.seed = 21;
    a.backend = MemberBackend::core_dense;
    MemberOptions b = a;
    b.backend = MemberBackend::tiered;
    auto [fa, ra] = member_build(keys, a);
    auto [fb, rb] = member_build(keys, b);
    CHECK(fa.g == fb.g);
}

TEST_CASE("no false negatives on either backend") {
    for (MemberBackend backend : {MemberBackend::core_dense, MemberBackend::tiered}) {
        const auto keys = make_keys(2000);
        MemberOptions opt;
        opt.k = 8;
        opt.seed = 3;
        opt.backend = backend;
        auto [mf, report] = member_build(keys, opt);
        for (const Digest& d : keys) REQUIRE(member_query(mf, d));
    }
}

TEST_CASE("single key and empty filter") {
    MemberOptions opt;
    opt.k = 8;
    auto [mf, report] = member_build({digest_key("a")}, opt);
    CHECK(member_query(mf, digest_key("a")));

    auto [empty, report2] = member_build({}, opt);
    // empty dictionary answers 0, so a probe passes only when g(x) = 0
    int hits = 0;
    const int probes = 200000;
    for (int i = 0; i < probes; ++i) {
        if (member_query(empty, digest_key("e" + std::to_string(i)))) ++hits;
    }
    const double expect = probes / 256.0;
    CHECK(std::abs(hits - expect) <= 3 * std::sqrt(expect));
}

TEST_CASE("auto backend picks by size") {
    const auto small = make_keys(100);
    MemberOptions opt;
    opt.k = 8;
    auto [mf1, r1] = member_build(small, opt);
    CHECK(std::holds_alternative<CoreDict>(mf1.dict));

    const auto big = make_keys(kMemberTieredThreshold);
    auto [mf2, r2] = member_build(big, opt);
    CHECK(std::holds_alternative<TieredDict>(mf2.dict));
}

TEST_CASE("false-positive rate sits at 2^-k") {
    const std::uint64_t trials = 1000000;
    for (unsigned k : {1u, 4u, 8u}) {
        CAPTURE(k);
        const auto keys = make_keys(5000, "fpr");  // tiered backend
        MemberOptions opt;
        opt.k = k;
        opt.seed = 17;
        opt.backend = MemberBackend::tiered;
        auto [mf, report] = member_build(keys, opt);
        const FprEstimate est = fpr_measure(mf, trials, 23);
        const double p = std::ldexp(1.0, -static_cast<int>(k));
        const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(trials));
        CHECK(std::abs(est.rate - p) <= 3 * sigma);
        CHECK(est.ci_lo <= est.rate);
        CHECK(est.rate <= est.ci_hi);
        if (k == 1) {
            CHECK(est.rate >= 0.49);
            CHECK(est.rate <= 0.51);
        }
    }
}

TEST_CASE("fpr_measure edge cases") {
    const auto keys = make_keys(1000);
    MemberOptions opt;
    opt.k = 8;
    auto [mf, report] = member_build(keys, opt);
    CHECK_THROWS_AS(fpr_measure(mf, 0, 1), EmptyTrial);

    const FprEstimate est = fpr_measure(mf, 1000000, 5);
    CHECK(est.ci_lo <= 1.0 / 256);
    CHECK(est.ci_hi >= 1.0 / 256);
}

TEST_CASE("rare events at k = 16 stay within a factor of two") {
    const auto keys = make_keys(5000, "k16");
    MemberOptions opt;
    opt.k = 16;
    opt.seed = 29;
    opt.backend = MemberBackend::tiered;
    auto [mf, report] = member_build(keys, opt);
    const FprEstimate est = fpr_measure(mf, 10000000, 31);
    const double p = std::ldexp(1.0, -16);
    CHECK(est.rate >= 0.5 * p);
    CHECK(est.rate <= 2.0 * p);
}
