#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::string gfd_bin() {
    const char* p = std::getenv("GFD_BIN");
    REQUIRE_MESSAGE(p != nullptr, "GFD_BIN must point at the gfd binary");
    return p;
}

struct RunResult {
    int status = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    static int counter = 0;
    const std::string out_path = "cli_out_" + std::to_string(counter++) + ".txt";
    const std::string cmd = gfd_bin() + " " + args + " > " + out_path + " 2> " + out_path + ".err";
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.status = WEXITSTATUS(rc);
    std::ifstream in(out_path);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    fs::remove(out_path);
    fs::remove(out_path + ".err");
    return r;
}

void write_text(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    for (const auto& l : lines) out << l << "\n";
}

std::vector<std::uint8_t> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TmpDir {
    fs::path dir;
    TmpDir() {
        dir = fs::path("cli_tmp");
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~TmpDir() { fs::remove_all(dir); }
    std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("build / check / query round trip") {
    TmpDir t;
    write_text(t / "keys.txt", {"apple", "banana", "cherry"});
    write_text(t / "vals.txt", {"3", "10", "15"});

    auto b = run("build --keys " + (t / "keys.txt") + " --values " + (t / "vals.txt") +
                 " --k 4 --mode dense --seed 1 --out " + (t / "d.gfd"));
    REQUIRE(b.status == 0);
    CHECK(b.out.find("\"attempts\"") != std::string::npos);

    auto c = run("check --dict " + (t / "d.gfd") + " --keys " + (t / "keys.txt") + " --values " +
                 (t / "vals.txt"));
    CHECK(c.status == 0);
    CHECK(c.out.find("\"checked\":3") != std::string::npos);
    CHECK(c.out.find("\"mismatches\":0") != std::string::npos);

    auto q = run("query --dict " + (t / "d.gfd") + " --key banana");
    CHECK(q.status == 0);
    CHECK(q.out == "10\n");

    auto qf = run("query --dict " + (t / "d.gfd") + " --keys " + (t / "keys.txt"));
    CHECK(qf.status == 0);
    CHECK(qf.out == "3\n10\n15\n");
}

TEST_CASE("every mode builds and checks through the CLI") {
    TmpDir t;
    std::vector<std::string> keys, vals;
    for (int i = 0; i < 300; ++i) {
        keys.push_back("key-" + std::to_string(i));
        vals.push_back(std::to_string(i % 256));
    }
    write_text(t / "keys.txt", keys);
    write_text(t / "vals.txt", vals);
    for (const std::string mode : {"dense", "sparse", "pure", "tiered"}) {
        CAPTURE(mode);
        const std::string extra = mode == "sparse" ? " --t 3 --slack 75" : "";
        auto b = run("build --keys " + (t / "keys.txt") + " --values " + (t / "vals.txt") +
                     " --k 8 --mode " + mode + " --seed 3 --max-attempts 64" + extra + " --out " +
                     (t / (mode + ".gfd")));
        REQUIRE(b.status == 0);
        auto c = run("check --dict " + (t / (mode + ".gfd")) + " --keys " + (t / "keys.txt") +
                     " --values " + (t / "vals.txt"));
        CHECK(c.status == 0);
        CHECK(c.out.find("\"mismatches\":0") != std::string::npos);
    }
}

TEST_CASE("value out of range exits 2") {
    TmpDir t;
    write_text(t / "keys.txt", {"a", "b"});
    write_text(t / "vals.txt", {"3", "16"});
    auto b = run("build --keys " + (t / "keys.txt") + " --values " + (t / "vals.txt") +
                 " --k 4 --mode dense --out " + (t / "d.gfd"));
    CHECK(b.status == 2);
}

TEST_CASE("duplicate keys with conflicting values exit 2") {
    TmpDir t;
    write_text(t / "keys.txt", {"a", "a"});
    write_text(t / "vals.txt", {"1", "2"});
    auto b = run("build --keys " + (t / "keys.txt") + " --values " + (t / "vals.txt") +
                 " --k 4 --mode dense --out " + (t / "d.gfd"));
    CHECK(b.status == 2);
}

TEST_CASE("a flipped value makes check exit 4 with one mismatch") {
    TmpDir t;
    write_text(t / "keys.txt", {"a", "b", "c"});
    write_text(t / "vals.txt", {"1", "2", "3"});
    auto b = run("build --keys " + (t / "keys.txt") + " --values " + (t / "vals.txt") +
                 " --k 4 --mode dense --seed 1 --out " + (t / "d.gfd"));
    REQUIRE(b.status == 0);
    write_text(t / "vals2.txt", {"1", "2", "4"});
    auto c = run("check --dict " + (t / "d.gfd") + " --keys " + (t / "keys.txt") + " --values " +
                 (t / "vals2.txt"));
    CHECK(c.status == 4);
    CHECK(c.out.find("\"mismatches\":1") != std::string::npos);
}

TEST_CASE("an unsolvable attempt with retries disabled exits 3") {
    TmpDir t;
    std::vector<std::string> keys, vals;
    for (int i = 0; i < 512; ++i) {
        keys.push_back("key-" + std::to_string(i));
        vals.push_back(std::to_string(i & 1));
    }
    write_text(t / "keys.txt", keys);
    write_text(t / "vals.txt", vals);
    // seed 1 gives a singular square system on the first (only) attempt
    auto b = run("build --keys " + (t / "keys.txt") + " --values " + (t / "vals.txt") +
                 " --k 1 --mode pure --seed 1 --max-attempts 1 --out " + (t / "d.gfd"));
    CHECK(b.status == 3);
}

TEST_CASE("empty key file checks cleanly") {
    TmpDir t;
    write_text(t / "keys.txt", {});
    write_text(t / "vals.txt", {});
    auto b = run("build --keys " + (t / "keys.txt") + " --values " + (t / "vals.txt") +
                 " --k 8 --mode tiered --out " + (t / "d.gfd"));
    REQUIRE(b.status == 0);
    auto c = run("check --dict " + (t / "d.gfd") + " --keys " + (t / "keys.txt") + " --values " +
                 (t / "vals.txt"));
    CHECK(c.status == 0);
    CHECK(c.out.find("\"checked\":0") != std::string::npos);
    auto q = run("query --dict " + (t / "d.gfd") + " --key anything");
    CHECK(q.status == 0);
    CHECK(q.out == "0\n");
}

TEST_CASE("same seed twice gives byte-identical files") {
    TmpDir t;
    std::vector<std::string> keys, vals;
    for (int i = 0; i < 200; ++i) {
        keys.push_back("det-" + std::to_string(i));
        vals.push_back(std::to_string(i % 16));
    }
    write_text(t / "keys.txt", keys);
    write_text(t / "vals.txt", vals);
    for (const std::string mode : {"dense", "tiered"}) {
        auto b1 = run("build --keys " + (t / "keys.txt") + " --values " + (t / "vals.txt") +
                      " --k 4 --mode " + mode + " --seed 9 --out " + (t / "d1.gfd"));
        auto b2 = run("build --keys " + (t / "keys.txt") + " --values " + (t / "vals.txt") +
                      " --k 4 --mode " + mode + " --seed 9 --out " + (t / "d2.gfd"));
        REQUIRE(b1.status == 0);
        REQUIRE(b2.status == 0);
        CHECK(slurp(t / "d1.gfd") == slurp(t / "d2.gfd"));
    }
}

TEST_CASE("corrupt dictionary file exits nonzero with no output") {
    TmpDir t;
    write_text(t / "keys.txt", {"a"});
    write_text(t / "vals.txt", {"1"});
    auto b = run("build --keys " + (t / "keys.txt") + " --values " + (t / "vals.txt") +
                 " --k 4 --mode dense --out " + (t / "d.gfd"));
    REQUIRE(b.status == 0);
    auto bytes = slurp(t / "d.gfd");
    bytes.resize(bytes.size() - 4);
    std::ofstream(t / "broken.gfd", std::ios::binary)
        .write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    auto q = run("query --dict " + (t / "broken.gfd") + " --key a");
    CHECK(q.status == 2);
    CHECK(q.out.empty());
}

TEST_CASE("binary key and value formats") {
    TmpDir t;
    {
        std::ofstream keys(t / "keys.bin", std::ios::binary);
        std::ofstream vals(t / "vals.bin", std::ios::binary);
        for (std::uint32_t i = 0; i < 50; ++i) {
            const std::string key = "bin" + std::to_string(i);
            const std::uint32_t len = key.size();
            keys.write(reinterpret_cast<const char*>(&len), 4);
            keys.write(key.data(), len);
            const std::uint64_t v = i % 256;
            vals.write(reinterpret_cast<const char*>(&v), 8);
        }
    }
    auto b = run("build --keys " + (t / "keys.bin") + " --values " + (t / "vals.bin") +
                 " --key-format bin --value-format bin --k 8 --mode tiered --seed 2 --out " +
                 (t / "d.gfd"));
    REQUIRE(b.status == 0);
    auto c = run("check --dict " + (t / "d.gfd") + " --keys " + (t / "keys.bin") + " --values " +
                 (t / "vals.bin") + " --key-format bin --value-format bin");
    CHECK(c.status == 0);
    CHECK(c.out.find("\"mismatches\":0") != std::string::npos);
    auto q = run("query --dict " + (t / "d.gfd") + " --key bin7");
    CHECK(q.out == "7\n");
}

TEST_CASE("bench reports the expected fields") {
    TmpDir t;
    std::vector<std::string> keys, vals;
    for (int i = 0; i < 500; ++i) {
        keys.push_back("bench-" + std::to_string(i));
        vals.push_back(std::to_string(i % 256));
    }
    write_text(t / "keys.txt", keys);
    write_text(t / "vals.txt", vals);
    auto b = run("build --keys " + (t / "keys.txt") + " --values " + (t / "vals.txt") +
                 " --k 8 --mode tiered --seed 4 --out " + (t / "d.gfd"));
    REQUIRE(b.status == 0);
    auto r = run("bench --dict " + (t / "d.gfd") + " --negatives 20000 --seed 5 --report json");
    CHECK(r.status == 0);
    for (const char* field : {"\"fpr\"", "\"fpr_ci95\"", "\"probes_max\"", "\"probes_mean\"",
                              "\"payload_bits\"", "\"overhead_bits\"", "\"bits_per_key\""}) {
        CAPTURE(field);
        CHECK(r.out.find(field) != std::string::npos);
    }
    auto csv = run("bench --dict " + (t / "d.gfd") + " --negatives 1000 --seed 5 --report csv");
    CHECK(csv.status == 0);
    CHECK(csv.out.find("fpr,") == 0);
}

TEST_CASE("membership filter CLI") {
    TmpDir t;
    std::vector<std::string> keys;
    for (int i = 0; i < 400; ++i) keys.push_back("member-" + std::to_string(i));
    write_text(t / "keys.txt", keys);

    auto b = run("member-build --keys " + (t / "keys.txt") + " --k 8 --backend core --seed 6 " +
                 "--out " + (t / "m.gfd"));
    REQUIRE(b.status == 0);

    auto q = run("member-query --dict " + (t / "m.gfd") + " --key member-7");
    CHECK(q.status == 0);
    CHECK(q.out == "1\n");

    auto qs = run("member-query --dict " + (t / "m.gfd") + " --keys " + (t / "keys.txt"));
    CHECK(qs.status == 0);
    CHECK(qs.out.find('0') == std::string::npos);  // no false negatives

    // a plain dictionary is not a membership filter
    write_text(t / "vals.txt", std::vector<std::string>(keys.size(), "1"));
    auto plain = run("build --keys " + (t / "keys.txt") + " --values " + (t / "vals.txt") +
                     " --k 8 --mode tiered --out " + (t / "plain.gfd"));
    REQUIRE(plain.status == 0);
    auto mq = run("member-query --dict " + (t / "plain.gfd") + " --key member-7");
    CHECK(mq.status == 2);
}
