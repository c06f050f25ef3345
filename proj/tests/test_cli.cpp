#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qmargulis/cli.hpp"

namespace fs = std::filesystem;
using namespace qmargulis;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "qmargulis");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_field(const std::string& line) { return line.substr(0, line.find(' ')); }

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("qmargulis_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string girth8_descriptor() {
        const auto p = path("p5.json");
        const auto r = run_cli({"search", "--p", "5", "--size-a", "2", "--size-b", "3", "--target-girth", "8", "--out", p});
        EXPECT_EQ(r.code, 0) << r.err;
        return p;
    }

    fs::path dir_;
};

} // namespace

TEST_F(CliTest, ConstructBlocklengths) {
    const std::vector<std::vector<std::string>> cases{
        {"--p", "2", "--size-a", "1", "--size-b", "2", "--relax-inverse"},
        {"--p", "3", "--size-a", "2", "--size-b", "2"},
        {"--p", "5", "--size-a", "2", "--size-b", "3"},
        {"--p", "7", "--size-a", "2", "--size-b", "3"},
        {"--p", "11", "--size-a", "2", "--size-b", "3"}};
    const std::vector<std::string> expected{"12", "48", "240", "672", "2640"};
    for (std::size_t i = 0; i < cases.size(); ++i) {
        auto args = cases[i];
        args.insert(args.begin(), "construct");
        const auto r = run_cli(args);
        ASSERT_EQ(r.code, 0) << r.err;
        EXPECT_EQ(first_field(r.out), expected[i]);
    }
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(run_cli({"construct", "--p", "4", "--size-a", "2", "--size-b", "3"}).code, cli::kValidation);
    EXPECT_EQ(run_cli({"construct", "--p", "29", "--size-a", "2", "--size-b", "3"}).code, cli::kValidation);
    EXPECT_EQ(run_cli({"construct", "--p", "3", "--size-a", "2", "--size-b", "3"}).code, cli::kExhaustion);
    EXPECT_EQ(run_cli({"construct", "--p", "5", "--size-a", "2", "--size-b", "3", "--eta", "x"}).code,
              cli::kValidation);
    EXPECT_EQ(run_cli({"construct", "--p", "5"}).code, cli::kValidation);
    EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kValidation);
    EXPECT_EQ(run_cli({}).code, cli::kValidation);
    EXPECT_EQ(run_cli({"search", "--p", "5", "--size-a", "2", "--size-b", "3", "--budget", "0"}).code,
              cli::kValidation);
    EXPECT_EQ(run_cli({"inspect", "--code", path("missing.json")}).code, cli::kValidation);
}

TEST_F(CliTest, ConstructIsDeterministic) {
    const auto a = path("a.json"), b = path("b.json");
    ASSERT_EQ(run_cli({"construct", "--p", "7", "--size-a", "3", "--size-b", "3", "--seed", "5", "--out", a}).code, 0);
    ASSERT_EQ(run_cli({"construct", "--p", "7", "--size-a", "3", "--size-b", "3", "--seed", "5", "--out", b}).code, 0);
    EXPECT_EQ(slurp(a), slurp(b));
}

TEST_F(CliTest, SearchInspectExport) {
    const auto desc = girth8_descriptor();
    const auto r = run_cli({"inspect", "--code", desc, "--export-alist", path("hx.alist"), "--export-alist-z",
                            path("hz.alist"), "--export-coords", path("hx.txt")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("name P5G8D5"), std::string::npos);
    EXPECT_NE(r.out.find("girth_x 8"), std::string::npos);
    EXPECT_NE(r.out.find("css ok"), std::string::npos);
    EXPECT_NE(r.out.find("status verified"), std::string::npos);
    const auto alist = slurp(path("hx.alist"));
    EXPECT_EQ(alist.substr(0, alist.find('\n')), "240 120");
    const auto coords = slurp(path("hx.txt"));
    EXPECT_EQ(std::count(coords.begin(), coords.end(), '\n'), 120 * 5);
}

TEST_F(CliTest, SearchTargetNotReached) {
    const auto r = run_cli({"search", "--p", "5", "--size-a", "2", "--size-b", "3", "--target-girth", "20", "--budget",
                            "5", "--log", path("log.txt")});
    EXPECT_EQ(r.code, cli::kExhaustion);
    EXPECT_NE(r.err.find("not reached"), std::string::npos);
    EXPECT_FALSE(slurp(path("log.txt")).empty());
}

TEST_F(CliTest, TamperedDescriptorRejected) {
    const auto desc = girth8_descriptor();
    auto text = slurp(desc);
    const auto pos = text.find("\"k\": ");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, 6, "\"k\": 9");
    std::ofstream(path("bad.json")) << text;
    EXPECT_EQ(run_cli({"inspect", "--code", path("bad.json")}).code, cli::kIntegrity);
}

TEST_F(CliTest, SimulateWorkersByteIdentical) {
    const auto desc = girth8_descriptor();
    const std::vector<std::string> common{"simulate",      "--code",         desc,     "--p-list",  "0.05,0.1",
                                          "--min-trials",  "300",            "--max-trials", "600", "--target-failures",
                                          "5",             "--max-iters",    "30",     "--osd-order", "4",
                                          "--seed",        "11"};
    auto one = common, eight = common;
    one.insert(one.end(), {"--workers", "1", "--out", path("w1.csv")});
    eight.insert(eight.end(), {"--workers", "8", "--out", path("w8.csv")});
    const auto r1 = run_cli(one);
    const auto r8 = run_cli(eight);
    ASSERT_EQ(r1.code, 0) << r1.err;
    ASSERT_EQ(r8.code, 0) << r8.err;
    EXPECT_EQ(slurp(path("w1.csv")), slurp(path("w8.csv")));
    EXPECT_EQ(r1.out, r8.out);
    EXPECT_NE(slurp(path("w1.csv")).find(std::string(kResultsHeader)), std::string::npos);
}

TEST_F(CliTest, SimulateArgumentErrors) {
    const auto desc = girth8_descriptor();
    EXPECT_EQ(run_cli({"simulate", "--code", desc, "--p-list", "0.1,0.05"}).code, cli::kValidation);
    EXPECT_EQ(run_cli({"simulate", "--code", desc}).code, cli::kValidation);
    EXPECT_EQ(run_cli({"simulate", "--code", desc, "--p-list", "0.1", "--p-start", "0.1"}).code, cli::kValidation);
    EXPECT_EQ(run_cli({"simulate", "--code", desc, "--p-list", "0.1", "--bp", "magic"}).code, cli::kValidation);
    EXPECT_EQ(run_cli({"simulate", "--code", desc, "--p-list", "0.1", "--max-iters", "0"}).code, cli::kValidation);
    EXPECT_EQ(run_cli({"simulate", "--code", desc, "--p-list", "0.1", "--osd-order", "25"}).code, cli::kValidation);
}

TEST_F(CliTest, SimulateLinearGrid) {
    const auto desc = girth8_descriptor();
    const auto r = run_cli({"simulate", "--code", desc, "--p-start", "0.02", "--p-end", "0.04", "--points", "3",
                            "--min-trials", "50", "--max-trials", "50", "--max-iters", "20", "--osd-order", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("P5G8D5,0.02,50,"), std::string::npos);
    EXPECT_NE(r.out.find("P5G8D5,0.03,50,"), std::string::npos);
    EXPECT_NE(r.out.find("P5G8D5,0.04,50,"), std::string::npos);
}

TEST_F(CliTest, Report) {
    const auto desc = girth8_descriptor();
    const auto p7 = path("p7.json");
    ASSERT_EQ(run_cli({"construct", "--p", "7", "--size-a", "2", "--size-b", "3", "--out", p7}).code, 0);
    const auto r = run_cli({"report", "--code", desc, "--code", p7, "--csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("code_id,n,d_c,girth,growth\n", 0), 0U);
    EXPECT_NE(r.out.find("P5G8D5,240,5,8,"), std::string::npos);
    EXPECT_EQ(run_cli({"report", "--code", desc}).code, cli::kValidation);
}
