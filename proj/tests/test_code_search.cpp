#include <gtest/gtest.h>

#include <sstream>

#include "qmargulis/code_search.hpp"

using namespace qmargulis;

namespace {

SearchOptions p5_options() {
    SearchOptions opt;
    opt.p = 5;
    opt.size_a = 2;
    opt.size_b = 3;
    opt.target_girth = 8;
    opt.budget = 10000;
    return opt;
}

} // namespace

TEST(Search, FindsGirthEightAtP5) {
    const auto res = search_code(p5_options());
    ASSERT_TRUE(res.reached);
    EXPECT_EQ(res.best.n, 240U);
    EXPECT_EQ(res.best.girth_x, Girth{8});
    EXPECT_EQ(res.best.girth_z, Girth{8});
    EXPECT_EQ(res.best.name(), "P5G8D5");
    EXPECT_EQ(res.best.k(), 8U);
    EXPECT_EQ(res.best.profile_x.variable_degrees(), "{2,3}");
    EXPECT_EQ(res.examined, res.log.size());
    EXPECT_EQ(res.log.back().order, res.best_order);
}

TEST(Search, TargetFourReturnsFirstCandidate) {
    auto opt = p5_options();
    opt.target_girth = 4;
    const auto res = search_code(opt);
    EXPECT_TRUE(res.reached);
    EXPECT_EQ(res.examined, 1U);
    EXPECT_GE(*res.best.girth(), 4U);
}

TEST(Search, ZeroBudgetRejected) {
    auto opt = p5_options();
    opt.budget = 0;
    EXPECT_THROW(search_code(opt), ValidationError);
}

TEST(Search, BudgetExhaustionKeepsBestOfLog) {
    auto opt = p5_options();
    opt.budget = 12;
    opt.target_girth = 100;
    const auto res = search_code(opt);
    EXPECT_FALSE(res.reached);
    EXPECT_EQ(res.examined, 12U);
    ASSERT_EQ(res.log.size(), 12U);
    const auto key = [&](const CandidateRecord& c) {
        return detail::rank_key(girth_min(c.girth_x, c.girth_z), c.k, opt.target_girth);
    };
    const auto best = detail::rank_key(res.best.girth(), res.best.k(), opt.target_girth);
    for (const auto& c : res.log) EXPECT_LE(key(c), best);
    // Earliest candidate wins ties.
    for (const auto& c : res.log) {
        if (c.order < res.best_order) {
            EXPECT_LT(key(c), best);
        }
    }
}

TEST(Search, DeterministicPerSeed) {
    auto opt = p5_options();
    opt.seed = 9;
    opt.budget = 30;
    opt.target_girth = 100;
    const auto x = search_code(opt);
    const auto y = search_code(opt);
    ASSERT_EQ(x.log.size(), y.log.size());
    for (std::size_t i = 0; i < x.log.size(); ++i) {
        EXPECT_EQ(x.log[i].pairs_a, y.log[i].pairs_a);
        EXPECT_EQ(x.log[i].pairs_b, y.log[i].pairs_b);
        EXPECT_EQ(x.log[i].k, y.log[i].k);
    }
    std::ostringstream a, b;
    write_search_log(a, x);
    write_search_log(b, y);
    EXPECT_EQ(a.str(), b.str());
}

TEST(Search, CandidatesAreDistinct) {
    auto opt = p5_options();
    opt.budget = 200;
    opt.target_girth = 100;
    const auto res = search_code(opt);
    std::set<std::tuple<std::int64_t, std::vector<CoprimePair>, std::vector<CoprimePair>>> seen;
    for (const auto& c : res.log) {
        auto a = c.pairs_a;
        auto b = c.pairs_b;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        EXPECT_TRUE(seen.insert({c.eta, a, b}).second);
    }
}

TEST(Search, CombinationStepper) {
    std::vector<std::size_t> idx = detail::first_combination(2);
    std::size_t count = 1;
    while (detail::next_combination(idx, 5)) ++count;
    EXPECT_EQ(count, 10U);
}

TEST(Search, ExhaustiveModePrefersDimensionOnceTargetMet) {
    // At p=7 with (3,3) the first girth-6 hit has girth 8 and k=4; girth 6 with k=10 appears later.
    SearchOptions opt;
    opt.p = 7;
    opt.size_a = 3;
    opt.size_b = 3;
    opt.target_girth = 6;
    opt.budget = 3700;
    opt.stop_at_target = false;
    const auto res = search_code(opt);
    ASSERT_TRUE(res.reached);
    EXPECT_EQ(res.examined, 3700U);
    EXPECT_EQ(res.best.girth(), Girth{6});
    EXPECT_EQ(res.best.k(), 10U);
    EXPECT_EQ(res.best.name(), "P7G6D6");
    std::size_t max_k = 0;
    for (const auto& c : res.log) {
        const auto g = girth_min(c.girth_x, c.girth_z);
        if (!g || *g >= 6) max_k = std::max(max_k, c.k);
    }
    EXPECT_EQ(res.best.k(), max_k);
    EXPECT_EQ(res.log[res.best_order].k, 10U);
}
