#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qmargulis/bp_osd_decoder.hpp"
#include "qmargulis/code_search.hpp"
#include "qmargulis/mc_simulator.hpp"

using namespace qmargulis;

namespace {

const CssCode& girth8_code() {
    static const CssCode code = [] {
        SearchOptions opt;
        opt.p = 5;
        opt.size_a = 2;
        opt.size_b = 3;
        opt.target_girth = 8;
        auto res = search_code(opt);
        if (!res.reached) throw std::runtime_error("no girth-8 code");
        return res.best;
    }();
    return code;
}

BitVector unit(std::size_t n, std::size_t i) {
    BitVector v(n);
    v.set(i);
    return v;
}

} // namespace

TEST(Config, Validation) {
    DecoderConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.osd_order = 21;
    EXPECT_THROW(cfg.validate(), ValidationError);
    cfg.osd_order = 10;
    cfg.max_iterations = 0;
    EXPECT_THROW(cfg.validate(), ValidationError);
    cfg.max_iterations = 5;
    cfg.bp_variant = BpVariant::normalized_min_sum;
    cfg.min_sum_factor = 0.0;
    EXPECT_THROW(cfg.validate(), ValidationError);
    EXPECT_EQ(DecoderConfig{}.iterations_for(240), 240U);
    EXPECT_NE(DecoderConfig{}.describe(240).find("max_iterations=240"), std::string::npos);
}

TEST(Bp, ZeroSyndrome) {
    const auto& code = girth8_code();
    BpOsdDecoder dec(code.hx, {});
    const auto out = dec.decode(BitVector(code.hx.rows()), 0.05);
    EXPECT_TRUE(out.estimate.none());
    EXPECT_TRUE(out.bp_converged);
    EXPECT_EQ(out.iterations_used, 0U);
    EXPECT_FALSE(out.osd_invoked);
}

TEST(Bp, PriorOutOfRange) {
    const auto& code = girth8_code();
    BpOsdDecoder dec(code.hx, {});
    EXPECT_THROW(dec.bp_decode(BitVector(code.hx.rows()), 0.6), ValidationError);
    EXPECT_THROW(dec.bp_decode(BitVector(code.hx.rows()), 0.0), ValidationError);
    EXPECT_THROW(dec.bp_decode(BitVector(3), 0.1), ValidationError);
}

TEST(Bp, SingleErrorsRecoveredQuickly) {
    const auto& code = girth8_code();
    for (const auto& h : {code.hx, code.hz}) {
        BpOsdDecoder dec(h, {});
        for (std::size_t i = 0; i < code.n; ++i) {
            const auto e = unit(code.n, i);
            const auto out = dec.bp_decode(mat_vec(h, e), 0.05);
            ASSERT_TRUE(out.bp_converged) << i;
            EXPECT_LE(out.iterations_used, 5U);
            EXPECT_EQ(out.estimate, e) << i;
        }
    }
}

TEST(Bp, AlternativeSchedulesRecoverSingleErrors) {
    const auto& code = girth8_code();
    DecoderConfig serial;
    serial.schedule = Schedule::serial;
    DecoderConfig min_sum;
    min_sum.bp_variant = BpVariant::normalized_min_sum;
    for (const auto& cfg : {serial, min_sum}) {
        BpOsdDecoder dec(code.hx, cfg);
        for (std::size_t i = 0; i < code.n; i += 7) {
            const auto e = unit(code.n, i);
            const auto out = dec.decode(mat_vec(code.hx, e), 0.05);
            EXPECT_EQ(out.estimate, e) << i;
        }
    }
}

TEST(Osd, OrderZeroReproducesConvergedBp) {
    const auto& code = girth8_code();
    BpOsdDecoder dec(code.hx, {});
    for (std::size_t i = 0; i < code.n; ++i) {
        const auto s = mat_vec(code.hx, unit(code.n, i));
        const auto bp = dec.bp_decode(s, 0.05);
        ASSERT_TRUE(bp.bp_converged);
        EXPECT_EQ(osd_postprocess(code.hx, s, bp.soft, 0, OsdWeighting::soft), bp.estimate) << i;
    }
}

TEST(Osd, TieBreakPrefersEarlierCandidate) {
    BitMatrix h(1, 2);
    h.set(0, 0);
    h.set(0, 1);
    BitVector s(1);
    s.set(0);
    const auto est = osd_postprocess(h, s, {2.0, 2.0}, 2, OsdWeighting::soft);
    EXPECT_EQ(est.count(), 1U);
    EXPECT_TRUE(est.get(0));
    // The less reliable column wins when the soft values differ.
    const auto est2 = osd_postprocess(h, s, {2.0, -1.0}, 2, OsdWeighting::soft);
    EXPECT_TRUE(est2.get(1));
    EXPECT_FALSE(est2.get(0));
}

TEST(Osd, HigherOrderFindsLowerCost) {
    // Each order searches a superset of the previous candidates, so the chosen cost cannot rise.
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        const auto h = oracle::random_matrix(6, 12, 0.4, rng);
        const auto e = oracle::random_vector(12, rng);
        const auto s = mat_vec(h, e);
        std::vector<double> soft(12);
        std::uniform_real_distribution<double> u(-2.0, 5.0);
        for (auto& x : soft) x = u(rng);
        const auto cost = [&](const BitVector& v) {
            double c = 0.0;
            for (std::size_t i : v.support()) c += soft[i];
            return c;
        };
        double prev = INFINITY;
        for (std::size_t order : {0U, 1U, 3U, 6U}) {
            const auto est = osd_postprocess(h, s, soft, order, OsdWeighting::soft);
            EXPECT_EQ(mat_vec(h, est), s);
            EXPECT_LE(cost(est), prev + 1e-12);
            prev = cost(est);
        }
        // Full-order search over all non-pivot columns is an exact minimum over the coset.
        double best = INFINITY;
        for (std::uint32_t mask = 0; mask < (1U << 12); ++mask) {
            BitVector v(12);
            for (std::size_t i = 0; i < 12; ++i)
                if ((mask >> i) & 1U) v.set(i);
            if (mat_vec(h, v) == s) best = std::min(best, cost(v));
        }
        const auto full = osd_postprocess(h, s, soft, 12, OsdWeighting::soft);
        EXPECT_NEAR(cost(full), best, 1e-9);
    }
}

TEST(Osd, InconsistentSyndrome) {
    BitMatrix h(2, 2);
    h.set(0, 0);
    h.set(0, 1);
    h.set(1, 0);
    h.set(1, 1);
    BitVector s(2);
    s.set(0);
    EXPECT_THROW(osd_postprocess(h, s, {1.0, 1.0}, 0, OsdWeighting::soft), DecodeFailure);
    EXPECT_THROW(osd_postprocess(h, s, {1.0}, 0, OsdWeighting::soft), ValidationError);
}

TEST(Decoder, SyndromeAlwaysMatched) {
    const auto& code = girth8_code();
    DecoderConfig cfg;
    cfg.max_iterations = 30;
    CssDecoder dec(code, cfg);
    std::size_t osd_calls = 0;
    for (std::uint64_t t = 0; t < 400; ++t) {
        const auto err = sample(code.n, 0.1, RngStream{3, t});
        const auto sx = mat_vec(code.hx, err.ez);
        const auto sz = mat_vec(code.hz, err.ex);
        const auto res = dec.decode(sx, sz, 0.1);
        ASSERT_EQ(mat_vec(code.hx, res.est_ez), sx);
        ASSERT_EQ(mat_vec(code.hz, res.est_ex), sz);
        osd_calls += res.x_component.osd_invoked + res.z_component.osd_invoked;
    }
    EXPECT_GT(osd_calls, 0U);
}

TEST(Decoder, SinglePauliErrors) {
    const auto& code = girth8_code();
    CssDecoder dec(code, {});
    const LogicalChecker checker(code);
    for (std::size_t i = 0; i < code.n; ++i) {
        for (int kind = 0; kind < 3; ++kind) {  // X, Y, Z
            BitVector ex(code.n), ez(code.n);
            if (kind <= 1) ex.set(i);
            if (kind >= 1) ez.set(i);
            const auto res = dec.decode(mat_vec(code.hx, ez), mat_vec(code.hz, ex), 0.05);
            EXPECT_EQ(res.est_ex, ex) << i << ' ' << kind;
            EXPECT_EQ(res.est_ez, ez) << i << ' ' << kind;
            EXPECT_FALSE(checker.check(res.est_ex ^ ex, res.est_ez ^ ez).any());
        }
    }
}

TEST(Decoder, ComponentSymmetryAgainstMirror) {
    const auto& code = girth8_code();
    GeneratorSpec swapped = code.provenance;
    std::swap(swapped.setA, swapped.setB);
    const GroupIndex index(5);
    const auto mirror = assemble_code(index, swapped);
    const std::size_t g = index.size();
    const auto inv = [&](std::size_t i) { return index.position(inverse(index.at(i))); };
    const auto col = [&](std::size_t c) { return c < g ? inv(c) : g + inv(c - g); };

    BpOsdDecoder on_hz(code.hz, {});
    BpOsdDecoder on_mirror_hx(mirror.hx, {});
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> pick(0, code.n - 1);
    for (int t = 0; t < 60; ++t) {
        BitVector e(code.n), em(code.n);
        for (int w = 0; w < 2; ++w) {
            const std::size_t i = pick(rng);
            e.flip(i);
            em.flip(col(i));
        }
        const auto a = on_hz.decode(mat_vec(code.hz, e), 0.05);
        const auto b = on_mirror_hx.decode(mat_vec(mirror.hx, em), 0.05);
        EXPECT_EQ(a.bp_converged, b.bp_converged);
        for (std::size_t i = 0; i < code.n; ++i) EXPECT_EQ(a.estimate.get(i), b.estimate.get(col(i)));
    }
}

TEST(Logical, Verdicts) {
    const auto& code = girth8_code();
    ASSERT_GT(code.k(), 0U);
    const LogicalChecker checker(code);
    const BitVector zero(code.n);
    EXPECT_FALSE(checker.check(zero, zero).any());
    EXPECT_FALSE(is_logical_failure(code, zero, zero));

    EXPECT_FALSE(checker.check(zero, code.hz.row(3)).any());
    EXPECT_FALSE(checker.check(code.hx.row(5), zero).any());

    // A kernel vector of hx outside rowspace(hz) is a Z logical.
    std::optional<BitVector> logical;
    for (const auto& v : kernel_basis(code.hx))
        if (!in_rowspace(code.hz, v)) {
            logical = v;
            break;
        }
    ASSERT_TRUE(logical);
    const auto verdict = checker.check(zero, *logical);
    EXPECT_TRUE(verdict.z_failure);
    EXPECT_FALSE(verdict.x_failure);
    EXPECT_TRUE(is_logical_failure(code, zero, *logical));

    EXPECT_THROW(checker.check(unit(code.n, 0), zero), ConsistencyError);
    EXPECT_THROW(is_logical_failure(code, zero, unit(code.n, 0)), ConsistencyError);
}

TEST(Logical, CheckerAgreesWithRankTest) {
    const auto& code = girth8_code();
    const LogicalChecker checker(code);
    const auto kz = kernel_basis(code.hz);
    const auto kx = kernel_basis(code.hx);
    std::mt19937_64 rng(21);
    std::bernoulli_distribution coin(0.5);
    for (int t = 0; t < 40; ++t) {
        BitVector ex(code.n), ez(code.n);
        for (const auto& v : kz)
            if (coin(rng)) ex ^= v;
        for (const auto& v : kx)
            if (coin(rng)) ez ^= v;
        EXPECT_EQ(checker.check(ex, ez).any(), is_logical_failure(code, ex, ez));
    }
}

TEST(Decoder, HigherOsdOrderDoesNotHurt) {
    const auto& code = girth8_code();
    DecoderConfig high;
    DecoderConfig low;
    low.osd_order = 0;
    CssDecoder dec_high(code, high), dec_low(code, low);
    const LogicalChecker checker(code);
    std::size_t fail_high = 0, fail_low = 0;
    for (std::uint64_t t = 0; t < 2000; ++t) {
        fail_high += run_trial(code, dec_high, checker, 0.06, 77, t).failure;
        fail_low += run_trial(code, dec_low, checker, 0.06, 77, t).failure;
    }
    EXPECT_LE(fail_high, fail_low);
    std::cout << "failures: order 10 = " << fail_high << ", order 0 = " << fail_low << '\n';
}
