#pragma once

// Margulis-style generator sets: conjugates C [[1,eta],[0,1]] C^-1 of a unipotent element by
// integer matrices C with first column (m,q), reduced into SL(2,p) and split into a
// left-acting set A and a right-acting set B.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"
#include "sl2_group.hpp"

namespace qmargulis {

struct CoprimePair {
    std::int64_t m = 0;
    std::int64_t q = 0;
    friend bool operator==(const CoprimePair&, const CoprimePair&) = default;
    friend auto operator<=>(const CoprimePair&, const CoprimePair&) = default;
};

/// C = [[m,a],[q,b]] in SL(2,Z), row-major.
struct IntegerLift {
    std::array<std::int64_t, 4> c{};
    std::int64_t eta = 0;

    std::int64_t m() const { return c[0]; }
    std::int64_t a() const { return c[1]; }
    std::int64_t q() const { return c[2]; }
    std::int64_t b() const { return c[3]; }
    friend bool operator==(const IntegerLift&, const IntegerLift&) = default;
};

class LiftError : public ExhaustionError {
public:
    using ExhaustionError::ExhaustionError;
};

/// All (m,q) with 0 <= m,q <= floor(eta/2), gcd(m,q) = 1, lexicographic.
inline std::vector<CoprimePair> enumerate_coprime_pairs(std::int64_t eta) {
    if (eta < 2) throw ValidationError("enumerate_coprime_pairs: eta must be at least 2");
    std::vector<CoprimePair> out;
    const std::int64_t h = eta / 2;
    for (std::int64_t m = 0; m <= h; ++m)
        for (std::int64_t q = 0; q <= h; ++q)
            if (std::gcd(m, q) == 1) out.push_back({m, q});
    return out;
}

inline void validate_pair(const CoprimePair& pair, std::int64_t eta) {
    if (pair.m < 0 || pair.q < 0 || std::gcd(pair.m, pair.q) != 1)
        throw ValidationError("pair (" + std::to_string(pair.m) + "," + std::to_string(pair.q) +
                              ") is not a non-negative coprime pair");
    if (2 * pair.m > eta || 2 * pair.q > eta)
        throw ValidationError("pair (" + std::to_string(pair.m) + "," + std::to_string(pair.q) +
                              ") exceeds eta/2 for eta=" + std::to_string(eta));
}

/// Completes (m,q) to C = [[m,a],[q,b]] with m*b - a*q = 1 and |a|,|b| < eta/2.
/// Ties: smallest |a|, then the non-negative a; then smallest |b|.
inline IntegerLift lift_pair(const CoprimePair& pair, std::int64_t eta) {
    validate_pair(pair, eta);
    const auto fits = [eta](std::int64_t v) { return 2 * std::llabs(v) < eta; };
    for (std::int64_t mag = 0; fits(mag); ++mag) {
        for (std::int64_t a : {mag, -mag}) {
            if (mag == 0 && a < 0) continue;
            const std::int64_t rhs = 1 + a * pair.q;  // m*b = 1 + a*q
            if (pair.m == 0) {
                if (rhs != 0) continue;
                // b is unconstrained; pick the smallest in magnitude.
                return IntegerLift{{pair.m, a, pair.q, 0}, eta};
            }
            if (rhs % pair.m != 0) continue;
            const std::int64_t b = rhs / pair.m;
            if (fits(b)) return IntegerLift{{pair.m, a, pair.q, b}, eta};
        }
    }
    throw LiftError("lift_pair: no completion of (" + std::to_string(pair.m) + "," + std::to_string(pair.q) +
                    ") with |a|,|b| < " + std::to_string(eta) + "/2");
}

/// g = C [[1,eta],[0,1]] C^-1 over the integers. Always congruent to I mod eta.
inline std::array<std::int64_t, 4> integer_generator(const IntegerLift& lift) {
    const auto& c = lift.c;
    const std::int64_t det = c[0] * c[3] - c[1] * c[2];
    if (det != 1) throw ValidationError("integer_generator: lift does not have determinant 1");
    const std::array<std::int64_t, 4> adj{c[3], -c[1], -c[2], c[0]};
    const std::array<std::int64_t, 4> t{1, lift.eta, 0, 1};
    const auto mul2 = [](const std::array<std::int64_t, 4>& x, const std::array<std::int64_t, 4>& y) {
        return std::array<std::int64_t, 4>{x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
                                           x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
    };
    auto g = mul2(mul2(c, t), adj);
    const std::array<std::int64_t, 4> id{1, 0, 0, 1};
    for (std::size_t i = 0; i < 4; ++i)
        if ((g[i] - id[i]) % lift.eta != 0) throw ConsistencyError("integer_generator: result not congruent to I mod eta");
    return g;
}

/// Reduction of the integer generator into SL(2,p). May be the identity (when eta = 0 mod p);
/// the screen rejects those.
inline GroupElement make_generator(const IntegerLift& lift, std::uint32_t p) {
    const auto g = integer_generator(lift);
    return GroupElement::make(g[0], g[1], g[2], g[3], p);
}

struct MargulisGenerator {
    CoprimePair pair;
    IntegerLift lift;
    GroupElement element;
};

struct GeneratorSpec {
    std::uint32_t p = 0;
    std::int64_t eta = 0;
    /// Pairs and lifts aligned with setA followed by setB.
    std::vector<CoprimePair> pairs;
    std::vector<IntegerLift> lifts;
    std::vector<GroupElement> setA;
    std::vector<GroupElement> setB;
    /// Inverse collisions admitted when the screen is relaxed.
    std::vector<std::string> collisions;

    std::size_t total() const { return setA.size() + setB.size(); }
};

/// Diagnostic only: the classical sufficiency bound eta < sqrt(7 r).
inline double eta_bound(std::size_t r) { return std::sqrt(7.0 * static_cast<double>(r)); }

struct PairSelection {
    enum class Kind { lexicographic, seeded, explicit_list };
    Kind kind = Kind::lexicographic;
    std::uint64_t seed = 0;
    std::vector<CoprimePair> pairs;

    static PairSelection lexicographic() { return {}; }
    static PairSelection seeded(std::uint64_t s) { return {Kind::seeded, s, {}}; }
    static PairSelection explicit_list(std::vector<CoprimePair> v) { return {Kind::explicit_list, 0, std::move(v)}; }
};

struct ScreenOptions {
    bool allow_inverse_collisions = false;
};

struct GeneratorRequest {
    std::uint32_t p = 0;
    std::size_t size_a = 0;
    std::size_t size_b = 0;
    std::optional<std::int64_t> eta;  // nullopt: auto
    PairSelection selection;
    ScreenOptions screen;
    std::int64_t eta_max = 0;  // 0: 8p + 16
};

/// Greedy screen in candidate order: keep generators that are non-identity, distinct, and not
/// the inverse of an already kept one (or of themselves). Stops after `needed` are kept.
inline std::vector<MargulisGenerator> screen_generators(const std::vector<MargulisGenerator>& candidates,
                                                        std::size_t needed, const ScreenOptions& options,
                                                        std::vector<std::string>* collisions = nullptr) {
    std::vector<MargulisGenerator> kept;
    for (const auto& cand : candidates) {
        if (kept.size() == needed) break;
        const GroupElement& g = cand.element;
        if (g.is_identity()) continue;
        const GroupElement g_inv = inverse(g);
        bool duplicate = false;
        bool inverse_hit = (g_inv == g);
        for (const auto& k : kept) {
            if (k.element == g) duplicate = true;
            if (k.element == g_inv) inverse_hit = true;
        }
        if (duplicate) continue;
        if (inverse_hit) {
            if (!options.allow_inverse_collisions) continue;
            if (collisions) collisions->push_back(g.to_string() + " is the inverse of a kept generator");
        }
        kept.push_back(cand);
    }
    return kept;
}

namespace detail {

inline std::vector<MargulisGenerator> lift_all(const std::vector<CoprimePair>& pairs, std::int64_t eta, std::uint32_t p) {
    std::vector<MargulisGenerator> out;
    for (const auto& pair : pairs) {
        try {
            IntegerLift lift = lift_pair(pair, eta);
            out.push_back({pair, lift, make_generator(lift, p)});
        } catch (const LiftError&) {
            // pair dropped
        }
    }
    return out;
}

inline std::vector<CoprimePair> ordered_pairs(const PairSelection& sel, std::int64_t eta) {
    if (sel.kind == PairSelection::Kind::explicit_list) return sel.pairs;
    auto pairs = enumerate_coprime_pairs(eta);
    if (sel.kind == PairSelection::Kind::seeded) {
        auto eng = RngStream{sel.seed, static_cast<std::uint64_t>(eta)}.engine();
        portable_shuffle(pairs, eng);
    }
    return pairs;
}

inline bool explicit_pairs_fit(const std::vector<CoprimePair>& pairs, std::int64_t eta) {
    return std::all_of(pairs.begin(), pairs.end(),
                       [eta](const CoprimePair& pr) { return 2 * pr.m <= eta && 2 * pr.q <= eta; });
}

inline GeneratorSpec assemble_spec(const GeneratorRequest& req, std::int64_t eta, const std::vector<MargulisGenerator>& kept,
                                   std::vector<std::string> collisions) {
    GeneratorSpec spec;
    spec.p = req.p;
    spec.eta = eta;
    spec.collisions = std::move(collisions);
    for (std::size_t i = 0; i < kept.size(); ++i) {
        spec.pairs.push_back(kept[i].pair);
        spec.lifts.push_back(kept[i].lift);
        (i < req.size_a ? spec.setA : spec.setB).push_back(kept[i].element);
    }
    return spec;
}

} // namespace detail

inline std::int64_t default_eta_max(std::uint32_t p) { return 8 * static_cast<std::int64_t>(p) + 16; }

/// Builds and screens a generator set. With eta = auto, picks the smallest eta that has at least
/// r+1 coprime pairs (for explicit selections: that admits every listed pair) and yields r
/// generators passing the screen.
inline GeneratorSpec build_generating_sets(const GeneratorRequest& req) {
    if (req.size_a < 1 || req.size_b < 1) throw ValidationError("build_generating_sets: set sizes must be at least 1");
    if (!is_prime(req.p)) throw ValidationError("build_generating_sets: " + std::to_string(req.p) + " is not prime");
    const std::size_t r = req.size_a + req.size_b;
    const bool is_explicit = req.selection.kind == PairSelection::Kind::explicit_list;
    if (is_explicit) {
        auto sorted = req.selection.pairs;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ValidationError("build_generating_sets: explicit pair list contains duplicates");
        if (req.selection.pairs.size() < r)
            throw ExhaustionError("build_generating_sets: explicit list has " + std::to_string(req.selection.pairs.size()) +
                                  " pairs, " + std::to_string(r) + " generators requested");
    }

    const auto attempt = [&](std::int64_t eta) -> std::optional<GeneratorSpec> {
        if (is_explicit) {
            for (const auto& pr : req.selection.pairs) validate_pair(pr, eta);
        }
        const auto candidates = detail::lift_all(detail::ordered_pairs(req.selection, eta), eta, req.p);
        std::vector<std::string> collisions;
        const auto kept = screen_generators(candidates, r, req.screen, &collisions);
        if (kept.size() < r) return std::nullopt;
        return detail::assemble_spec(req, eta, kept, std::move(collisions));
    };

    if (req.eta) {
        if (*req.eta < 2) throw ValidationError("build_generating_sets: eta must be at least 2");
        if (auto spec = attempt(*req.eta)) return *spec;
        throw ExhaustionError("build_generating_sets: eta=" + std::to_string(*req.eta) + " yields fewer than " +
                              std::to_string(r) + " valid generators mod " + std::to_string(req.p));
    }

    const std::int64_t eta_max = req.eta_max > 0 ? req.eta_max : default_eta_max(req.p);
    for (std::int64_t eta = 2; eta <= eta_max; ++eta) {
        if (is_explicit) {
            if (!detail::explicit_pairs_fit(req.selection.pairs, eta)) continue;
        } else if (enumerate_coprime_pairs(eta).size() < r + 1) {
            continue;
        }
        if (auto spec = attempt(eta)) return *spec;
    }
    throw ExhaustionError("build_generating_sets: no eta <= " + std::to_string(eta_max) + " yields " + std::to_string(r) +
                          " valid generators mod " + std::to_string(req.p));
}

} // namespace qmargulis
