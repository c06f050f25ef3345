#pragma once

// Search over eta, generator subsets and A/B partitions for a code with high girth, then high k.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "code_builder.hpp"
#include "errors.hpp"
#include "margulis_generators.hpp"
#include "rng.hpp"
#include "sl2_group.hpp"

namespace qmargulis {

struct SearchOptions {
    std::uint32_t p = 0;
    std::size_t size_a = 0;
    std::size_t size_b = 0;
    std::size_t target_girth = 8;
    std::size_t budget = 10000;
    /// 0 keeps the screened pool in lexicographic pair order; otherwise the pool is shuffled per eta.
    std::uint64_t seed = 0;
    /// Return the first candidate that reaches the target girth.
    bool stop_at_target = true;
    std::int64_t eta_max = 0;  // 0: 8p + 16
    ScreenOptions screen;
};

struct CandidateRecord {
    std::size_t order = 0;
    std::int64_t eta = 0;
    std::vector<CoprimePair> pairs_a;
    std::vector<CoprimePair> pairs_b;
    Girth girth_x;
    Girth girth_z;
    std::size_t k = 0;
};

struct SearchResult {
    CssCode best;
    std::size_t best_order = 0;
    bool reached = false;
    std::size_t examined = 0;
    double eta_bound = 0.0;
    std::vector<CandidateRecord> log;
};

namespace detail {

/// Advances `idx` (strictly increasing, values < n) to the next combination; false when done.
inline bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
    const std::size_t k = idx.size();
    for (std::size_t i = k; i-- > 0;) {
        if (idx[i] < n - k + i) {
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

inline std::vector<std::size_t> first_combination(std::size_t k) {
    std::vector<std::size_t> v(k);
    for (std::size_t i = 0; i < k; ++i) v[i] = i;
    return v;
}

/// (girth capped at the target, k). Larger is better; girth beyond the target earns nothing over k.
inline std::pair<std::size_t, std::size_t> rank_key(const Girth& g, std::size_t k, std::size_t target) {
    return {std::min(g ? *g : std::numeric_limits<std::size_t>::max(), target), k};
}

} // namespace detail

inline std::int64_t auto_eta_start(std::size_t r) {
    std::int64_t eta = 2;
    while (enumerate_coprime_pairs(eta).size() < r + 1) ++eta;
    return eta;
}

inline SearchResult search_code(const SearchOptions& opt, const GroupOptions& group_options = {}) {
    if (opt.budget < 1) throw ValidationError("search_code: budget must be at least 1");
    if (opt.size_a < 1 || opt.size_b < 1) throw ValidationError("search_code: set sizes must be at least 1");
    const GroupIndex index(opt.p, group_options);
    const std::size_t r = opt.size_a + opt.size_b;
    const std::int64_t eta_max = opt.eta_max > 0 ? opt.eta_max : default_eta_max(opt.p);

    SearchResult result;
    result.eta_bound = eta_bound(r);
    std::optional<std::pair<std::size_t, std::size_t>> best_key;
    std::set<std::pair<std::vector<GroupElement>, std::vector<GroupElement>>> seen;

    for (std::int64_t eta = auto_eta_start(r); eta <= eta_max; ++eta) {
        auto pool = screen_generators(detail::lift_all(enumerate_coprime_pairs(eta), eta, opt.p),
                                      std::numeric_limits<std::size_t>::max(), opt.screen);
        if (pool.size() < r) continue;
        if (opt.seed != 0) {
            auto eng = RngStream{opt.seed, static_cast<std::uint64_t>(eta)}.engine();
            portable_shuffle(pool, eng);
        }

        auto subset = detail::first_combination(r);
        do {
            auto split = detail::first_combination(opt.size_a);
            do {
                std::vector<bool> in_a(r, false);
                for (std::size_t i : split) in_a[i] = true;
                std::vector<MargulisGenerator> ordered;
                for (std::size_t i = 0; i < r; ++i)
                    if (in_a[i]) ordered.push_back(pool[subset[i]]);
                for (std::size_t i = 0; i < r; ++i)
                    if (!in_a[i]) ordered.push_back(pool[subset[i]]);

                GeneratorRequest req{opt.p, opt.size_a, opt.size_b, eta, {}, opt.screen, 0};
                GeneratorSpec spec = detail::assemble_spec(req, eta, ordered, {});
                auto key_a = spec.setA;
                auto key_b = spec.setB;
                std::sort(key_a.begin(), key_a.end());
                std::sort(key_b.begin(), key_b.end());
                if (!seen.emplace(std::move(key_a), std::move(key_b)).second) continue;

                CssCode code = assemble_code(index, spec);
                CandidateRecord rec;
                rec.order = result.examined++;
                rec.eta = eta;
                rec.pairs_a.assign(spec.pairs.begin(), spec.pairs.begin() + static_cast<std::ptrdiff_t>(opt.size_a));
                rec.pairs_b.assign(spec.pairs.begin() + static_cast<std::ptrdiff_t>(opt.size_a), spec.pairs.end());
                rec.girth_x = code.girth_x;
                rec.girth_z = code.girth_z;
                rec.k = code.k();
                result.log.push_back(rec);

                const Girth g = code.girth();
                const auto key = detail::rank_key(g, code.k(), opt.target_girth);
                if (!best_key || key > *best_key) {
                    best_key = key;
                    result.best = std::move(code);
                    result.best_order = rec.order;
                }
                const bool hit = !g || *g >= opt.target_girth;
                result.reached = result.reached || hit;
                if ((hit && opt.stop_at_target) || result.examined >= opt.budget) return result;
            } while (detail::next_combination(split, r));
        } while (detail::next_combination(subset, pool.size()));
    }
    if (result.examined == 0)
        throw ExhaustionError("search_code: no eta <= " + std::to_string(eta_max) + " yields " + std::to_string(r) +
                              " valid generators mod " + std::to_string(opt.p));
    return result;
}

inline std::string format_pairs(const std::vector<CoprimePair>& pairs) {
    std::string s;
    for (const auto& pr : pairs) s += "(" + std::to_string(pr.m) + "," + std::to_string(pr.q) + ")";
    return s;
}

inline void write_search_log(std::ostream& os, const SearchResult& res) {
    os << "# eta_bound sqrt(7r) = " << res.eta_bound << " (diagnostic, not enforced)\n";
    os << "order eta pairs_A pairs_B girth_x girth_z k\n";
    for (const auto& c : res.log)
        os << c.order << ' ' << c.eta << ' ' << format_pairs(c.pairs_a) << ' ' << format_pairs(c.pairs_b) << ' '
           << girth_to_string(c.girth_x) << ' ' << girth_to_string(c.girth_z) << ' ' << c.k << '\n';
}

} // namespace qmargulis
