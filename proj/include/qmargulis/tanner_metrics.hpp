#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "gf2.hpp"

namespace qmargulis {

/// Shortest cycle length in edges; nullopt when the graph is a forest.
using Girth = std::optional<std::size_t>;

inline std::string girth_to_string(const Girth& g) { return g ? std::to_string(*g) : "inf"; }

inline Girth girth_min(const Girth& a, const Girth& b) {
    if (!a) return b;
    if (!b) return a;
    return std::min(*a, *b);
}

/// Bipartite graph of a parity-check matrix: variables are columns, checks are rows.
struct TannerGraph {
    std::size_t variables = 0;
    std::size_t checks = 0;
    std::vector<std::vector<std::size_t>> var_to_checks;
    std::vector<std::vector<std::size_t>> check_to_vars;

    explicit TannerGraph(const BitMatrix& h)
        : variables(h.cols()), checks(h.rows()), var_to_checks(h.col_supports()), check_to_vars(h.row_supports()) {}
};

/// Breadth-first search from every variable node, skipping the tree edge back to the parent.
inline Girth girth(const TannerGraph& g) {
    const std::size_t nodes = g.variables + g.checks;
    constexpr std::size_t kUnseen = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> dist(nodes, kUnseen);
    std::vector<std::size_t> parent(nodes, kUnseen);
    std::vector<std::size_t> touched;
    std::vector<std::size_t> queue;
    std::size_t best = kUnseen;

    // Nodes: variables [0, V), checks [V, V + C).
    for (std::size_t src = 0; src < g.variables; ++src) {
        for (std::size_t t : touched) dist[t] = parent[t] = kUnseen;
        touched.clear();
        queue.clear();
        dist[src] = 0;
        touched.push_back(src);
        queue.push_back(src);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::size_t u = queue[head];
            if (best != kUnseen && 2 * dist[u] + 1 >= best) break;
            const bool is_var = u < g.variables;
            const auto& nbrs = is_var ? g.var_to_checks[u] : g.check_to_vars[u - g.variables];
            for (std::size_t raw : nbrs) {
                const std::size_t w = is_var ? raw + g.variables : raw;
                if (w == parent[u]) continue;
                if (dist[w] == kUnseen) {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    touched.push_back(w);
                    queue.push_back(w);
                } else {
                    best = std::min(best, dist[u] + dist[w] + 1);
                }
            }
        }
    }
    if (best == kUnseen) return std::nullopt;
    return best;
}

inline Girth girth(const BitMatrix& h) { return girth(TannerGraph(h)); }

struct DegreeProfile {
    std::map<std::size_t, std::size_t> row_weights;  // weight -> count
    std::map<std::size_t, std::size_t> col_weights;

    /// e.g. "{2,3}" or "3".
    static std::string format_set(const std::map<std::size_t, std::size_t>& hist) {
        if (hist.size() == 1) return std::to_string(hist.begin()->first);
        std::string s = "{";
        bool first = true;
        for (const auto& [w, _] : hist) {
            if (!first) s += ",";
            s += std::to_string(w);
            first = false;
        }
        return s + "}";
    }
    std::string variable_degrees() const { return format_set(col_weights); }
    std::string check_degrees() const { return format_set(row_weights); }
    std::size_t max_row_weight() const { return row_weights.empty() ? 0 : row_weights.rbegin()->first; }
    std::size_t max_col_weight() const { return col_weights.empty() ? 0 : col_weights.rbegin()->first; }

    friend bool operator==(const DegreeProfile&, const DegreeProfile&) = default;
};

inline std::vector<std::size_t> column_weights(const BitMatrix& h) {
    std::vector<std::size_t> col(h.cols(), 0);
    for (std::size_t r = 0; r < h.rows(); ++r)
        for (std::size_t c : h.row(r).support()) ++col[c];
    return col;
}

inline DegreeProfile degree_profile(const BitMatrix& h) {
    DegreeProfile prof;
    for (std::size_t r = 0; r < h.rows(); ++r) ++prof.row_weights[h.row_weight(r)];
    for (std::size_t w : column_weights(h)) ++prof.col_weights[w];
    return prof;
}

struct GirthScalingRow {
    std::string code_id;
    std::size_t n = 0;
    std::size_t check_degree = 0;
    Girth girth;
    double growth = 0.0;  // log n / log(2 d_c)
};

struct GirthInput {
    std::string code_id;
    std::size_t n = 0;
    std::size_t check_degree = 0;
    Girth girth;
};

inline std::vector<GirthScalingRow> girth_scaling_report(const std::vector<GirthInput>& codes) {
    if (codes.size() < 2) throw ValidationError("girth_scaling_report: needs at least two codes");
    std::vector<GirthScalingRow> rows;
    for (const auto& c : codes) {
        GirthScalingRow row{c.code_id, c.n, c.check_degree, c.girth, 0.0};
        row.growth = std::log(static_cast<double>(c.n)) / std::log(2.0 * static_cast<double>(c.check_degree));
        rows.push_back(row);
    }
    return rows;
}

inline void write_scaling_text(std::ostream& os, const std::vector<GirthScalingRow>& rows) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-16s %8s %4s %6s %14s\n", "code", "n", "d_c", "girth", "log n/log 2d_c");
    os << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-16s %8zu %4zu %6s %14.4f\n", r.code_id.c_str(), r.n, r.check_degree,
                      girth_to_string(r.girth).c_str(), r.growth);
        os << buf;
    }
}

inline void write_scaling_csv(std::ostream& os, const std::vector<GirthScalingRow>& rows) {
    os << "code_id,n,d_c,girth,growth\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6f", r.growth);
        os << r.code_id << ',' << r.n << ',' << r.check_degree << ',' << girth_to_string(r.girth) << ',' << buf << '\n';
    }
}

} // namespace qmargulis
