#pragma once

// Two-block CSS codes on the left-right Cayley complex of SL(2,p):
//   hx = [L_A | R_B],  hz = [R_B^T | L_A^T]
// where L_A[g][a g] = 1 for a in A (left action) and R_B[g][g b] = 1 for b in B (right action).
// Columns [0,|G|) are the V0 qubits, [|G|, 2|G|) the V1 qubits.

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "gf2.hpp"
#include "margulis_generators.hpp"
#include "sl2_group.hpp"
#include "tanner_metrics.hpp"

namespace qmargulis {

namespace detail {

inline void reject_duplicates(const std::vector<GroupElement>& set, const char* what) {
    auto sorted = set;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ValidationError(std::string(what) + ": duplicate generators would create multi-edges");
}

} // namespace detail

inline BitMatrix build_left_biadjacency(const GroupIndex& index, const std::vector<GroupElement>& generators) {
    detail::reject_duplicates(generators, "build_left_biadjacency");
    BitMatrix m(index.size(), index.size());
    for (std::size_t g = 0; g < index.size(); ++g)
        for (const auto& a : generators) m.set(g, index.position(mul(a, index.at(g))));
    return m;
}

inline BitMatrix build_right_biadjacency(const GroupIndex& index, const std::vector<GroupElement>& generators) {
    detail::reject_duplicates(generators, "build_right_biadjacency");
    BitMatrix m(index.size(), index.size());
    for (std::size_t g = 0; g < index.size(); ++g)
        for (const auto& b : generators) m.set(g, index.position(mul(index.at(g), b)));
    return m;
}

/// True iff hx hz^T = 0 over GF(2).
inline bool css_check(const BitMatrix& hx, const BitMatrix& hz) {
    if (hx.cols() != hz.cols()) throw ValidationError("css_check: column counts differ");
    for (std::size_t i = 0; i < hx.rows(); ++i) {
        const auto a = hx.row_words(i);
        for (std::size_t j = 0; j < hz.rows(); ++j) {
            const auto b = hz.row_words(j);
            Word acc = 0;
            for (std::size_t w = 0; w < a.size(); ++w) acc ^= a[w] & b[w];
            if (std::popcount(acc) & 1) return false;
        }
    }
    return true;
}

struct Dimension {
    std::size_t k = 0;
    std::size_t rank_x = 0;
    std::size_t rank_z = 0;
    std::size_t redundant_x = 0;  // rows(hx) - rank(hx)
    std::size_t redundant_z = 0;
};

inline Dimension compute_dimension(const BitMatrix& hx, const BitMatrix& hz) {
    if (hx.cols() != hz.cols()) throw ValidationError("compute_dimension: column counts differ");
    Dimension d;
    d.rank_x = rank(hx);
    d.rank_z = rank(hz);
    if (d.rank_x + d.rank_z > hx.cols())
        throw ConsistencyError("compute_dimension: ranks exceed blocklength (matrices not orthogonal?)");
    d.k = hx.cols() - d.rank_x - d.rank_z;
    d.redundant_x = hx.rows() - d.rank_x;
    d.redundant_z = hz.rows() - d.rank_z;
    return d;
}

struct CssCode {
    BitMatrix hx;
    BitMatrix hz;
    std::size_t n = 0;
    Dimension dim;
    Girth girth_x;
    Girth girth_z;
    DegreeProfile profile_x;
    DegreeProfile profile_z;
    GeneratorSpec provenance;

    std::size_t k() const { return dim.k; }
    Girth girth() const { return girth_min(girth_x, girth_z); }
    std::size_t check_degree() const { return profile_x.max_row_weight(); }

    /// Name in the P#G#D# style, e.g. "P5G8D5".
    std::string name() const {
        return "P" + std::to_string(provenance.p) + "G" + girth_to_string(girth()) + "D" + std::to_string(check_degree());
    }
};

inline CssCode assemble_code(const GroupIndex& index, const GeneratorSpec& spec) {
    if (spec.p != index.prime()) throw ValidationError("assemble_code: spec modulus differs from group");
    if (spec.setA.empty() || spec.setB.empty()) throw ValidationError("assemble_code: generator sets must be non-empty");
    const BitMatrix a = build_left_biadjacency(index, spec.setA);
    const BitMatrix b = build_right_biadjacency(index, spec.setB);

    CssCode code;
    code.provenance = spec;
    code.hx = BitMatrix::hconcat(a, b);
    code.hz = BitMatrix::hconcat(b.transpose(), a.transpose());
    code.n = 2 * index.size();
    if (!css_check(code.hx, code.hz))
        throw ConsistencyError("assemble_code: hx hz^T != 0; left and right actions failed to commute");

    code.profile_x = degree_profile(code.hx);
    code.profile_z = degree_profile(code.hz);
    const std::size_t r = spec.setA.size() + spec.setB.size();
    for (const auto* prof : {&code.profile_x, &code.profile_z})
        if (prof->row_weights.size() != 1 || prof->row_weights.begin()->first != r)
            throw ConsistencyError("assemble_code: check degree differs from |A|+|B|");
    // V0 columns: |A| in hx, |B| in hz; V1 the other way round.
    const auto wx = column_weights(code.hx);
    const auto wz = column_weights(code.hz);
    const std::size_t na = spec.setA.size();
    const std::size_t nb = spec.setB.size();
    for (std::size_t c = 0; c < index.size(); ++c) {
        const std::size_t v1 = c + index.size();
        if (wx[c] != na || wz[c] != nb || wx[v1] != nb || wz[v1] != na)
            throw ConsistencyError("assemble_code: column weights violate the V0/V1 block rule");
    }

    code.dim = compute_dimension(code.hx, code.hz);
    code.girth_x = girth(code.hx);
    code.girth_z = girth(code.hz);
    return code;
}

} // namespace qmargulis
