#pragma once

#include <cstddef>
#include <string>

#include "errors.hpp"
#include "gf2.hpp"
#include "rng.hpp"

namespace qmargulis {

/// X and Z components of an n-qubit Pauli error; qubit i carries Y iff both bits are set.
struct PauliError {
    BitVector ex;
    BitVector ez;
};

inline void validate_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(std::string(what) + ": probability must lie in [0,1]");
}

/// Marginal flip probability of each CSS component: X or Y flips ex, Z or Y flips ez.
inline double component_prior(double p_phys) {
    validate_probability(p_phys, "component_prior");
    return 2.0 * p_phys / 3.0;
}

/// i.i.d. depolarizing noise: per qubit, X, Y, Z each with probability p/3.
inline PauliError sample(std::size_t n, double p_phys, const RngStream& rng) {
    validate_probability(p_phys, "sample");
    PauliError e{BitVector(n), BitVector(n)};
    if (p_phys == 0.0) return e;
    auto eng = rng.engine();
    const double third = p_phys / 3.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = uniform01(eng);
        if (u >= p_phys) continue;
        if (u < third) {
            e.ex.set(i);
        } else if (u < 2.0 * third) {
            e.ex.set(i);
            e.ez.set(i);
        } else {
            e.ez.set(i);
        }
    }
    return e;
}

} // namespace qmargulis
