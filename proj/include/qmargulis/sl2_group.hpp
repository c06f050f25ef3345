#pragma once

// Exact arithmetic in SL(2,p), the 2x2 matrices of determinant 1 over Z_p.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"

namespace qmargulis {

inline bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline std::int64_t mod_floor(std::int64_t x, std::int64_t p) {
    const std::int64_t r = x % p;
    return r < 0 ? r + p : r;
}

/// Row-major [[a,b],[c,d]] with canonical residues in [0,p).
class GroupElement {
public:
    GroupElement() = default;

    /// Reduces the entries mod p and checks the determinant.
    static GroupElement make(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, std::uint32_t p) {
        if (p < 2) throw ValidationError("GroupElement: modulus must be at least 2");
        GroupElement g;
        g.p_ = p;
        g.e_ = {static_cast<std::uint32_t>(mod_floor(a, p)), static_cast<std::uint32_t>(mod_floor(b, p)),
                static_cast<std::uint32_t>(mod_floor(c, p)), static_cast<std::uint32_t>(mod_floor(d, p))};
        const std::int64_t det = std::int64_t{g.e_[0]} * g.e_[3] - std::int64_t{g.e_[1]} * g.e_[2];
        if (mod_floor(det, p) != 1 % static_cast<std::int64_t>(p))
            throw ValidationError("GroupElement: determinant is not 1 mod " + std::to_string(p));
        return g;
    }

    static GroupElement identity(std::uint32_t p) { return make(1, 0, 0, 1, p); }

    std::uint32_t modulus() const { return p_; }
    const std::array<std::uint32_t, 4>& entries() const { return e_; }
    std::uint32_t operator[](std::size_t i) const { return e_[i]; }

    bool is_identity() const { return e_ == std::array<std::uint32_t, 4>{1 % p_, 0, 0, 1 % p_}; }

    friend bool operator==(const GroupElement&, const GroupElement&) = default;
    friend auto operator<=>(const GroupElement&, const GroupElement&) = default;

    std::string to_string() const {
        return "[[" + std::to_string(e_[0]) + "," + std::to_string(e_[1]) + "],[" + std::to_string(e_[2]) + "," +
               std::to_string(e_[3]) + "]]";
    }

private:
    std::uint32_t p_ = 0;
    std::array<std::uint32_t, 4> e_{};
};

inline GroupElement mul(const GroupElement& x, const GroupElement& y) {
    if (x.modulus() != y.modulus()) throw ValidationError("mul: modulus mismatch");
    const std::int64_t p = x.modulus();
    const auto& a = x.entries();
    const auto& b = y.entries();
    return GroupElement::make((std::int64_t{a[0]} * b[0] + std::int64_t{a[1]} * b[2]) % p,
                              (std::int64_t{a[0]} * b[1] + std::int64_t{a[1]} * b[3]) % p,
                              (std::int64_t{a[2]} * b[0] + std::int64_t{a[3]} * b[2]) % p,
                              (std::int64_t{a[2]} * b[1] + std::int64_t{a[3]} * b[3]) % p, x.modulus());
}

inline GroupElement inverse(const GroupElement& x) {
    const auto& e = x.entries();
    return GroupElement::make(e[3], -std::int64_t{e[1]}, -std::int64_t{e[2]}, e[0], x.modulus());
}

struct GroupOptions {
    std::uint32_t max_prime = 23;
};

inline std::size_t group_order(std::uint64_t p) { return static_cast<std::size_t>((p * p - 1) * p); }

/// All elements of SL(2,p) in lexicographic order of (a,b,c,d), with a dense position map.
class GroupIndex {
public:
    GroupIndex(std::uint32_t p, const GroupOptions& options = {}) : p_(p) {
        if (!is_prime(p)) throw ValidationError("enumerate_group: " + std::to_string(p) + " is not prime");
        if (p > options.max_prime)
            throw ResourceError("enumerate_group: p=" + std::to_string(p) + " exceeds the configured cap p <= " +
                                std::to_string(options.max_prime));
        const std::size_t p4 = std::size_t{p} * p * p * p;
        position_.assign(p4, -1);
        elements_.reserve(group_order(p));
        for (std::uint32_t a = 0; a < p; ++a)
            for (std::uint32_t b = 0; b < p; ++b)
                for (std::uint32_t c = 0; c < p; ++c)
                    for (std::uint32_t d = 0; d < p; ++d) {
                        if ((std::int64_t{a} * d - std::int64_t{b} * c - 1) % static_cast<std::int64_t>(p) != 0)
                            continue;
                        position_[key(a, b, c, d)] = static_cast<std::int32_t>(elements_.size());
                        elements_.push_back(GroupElement::make(a, b, c, d, p));
                    }
    }

    std::uint32_t prime() const { return p_; }
    std::size_t size() const { return elements_.size(); }
    const std::vector<GroupElement>& elements() const { return elements_; }
    const GroupElement& at(std::size_t i) const { return elements_.at(i); }

    std::size_t position(const GroupElement& g) const {
        if (g.modulus() != p_) throw ValidationError("GroupIndex::position: modulus mismatch");
        const auto& e = g.entries();
        return static_cast<std::size_t>(position_[key(e[0], e[1], e[2], e[3])]);
    }

private:
    std::size_t key(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) const {
        return ((std::size_t{a} * p_ + b) * p_ + c) * p_ + d;
    }

    std::uint32_t p_;
    std::vector<GroupElement> elements_;
    std::vector<std::int32_t> position_;
};

inline GroupIndex enumerate_group(std::uint32_t p, const GroupOptions& options = {}) { return GroupIndex(p, options); }

} // namespace qmargulis
