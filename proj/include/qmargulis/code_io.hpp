#pragma once

// Code descriptors (JSON), MacKay alist and sparse coordinate matrix formats.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "code_builder.hpp"
#include "errors.hpp"
#include "gf2.hpp"
#include "margulis_generators.hpp"
#include "sl2_group.hpp"
#include "tanner_metrics.hpp"

namespace qmargulis {

inline constexpr int kDescriptorFormatVersion = 1;

/// FNV-1a, 64-bit.
class Fnv1a {
public:
    void update(const void* data, std::size_t len) {
        const auto* b = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h_ ^= b[i];
            h_ *= 0x100000001b3ULL;
        }
    }
    void update_u64(std::uint64_t v) {
        unsigned char buf[8];
        for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
        update(buf, 8);
    }
    void update(const std::string& s) { update(s.data(), s.size()); }
    std::uint64_t value() const { return h_; }
    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
        return buf;
    }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

/// Digest of the matrix pair: shapes then every set coordinate in row-major order.
inline std::string matrix_digest(const BitMatrix& hx, const BitMatrix& hz) {
    Fnv1a h;
    for (const BitMatrix* m : {&hx, &hz}) {
        h.update_u64(m->rows());
        h.update_u64(m->cols());
        for (std::size_t r = 0; r < m->rows(); ++r)
            for (std::size_t c : m->row(r).support()) {
                h.update_u64(r);
                h.update_u64(c);
            }
    }
    return h.hex();
}

namespace detail {

inline nlohmann::json histogram_json(const std::map<std::size_t, std::size_t>& hist) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [w, count] : hist) j[std::to_string(w)] = count;
    return j;
}

inline nlohmann::json profile_json(const DegreeProfile& p) {
    return {{"rows", histogram_json(p.row_weights)}, {"cols", histogram_json(p.col_weights)}};
}

inline nlohmann::json girth_json(const Girth& g) { return g ? nlohmann::json(*g) : nlohmann::json(nullptr); }

inline nlohmann::json element_json(const GroupElement& g) {
    const auto& e = g.entries();
    return nlohmann::json::array({e[0], e[1], e[2], e[3]});
}

} // namespace detail

inline nlohmann::json descriptor_json(const CssCode& code) {
    const auto& spec = code.provenance;
    nlohmann::json j;
    j["format_version"] = kDescriptorFormatVersion;
    j["p"] = spec.p;
    j["eta"] = spec.eta;
    j["pairs"] = nlohmann::json::array();
    for (const auto& pr : spec.pairs) j["pairs"].push_back({pr.m, pr.q});
    j["lifts"] = nlohmann::json::array();
    for (const auto& l : spec.lifts) j["lifts"].push_back({l.c[0], l.c[1], l.c[2], l.c[3]});
    j["A"] = nlohmann::json::array();
    for (const auto& g : spec.setA) j["A"].push_back(detail::element_json(g));
    j["B"] = nlohmann::json::array();
    for (const auto& g : spec.setB) j["B"].push_back(detail::element_json(g));
    j["collisions"] = spec.collisions;
    j["n"] = code.n;
    j["k"] = code.k();
    j["girth_x"] = detail::girth_json(code.girth_x);
    j["girth_z"] = detail::girth_json(code.girth_z);
    j["degree_profile"] = {{"hx", detail::profile_json(code.profile_x)}, {"hz", detail::profile_json(code.profile_z)}};
    j["name"] = code.name();
    j["digest"] = matrix_digest(code.hx, code.hz);
    return j;
}

inline std::string descriptor_text(const CssCode& code) { return descriptor_json(code).dump(2) + "\n"; }

/// Rebuilds the code from the stored generators and checks the digest and cached parameters.
/// Any disagreement or malformed content raises IntegrityError.
inline CssCode load_descriptor(const nlohmann::json& j, const GroupOptions& group_options = {}) {
    GeneratorSpec spec;
    nlohmann::json expected;
    try {
        if (j.at("format_version").get<int>() != kDescriptorFormatVersion)
            throw IntegrityError("descriptor: unsupported format_version");
        spec.p = j.at("p").get<std::uint32_t>();
        spec.eta = j.at("eta").get<std::int64_t>();
        for (const auto& pr : j.at("pairs")) spec.pairs.push_back({pr.at(0).get<std::int64_t>(), pr.at(1).get<std::int64_t>()});
        for (const auto& l : j.at("lifts"))
            spec.lifts.push_back({{l.at(0).get<std::int64_t>(), l.at(1).get<std::int64_t>(), l.at(2).get<std::int64_t>(),
                                   l.at(3).get<std::int64_t>()},
                                  spec.eta});
        const auto read_set = [&](const char* key, std::vector<GroupElement>& out) {
            for (const auto& e : j.at(key)) {
                std::int64_t v[4];
                for (std::size_t i = 0; i < 4; ++i) {
                    v[i] = e.at(i).get<std::int64_t>();
                    if (v[i] < 0 || v[i] >= static_cast<std::int64_t>(spec.p))
                        throw IntegrityError(std::string("descriptor: entry of ") + key + " out of range");
                }
                out.push_back(GroupElement::make(v[0], v[1], v[2], v[3], spec.p));
            }
        };
        read_set("A", spec.setA);
        read_set("B", spec.setB);
        if (j.contains("collisions")) spec.collisions = j.at("collisions").get<std::vector<std::string>>();
        expected = j;
    } catch (const IntegrityError&) {
        throw;
    } catch (const std::exception& e) {
        throw IntegrityError(std::string("descriptor: malformed: ") + e.what());
    }

    CssCode code;
    try {
        const GroupIndex index(spec.p, group_options);
        code = assemble_code(index, spec);
    } catch (const std::exception& e) {
        throw IntegrityError(std::string("descriptor: cannot rebuild code: ") + e.what());
    }
    const nlohmann::json actual = descriptor_json(code);
    for (const char* key : {"digest", "n", "k", "girth_x", "girth_z", "degree_profile", "pairs", "lifts"}) {
        if (!expected.contains(key) || expected.at(key) != actual.at(key))
            throw IntegrityError(std::string("descriptor: field '") + key + "' does not match the rebuilt code");
    }
    for (std::size_t i = 0; i < spec.lifts.size(); ++i) {
        if (i >= spec.pairs.size() || spec.lifts[i].m() != spec.pairs[i].m || spec.lifts[i].q() != spec.pairs[i].q)
            throw IntegrityError("descriptor: lift does not match its pair");
        const GroupElement& g = i < spec.setA.size() ? spec.setA[i] : spec.setB.at(i - spec.setA.size());
        try {
            if (make_generator(spec.lifts[i], spec.p) != g)
                throw IntegrityError("descriptor: generator does not match its lift");
        } catch (const IntegrityError&) {
            throw;
        } catch (const std::exception& e) {
            throw IntegrityError(std::string("descriptor: invalid lift: ") + e.what());
        }
    }
    return code;
}

inline CssCode load_descriptor_file(const std::string& path, const GroupOptions& group_options = {}) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open descriptor '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw IntegrityError("descriptor '" + path + "' is not valid JSON: " + e.what());
    }
    return load_descriptor(j, group_options);
}

/// MacKay alist: "cols rows", max column/row degree, column degrees, row degrees, then 1-based
/// index lists per column and per row, zero-padded to the maximum degree.
inline void write_alist(std::ostream& os, const BitMatrix& h) {
    const auto cols = h.col_supports();
    const auto rows = h.row_supports();
    std::size_t max_col = 0, max_row = 0;
    for (const auto& c : cols) max_col = std::max(max_col, c.size());
    for (const auto& r : rows) max_row = std::max(max_row, r.size());
    os << h.cols() << ' ' << h.rows() << '\n' << max_col << ' ' << max_row << '\n';
    const auto write_degrees = [&os](const std::vector<std::vector<std::size_t>>& lists) {
        for (std::size_t i = 0; i < lists.size(); ++i) os << (i ? " " : "") << lists[i].size();
        os << '\n';
    };
    write_degrees(cols);
    write_degrees(rows);
    const auto write_lists = [&os](const std::vector<std::vector<std::size_t>>& lists, std::size_t width) {
        for (const auto& l : lists) {
            for (std::size_t i = 0; i < width; ++i) os << (i ? " " : "") << (i < l.size() ? l[i] + 1 : 0);
            os << '\n';
        }
    };
    write_lists(cols, max_col);
    write_lists(rows, max_row);
}

inline BitMatrix read_alist(std::istream& is) {
    std::size_t ncols = 0, nrows = 0, max_col = 0, max_row = 0;
    if (!(is >> ncols >> nrows >> max_col >> max_row)) throw ValidationError("alist: truncated header");
    std::vector<std::size_t> col_deg(ncols), row_deg(nrows);
    for (auto& d : col_deg)
        if (!(is >> d)) throw ValidationError("alist: truncated column degrees");
    for (auto& d : row_deg)
        if (!(is >> d)) throw ValidationError("alist: truncated row degrees");
    BitMatrix h(nrows, ncols);
    for (std::size_t c = 0; c < ncols; ++c) {
        for (std::size_t i = 0; i < max_col; ++i) {
            std::size_t r = 0;
            if (!(is >> r)) throw ValidationError("alist: truncated column lists");
            if (r == 0) continue;
            if (r > nrows) throw ValidationError("alist: row index out of range");
            h.set(r - 1, c);
        }
    }
    // Row lists duplicate the column lists; check they agree.
    for (std::size_t r = 0; r < nrows; ++r) {
        std::size_t seen = 0;
        for (std::size_t i = 0; i < max_row; ++i) {
            std::size_t c = 0;
            if (!(is >> c)) throw ValidationError("alist: truncated row lists");
            if (c == 0) continue;
            if (c > ncols || !h.get(r, c - 1)) throw ValidationError("alist: row and column lists disagree");
            ++seen;
        }
        if (seen != row_deg[r] || seen != h.row_weight(r)) throw ValidationError("alist: row degree mismatch");
    }
    return h;
}

/// One "row col" pair per line, 0-based, row-major order.
inline void write_coordinates(std::ostream& os, const BitMatrix& h) {
    for (std::size_t r = 0; r < h.rows(); ++r)
        for (std::size_t c : h.row(r).support()) os << r << ' ' << c << '\n';
}

} // namespace qmargulis
