#pragma once

// Syndrome decoding of one CSS component: belief propagation in the log-likelihood-ratio domain,
// followed on non-convergence by ordered-statistics post-processing with exhaustive search over
// the least reliable non-pivot positions (OSD-E).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "code_builder.hpp"
#include "depolarizing_channel.hpp"
#include "errors.hpp"
#include "gf2.hpp"

namespace qmargulis {

enum class BpVariant { sum_product, normalized_min_sum };
enum class Schedule { flooding, serial };
enum class OsdWeighting { soft, hamming };

inline constexpr double kLlrClamp = 30.0;
inline constexpr std::size_t kMaxOsdOrder = 20;

struct DecoderConfig {
    std::optional<std::size_t> max_iterations;  // nullopt: blocklength
    BpVariant bp_variant = BpVariant::sum_product;
    double min_sum_factor = 0.75;
    Schedule schedule = Schedule::flooding;
    std::size_t osd_order = 10;
    OsdWeighting osd_weighting = OsdWeighting::soft;

    void validate() const {
        if (max_iterations && *max_iterations < 1) throw ValidationError("DecoderConfig: max_iterations must be >= 1");
        if (osd_order > kMaxOsdOrder) throw ValidationError("DecoderConfig: osd_order must be <= 20");
        if (bp_variant == BpVariant::normalized_min_sum && !(min_sum_factor > 0.0 && min_sum_factor <= 1.0))
            throw ValidationError("DecoderConfig: min-sum factor must lie in (0,1]");
    }

    std::size_t iterations_for(std::size_t blocklength) const { return max_iterations.value_or(blocklength); }

    /// Stable one-line description; `blocklength` resolves the default iteration cap.
    std::string describe(std::size_t blocklength) const {
        std::string s = "bp=";
        if (bp_variant == BpVariant::sum_product) {
            s += "sum-product";
        } else {
            char buf[32];
            std::snprintf(buf, sizeof buf, "normalized-min-sum(%.4g)", min_sum_factor);
            s += buf;
        }
        s += schedule == Schedule::flooding ? " schedule=flooding" : " schedule=serial";
        s += " max_iterations=" + std::to_string(iterations_for(blocklength));
        s += " osd=osd-e osd_order=" + std::to_string(osd_order);
        s += osd_weighting == OsdWeighting::soft ? " osd_weighting=soft" : " osd_weighting=hamming";
        return s;
    }
};

struct DecodeOutcome {
    BitVector estimate;
    bool bp_converged = false;
    std::size_t iterations_used = 0;
    std::vector<double> soft;  // posterior log(P(0)/P(1)) per bit
    bool osd_invoked = false;
};

/// The syndrome is not in the column space of H.
class DecodeFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Most likely error consistent with the syndrome under the given soft information.
/// Columns are ranked by increasing `soft` (most likely in error first); the pivot set is the
/// first independent columns in that order. OSD-0 fixes non-pivot bits to zero; order lambda
/// additionally tries all 2^lambda assignments of the first lambda non-pivot columns.
inline BitVector osd_postprocess(const BitMatrix& h, const BitVector& syndrome, const std::vector<double>& soft,
                                 std::size_t order, OsdWeighting weighting) {
    if (soft.size() != h.cols()) throw ValidationError("osd_postprocess: soft vector length does not match columns");
    if (syndrome.size() != h.rows()) throw ValidationError("osd_postprocess: syndrome length does not match rows");
    if (order > kMaxOsdOrder) throw ValidationError("osd_postprocess: order must be <= 20");
    const std::size_t n = h.cols();

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::stable_sort(perm.begin(), perm.end(), [&soft](std::size_t a, std::size_t b) { return soft[a] < soft[b]; });

    BitMatrix aug(h.rows(), n + 1);
    for (std::size_t r = 0; r < h.rows(); ++r) {
        for (std::size_t j = 0; j < n; ++j)
            if (h.get(r, perm[j])) aug.set(r, j);
        if (syndrome.get(r)) aug.set(r, n);
    }
    const RrefResult red = rref(std::move(aug), n);
    for (std::size_t r = red.rank; r < h.rows(); ++r)
        if (red.reduced.get(r, n)) throw DecodeFailure("osd_postprocess: syndrome not in the column space");

    const std::size_t rk = red.rank;
    std::vector<bool> is_pivot(n, false);
    for (std::size_t c : red.pivots) is_pivot[c] = true;
    std::vector<std::size_t> search;  // permuted positions
    for (std::size_t j = 0; j < n && search.size() < order; ++j)
        if (!is_pivot[j]) search.push_back(j);

    const auto column_on_pivots = [&](std::size_t j) {
        BitVector v(rk);
        for (std::size_t i = 0; i < rk; ++i)
            if (red.reduced.get(i, j)) v.set(i);
        return v;
    };
    const BitVector base = column_on_pivots(n);
    std::vector<BitVector> flips;
    for (std::size_t j : search) flips.push_back(column_on_pivots(j));

    const auto cost = [&](std::size_t original_col) {
        return weighting == OsdWeighting::soft ? soft[original_col] : 1.0;
    };
    std::vector<double> pivot_cost(rk);
    for (std::size_t i = 0; i < rk; ++i) pivot_cost[i] = cost(perm[red.pivots[i]]);

    std::uint64_t best_mask = 0;
    BitVector best_pivots = base;
    double best_cost = 0.0;
    const std::uint64_t candidates = std::uint64_t{1} << search.size();
    BitVector pivots(rk);
    for (std::uint64_t mask = 0; mask < candidates; ++mask) {
        pivots = base;
        double c = 0.0;
        for (std::size_t t = 0; t < search.size(); ++t) {
            if ((mask >> t) & 1U) {
                pivots ^= flips[t];
                c += cost(perm[search[t]]);
            }
        }
        for (std::size_t i : pivots.support()) c += pivot_cost[i];
        if (mask == 0 || c < best_cost) {
            best_cost = c;
            best_mask = mask;
            best_pivots = pivots;
        }
    }

    BitVector estimate(n);
    for (std::size_t i : best_pivots.support()) estimate.set(perm[red.pivots[i]]);
    for (std::size_t t = 0; t < search.size(); ++t)
        if ((best_mask >> t) & 1U) estimate.set(perm[search[t]]);
    return estimate;
}

/// Message-passing state for one parity-check matrix. Not shareable mid-decode; use one per worker.
class BpOsdDecoder {
public:
    BpOsdDecoder(BitMatrix h, DecoderConfig cfg) : h_(std::move(h)), cfg_(cfg) {
        cfg_.validate();
        const auto rows = h_.row_supports();
        check_start_.push_back(0);
        var_edges_.resize(h_.cols());
        for (std::size_t c = 0; c < rows.size(); ++c) {
            for (std::size_t v : rows[c]) {
                var_edges_[v].push_back(edge_var_.size());
                edge_var_.push_back(v);
            }
            check_start_.push_back(edge_var_.size());
        }
        q_.assign(edge_var_.size(), 0.0);
        r_.assign(edge_var_.size(), 0.0);
        posterior_.assign(h_.cols(), 0.0);
        hard_ = BitVector(h_.cols());
    }

    const BitMatrix& matrix() const { return h_; }
    const DecoderConfig& config() const { return cfg_; }

    /// Belief propagation only. `prior` is the per-bit flip probability, 0 < prior < 0.5.
    DecodeOutcome bp_decode(const BitVector& syndrome, double prior) {
        if (syndrome.size() != h_.rows()) throw ValidationError("bp_decode: syndrome length does not match rows");
        if (!(prior > 0.0 && prior < 0.5)) throw ValidationError("bp_decode: prior must lie in (0, 0.5)");
        const double llr0 = std::log((1.0 - prior) / prior);
        const std::size_t max_iter = cfg_.iterations_for(h_.cols());

        std::fill(q_.begin(), q_.end(), llr0);
        std::fill(r_.begin(), r_.end(), 0.0);
        std::fill(posterior_.begin(), posterior_.end(), llr0);
        hard_.clear();

        DecodeOutcome out;
        if (matches(syndrome)) {
            out.bp_converged = true;
        } else {
            for (std::size_t it = 1; it <= max_iter; ++it) {
                if (cfg_.schedule == Schedule::flooding)
                    flooding_step(syndrome, llr0);
                else
                    serial_step(syndrome);
                out.iterations_used = it;
                hard_.clear();
                for (std::size_t v = 0; v < posterior_.size(); ++v)
                    if (posterior_[v] < 0.0) hard_.set(v);
                if (matches(syndrome)) {
                    out.bp_converged = true;
                    break;
                }
            }
        }
        out.estimate = hard_;
        out.soft = posterior_;
        return out;
    }

    /// BP, then OSD when BP does not reproduce the syndrome.
    DecodeOutcome decode(const BitVector& syndrome, double prior) {
        DecodeOutcome out = bp_decode(syndrome, prior);
        if (!out.bp_converged) {
            out.estimate = osd_postprocess(h_, syndrome, out.soft, cfg_.osd_order, cfg_.osd_weighting);
            out.osd_invoked = true;
        }
        return out;
    }

private:
    bool matches(const BitVector& syndrome) const {
        for (std::size_t c = 0; c + 1 < check_start_.size(); ++c) {
            bool parity = false;
            for (std::size_t e = check_start_[c]; e < check_start_[c + 1]; ++e) parity ^= hard_.get(edge_var_[e]);
            if (parity != syndrome.get(c)) return false;
        }
        return true;
    }

    static double clamp(double x) { return std::clamp(x, -kLlrClamp, kLlrClamp); }

    /// Check-to-variable messages of check c from the incoming q_ values on its edges.
    void update_check(std::size_t c, bool syndrome_bit) {
        const std::size_t begin = check_start_[c];
        const std::size_t end = check_start_[c + 1];
        const double sign0 = syndrome_bit ? -1.0 : 1.0;
        if (cfg_.bp_variant == BpVariant::sum_product) {
            // Leave-one-out products via prefix/suffix passes.
            scratch_.assign(end - begin, 1.0);
            double prefix = 1.0;
            for (std::size_t e = begin; e < end; ++e) {
                scratch_[e - begin] = prefix;
                prefix *= std::tanh(q_[e] / 2.0);
            }
            double suffix = 1.0;
            for (std::size_t e = end; e-- > begin;) {
                const double prod = scratch_[e - begin] * suffix;
                r_[e] = clamp(sign0 * 2.0 * std::atanh(std::clamp(prod, -1.0, 1.0)));
                suffix *= std::tanh(q_[e] / 2.0);
            }
        } else {
            double min1 = INFINITY, min2 = INFINITY;
            std::size_t argmin = end;
            double sign_all = sign0;
            for (std::size_t e = begin; e < end; ++e) {
                const double mag = std::fabs(q_[e]);
                if (q_[e] < 0.0) sign_all = -sign_all;
                if (mag < min1) {
                    min2 = min1;
                    min1 = mag;
                    argmin = e;
                } else if (mag < min2) {
                    min2 = mag;
                }
            }
            for (std::size_t e = begin; e < end; ++e) {
                const double sign = q_[e] < 0.0 ? -sign_all : sign_all;
                const double mag = e == argmin ? min2 : min1;
                r_[e] = clamp(sign * cfg_.min_sum_factor * mag);
            }
        }
    }

    void flooding_step(const BitVector& syndrome, double llr0) {
        for (std::size_t c = 0; c + 1 < check_start_.size(); ++c) update_check(c, syndrome.get(c));
        for (std::size_t v = 0; v < var_edges_.size(); ++v) {
            double total = llr0;
            for (std::size_t e : var_edges_[v]) total += r_[e];
            posterior_[v] = total;
            for (std::size_t e : var_edges_[v]) q_[e] = clamp(total - r_[e]);
        }
    }

    void serial_step(const BitVector& syndrome) {
        for (std::size_t c = 0; c + 1 < check_start_.size(); ++c) {
            for (std::size_t e = check_start_[c]; e < check_start_[c + 1]; ++e)
                q_[e] = clamp(posterior_[edge_var_[e]] - r_[e]);
            update_check(c, syndrome.get(c));
            for (std::size_t e = check_start_[c]; e < check_start_[c + 1]; ++e)
                posterior_[edge_var_[e]] = q_[e] + r_[e];
        }
    }

    BitMatrix h_;
    DecoderConfig cfg_;
    std::vector<std::size_t> check_start_;
    std::vector<std::size_t> edge_var_;
    std::vector<std::vector<std::size_t>> var_edges_;
    std::vector<double> q_;
    std::vector<double> r_;
    std::vector<double> posterior_;
    std::vector<double> scratch_;
    BitVector hard_;
};

struct CssDecodeResult {
    BitVector est_ez;  // from (hx, syndrome_x)
    BitVector est_ex;  // from (hz, syndrome_z)
    DecodeOutcome z_component;
    DecodeOutcome x_component;
};

/// Independent decoding of both CSS components with the marginal prior 2p/3.
class CssDecoder {
public:
    CssDecoder(const CssCode& code, const DecoderConfig& cfg) : x_checks_(code.hx, cfg), z_checks_(code.hz, cfg) {}

    CssDecodeResult decode(const BitVector& syndrome_x, const BitVector& syndrome_z, double p_phys) {
        if (syndrome_x.size() != x_checks_.matrix().rows() || syndrome_z.size() != z_checks_.matrix().rows())
            throw ValidationError("decode_css: syndrome length does not match the check count");
        const double prior = component_prior(p_phys);
        CssDecodeResult res;
        res.z_component = decode_one(x_checks_, syndrome_x, prior);
        res.x_component = decode_one(z_checks_, syndrome_z, prior);
        res.est_ez = res.z_component.estimate;
        res.est_ex = res.x_component.estimate;
        return res;
    }

private:
    static DecodeOutcome decode_one(BpOsdDecoder& dec, const BitVector& syndrome, double prior) {
        if (syndrome.none()) {
            DecodeOutcome out;
            out.estimate = BitVector(dec.matrix().cols());
            out.bp_converged = true;
            return out;
        }
        return dec.decode(syndrome, prior);
    }

    BpOsdDecoder x_checks_;
    BpOsdDecoder z_checks_;
};

inline CssDecodeResult decode_css(const CssCode& code, const BitVector& syndrome_x, const BitVector& syndrome_z,
                                  double p_phys, const DecoderConfig& cfg) {
    CssDecoder dec(code, cfg);
    return dec.decode(syndrome_x, syndrome_z, p_phys);
}

struct LogicalVerdict {
    bool x_failure = false;  // residual ex outside rowspace(hx)
    bool z_failure = false;  // residual ez outside rowspace(hz)
    bool any() const { return x_failure || z_failure; }
};

/// Residuals must be syndrome-free; a failure is a residual outside the stabilizer row space.
class LogicalChecker {
public:
    explicit LogicalChecker(const CssCode& code) : hx_(&code.hx), hz_(&code.hz), x_space_(code.hx), z_space_(code.hz) {}

    LogicalVerdict check(const BitVector& residual_ex, const BitVector& residual_ez) const {
        if (mat_vec(*hz_, residual_ex).any() || mat_vec(*hx_, residual_ez).any())
            throw ConsistencyError("is_logical_failure: residual has a nonzero syndrome");
        return {!x_space_.contains(residual_ex), !z_space_.contains(residual_ez)};
    }

private:
    const BitMatrix* hx_;
    const BitMatrix* hz_;
    RowSpace x_space_;
    RowSpace z_space_;
};

/// Rank-comparison form of the logical failure test.
inline bool is_logical_failure(const CssCode& code, const BitVector& residual_ex, const BitVector& residual_ez) {
    if (mat_vec(code.hz, residual_ex).any() || mat_vec(code.hx, residual_ez).any())
        throw ConsistencyError("is_logical_failure: residual has a nonzero syndrome");
    return !in_rowspace(code.hz, residual_ez) || !in_rowspace(code.hx, residual_ex);
}

} // namespace qmargulis
