#pragma once

// Monte Carlo logical error rate estimation. Trial t always draws from RngStream{seed, t}, and
// the stop rule is evaluated only at batch boundaries, so results do not depend on the number
// of workers.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "bp_osd_decoder.hpp"
#include "code_builder.hpp"
#include "code_io.hpp"
#include "depolarizing_channel.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace qmargulis {

inline constexpr std::string_view kToolkitVersion = "qmargulis 0.1.0";
inline constexpr std::string_view kResultsHeader =
    "code_id,p_phys,trials,failures,ler,ci_low,ci_high,bp_only_failures,mean_iterations,seed,config_digest";

struct TrialPolicy {
    std::size_t min_trials = 10000;
    std::size_t target_failures = 100;
    std::size_t max_trials = 1000000;
    std::size_t batch_size = 1000;

    void validate() const {
        if (min_trials < 1) throw ValidationError("TrialPolicy: min_trials must be >= 1");
        if (target_failures < 1) throw ValidationError("TrialPolicy: target_failures must be >= 1");
        if (max_trials < min_trials) throw ValidationError("TrialPolicy: max_trials must be >= min_trials");
        if (batch_size < 1) throw ValidationError("TrialPolicy: batch_size must be >= 1");
    }

    std::string describe() const {
        return "min_trials=" + std::to_string(min_trials) + " target_failures=" + std::to_string(target_failures) +
               " max_trials=" + std::to_string(max_trials) + " batch=" + std::to_string(batch_size);
    }
};

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

inline constexpr double kZ95 = 1.959963984540054;

inline Interval wilson_interval(std::size_t failures, std::size_t trials, double z = kZ95) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double x = static_cast<double>(failures);
    const double z2 = z * z;
    const double center = (x + z2 / 2.0) / (n + z2);
    const double half = z / (n + z2) * std::sqrt(x * (n - x) / n + z2 / 4.0);
    // Exact bounds at the boundary; the closed form leaves rounding residue there.
    const double low = failures == 0 ? 0.0 : std::max(0.0, center - half);
    const double high = failures == trials ? 1.0 : std::min(1.0, center + half);
    return {low, high};
}

struct SimRecord {
    std::string code_id;
    double p_phys = 0.0;
    std::size_t trials = 0;
    std::size_t failures = 0;
    double ler = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t bp_only_failures = 0;
    double mean_iterations = 0.0;
    std::uint64_t seed = 0;
    std::string config_digest;
    // Not part of the CSV row.
    std::size_t x_failures = 0;
    std::size_t z_failures = 0;
    std::size_t osd_invocations = 0;
    std::size_t syndrome_mismatches = 0;
    bool truncated = false;
};

struct TrialOutcome {
    bool failure = false;
    bool bp_only_failure = false;
    bool x_failure = false;
    bool z_failure = false;
    bool syndrome_mismatch = false;
    std::size_t osd_invocations = 0;
    std::size_t iterations = 0;  // summed over both components
};

/// One trial: sample, syndromes, decode both components, residual verdict.
inline TrialOutcome run_trial(const CssCode& code, CssDecoder& decoder, const LogicalChecker& checker, double p_phys,
                              std::uint64_t seed, std::uint64_t trial) {
    const PauliError err = sample(code.n, p_phys, RngStream{seed, trial});
    const BitVector sx = mat_vec(code.hx, err.ez);
    const BitVector sz = mat_vec(code.hz, err.ex);
    const CssDecodeResult dec = decoder.decode(sx, sz, p_phys);

    TrialOutcome out;
    out.iterations = dec.z_component.iterations_used + dec.x_component.iterations_used;
    out.osd_invocations = std::size_t{dec.z_component.osd_invoked} + std::size_t{dec.x_component.osd_invoked};
    if (mat_vec(code.hx, dec.est_ez) != sx || mat_vec(code.hz, dec.est_ex) != sz) {
        out.syndrome_mismatch = true;
        out.failure = out.bp_only_failure = true;
        return out;
    }
    const LogicalVerdict v = checker.check(dec.est_ex ^ err.ex, dec.est_ez ^ err.ez);
    out.x_failure = v.x_failure;
    out.z_failure = v.z_failure;
    out.failure = v.any();
    out.bp_only_failure = out.failure || !dec.z_component.bp_converged || !dec.x_component.bp_converged;
    return out;
}

inline std::string config_digest(const CssCode& code, const DecoderConfig& cfg, const TrialPolicy& policy) {
    Fnv1a h;
    h.update(cfg.describe(code.n));
    h.update("|");
    h.update(policy.describe());
    h.update("|");
    h.update(std::string(kRngAlgorithm));
    return h.hex();
}

namespace detail {

struct Tally {
    std::size_t trials = 0;
    std::size_t failures = 0;
    std::size_t bp_only_failures = 0;
    std::size_t x_failures = 0;
    std::size_t z_failures = 0;
    std::size_t osd_invocations = 0;
    std::size_t syndrome_mismatches = 0;
    std::size_t iterations = 0;

    void add(const TrialOutcome& t) {
        ++trials;
        failures += t.failure;
        bp_only_failures += t.bp_only_failure;
        x_failures += t.x_failure;
        z_failures += t.z_failure;
        osd_invocations += t.osd_invocations;
        syndrome_mismatches += t.syndrome_mismatch;
        iterations += t.iterations;
    }
    void merge(const Tally& o) {
        trials += o.trials;
        failures += o.failures;
        bp_only_failures += o.bp_only_failures;
        x_failures += o.x_failures;
        z_failures += o.z_failures;
        osd_invocations += o.osd_invocations;
        syndrome_mismatches += o.syndrome_mismatches;
        iterations += o.iterations;
    }
};

} // namespace detail

/// Runs min_trials, then further batches until target_failures or max_trials.
inline SimRecord run_point(const CssCode& code, double p_phys, const TrialPolicy& policy, const DecoderConfig& cfg,
                           std::uint64_t seed, unsigned workers = 1, const std::string& code_id = {}) {
    policy.validate();
    cfg.validate();
    validate_probability(p_phys, "run_point");
    if (component_prior(p_phys) >= 0.5) throw ValidationError("run_point: p_phys must be below 0.75");
    workers = std::max(1U, workers);

    const LogicalChecker checker(code);
    std::vector<CssDecoder> decoders;
    decoders.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) decoders.emplace_back(code, cfg);

    detail::Tally total;
    const auto run_batch = [&](std::uint64_t begin, std::uint64_t end) {
        std::atomic<std::uint64_t> next{begin};
        std::vector<detail::Tally> tallies(workers);
        std::exception_ptr error;
        std::mutex error_mutex;
        const auto work = [&](unsigned w) {
            try {
                for (std::uint64_t t = next.fetch_add(1); t < end; t = next.fetch_add(1))
                    tallies[w].add(run_trial(code, decoders[w], checker, p_phys, seed, t));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(end);
            }
        };
        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
            for (auto& th : pool) th.join();
        }
        if (error) std::rethrow_exception(error);
        for (const auto& t : tallies) total.merge(t);
    };

    run_batch(0, policy.min_trials);
    // Without noise there is nothing to wait for.
    const bool continue_allowed = p_phys > 0.0;
    while (continue_allowed && total.failures < policy.target_failures && total.trials < policy.max_trials) {
        const std::uint64_t begin = total.trials;
        run_batch(begin, std::min<std::uint64_t>(begin + policy.batch_size, policy.max_trials));
    }

    SimRecord rec;
    rec.code_id = code_id.empty() ? code.name() : code_id;
    rec.p_phys = p_phys;
    rec.trials = total.trials;
    rec.failures = total.failures;
    rec.ler = static_cast<double>(total.failures) / static_cast<double>(total.trials);
    const Interval ci = wilson_interval(total.failures, total.trials);
    rec.ci_low = std::min(ci.low, rec.ler);
    rec.ci_high = std::max(ci.high, rec.ler);
    rec.bp_only_failures = total.bp_only_failures;
    rec.mean_iterations = static_cast<double>(total.iterations) / (2.0 * static_cast<double>(total.trials));
    rec.seed = seed;
    rec.config_digest = config_digest(code, cfg, policy);
    rec.x_failures = total.x_failures;
    rec.z_failures = total.z_failures;
    rec.osd_invocations = total.osd_invocations;
    rec.syndrome_mismatches = total.syndrome_mismatches;
    rec.truncated = continue_allowed && total.failures < policy.target_failures;
    return rec;
}

inline std::string format_record(const SimRecord& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%s,%.6g,%zu,%zu,%.6e,%.6e,%.6e,%zu,%.4f,%llu,%s", r.code_id.c_str(), r.p_phys,
                  r.trials, r.failures, r.ler, r.ci_low, r.ci_high, r.bp_only_failures, r.mean_iterations,
                  static_cast<unsigned long long>(r.seed), r.config_digest.c_str());
    return buf;
}

inline void write_results_preamble(std::ostream& os, const CssCode& code, const DecoderConfig& cfg,
                                   const TrialPolicy& policy, std::uint64_t seed) {
    os << "# toolkit: " << kToolkitVersion << '\n';
    os << "# rng: " << kRngAlgorithm << " stream=trial_index seed=" << seed << '\n';
    os << "# decoder: " << cfg.describe(code.n) << '\n';
    os << "# policy: " << policy.describe() << '\n';
    os << "# code: " << code.name() << " n=" << code.n << " k=" << code.k()
       << " digest=" << matrix_digest(code.hx, code.hz) << '\n';
    os << kResultsHeader << '\n';
}

/// Points must be strictly ascending. Rows are flushed as they complete.
inline std::vector<SimRecord> run_sweep(const CssCode& code, const std::vector<double>& p_list,
                                        const TrialPolicy& policy, const DecoderConfig& cfg, std::uint64_t seed,
                                        unsigned workers = 1, std::ostream* csv = nullptr,
                                        const std::string& code_id = {}) {
    if (p_list.empty()) throw ValidationError("run_sweep: empty probability list");
    for (std::size_t i = 0; i < p_list.size(); ++i) {
        validate_probability(p_list[i], "run_sweep");
        if (i > 0 && !(p_list[i] > p_list[i - 1])) throw ValidationError("run_sweep: probabilities must be ascending");
    }
    policy.validate();
    cfg.validate();
    if (csv) {
        write_results_preamble(*csv, code, cfg, policy, seed);
        csv->flush();
    }
    std::vector<SimRecord> out;
    for (double p : p_list) {
        out.push_back(run_point(code, p, policy, cfg, seed, workers, code_id));
        if (csv) {
            *csv << format_record(out.back()) << '\n';
            if (out.back().truncated)
                *csv << "# truncated: p_phys=" << out.back().p_phys << " reached max_trials before target_failures\n";
            csv->flush();
        }
    }
    return out;
}

} // namespace qmargulis
