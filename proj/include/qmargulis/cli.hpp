#pragma once

// Command-line driver. Exit codes: 0 success, 2 validation, 3 exhaustion/budget, 4 integrity.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bp_osd_decoder.hpp"
#include "code_builder.hpp"
#include "code_io.hpp"
#include "code_search.hpp"
#include "errors.hpp"
#include "margulis_generators.hpp"
#include "mc_simulator.hpp"
#include "sl2_group.hpp"
#include "tanner_metrics.hpp"

namespace qmargulis::cli {

enum ExitCode : int { kOk = 0, kInternal = 1, kValidation = 2, kExhaustion = 3, kIntegrity = 4 };

/// "n k girth_x girth_z dv-profile dc"
inline std::string summary_line(const CssCode& code) {
    return std::to_string(code.n) + " " + std::to_string(code.k()) + " " + girth_to_string(code.girth_x) + " " +
           girth_to_string(code.girth_z) + " " + code.profile_x.variable_degrees() + " " +
           code.profile_x.check_degrees();
}

namespace detail {

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot write '" + path + "'");
    f << content;
}

inline std::optional<std::int64_t> parse_eta(const std::string& s) {
    if (s == "auto") return std::nullopt;
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("--eta must be an integer or 'auto', got '" + s + "'");
    }
}

inline std::optional<std::size_t> parse_max_iters(const std::string& s) {
    if (s == "n") return std::nullopt;
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used != s.size() || v < 1) throw std::invalid_argument(s);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw ValidationError("--max-iters must be a positive integer or 'n', got '" + s + "'");
    }
}

inline std::vector<double> parse_p_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ValidationError("--p-list: cannot parse '" + tok + "'");
        }
    }
    return out;
}

} // namespace detail

struct ConstructArgs {
    std::uint32_t p = 5;
    std::size_t size_a = 2;
    std::size_t size_b = 3;
    std::string eta = "auto";
    std::optional<std::uint64_t> seed;
    std::string out;
    bool relax_inverse = false;
};

inline int cmd_construct(const ConstructArgs& a, std::ostream& out) {
    GeneratorRequest req;
    req.p = a.p;
    req.size_a = a.size_a;
    req.size_b = a.size_b;
    req.eta = detail::parse_eta(a.eta);
    req.selection = a.seed ? PairSelection::seeded(*a.seed) : PairSelection::lexicographic();
    req.screen.allow_inverse_collisions = a.relax_inverse;
    const GroupIndex index(a.p);
    const GeneratorSpec spec = build_generating_sets(req);
    const CssCode code = assemble_code(index, spec);
    if (!a.out.empty()) detail::write_file(a.out, descriptor_text(code));
    out << summary_line(code) << '\n';
    return kOk;
}

struct SearchArgs {
    std::uint32_t p = 5;
    std::size_t size_a = 2;
    std::size_t size_b = 3;
    std::size_t target_girth = 8;
    long long budget = 10000;
    std::uint64_t seed = 0;
    bool exhaustive = false;
    std::string out;
    std::string log;
};

inline int cmd_search(const SearchArgs& a, std::ostream& out, std::ostream& err) {
    if (a.budget < 1) throw ValidationError("--budget must be at least 1");
    SearchOptions opt;
    opt.p = a.p;
    opt.size_a = a.size_a;
    opt.size_b = a.size_b;
    opt.target_girth = a.target_girth;
    opt.budget = static_cast<std::size_t>(a.budget);
    opt.seed = a.seed;
    opt.stop_at_target = !a.exhaustive;
    const SearchResult res = search_code(opt);
    if (!a.out.empty()) detail::write_file(a.out, descriptor_text(res.best));
    if (!a.log.empty()) {
        std::ostringstream log;
        write_search_log(log, res);
        detail::write_file(a.log, log.str());
    }
    out << summary_line(res.best) << '\n';
    err << "search: examined " << res.examined << " candidates, best #" << res.best_order << " (" << res.best.name()
        << "), target girth " << a.target_girth << (res.reached ? " reached" : " not reached") << '\n';
    return res.reached ? kOk : kExhaustion;
}

struct InspectArgs {
    std::string code;
    std::string alist_x, alist_z, coords_x, coords_z;
};

inline int cmd_inspect(const InspectArgs& a, std::ostream& out) {
    const CssCode code = load_descriptor_file(a.code);
    out << "name " << code.name() << '\n'
        << "p " << code.provenance.p << '\n'
        << "eta " << code.provenance.eta << '\n'
        << "n " << code.n << '\n'
        << "k " << code.k() << '\n'
        << "rank_x " << code.dim.rank_x << " redundant_x " << code.dim.redundant_x << '\n'
        << "rank_z " << code.dim.rank_z << " redundant_z " << code.dim.redundant_z << '\n'
        << "girth_x " << girth_to_string(code.girth_x) << '\n'
        << "girth_z " << girth_to_string(code.girth_z) << '\n'
        << "d_v " << code.profile_x.variable_degrees() << '\n'
        << "d_c " << code.profile_x.check_degrees() << '\n'
        << "css " << (css_check(code.hx, code.hz) ? "ok" : "FAILED") << '\n'
        << "digest " << matrix_digest(code.hx, code.hz) << '\n';
    const auto export_to = [](const std::string& path, const BitMatrix& m, bool alist) {
        if (path.empty()) return;
        std::ostringstream os;
        if (alist)
            write_alist(os, m);
        else
            write_coordinates(os, m);
        detail::write_file(path, os.str());
    };
    export_to(a.alist_x, code.hx, true);
    export_to(a.alist_z, code.hz, true);
    export_to(a.coords_x, code.hx, false);
    export_to(a.coords_z, code.hz, false);
    out << "status verified\n";
    return kOk;
}

struct SimulateArgs {
    std::string code;
    std::string p_list;
    std::optional<double> p_start, p_end;
    std::size_t points = 0;
    std::size_t min_trials = 10000;
    std::size_t target_failures = 100;
    std::size_t max_trials = 1000000;
    std::string max_iters = "n";
    std::size_t osd_order = 10;
    std::string bp = "sum-product";
    std::string schedule = "flooding";
    std::string osd_weighting = "soft";
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::string out;
};

inline std::vector<double> sweep_points(const SimulateArgs& a) {
    if (!a.p_list.empty()) {
        if (a.p_start || a.p_end || a.points) throw ValidationError("use either --p-list or --p-start/--p-end/--points");
        return detail::parse_p_list(a.p_list);
    }
    if (!a.p_start || !a.p_end || a.points == 0)
        throw ValidationError("give --p-list, or all of --p-start, --p-end and --points");
    if (a.points == 1) return {*a.p_start};
    std::vector<double> ps;
    for (std::size_t i = 0; i < a.points; ++i)
        ps.push_back(*a.p_start + (*a.p_end - *a.p_start) * static_cast<double>(i) / static_cast<double>(a.points - 1));
    return ps;
}

inline int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const CssCode code = load_descriptor_file(a.code);
    const std::vector<double> ps = sweep_points(a);
    TrialPolicy policy;
    policy.min_trials = a.min_trials;
    policy.target_failures = a.target_failures;
    policy.max_trials = a.max_trials;
    DecoderConfig cfg;
    cfg.max_iterations = detail::parse_max_iters(a.max_iters);
    cfg.osd_order = a.osd_order;
    if (a.bp == "sum-product")
        cfg.bp_variant = BpVariant::sum_product;
    else if (a.bp == "min-sum")
        cfg.bp_variant = BpVariant::normalized_min_sum;
    else
        throw ValidationError("--bp must be sum-product or min-sum");
    if (a.schedule == "flooding")
        cfg.schedule = Schedule::flooding;
    else if (a.schedule == "serial")
        cfg.schedule = Schedule::serial;
    else
        throw ValidationError("--schedule must be flooding or serial");
    if (a.osd_weighting == "soft")
        cfg.osd_weighting = OsdWeighting::soft;
    else if (a.osd_weighting == "hamming")
        cfg.osd_weighting = OsdWeighting::hamming;
    else
        throw ValidationError("--osd-weighting must be soft or hamming");
    policy.validate();
    cfg.validate();

    if (a.out.empty()) {
        run_sweep(code, ps, policy, cfg, a.seed, a.workers, &out);
    } else {
        std::ofstream f(a.out, std::ios::binary);
        if (!f) throw ValidationError("cannot write '" + a.out + "'");
        const auto recs = run_sweep(code, ps, policy, cfg, a.seed, a.workers, &f);
        for (const auto& r : recs) out << format_record(r) << '\n';
    }
    return kOk;
}

struct ReportArgs {
    std::vector<std::string> codes;
    bool csv = false;
};

inline int cmd_report(const ReportArgs& a, std::ostream& out) {
    std::vector<GirthInput> inputs;
    for (const auto& path : a.codes) {
        const CssCode code = load_descriptor_file(path);
        inputs.push_back({code.name(), code.n, code.check_degree(), code.girth()});
    }
    const auto rows = girth_scaling_report(inputs);
    if (a.csv)
        write_scaling_csv(out, rows);
    else
        write_scaling_text(out, rows);
    return kOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Quantum Margulis code toolkit: construct, search, inspect, simulate"};
    app.require_subcommand(1);

    ConstructArgs ca;
    auto* construct = app.add_subcommand("construct", "build a code from a generator set and write its descriptor");
    construct->add_option("--p", ca.p, "prime modulus of SL(2,p)")->required();
    construct->add_option("--size-a", ca.size_a, "number of left-acting generators")->required();
    construct->add_option("--size-b", ca.size_b, "number of right-acting generators")->required();
    construct->add_option("--eta", ca.eta, "integer or 'auto'");
    construct->add_option("--seed", ca.seed, "shuffle the pair order with this seed (default: lexicographic)");
    construct->add_option("--out", ca.out, "descriptor JSON path");
    construct->add_flag("--relax-inverse", ca.relax_inverse, "admit generators equal to another's inverse");

    SearchArgs sa;
    auto* search = app.add_subcommand("search", "search generator sets for high girth, then high k");
    search->add_option("--p", sa.p, "prime modulus")->required();
    search->add_option("--size-a", sa.size_a, "|A|")->required();
    search->add_option("--size-b", sa.size_b, "|B|")->required();
    search->add_option("--target-girth", sa.target_girth, "girth to reach (default 8)");
    search->add_option("--budget", sa.budget, "maximum number of candidates examined");
    search->add_option("--seed", sa.seed, "0 keeps lexicographic order");
    search->add_flag("--exhaustive", sa.exhaustive, "keep searching after the target girth is reached");
    search->add_option("--out", sa.out, "descriptor JSON path for the best candidate");
    search->add_option("--log", sa.log, "write the candidate log here");

    InspectArgs ia;
    auto* inspect = app.add_subcommand("inspect", "verify a descriptor and export its matrices");
    inspect->add_option("--code", ia.code, "descriptor JSON")->required();
    inspect->add_option("--export-alist", ia.alist_x, "alist file for hx");
    inspect->add_option("--export-alist-z", ia.alist_z, "alist file for hz");
    inspect->add_option("--export-coords", ia.coords_x, "coordinate file for hx");
    inspect->add_option("--export-coords-z", ia.coords_z, "coordinate file for hz");

    SimulateArgs ma;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo logical error rate under depolarizing noise");
    simulate->add_option("--code", ma.code, "descriptor JSON")->required();
    simulate->add_option("--p-list", ma.p_list, "comma-separated ascending physical error rates");
    simulate->add_option("--p-start", ma.p_start, "first point of a linear grid");
    simulate->add_option("--p-end", ma.p_end, "last point of a linear grid");
    simulate->add_option("--points", ma.points, "grid size");
    simulate->add_option("--min-trials", ma.min_trials, "default 10000");
    simulate->add_option("--target-failures", ma.target_failures, "stop after this many failures (default 100)");
    simulate->add_option("--max-trials", ma.max_trials, "default 1000000");
    simulate->add_option("--max-iters", ma.max_iters, "BP iteration cap, integer or 'n' (blocklength)");
    simulate->add_option("--osd-order", ma.osd_order, "OSD-E order, 0..20 (default 10)");
    simulate->add_option("--bp", ma.bp, "sum-product or min-sum");
    simulate->add_option("--schedule", ma.schedule, "flooding or serial");
    simulate->add_option("--osd-weighting", ma.osd_weighting, "soft or hamming");
    simulate->add_option("--seed", ma.seed, "default 1");
    simulate->add_option("--workers", ma.workers, "threads; output does not depend on it");
    simulate->add_option("--out", ma.out, "results CSV path (default: stdout)");

    ReportArgs ra;
    auto* report = app.add_subcommand("report", "girth against log n / log(2 d_c) for several codes");
    report->add_option("--code", ra.codes, "descriptor JSON, repeat for each code")->required();
    report->add_flag("--csv", ra.csv, "CSV instead of a table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kValidation;
    }

    try {
        if (*construct) return cmd_construct(ca, out);
        if (*search) return cmd_search(sa, out, err);
        if (*inspect) return cmd_inspect(ia, out);
        if (*simulate) return cmd_simulate(ma, out);
        if (*report) return cmd_report(ra, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const ResourceError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const ExhaustionError& e) {
        err << "error: " << e.what() << '\n';
        return kExhaustion;
    } catch (const IntegrityError& e) {
        err << "error: " << e.what() << '\n';
        return kIntegrity;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kInternal;
}

} // namespace qmargulis::cli
