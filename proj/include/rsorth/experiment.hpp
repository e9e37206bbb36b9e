#pragma once

// Monte Carlo sweeps over the direct-channel power E0 and the cross-module
// self-test. Everything here is deterministic given ExperimentSpec::seed: trial t
// uses channel seed derive_seed(seed, Trial, t) for every E0 and every surface
// kind, and the worker count only changes wall time.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

#include "rsorth/channel.hpp"
#include "rsorth/estimation.hpp"
#include "rsorth/orthogonalizer.hpp"
#include "rsorth/power_opt.hpp"
#include "rsorth/ris_baseline.hpp"
#include "rsorth/serialization.hpp"

#ifndef RSORTH_VERSION
#define RSORTH_VERSION "0.0.0"
#endif

namespace rsorth {

[[nodiscard]] inline std::vector<double> log_grid(double lo_exp, double hi_exp, int points) {
    std::vector<double> grid;
    for (int i = 0; i < points; ++i) {
        const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        grid.push_back(std::pow(10.0, lo_exp + t * (hi_exp - lo_exp)));
    }
    return grid;
}

struct ExperimentSpec {
    Eigen::Index m = 4;
    Eigen::Index k = 2;
    /// 0 selects the default: M*K for ARIS and RIS, M for FRIS.
    Eigen::Index n_aris = 0;
    Eigen::Index n_fris = 0;
    Eigen::Index n_ris = 0;
    std::vector<double> e0_grid = log_grid(-2.0, 2.0, 9);
    /// E0 for single-instance commands.
    double e0 = 1.0;
    int trials = 50;
    std::uint64_t seed = 1;
    double es = 1.0;
    double n0 = 0.0;
    OptimizerConfig power_opt{300, 1e-9, 1e-2, 1e-12, 8, 1};
    RisOptConfig ris_opt{};
    /// 0 uses std::thread::hardware_concurrency().
    int workers = 0;

    [[nodiscard]] Eigen::Index elements(SurfaceKind kind) const {
        switch (kind) {
        case SurfaceKind::Aris: return n_aris > 0 ? n_aris : m * k;
        case SurfaceKind::Fris: return n_fris > 0 ? n_fris : m;
        case SurfaceKind::Ris: return n_ris > 0 ? n_ris : m * k;
        }
        return 0;
    }

    void validate() const {
        require(k >= 1 && m > k, ErrorCode::InvalidDims, "need M > K >= 1");
        require(n_aris >= 0 && n_fris >= 0 && n_ris >= 0, ErrorCode::InvalidDims, "element counts must be >= 0");
        require(!e0_grid.empty(), ErrorCode::InvalidArgument, "e0 grid must not be empty");
        for (const double e : e0_grid) {
            require(e >= 0.0 && std::isfinite(e), ErrorCode::InvalidArgument, "e0 grid values must be >= 0");
        }
        require(e0 >= 0.0, ErrorCode::InvalidArgument, "e0 must be >= 0");
        require(trials >= 1, ErrorCode::InvalidArgument, "trials must be >= 1");
        require(es > 0.0 && n0 >= 0.0, ErrorCode::InvalidArgument, "need es > 0 and n0 >= 0");
        require(workers >= 0, ErrorCode::InvalidArgument, "workers must be >= 0");
        power_opt.validate();
        ris_opt.validate();
    }
};

/// Config-file schema. Every key is optional; unknown keys are rejected so that
/// typos do not silently fall back to defaults.
///
///   {"m": 4, "k": 2, "n_aris": 8, "n_fris": 4, "n_ris": 8,
///    "e0_grid": [0.01, ...], "e0": 1.0, "trials": 50, "seed": 1,
///    "es": 1.0, "n0": 0.0, "workers": 0,
///    "power_opt": {"max_iters": 300, "grad_tol": 1e-9, "initial_step": 0.01,
///                  "min_step": 1e-12, "restarts": 8},
///    "ris_opt": {"restarts": 8, "max_iters": 200, "fd_step": 1e-6,
///                "initial_step": 0.5, "decay": 0.5, "min_step": 1e-8}}
[[nodiscard]] inline ExperimentSpec spec_from_json(const json& j) {
    require(j.is_object(), ErrorCode::ParseError, "config must be an object");
    ExperimentSpec spec;
    const auto check_keys = [](const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
        for (const auto& [key, value] : obj.items()) {
            const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
            require(known, ErrorCode::ParseError, "unknown key '" + key + "' in " + where);
        }
    };
    try {
        check_keys(j,
                   {"m", "k", "n_aris", "n_fris", "n_ris", "e0_grid", "e0", "trials", "seed", "es", "n0", "workers",
                    "power_opt", "ris_opt"},
                   "config");
        spec.m = j.value("m", spec.m);
        spec.k = j.value("k", spec.k);
        spec.n_aris = j.value("n_aris", spec.n_aris);
        spec.n_fris = j.value("n_fris", spec.n_fris);
        spec.n_ris = j.value("n_ris", spec.n_ris);
        spec.e0_grid = j.value("e0_grid", spec.e0_grid);
        spec.e0 = j.value("e0", spec.e0);
        spec.trials = j.value("trials", spec.trials);
        spec.seed = j.value("seed", spec.seed);
        spec.es = j.value("es", spec.es);
        spec.n0 = j.value("n0", spec.n0);
        spec.workers = j.value("workers", spec.workers);
        if (j.contains("power_opt")) {
            const json& p = j.at("power_opt");
            check_keys(p, {"max_iters", "grad_tol", "initial_step", "min_step", "restarts"}, "power_opt");
            auto& o = spec.power_opt;
            o.max_iters = p.value("max_iters", o.max_iters);
            o.grad_tol = p.value("grad_tol", o.grad_tol);
            o.initial_step = p.value("initial_step", o.initial_step);
            o.min_step = p.value("min_step", o.min_step);
            o.restarts = p.value("restarts", o.restarts);
        }
        if (j.contains("ris_opt")) {
            const json& r = j.at("ris_opt");
            check_keys(r, {"restarts", "max_iters", "fd_step", "initial_step", "decay", "min_step"}, "ris_opt");
            auto& o = spec.ris_opt;
            o.restarts = r.value("restarts", o.restarts);
            o.max_iters = r.value("max_iters", o.max_iters);
            o.fd_step = r.value("fd_step", o.fd_step);
            o.initial_step = r.value("initial_step", o.initial_step);
            o.decay = r.value("decay", o.decay);
            o.min_step = r.value("min_step", o.min_step);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    spec.validate();
    return spec;
}

[[nodiscard]] inline json to_json(const ExperimentSpec& spec) {
    const auto& p = spec.power_opt;
    const auto& r = spec.ris_opt;
    return json{{"m", spec.m},
                {"k", spec.k},
                {"n_aris", spec.elements(SurfaceKind::Aris)},
                {"n_fris", spec.elements(SurfaceKind::Fris)},
                {"n_ris", spec.elements(SurfaceKind::Ris)},
                {"e0_grid", spec.e0_grid},
                {"e0", spec.e0},
                {"trials", spec.trials},
                {"seed", spec.seed},
                {"es", spec.es},
                {"n0", spec.n0},
                {"workers", spec.workers},
                {"power_opt",
                 {{"max_iters", p.max_iters},
                  {"grad_tol", p.grad_tol},
                  {"initial_step", p.initial_step},
                  {"min_step", p.min_step},
                  {"restarts", p.restarts}}},
                {"ris_opt",
                 {{"restarts", r.restarts},
                  {"max_iters", r.max_iters},
                  {"fd_step", r.fd_step},
                  {"initial_step", r.initial_step},
                  {"decay", r.decay},
                  {"min_step", r.min_step}}}};
}

/// Seed of the channel realization used by trial t (shared by every E0 and kind).
[[nodiscard]] inline std::uint64_t trial_seed(const ExperimentSpec& spec, int trial) {
    return derive_seed(spec.seed, Stream::Trial, static_cast<std::uint64_t>(trial));
}

/// Per-trial outcome of one surface kind at one E0.
struct TrialMetrics {
    // ARIS / FRIS
    double power_per_element = 0.0;
    double beta = 0.0;
    double beta_at_unit_power = 0.0;
    bool unit_power_reachable = false;
    // RIS
    double kappa = 0.0;
    double avg_gain = 0.0;
    double min_gain = 0.0;
};

[[nodiscard]] inline TrialMetrics run_trial(const ExperimentSpec& spec, SurfaceKind kind, double e0, int trial) {
    const std::uint64_t seed = trial_seed(spec, trial);
    const Eigen::Index n = spec.elements(kind);
    const ChannelSet cs = generate_iid_rayleigh(spec.m, spec.k, n, e0, seed);
    TrialMetrics out;
    if (kind == SurfaceKind::Ris) {
        RisOptConfig cfg = spec.ris_opt;
        cfg.seed = seed;
        const RisResult r = minimize_condition_number(cs, cfg);
        out.power_per_element = 1.0;
        out.kappa = r.kappa;
        out.avg_gain = r.gains.average;
        out.min_gain = r.gains.minimum;
        out.beta = r.gains.minimum;
        out.beta_at_unit_power = r.gains.minimum;
        out.unit_power_reachable = true;
        return out;
    }
    OptimizerConfig cfg = spec.power_opt;
    cfg.seed = seed;
    const PowerObjective obj(cs, kind);
    const OptimResult r = minimize_power(obj, cfg);
    const auto nd = static_cast<double>(n);
    out.power_per_element = r.p_min / nd;
    out.beta = r.beta_star;
    // Gain at the RIS power budget (sum power N) for the minimizing U. When even
    // the minimum power exceeds N no orthogonal channel is reachable and the gain
    // is recorded as 0.
    const std::optional<double> unit = beta_for_power(obj, r.u_star.matrix(), nd);
    out.unit_power_reachable = unit.has_value();
    out.beta_at_unit_power = unit.value_or(0.0);
    return out;
}

struct SweepRow {
    double e0;
    SurfaceKind kind;
    std::string metric;
    double mean;
    double stderr_;
    int trials;
    bool complete;
};

struct SweepResult {
    std::vector<SweepRow> fig1_power;
    std::vector<SweepRow> fig1_gain;
    std::vector<SweepRow> fig2_gain;
    bool complete = true;
    /// Raw per-trial metrics indexed [e0][kind][trial]; unset if interrupted.
    std::vector<std::vector<std::vector<std::optional<TrialMetrics>>>> raw;
};

[[nodiscard]] inline std::pair<double, double> mean_and_stderr(const std::vector<double>& xs) {
    if (xs.empty()) {
        return {0.0, 0.0};
    }
    double mean = 0.0;
    for (const double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) {
        return {mean, 0.0};
    }
    double ss = 0.0;
    for (const double x : xs) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(xs.size() - 1);
    return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

inline constexpr SurfaceKind kSweepKinds[] = {SurfaceKind::Aris, SurfaceKind::Fris, SurfaceKind::Ris};

struct SweepOptions {
    /// Polled between work items; when set, remaining items are skipped and the
    /// affected rows are marked incomplete.
    const std::atomic<bool>* stop = nullptr;
};

[[nodiscard]] inline SweepResult run_sweep(const ExperimentSpec& spec, const SweepOptions& options = {}) {
    spec.validate();
    const std::size_t n_e0 = spec.e0_grid.size();
    const std::size_t n_kind = std::size(kSweepKinds);
    const auto n_trials = static_cast<std::size_t>(spec.trials);
    const std::size_t total = n_e0 * n_kind * n_trials;

    SweepResult result;
    result.raw.assign(n_e0, std::vector<std::vector<std::optional<TrialMetrics>>>(
                                n_kind, std::vector<std::optional<TrialMetrics>>(n_trials)));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::atomic<bool> failed{false};
    const auto worker = [&] {
        for (;;) {
            if (failed.load() || (options.stop != nullptr && options.stop->load())) {
                return;
            }
            const std::size_t item = next.fetch_add(1);
            if (item >= total) {
                return;
            }
            const std::size_t t = item % n_trials;
            const std::size_t kind_index = (item / n_trials) % n_kind;
            const std::size_t e = item / (n_trials * n_kind);
            try {
                result.raw[e][kind_index][t] =
                    run_trial(spec, kSweepKinds[kind_index], spec.e0_grid[e], static_cast<int>(t));
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    unsigned threads = spec.workers > 0 ? static_cast<unsigned>(spec.workers) : std::thread::hardware_concurrency();
    threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(total)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    for (std::size_t e = 0; e < n_e0; ++e) {
        for (std::size_t ki = 0; ki < n_kind; ++ki) {
            const SurfaceKind kind = kSweepKinds[ki];
            const auto& cell = result.raw[e][ki];
            const auto collect = [&](auto field) {
                std::vector<double> xs;
                for (const auto& m : cell) {
                    if (m) xs.push_back(field(*m));
                }
                return xs;
            };
            const auto row = [&](std::vector<SweepRow>& out, const std::string& metric, auto field) {
                const std::vector<double> xs = collect(field);
                const auto [mean, se] = mean_and_stderr(xs);
                const bool complete = xs.size() == n_trials;
                result.complete = result.complete && complete;
                out.push_back({spec.e0_grid[e], kind, metric, mean, se, static_cast<int>(xs.size()), complete});
            };
            row(result.fig1_power, "avg_power_per_element", [](const TrialMetrics& m) { return m.power_per_element; });
            if (kind == SurfaceKind::Ris) {
                row(result.fig1_gain, "avg_gain", [](const TrialMetrics& m) { return m.avg_gain; });
                row(result.fig1_gain, "min_gain", [](const TrialMetrics& m) { return m.min_gain; });
                row(result.fig1_gain, "kappa", [](const TrialMetrics& m) { return m.kappa; });
                row(result.fig2_gain, "avg_gain", [](const TrialMetrics& m) { return m.avg_gain; });
                row(result.fig2_gain, "min_gain", [](const TrialMetrics& m) { return m.min_gain; });
            } else {
                row(result.fig1_gain, "beta", [](const TrialMetrics& m) { return m.beta; });
                row(result.fig2_gain, "beta_at_unit_power", [](const TrialMetrics& m) { return m.beta_at_unit_power; });
                row(result.fig2_gain, "unit_power_reachable",
                    [](const TrialMetrics& m) { return m.unit_power_reachable ? 1.0 : 0.0; });
            }
        }
    }
    return result;
}

/// Shortest round-trip decimal representation, independent of the C locale.
[[nodiscard]] inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline constexpr const char* kSweepCsvHeader = "e0,kind,metric,mean,stderr,trials,complete";

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << kSweepCsvHeader << '\n';
    for (const auto& r : rows) {
        os << format_double(r.e0) << ',' << to_string(r.kind) << ',' << r.metric << ',' << format_double(r.mean)
           << ',' << format_double(r.stderr_) << ',' << r.trials << ',' << (r.complete ? 1 : 0) << '\n';
    }
}

inline constexpr const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Plots the sweep CSVs written next to this script (requires matplotlib)."""
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def load(name):
    series = {}
    with open(os.path.join(HERE, name), newline="") as fh:
        for row in csv.DictReader(fh):
            key = (row["kind"], row["metric"])
            series.setdefault(key, []).append(
                (float(row["e0"]), float(row["mean"]), float(row["stderr"]))
            )
    return series


def draw(ax, series, ylabel):
    for (kind, metric), pts in sorted(series.items()):
        pts = [p for p in pts if p[0] > 0]
        if not pts:
            continue
        xs, ys, es = zip(*pts)
        ax.errorbar(xs, ys, yerr=es, marker="o", capsize=2, label=f"{kind.upper()} {metric}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("E0 (normalized direct-channel power)")
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize="small")


def main():
    fig, (left, right) = plt.subplots(1, 2, figsize=(11, 4))
    power = load("fig1_power.csv")
    draw(left, power, "average RS power per element")
    gain = {k: v for k, v in load("fig1_gain.csv").items() if k[1] != "kappa"}
    draw(right, gain, "channel gain per UE")
    fig.tight_layout()
    fig.savefig(os.path.join(HERE, "fig1.png"), dpi=150)

    fig2, ax = plt.subplots(figsize=(6, 4))
    unit = {k: v for k, v in load("fig2_gain.csv").items() if k[1] != "unit_power_reachable"}
    draw(ax, unit, "channel gain per UE at unit average power")
    fig2.tight_layout()
    fig2.savefig(os.path.join(HERE, "fig2.png"), dpi=150)
    return 0


if __name__ == "__main__":
    sys.exit(main())
)PY";

struct SweepOutputs {
    std::filesystem::path fig1_power;
    std::filesystem::path fig1_gain;
    std::filesystem::path fig2_gain;
    std::filesystem::path plot_script;
    std::filesystem::path manifest;
};

[[nodiscard]] inline json build_info() {
    return json{{"rsorth", RSORTH_VERSION},
                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION)},
                {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                      std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                      std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
#if defined(__clang__)
                {"compiler", std::string("clang ") + __clang_version__},
#elif defined(__GNUC__)
                {"compiler", std::string("gcc ") + __VERSION__},
#else
                {"compiler", "unknown"},
#endif
                {"cxx_standard", static_cast<long>(__cplusplus)}};
}

/// Writes fig1_power.csv, fig1_gain.csv, fig2_gain.csv, plot_figures.py and
/// run_manifest.json into `dir`.
inline SweepOutputs write_sweep_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec,
                                        const SweepResult& result, double wall_seconds) {
    std::filesystem::create_directories(dir);
    SweepOutputs out{dir / "fig1_power.csv", dir / "fig1_gain.csv", dir / "fig2_gain.csv", dir / "plot_figures.py",
                     dir / "run_manifest.json"};
    const auto write_csv = [](const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
        std::ofstream os(path, std::ios::binary);
        require(os.good(), ErrorCode::InvalidArgument, "cannot write " + path.string());
        write_sweep_csv(os, rows);
    };
    write_csv(out.fig1_power, result.fig1_power);
    write_csv(out.fig1_gain, result.fig1_gain);
    write_csv(out.fig2_gain, result.fig2_gain);
    {
        std::ofstream os(out.plot_script, std::ios::binary);
        os << kPlotScript;
    }
    std::error_code ec;
    std::filesystem::permissions(out.plot_script, std::filesystem::perms::owner_exec,
                                 std::filesystem::perm_options::add, ec);
    const json manifest{{"spec", to_json(spec)},
                        {"versions", build_info()},
                        {"wall_time_seconds", wall_seconds},
                        {"complete", result.complete},
                        {"outputs",
                         {out.fig1_power.filename().string(), out.fig1_gain.filename().string(),
                          out.fig2_gain.filename().string(), out.plot_script.filename().string()}}};
    write_json_file(out.manifest, manifest);
    return out;
}

// ---------------------------------------------------------------------------
// Self-test

struct CheckResult {
    std::string name;
    double measured;
    double tolerance;
    bool passed;
};

struct SelftestOptions {
    std::uint64_t seed = 7;
    int instances = 10;
    /// Negates the analytic gradients before comparing them with finite
    /// differences; the gradient checks must then fail.
    bool corrupt_gradient_sign = false;
};

[[nodiscard]] inline std::vector<CheckResult> run_selftest(const SelftestOptions& options = {}) {
    constexpr Eigen::Index m = 4;
    constexpr Eigen::Index k = 2;
    std::vector<CheckResult> checks;
    const auto add = [&](std::string name, double measured, double tolerance) {
        checks.push_back({std::move(name), measured, tolerance, std::isfinite(measured) && measured <= tolerance});
    };
    const auto instance_seed = [&](int i) { return derive_seed(options.seed, Stream::Probe, static_cast<std::uint64_t>(i)); };

    for (const SurfaceKind kind : {SurfaceKind::Aris, SurfaceKind::Fris}) {
        const Eigen::Index n = kind == SurfaceKind::Aris ? m * k : m;
        const std::string tag(to_string(kind));
        double ortho = 0.0;
        double power = 0.0;
        double grad = 0.0;
        for (int i = 0; i < options.instances; ++i) {
            const std::uint64_t seed = instance_seed(i);
            const ChannelSet cs = generate_iid_rayleigh(m, k, n, 1.0, seed);
            const SemiUnitary u = random_semi_unitary(m, k, derive_seed(seed, Stream::Init));
            const double beta = 0.5 + Rng(seed).uniform();
            const TargetChannel target(beta, u);
            const RsConfig config = kind == SurfaceKind::Aris ? solve_aris(cs, target) : solve_fris(cs, target);
            ortho = std::max(ortho, orthogonality_residual(effective_channel(cs, config), beta));
            const PowerObjective obj(cs, kind);
            const double p = obj.power(beta, u.matrix());
            power = std::max(power, std::abs(p - rs_sum_power(config)) / rs_sum_power(config));
            CMatrix analytic = obj.gradient(u.matrix());
            if (options.corrupt_gradient_sign) {
                analytic = -analytic;
            }
            const CMatrix numeric = finite_diff_grad(obj, u, 1e-6);
            grad = std::max(grad, (analytic - numeric).norm() / numeric.norm());
        }
        add(tag + " orthogonality ||H^H H - beta I|| / (beta K)", ortho, 1e-7);
        add(tag + " power formula vs closed-form solution (relative)", power, 1e-9);
        add(tag + " analytic gradient vs finite differences (relative)", grad, 1e-4);

        const ChannelSet cs = generate_iid_rayleigh(m, k, kind == SurfaceKind::Aris ? m * k : 2 * m, 1.0,
                                                    instance_seed(1000));
        const TargetChannel target(1.0, random_semi_unitary(m, k, instance_seed(1001)));
        const EstimationReport report =
            end_to_end_configure(cs, kind, target, PilotPlan::identity(k), instance_seed(1002));
        add(tag + " noiseless protocol residual", report.residual, 1e-7);
        const PilotCount expected = pilot_count(kind, m, k, cs.n);
        add(tag + " pilot slots used minus expected count",
            std::abs(static_cast<double>(report.pilot_slots_used - expected.slots)), 0.0);

        const PowerObjective obj(cs, kind);
        OptimizerConfig cfg;
        cfg.max_iters = 200;
        cfg.restarts = 1;
        cfg.seed = instance_seed(1003);
        const OptimResult run = minimize_power(obj, cfg);
        double rise = 0.0;
        for (std::size_t i = 1; i < run.trace.size(); ++i) {
            rise = std::max(rise, run.trace[i].objective - run.trace[i - 1].objective);
        }
        add(tag + " descent trace increase", rise, 0.0);
        add(tag + " descent unitarity defect", run.max_unitarity_defect, 1e-8);
    }
    return checks;
}

} // namespace rsorth
