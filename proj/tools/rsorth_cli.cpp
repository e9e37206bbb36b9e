// rsorth: command-line harness for reconfigurable-surface channel orthogonalization.
//
//   rsorth orthogonalize --kind aris --m 4 --k 2 --n 8 --e0 1 --seed 1
//   rsorth estimate      --kind fris --n 8 --n0 0.01
//   rsorth minpower      --kind aris --trace-csv trace.csv
//   rsorth baseline      --n 8
//   rsorth sweep         --trials 50 --out-dir out/
//   rsorth selftest

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "rsorth/channel.hpp"
#include "rsorth/estimation.hpp"
#include "rsorth/experiment.hpp"
#include "rsorth/orthogonalizer.hpp"
#include "rsorth/power_opt.hpp"
#include "rsorth/ris_baseline.hpp"
#include "rsorth/serialization.hpp"

namespace {

using namespace rsorth;

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) {
    g_interrupted.store(true);
}

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<Eigen::Index> m;
    std::optional<Eigen::Index> k;
    std::optional<Eigen::Index> n;
    std::optional<double> e0;
    std::optional<int> trials;
    std::optional<double> n0;
    std::optional<double> es;
    std::optional<int> workers;
    std::string out_dir = "sweep_out";
    std::string kind;
    std::string channel_in;
    std::string channel_out;
    std::string config_out;
    std::string report_out;
    std::string trace_csv;
    bool corrupt_gradient = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "JSON experiment config; flags override its values")->check(CLI::ExistingFile);
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--m", f.m, "BS antennas M");
    cmd->add_option("--k", f.k, "UEs K");
    cmd->add_option("--n", f.n, "surface elements N (default per kind: ARIS/RIS M*K, FRIS M)");
    cmd->add_option("--e0", f.e0, "normalized direct-channel power E0");
    cmd->add_option("--trials", f.trials, "Monte Carlo trials per grid point");
    cmd->add_option("--n0", f.n0, "noise power N0 for pilot transmissions");
    cmd->add_option("--es", f.es, "pilot symbol energy Es");
    cmd->add_option("--workers", f.workers, "sweep worker threads (0 = all cores)");
    cmd->add_option("--out-dir", f.out_dir, "sweep output directory");
    cmd->add_option("--kind", f.kind, "surface kind")->check(CLI::IsMember({"aris", "fris", "ris"}));
}

ExperimentSpec resolve_spec(const CommonFlags& f) {
    ExperimentSpec spec = f.config.empty() ? ExperimentSpec{} : spec_from_json(read_json_file(f.config));
    if (f.seed) spec.seed = *f.seed;
    if (f.m) spec.m = *f.m;
    if (f.k) spec.k = *f.k;
    if (f.e0) spec.e0 = *f.e0;
    if (f.trials) spec.trials = *f.trials;
    if (f.n0) spec.n0 = *f.n0;
    if (f.es) spec.es = *f.es;
    if (f.workers) spec.workers = *f.workers;
    if (f.n) {
        const auto kind = parse_surface_kind(f.kind);
        if (!kind || *kind == SurfaceKind::Aris) spec.n_aris = *f.n;
        if (!kind || *kind == SurfaceKind::Fris) spec.n_fris = *f.n;
        if (!kind || *kind == SurfaceKind::Ris) spec.n_ris = *f.n;
    }
    spec.validate();
    return spec;
}

SurfaceKind resolve_kind(const CommonFlags& f, SurfaceKind fallback) {
    return f.kind.empty() ? fallback : *parse_surface_kind(f.kind);
}

ChannelSet instance_channel(const CommonFlags& f, const ExperimentSpec& spec, SurfaceKind kind) {
    ChannelSet cs = f.channel_in.empty()
                        ? generate_iid_rayleigh(spec.m, spec.k, spec.elements(kind), spec.e0, spec.seed)
                        : channel_set_from_json(read_json_file(f.channel_in));
    if (!f.channel_out.empty()) {
        write_json_file(f.channel_out, to_json(cs));
    }
    return cs;
}

/// Unit-gain target with a Haar-random U drawn from the master seed.
TargetChannel instance_target(const ChannelSet& cs, const ExperimentSpec& spec) {
    return TargetChannel(1.0, random_semi_unitary(cs.m, cs.k, derive_seed(spec.seed, Stream::Probe)));
}

void print_header(const ChannelSet& cs, SurfaceKind kind) {
    std::cout << "surface " << to_string(kind) << "  M=" << cs.m << " K=" << cs.k << " N=" << cs.n
              << " E0=" << cs.e0 << '\n';
}

int cmd_orthogonalize(const CommonFlags& f) {
    const ExperimentSpec spec = resolve_spec(f);
    const SurfaceKind kind = resolve_kind(f, SurfaceKind::Aris);
    if (kind == SurfaceKind::Ris) {
        (void)min_elements(kind, spec.m, spec.k);
    }
    const ChannelSet cs = instance_channel(f, spec, kind);
    print_header(cs, kind);
    const TargetChannel target = instance_target(cs, spec);
    const RsConfig config = kind == SurfaceKind::Aris ? solve_aris(cs, target) : solve_fris(cs, target);
    const CMatrix h = effective_channel(cs, config);
    std::cout << std::setprecision(6) << std::scientific;
    std::cout << "target beta              " << target.beta << '\n';
    std::cout << "residual ||H - sqrt(b)U|| / ||sqrt(b)U||  " << relative_residual(h, target.matrix()) << '\n';
    std::cout << "orthogonality ||H^H H - bI|| / (bK)       " << orthogonality_residual(h, target.beta) << '\n';
    std::cout << "sum power ||Theta||_F^2  " << rs_sum_power(config) << '\n';
    std::cout << "avg power per element    " << rs_sum_power(config) / static_cast<double>(cs.n) << '\n';
    const json cfg_json = to_json(config);
    if (!f.config_out.empty()) {
        write_json_file(f.config_out, cfg_json);
    } else {
        std::cout << "config " << cfg_json.dump() << '\n';
    }
    return 0;
}

int cmd_estimate(const CommonFlags& f) {
    const ExperimentSpec spec = resolve_spec(f);
    const SurfaceKind kind = resolve_kind(f, SurfaceKind::Aris);
    const ChannelSet cs = instance_channel(f, spec, kind);
    print_header(cs, kind);
    const TargetChannel target = instance_target(cs, spec);
    const PilotPlan plan = PilotPlan::identity(cs.k, spec.n0, spec.es);
    const EstimationReport report =
        end_to_end_configure(cs, kind, target, plan, derive_seed(spec.seed, Stream::Noise));
    std::cout << "pilot slot ledger (N0=" << spec.n0 << ", Es=" << spec.es << ")\n";
    for (const auto& entry : report.ledger) {
        std::cout << "  " << std::left << std::setw(48) << entry.step << std::right << std::setw(6) << entry.slots
                  << '\n';
    }
    const PilotCount expected = pilot_count(kind, cs.m, cs.k, cs.n);
    std::cout << "  " << std::left << std::setw(48) << "total" << std::right << std::setw(6)
              << report.pilot_slots_used << "   (expected: " << expected.slots << ")\n";
    std::cout << std::setprecision(6) << std::scientific;
    std::cout << "residual ||H - sqrt(b)U|| / ||sqrt(b)U||  " << report.residual << '\n';
    std::cout << "sum power ||Theta||_F^2  " << rs_sum_power(report.config) << '\n';
    if (!f.report_out.empty()) {
        write_json_file(f.report_out, to_json(report));
    }
    if (!f.config_out.empty()) {
        write_json_file(f.config_out, to_json(report.config));
    }
    return 0;
}

int cmd_minpower(const CommonFlags& f) {
    const ExperimentSpec spec = resolve_spec(f);
    const SurfaceKind kind = resolve_kind(f, SurfaceKind::Aris);
    const ChannelSet cs = instance_channel(f, spec, kind);
    print_header(cs, kind);
    OptimizerConfig cfg = spec.power_opt;
    cfg.seed = spec.seed;
    const PowerObjective obj(cs, kind);
    const OptimResult r = minimize_power(obj, cfg);
    const auto nd = static_cast<double>(cs.n);
    std::cout << std::setprecision(6) << std::scientific;
    std::cout << "minimum sum power        " << r.p_min << '\n';
    std::cout << "avg power per element    " << r.p_min / nd << '\n';
    std::cout << "channel gain beta*       " << r.beta_star << '\n';
    if (const auto unit = beta_for_power(obj, r.u_star.matrix(), nd)) {
        std::cout << "gain at unit avg power   " << *unit << '\n';
    } else {
        std::cout << "gain at unit avg power   unreachable (minimum power exceeds N)\n";
    }
    std::cout << "best restart             " << r.best_restart << " of " << cfg.restarts << '\n';
    std::cout << "iterations               " << r.trace.size() - 1 << (r.converged ? " (converged)" : " (not converged)")
              << '\n';
    if (!f.trace_csv.empty()) {
        std::ofstream os(f.trace_csv, std::ios::binary);
        write_trace_csv(os, r.trace);
    }
    return 0;
}

int cmd_baseline(const CommonFlags& f) {
    const ExperimentSpec spec = resolve_spec(f);
    const ChannelSet cs = instance_channel(f, spec, SurfaceKind::Ris);
    print_header(cs, SurfaceKind::Ris);
    RisOptConfig cfg = spec.ris_opt;
    cfg.seed = spec.seed;
    const RisResult r = minimize_condition_number(cs, cfg);
    double initial_best = std::numeric_limits<double>::infinity();
    for (const double kappa : r.initial_kappas) initial_best = std::min(initial_best, kappa);
    std::cout << std::setprecision(6) << std::scientific;
    std::cout << "kappa (optimized)        " << r.kappa << '\n';
    std::cout << "kappa (best random init) " << initial_best << '\n';
    std::cout << "avg gain per UE          " << r.gains.average << '\n';
    std::cout << "min gain per UE          " << r.gains.minimum << '\n';
    std::cout << "sum power                " << static_cast<double>(cs.n) << '\n';
    if (!f.config_out.empty()) {
        write_json_file(f.config_out, to_json(RsConfig::ris(r.phases)));
    }
    return 0;
}

int cmd_sweep(const CommonFlags& f) {
    const ExperimentSpec spec = resolve_spec(f);
    std::signal(SIGINT, on_sigint);
    const auto start = std::chrono::steady_clock::now();
    const SweepResult result = run_sweep(spec, SweepOptions{&g_interrupted});
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const SweepOutputs out = write_sweep_outputs(f.out_dir, spec, result, wall);
    std::cout << "wrote " << out.fig1_power.string() << ", " << out.fig1_gain.string() << ", "
              << out.fig2_gain.string() << ", " << out.plot_script.string() << ", " << out.manifest.string() << '\n';
    std::cout << "wall time " << std::fixed << std::setprecision(1) << wall << " s"
              << (result.complete ? "" : "  (interrupted: rows marked incomplete)") << '\n';
    return result.complete ? 0 : 130;
}

int cmd_selftest(const CommonFlags& f) {
    SelftestOptions options;
    if (f.seed) options.seed = *f.seed;
    options.corrupt_gradient_sign = f.corrupt_gradient;
    const auto start = std::chrono::steady_clock::now();
    const auto checks = run_selftest(options);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    int failed = 0;
    for (const auto& c : checks) {
        std::cout << (c.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(58) << c.name << std::right
                  << std::scientific << std::setprecision(3) << c.measured << "  (tol " << c.tolerance << ")\n";
        failed += c.passed ? 0 : 1;
    }
    std::cout << std::fixed << std::setprecision(2) << checks.size() - failed << "/" << checks.size()
              << " checks passed in " << wall << " s\n";
    return failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Channel orthogonalization with reconfigurable surfaces (ARIS, FRIS, RIS baseline)"};
    app.require_subcommand(1);
    CommonFlags flags;

    auto* ortho = app.add_subcommand("orthogonalize", "closed-form ARIS/FRIS configuration for one channel");
    auto* estimate = app.add_subcommand("estimate", "simulate the pilot protocol and configure the surface");
    auto* minpower = app.add_subcommand("minpower", "minimize surface power over the target channel");
    auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over E0; writes CSVs and a plot script");
    auto* baseline = app.add_subcommand("baseline", "phase-only RIS condition-number minimization");
    auto* selftest = app.add_subcommand("selftest", "cross-module consistency checks");
    for (auto* cmd : {ortho, estimate, minpower, sweep, baseline, selftest}) {
        add_common(cmd, flags);
    }
    for (auto* cmd : {ortho, estimate, minpower, baseline}) {
        cmd->add_option("--channel", flags.channel_in, "load the channel from a JSON fixture")
            ->check(CLI::ExistingFile);
        cmd->add_option("--save-channel", flags.channel_out, "write the channel as a JSON fixture");
        cmd->add_option("--save-config", flags.config_out, "write the surface configuration as JSON");
    }
    estimate->add_option("--report", flags.report_out, "write the estimation report as JSON");
    minpower->add_option("--trace-csv", flags.trace_csv, "write the descent trace as CSV");
    selftest->add_flag("--corrupt-gradient", flags.corrupt_gradient,
                       "negate the analytic gradients (the gradient checks must then fail)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ortho) return cmd_orthogonalize(flags);
        if (*estimate) return cmd_estimate(flags);
        if (*minpower) return cmd_minpower(flags);
        if (*sweep) return cmd_sweep(flags);
        if (*baseline) return cmd_baseline(flags);
        if (*selftest) return cmd_selftest(flags);
    } catch (const rsorth::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
