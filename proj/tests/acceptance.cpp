// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "rsorth/experiment.hpp"

using namespace rsorth;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const char* id, const std::string& what, bool ok, const std::string& detail) {
    std::printf("%s %-4s %-58s %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> ranks(const std::vector<double>& xs) {
    std::vector<std::size_t> idx(xs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::ranges::sort(idx, [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> r(xs.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && xs[idx[j + 1]] == xs[idx[i]]) ++j;
        for (std::size_t q = i; q <= j; ++q) r[idx[q]] = 0.5 * static_cast<double>(i + j);
        i = j + 1;
    }
    return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const auto n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

double median(std::vector<double> xs) {
    std::ranges::sort(xs);
    const std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TargetChannel probe_target(Eigen::Index m, Eigen::Index k, std::uint64_t seed) {
    return TargetChannel(1.0, random_semi_unitary(m, k, derive_seed(seed, Stream::Probe)));
}

constexpr SurfaceKind kPowerKinds[] = {SurfaceKind::Aris, SurfaceKind::Fris};

void exact_csi() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const ChannelSet a = generate_iid_rayleigh(4, 2, 8, 1.0, seed);
        worst = std::max(worst, orthogonality_residual(effective_channel(a, solve_aris(a, probe_target(4, 2, seed))), 1.0));
        const ChannelSet f = generate_iid_rayleigh(4, 2, 4, 1.0, seed);
        worst = std::max(worst, orthogonality_residual(effective_channel(f, solve_fris(f, probe_target(4, 2, seed))), 1.0));
    }
    const double wall = seconds_since(t0);
    report("A1", "exact-CSI orthogonalization, 100 seeds ARIS N=8 / FRIS N=4",
           worst <= 1e-7 && wall < 10.0, fmt("max residual %.2e (tol 1e-7), %.2fs (limit 10s)", worst, wall));
}

void pilot_counts() {
    const ChannelSet a = generate_iid_rayleigh(4, 2, 8, 1.0, 1);
    const ChannelSet f4 = generate_iid_rayleigh(4, 2, 4, 1.0, 1);
    const PilotPlan plan = PilotPlan::identity(2);
    const auto sa = end_to_end_configure(a, SurfaceKind::Aris, probe_target(4, 2, 1), plan, 1).pilot_slots_used;
    const auto sf = end_to_end_configure(a, SurfaceKind::Fris, probe_target(4, 2, 1), plan, 1).pilot_slots_used;
    const auto sf4 = end_to_end_configure(f4, SurfaceKind::Fris, probe_target(4, 2, 1), plan, 1).pilot_slots_used;
    const bool table = pilot_count(SurfaceKind::Aris, 4, 2, 8).slots == 18 &&
                       pilot_count(SurfaceKind::Fris, 4, 2, 8).slots == 14 &&
                       pilot_count(SurfaceKind::Fris, 4, 2, 4).slots == 8;
    report("A2", "pilot slots M=4 K=2: ARIS N=8, FRIS N=8, FRIS N=4",
           table && sa == 18 && sf == 14 && sf4 == 8,
           fmt("measured %ld/%ld/%ld (expected 18/14/8)", static_cast<long>(sa), static_cast<long>(sf),
               static_cast<long>(sf4)));
}

void noiseless_round_trip() {
    double worst = 0.0;
    for (const SurfaceKind kind : kPowerKinds) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const ChannelSet cs = generate_iid_rayleigh(4, 2, 8, 1.0, seed);
            const auto r = end_to_end_configure(cs, kind, probe_target(4, 2, seed), PilotPlan::identity(2), seed);
            worst = std::max(worst, r.residual);
        }
    }
    report("A3", "noiseless estimate-then-configure, 20 seeds per kind", worst <= 1e-7,
           fmt("max relative residual %.2e (tol 1e-7)", worst));
}

void power_consistency() {
    double worst = 0.0;
    for (const SurfaceKind kind : kPowerKinds) {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const ChannelSet cs = generate_iid_rayleigh(4, 2, kind == SurfaceKind::Aris ? 8 : 4, 1.0, seed);
            const PowerObjective obj(cs, kind);
            const SemiUnitary u = random_semi_unitary(4, 2, derive_seed(seed, Stream::Probe));
            const double beta = 0.25 + static_cast<double>(seed % 7);
            const CMatrix desired = std::sqrt(beta) * u.matrix();
            const RsConfig cfg = kind == SurfaceKind::Aris ? solve_aris_for(cs, desired) : solve_fris_for(cs, desired);
            const double solver = rs_sum_power(cfg);
            worst = std::max(worst, std::abs(obj.power(beta, u.matrix()) - solver) / std::max(1.0, solver));
        }
    }
    report("A4", "closed-form power vs solver output, 50 instances per kind", worst <= 1e-9,
           fmt("max relative error %.2e (tol 1e-9)", worst));
}

void gradients() {
    double worst = 0.0;
    for (const SurfaceKind kind : kPowerKinds) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const ChannelSet cs = generate_iid_rayleigh(4, 2, kind == SurfaceKind::Aris ? 8 : 4, 1.0, seed);
            const PowerObjective obj(cs, kind);
            const CMatrix u = random_semi_unitary(4, 2, derive_seed(seed, Stream::Probe)).matrix();
            const CMatrix fd = finite_diff_grad(obj, u, 1e-6);
            worst = std::max(worst, (obj.gradient(u) - fd).norm() / std::max(1.0, fd.norm()));
        }
    }
    report("A5", "analytic gradients vs central differences (h=1e-6)", worst <= 1e-4,
           fmt("max relative error %.2e (tol 1e-4)", worst));
}

void descent() {
    bool monotone = true;
    double defect = 0.0;
    double zero_power = 0.0;
    OptimizerConfig cfg;
    cfg.max_iters = 300;
    for (const SurfaceKind kind : kPowerKinds) {
        const Eigen::Index n = kind == SurfaceKind::Aris ? 8 : 4;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            cfg.seed = seed;
            const OptimResult r = minimize_power(generate_iid_rayleigh(4, 2, n, 1.0, seed), kind, cfg);
            for (std::size_t i = 1; i < r.trace.size(); ++i) {
                monotone = monotone && r.trace[i].objective <= r.trace[i - 1].objective;
            }
            defect = std::max({defect, r.max_unitarity_defect, unitarity_defect(r.u_star.matrix())});
        }
        zero_power = std::max(zero_power, minimize_power(generate_iid_rayleigh(4, 2, n, 0.0, 3), kind, cfg).p_min);
    }
    report("A6", "descent: monotone traces, unitary iterates, E0=0 -> zero power",
           monotone && defect <= 1e-8 && zero_power <= 1e-10,
           fmt("monotone=%s, max defect %.2e (tol 1e-8), p_min(E0=0) %.2e (tol 1e-10)", monotone ? "yes" : "no",
               defect, zero_power));
}

/// Power and gain trends from one default-grid sweep.
void sweep_trends() {
    ExperimentSpec spec;
    spec.trials = 50;
    const auto t0 = Clock::now();
    const SweepResult r = run_sweep(spec);
    const double wall = seconds_since(t0);

    const auto series = [&](const std::vector<SweepRow>& rows, SurfaceKind kind, const std::string& metric) {
        std::vector<double> ys;
        for (const auto& row : rows) {
            if (row.kind == kind && row.metric == metric) ys.push_back(row.mean);
        }
        return ys;
    };

    double rho_min = 1.0;
    double worst_low_e0 = 0.0;
    for (const SurfaceKind kind : kPowerKinds) {
        const auto power = series(r.fig1_power, kind, "avg_power_per_element");
        rho_min = std::min(rho_min, spearman(spec.e0_grid, power));
        for (std::size_t i = 0; i < spec.e0_grid.size(); ++i) {
            if (spec.e0_grid[i] <= 1.0) worst_low_e0 = std::max(worst_low_e0, power[i]);
        }
    }
    report("A7", "power sweep: mean p/N rises with E0 and stays <= 1 for E0 <= 1",
           r.complete && rho_min > 0.9 && worst_low_e0 <= 1.0 && wall < 600.0,
           fmt("min Spearman %.3f (>0.9), max p/N at E0<=1 %.3f (<=1), %.0fs (limit 600s)", rho_min, worst_low_e0,
               wall));

    const auto aris = series(r.fig2_gain, SurfaceKind::Aris, "beta_at_unit_power");
    const auto fris = series(r.fig2_gain, SurfaceKind::Fris, "beta_at_unit_power");
    int wins = 0;
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < aris.size(); ++i) {
        if (fris[i] > aris[i]) ++wins;
        worst_ratio = std::min(worst_ratio, fris[i] / aris[i]);
    }
    report("A8", "gain sweep: FRIS unit-power gain above ARIS at every E0",
           wins == static_cast<int>(aris.size()),
           fmt("%d/%zu grid points, min FRIS/ARIS ratio %.3f", wins, aris.size(), worst_ratio));
}

void ris_baseline() {
    const ExperimentSpec spec;
    bool all_better = true;
    double kappa_floor = std::numeric_limits<double>::infinity();
    std::string detail;
    for (const double e0 : spec.e0_grid) {
        std::vector<double> optimized;
        std::vector<double> random;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const ChannelSet cs = generate_iid_rayleigh(4, 2, 8, e0, seed);
            RisOptConfig cfg = spec.ris_opt;
            cfg.seed = seed;
            const double k_opt = minimize_condition_number(cs, cfg).kappa;
            const double k_rnd = kappa_objective(cs, random_phases(8, derive_seed(seed, Stream::Probe)));
            optimized.push_back(k_opt);
            random.push_back(k_rnd);
            kappa_floor = std::min({kappa_floor, k_opt, k_rnd});
        }
        const double mo = median(optimized);
        const double mr = median(random);
        if (!(mo < mr)) {
            all_better = false;
            detail += fmt(" [E0=%g: %.3f vs %.3f]", e0, mo, mr);
        }
    }
    report("A9", "RIS: median optimized kappa below random phases, kappa >= 1",
           all_better && kappa_floor >= 1.0,
           fmt("min kappa %.4f over 20 seeds x %zu E0", kappa_floor, spec.e0_grid.size()) + detail);
}

void determinism() {
    ExperimentSpec spec;
    spec.trials = 4;
    spec.power_opt.max_iters = 60;
    spec.power_opt.restarts = 2;
    spec.ris_opt.restarts = 2;
    spec.ris_opt.max_iters = 40;
    const auto base = std::filesystem::temp_directory_path() / "rsorth_acceptance_determinism";
    std::filesystem::remove_all(base);
    spec.workers = 1;
    const SweepOutputs a = write_sweep_outputs(base / "run1", spec, run_sweep(spec), 0.0);
    spec.workers = 3;
    const SweepOutputs b = write_sweep_outputs(base / "run2", spec, run_sweep(spec), 0.0);
    const bool same = slurp(a.fig1_power) == slurp(b.fig1_power) && slurp(a.fig1_gain) == slurp(b.fig1_gain) &&
                      slurp(a.fig2_gain) == slurp(b.fig2_gain);
    std::filesystem::remove_all(base);
    report("A10", "sweep CSVs byte-identical across runs (1 vs 3 workers)", same, same ? "identical" : "differ");
}

} // namespace

int main() {
    try {
        exact_csi();
        pilot_counts();
        noiseless_round_trip();
        power_consistency();
        gradients();
        descent();
        sweep_trends();
        ris_baseline();
        determinism();
    } catch (const std::exception& e) {
        std::printf("FAIL      unexpected exception: %s\n", e.what());
        return 2;
    }
    std::printf("%s: %d failing criteria\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
