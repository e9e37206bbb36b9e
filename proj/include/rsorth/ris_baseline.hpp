#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "rsorth/channel.hpp"
#include "rsorth/linalg.hpp"
#include "rsorth/random.hpp"
#include "rsorth/surface.hpp"

namespace rsorth {

struct RisOptConfig {
    int restarts = 8;
    int max_iters = 200;
    double fd_step = 1e-6;
    /// Length (radians) of the first normalized gradient step.
    double initial_step = 0.5;
    /// Step multiplier after a rejected step.
    double decay = 0.5;
    double min_step = 1e-8;
    std::uint64_t seed = 1;

    void validate() const {
        require(restarts > 0 && max_iters > 0 && fd_step > 0.0 && initial_step > 0.0 && decay > 0.0 &&
                    decay < 1.0 && min_step > 0.0,
                ErrorCode::InvalidArgument, "RIS optimizer settings out of range");
    }
};

/// kappa(H0 + H1 diag(exp(j phi)) H2)
[[nodiscard]] inline double kappa_objective(const ChannelSet& cs, const RVector& phases) {
    require(phases.size() == cs.n, ErrorCode::DimensionMismatch, "need one phase per element");
    return condition_number(effective_channel(cs, RsConfig::ris(phases)));
}

/// Per-UE channel gains of a (generally non-orthogonal) channel: eigenvalues of H^H H.
struct ChannelGains {
    RVector per_ue;
    double average = 0.0;
    double minimum = 0.0;
};

[[nodiscard]] inline ChannelGains channel_gains(const CMatrix& h) {
    const Eigen::SelfAdjointEigenSolver<CMatrix> eig(h.adjoint() * h, Eigen::EigenvaluesOnly);
    ChannelGains gains;
    gains.per_ue = eig.eigenvalues().cwiseMax(0.0);
    gains.average = gains.per_ue.mean();
    gains.minimum = gains.per_ue.minCoeff();
    return gains;
}

struct RisResult {
    RVector phases;
    double kappa = 0.0;
    ChannelGains gains;
    /// kappa after each accepted step of the winning restart (first entry is the start).
    std::vector<double> trace;
    std::vector<double> initial_kappas;
    int best_restart = 0;
};

[[nodiscard]] inline RVector wrap_phases(RVector phases) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (auto& p : phases) {
        p = std::fmod(p, two_pi);
        if (p < 0.0) {
            p += two_pi;
        }
        if (p >= two_pi) {
            p = 0.0;
        }
    }
    return phases;
}

[[nodiscard]] inline RVector random_phases(Eigen::Index n, std::uint64_t seed) {
    Rng rng(seed);
    RVector phases(n);
    for (auto& p : phases) {
        p = rng.phase();
    }
    return phases;
}

/// Multi-start finite-difference descent of the condition number on the phase
/// torus. Steps along the normalized gradient; a step is kept only if it lowers
/// kappa, otherwise the step length is multiplied by `decay`.
[[nodiscard]] inline RisResult minimize_condition_number(const ChannelSet& cs, const RisOptConfig& cfg) {
    cfg.validate();
    RisResult best;
    if (cs.n == 0) {
        best.kappa = condition_number(cs.h0);
        best.gains = channel_gains(cs.h0);
        best.trace = {best.kappa};
        best.initial_kappas = {best.kappa};
        return best;
    }
    best.kappa = std::numeric_limits<double>::infinity();
    for (int r = 0; r < cfg.restarts; ++r) {
        RVector phases = random_phases(cs.n, derive_seed(cfg.seed, Stream::RisInit, static_cast<std::uint64_t>(r)));
        double kappa = kappa_objective(cs, phases);
        std::vector<double> trace{kappa};
        best.initial_kappas.push_back(kappa);
        double step = cfg.initial_step;
        for (int it = 0; it < cfg.max_iters && step >= cfg.min_step; ++it) {
            RVector grad(cs.n);
            RVector probe = phases;
            for (Eigen::Index i = 0; i < cs.n; ++i) {
                probe(i) = phases(i) + cfg.fd_step;
                const double up = kappa_objective(cs, probe);
                probe(i) = phases(i) - cfg.fd_step;
                const double down = kappa_objective(cs, probe);
                probe(i) = phases(i);
                grad(i) = (up - down) / (2.0 * cfg.fd_step);
            }
            const double gnorm = grad.norm();
            if (!std::isfinite(gnorm) || gnorm == 0.0) {
                break;
            }
            while (step >= cfg.min_step) {
                RVector trial = wrap_phases(phases - (step / gnorm) * grad);
                const double trial_kappa = kappa_objective(cs, trial);
                if (trial_kappa < kappa) {
                    phases = std::move(trial);
                    kappa = trial_kappa;
                    trace.push_back(kappa);
                    step = std::min(cfg.initial_step, 2.0 * step);
                    break;
                }
                step *= cfg.decay;
            }
        }
        if (r == 0 || kappa < best.kappa) {
            best.kappa = kappa;
            best.phases = phases;
            best.trace = std::move(trace);
            best.best_restart = r;
        }
    }
    best.gains = channel_gains(effective_channel(cs, RsConfig::ris(best.phases)));
    return best;
}

} // namespace rsorth
