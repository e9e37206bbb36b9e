#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "rsorth/channel.hpp"
#include "rsorth/linalg.hpp"
#include "rsorth/orthogonalizer.hpp"
#include "rsorth/random.hpp"

namespace rsorth {

/// The three scalar pieces of the sum-power parabola
/// P(beta, U) = beta * g(U) - 2 sqrt(beta) f(U) + c.
struct PowerTerms {
    double f;
    double g;
    double c;
};

/// Sum power needed to reach sqrt(beta) * U with ARIS or FRIS, written in terms
/// of cached inverse Gram matrices:
///   ARIS: G12 = C C^H with C the cascade matrix (MK x MK)
///   FRIS: G1 = H1 H1^H (M x M) and G2 = H2^H H2 (K x K)
/// Immutable after construction; safe to share between threads.
class PowerObjective {
public:
    PowerObjective(const ChannelSet& cs, SurfaceKind kind) : kind_(kind), m_(cs.m), k_(cs.k), h0_(cs.h0) {
        switch (kind) {
        case SurfaceKind::Aris: {
            require(cs.n >= cs.m * cs.k, ErrorCode::InfeasibleN,
                    "ARIS needs N >= M*K = " + std::to_string(cs.m * cs.k));
            const CMatrix cascade = build_cascade_matrix(cs.h1, cs.h2);
            inv_left_ = hpd_inverse(cascade * cascade.adjoint(), "G12");
            inv_h0_ = inv_left_ * vec(h0_);
            c_ = (vec(h0_).adjoint() * inv_h0_)(0, 0).real();
            break;
        }
        case SurfaceKind::Fris: {
            require(cs.n >= cs.m, ErrorCode::InfeasibleN, "FRIS needs N >= M = " + std::to_string(cs.m));
            inv_left_ = hpd_inverse(cs.h1 * cs.h1.adjoint(), "G1");
            inv_right_ = hpd_inverse(cs.h2.adjoint() * cs.h2, "G2");
            inv_h0_ = inv_left_ * h0_ * inv_right_;
            c_ = (h0_.adjoint() * inv_h0_).trace().real();
            break;
        }
        case SurfaceKind::Ris:
            throw Error(ErrorCode::NotApplicable, "RIS power is fixed at N");
        }
    }

    [[nodiscard]] SurfaceKind kind() const noexcept { return kind_; }
    [[nodiscard]] Eigen::Index m() const noexcept { return m_; }
    [[nodiscard]] Eigen::Index k() const noexcept { return k_; }

    /// f, g and c at an arbitrary M x K matrix (not necessarily semi-unitary, so
    /// that finite differences can leave the manifold).
    [[nodiscard]] PowerTerms terms(const CMatrix& u) const {
        check_shape(u);
        if (kind_ == SurfaceKind::Aris) {
            const CMatrix x = vec(u);
            const double g = (x.adjoint() * inv_left_ * x)(0, 0).real();
            const double f = (x.adjoint() * inv_h0_)(0, 0).real();
            return {f, g, c_};
        }
        const CMatrix gu = inv_left_ * u * inv_right_;
        const double g = (u.adjoint() * gu).trace().real();
        const double f = (u.adjoint() * inv_h0_).trace().real();
        return {f, g, c_};
    }

    [[nodiscard]] double power(double beta, const CMatrix& u) const {
        const PowerTerms t = terms(u);
        return beta * t.g - 2.0 * std::sqrt(beta) * t.f + t.c;
    }

    /// (f/g)^2, the stationary point in sqrt(beta). It minimizes P over beta only when
    /// f > 0; for f < 0 it gives c + 3 f^2 / g, which steers the descent towards -U.
    [[nodiscard]] double beta_opt(const CMatrix& u) const {
        const PowerTerms t = terms(u);
        const double r = t.f / t.g;
        return r * r;
    }

    /// P(beta_opt(U), U), the objective minimized over the unitary group.
    [[nodiscard]] double reduced(const CMatrix& u) const { return power(beta_opt(u), u); }

    /// dP(beta_opt(U), U)/dU^* in the Wirtinger convention; M x K.
    ///   b / g^2 * (-f^2 A(U) + f g A(H0)),  b = 1 - 2 sign(f)
    /// where A(X) = unvec(G12^{-1} vec X) for ARIS and G1^{-1} X G2^{-1} for FRIS.
    [[nodiscard]] CMatrix gradient(const CMatrix& u) const {
        const PowerTerms t = terms(u);
        const double sign = (t.f > 0.0) ? 1.0 : (t.f < 0.0 ? -1.0 : 0.0);
        const double b = 1.0 - 2.0 * sign;
        CMatrix a_u;
        CMatrix a_h0;
        if (kind_ == SurfaceKind::Aris) {
            a_u = unvec(inv_left_ * vec(u), m_, k_);
            a_h0 = unvec(inv_h0_, m_, k_);
        } else {
            a_u = inv_left_ * u * inv_right_;
            a_h0 = inv_h0_;
        }
        return (b / (t.g * t.g)) * (-t.f * t.f * a_u + t.f * t.g * a_h0);
    }

private:
    static CMatrix hpd_inverse(const CMatrix& gram, const char* name) {
        const CMatrix h = 0.5 * (gram + gram.adjoint());
        const Eigen::SelfAdjointEigenSolver<CMatrix> eig(h, Eigen::EigenvaluesOnly);
        const double lmin = eig.eigenvalues().minCoeff();
        const double lmax = eig.eigenvalues().maxCoeff();
        require(lmax > 0.0 && lmin > tol::gram_rcond * lmax, ErrorCode::SingularGram,
                std::string(name) + " is not positive definite");
        CMatrix inv = h.llt().solve(CMatrix::Identity(h.rows(), h.cols()));
        return 0.5 * (inv + inv.adjoint());
    }

    void check_shape(const CMatrix& u) const {
        require(u.rows() == m_ && u.cols() == k_, ErrorCode::DimensionMismatch,
                "expected " + std::to_string(m_) + "x" + std::to_string(k_) + ", got " + shape(u));
    }

    SurfaceKind kind_;
    Eigen::Index m_;
    Eigen::Index k_;
    CMatrix h0_;
    CMatrix inv_left_;
    CMatrix inv_right_;
    CMatrix inv_h0_;
    double c_ = 0.0;
};

namespace detail {
inline void require_kind(const PowerObjective& obj, SurfaceKind kind) {
    require(obj.kind() == kind, ErrorCode::InvalidArgument,
            "objective is for " + std::string(to_string(obj.kind())) + ", not " + std::string(to_string(kind)));
}
} // namespace detail

[[nodiscard]] inline double pa_power(const PowerObjective& obj, double beta, const SemiUnitary& u) {
    detail::require_kind(obj, SurfaceKind::Aris);
    require(beta >= 0.0, ErrorCode::InvalidArgument, "beta must be non-negative");
    return obj.power(beta, u.matrix());
}

[[nodiscard]] inline double pf_power(const PowerObjective& obj, double beta, const SemiUnitary& u) {
    detail::require_kind(obj, SurfaceKind::Fris);
    require(beta >= 0.0, ErrorCode::InvalidArgument, "beta must be non-negative");
    return obj.power(beta, u.matrix());
}

/// (f/g)^2, the stationary point of the parabola in sqrt(beta).
[[nodiscard]] inline double beta_opt(const PowerObjective& obj, const SemiUnitary& u) {
    return obj.beta_opt(u.matrix());
}

[[nodiscard]] inline CMatrix euclidean_grad_pa(const PowerObjective& obj, const SemiUnitary& u) {
    detail::require_kind(obj, SurfaceKind::Aris);
    return obj.gradient(u.matrix());
}

[[nodiscard]] inline CMatrix euclidean_grad_pf(const PowerObjective& obj, const SemiUnitary& u) {
    detail::require_kind(obj, SurfaceKind::Fris);
    return obj.gradient(u.matrix());
}

/// Central differences of a real function of a complex matrix along the real and
/// imaginary part of every entry, combined as d/dX^* = (d/dRe + i d/dIm) / 2.
template <typename Function>
[[nodiscard]] CMatrix finite_diff_wirtinger(Function&& fn, const CMatrix& x, double step) {
    require(step > 0.0, ErrorCode::InvalidArgument, "finite-difference step must be positive");
    CMatrix grad(x.rows(), x.cols());
    CMatrix probe = x;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const cplx original = probe(i, j);
            probe(i, j) = original + cplx{step, 0.0};
            const double re_plus = fn(probe);
            probe(i, j) = original - cplx{step, 0.0};
            const double re_minus = fn(probe);
            probe(i, j) = original + cplx{0.0, step};
            const double im_plus = fn(probe);
            probe(i, j) = original - cplx{0.0, step};
            const double im_minus = fn(probe);
            probe(i, j) = original;
            const double d_re = (re_plus - re_minus) / (2.0 * step);
            const double d_im = (im_plus - im_minus) / (2.0 * step);
            grad(i, j) = 0.5 * cplx{d_re, d_im};
        }
    }
    return grad;
}

/// Finite-difference oracle for PowerObjective::gradient.
[[nodiscard]] inline CMatrix finite_diff_grad(const PowerObjective& obj, const CMatrix& u, double step) {
    return finite_diff_wirtinger([&obj](const CMatrix& x) { return obj.reduced(x); }, u, step);
}

[[nodiscard]] inline CMatrix finite_diff_grad(const PowerObjective& obj, const SemiUnitary& u, double step) {
    return finite_diff_grad(obj, u.matrix(), step);
}

struct OptimizerConfig {
    int max_iters = 1000;
    double grad_tol = 1e-9;
    double initial_step = 1e-2;
    double min_step = 1e-12;
    int restarts = 8;
    std::uint64_t seed = 1;

    void validate() const {
        require(max_iters > 0 && grad_tol > 0.0 && initial_step > 0.0 && min_step > 0.0 && restarts > 0,
                ErrorCode::InvalidArgument, "optimizer settings must be positive");
    }
};

enum class StopReason { GradientTolerance, MaxIterations, StepUnderflow };

struct TraceEntry {
    int iteration;
    double objective;
    double grad_norm;
    double step;
};

struct OptimResult {
    SemiUnitary u_star;
    double beta_star = 0.0;
    double p_min = 0.0;
    std::vector<TraceEntry> trace;
    bool converged = false;
    StopReason stop = StopReason::MaxIterations;
    /// Largest ||U^H U - I||_F seen over the iterates.
    double max_unitarity_defect = 0.0;
    int best_restart = 0;
    /// P(beta_opt(U0), U0) of every initialization that was tried.
    std::vector<double> initial_objectives;
};

/// Steepest descent along geodesics of U(M) with Armijo step adaptation.
/// The objective only depends on the first K columns of the iterate.
[[nodiscard]] inline OptimResult riemannian_descent(const PowerObjective& obj, const SemiUnitary& u0,
                                                    const OptimizerConfig& cfg) {
    cfg.validate();
    require(u0.m() == obj.m() && u0.k() == obj.k(), ErrorCode::DimensionMismatch, "initial point has wrong shape");
    const Eigen::Index m = obj.m();
    const Eigen::Index k = obj.k();
    CMatrix u = complete_to_unitary(u0, derive_seed(cfg.seed, Stream::Init, 0xC0'4D'1E'7EULL));

    const auto objective = [&](const CMatrix& full) { return obj.reduced(full.leftCols(k)); };
    const auto riemannian_direction = [&](const CMatrix& full) {
        CMatrix gamma = CMatrix::Zero(m, m);
        gamma.leftCols(k) = obj.gradient(full.leftCols(k));
        const CMatrix a = gamma * full.adjoint();
        return CMatrix(a - a.adjoint());
    };

    double mu = cfg.initial_step;
    double p = objective(u);
    double defect = unitarity_defect(u);
    OptimResult result{u0, 0.0, p, {}, false, StopReason::MaxIterations, defect, 0, {p}};

    for (int it = 0;; ++it) {
        const CMatrix g = riemannian_direction(u);
        const double g2 = g.squaredNorm();
        const double gnorm = std::sqrt(g2);
        result.trace.push_back({it, p, gnorm, it == 0 ? 0.0 : mu});
        if (gnorm < cfg.grad_tol) {
            result.stop = StopReason::GradientTolerance;
            break;
        }
        if (it >= cfg.max_iters) {
            result.stop = StopReason::MaxIterations;
            break;
        }
        // Each rotation is exponentiated directly; repeated squaring would double the
        // rounding error per doubling and break unitarity.
        CMatrix rotation = expm_skew_hermitian(-mu * g);
        CMatrix doubled = expm_skew_hermitian(-2.0 * mu * g);
        for (int guard = 0; guard < 64 && p - objective(doubled * u) >= mu * g2; ++guard) {
            rotation = std::move(doubled);
            mu *= 2.0;
            doubled = expm_skew_hermitian(-2.0 * mu * g);
        }
        double candidate = objective(rotation * u);
        bool stalled = false;
        while (p - candidate < 0.5 * mu * g2) {
            mu *= 0.5;
            if (mu < cfg.min_step) {
                stalled = true;
                break;
            }
            rotation = expm_skew_hermitian(-mu * g);
            candidate = objective(rotation * u);
        }
        if (stalled) {
            result.stop = StopReason::StepUnderflow;
            break;
        }
        CMatrix next = rotation * u;
        const double next_defect = unitarity_defect(next);
        if (next_defect > tol::unitary) {
            CMatrix fixed = orthonormalize(next);
            const double repaired = objective(fixed);
            // Keep the trace monotone: only adopt the repaired iterate if it does not
            // undo the Armijo decrease.
            if (repaired <= candidate) {
                next = std::move(fixed);
                candidate = repaired;
            }
        }
        u = std::move(next);
        p = candidate;
        result.max_unitarity_defect = std::max(result.max_unitarity_defect, unitarity_defect(u));
    }

    result.converged = result.stop == StopReason::GradientTolerance;
    result.u_star = SemiUnitary(u.leftCols(k), 1e-8);
    result.p_min = p;
    result.beta_star = obj.beta_opt(result.u_star.matrix());
    return result;
}

/// Multi-start minimization of P(beta, U) over beta >= 0 and semi-unitary U.
/// Restart r starts from random_semi_unitary(M, K, derive_seed(seed, Init, r)).
[[nodiscard]] inline OptimResult minimize_power(const PowerObjective& obj, const OptimizerConfig& cfg) {
    cfg.validate();
    std::optional<OptimResult> best;
    std::vector<double> initial;
    for (int r = 0; r < cfg.restarts; ++r) {
        const SemiUnitary u0 = random_semi_unitary(obj.m(), obj.k(), derive_seed(cfg.seed, Stream::Init, r));
        OptimResult run = riemannian_descent(obj, u0, cfg);
        initial.push_back(run.initial_objectives.front());
        if (!best || run.p_min < best->p_min) {
            run.best_restart = r;
            best = std::move(run);
        }
    }
    best->initial_objectives = std::move(initial);
    return std::move(*best);
}

[[nodiscard]] inline OptimResult minimize_power(const ChannelSet& cs, SurfaceKind kind, const OptimizerConfig& cfg) {
    return minimize_power(PowerObjective(cs, kind), cfg);
}

/// Largest beta reaching sum power `budget` at fixed U: the larger root in
/// sqrt(beta) of beta g - 2 sqrt(beta) f + c = budget. Empty when the budget is
/// below the minimum over beta or no root is non-negative.
[[nodiscard]] inline std::optional<double> beta_for_power(const PowerObjective& obj, const CMatrix& u,
                                                          double budget) {
    const PowerTerms t = obj.terms(u);
    const double disc = t.f * t.f - t.g * (t.c - budget);
    if (disc < 0.0) {
        return std::nullopt;
    }
    const double root = (t.f + std::sqrt(disc)) / t.g;
    if (root < 0.0) {
        return std::nullopt;
    }
    return root * root;
}

/// CSV export of a descent trace: iter,objective,grad_norm,step
inline void write_trace_csv(std::ostream& os, const std::vector<TraceEntry>& trace) {
    const auto old_precision = os.precision(17);
    os << "iter,objective,grad_norm,step\n";
    for (const auto& e : trace) {
        os << e.iteration << ',' << e.objective << ',' << e.grad_norm << ',' << e.step << '\n';
    }
    os.precision(old_precision);
}

} // namespace rsorth
