#pragma once

#include <cmath>

#include "rsorth/channel.hpp"
#include "rsorth/linalg.hpp"
#include "rsorth/surface.hpp"

namespace rsorth {

/// Desired orthogonal channel sqrt(beta) * U, so that H^H H = beta * I_K.
struct TargetChannel {
    double beta;
    SemiUnitary u_tilde;

    TargetChannel(double channel_gain, SemiUnitary u) : beta(channel_gain), u_tilde(std::move(u)) {
        require(beta > 0.0 && std::isfinite(beta), ErrorCode::InvalidArgument, "beta must be positive");
    }

    [[nodiscard]] CMatrix matrix() const { return std::sqrt(beta) * u_tilde.matrix(); }
};

namespace tol {
/// Rank decisions in the closed-form solvers.
inline constexpr double rank_cutoff = 1e-10;
} // namespace tol

/// MK x N matrix whose column n is vec(h1.col(n) * h2.row(n)).
[[nodiscard]] inline CMatrix build_cascade_matrix(const CMatrix& h1, const CMatrix& h2) {
    require(h1.cols() == h2.rows(), ErrorCode::DimensionMismatch,
            "h1 " + shape(h1) + " and h2 " + shape(h2) + " disagree on N");
    const Eigen::Index m = h1.rows();
    const Eigen::Index k = h2.cols();
    CMatrix cascade(m * k, h1.cols());
    for (Eigen::Index n = 0; n < h1.cols(); ++n) {
        cascade.col(n) = (h1.col(n) * h2.row(n)).reshaped();
    }
    return cascade;
}

/// Smallest N allowing perfect orthogonalization.
[[nodiscard]] inline Eigen::Index min_elements(SurfaceKind kind, Eigen::Index m, Eigen::Index k) {
    require(m > k && k >= 1, ErrorCode::InvalidDims, "need M > K >= 1");
    switch (kind) {
    case SurfaceKind::Aris: return m * k;
    case SurfaceKind::Fris: return std::min(m, k);
    case SurfaceKind::Ris: break;
    }
    throw Error(ErrorCode::NotApplicable, "a phase-only RIS cannot orthogonalize the channel in general");
}

/// Minimum-norm alpha with H0 + H1 diag(alpha) H2 = desired, given the cascade
/// matrix directly (the estimation protocol never sees H1 and H2 separately).
[[nodiscard]] inline RsConfig solve_aris_from_cascade(const CMatrix& cascade, const CMatrix& h0,
                                                      const CMatrix& desired) {
    const Eigen::Index mk = h0.size();
    require(desired.rows() == h0.rows() && desired.cols() == h0.cols(), ErrorCode::DimensionMismatch,
            "desired channel " + shape(desired) + " vs direct channel " + shape(h0));
    require(cascade.rows() == mk, ErrorCode::DimensionMismatch, "cascade matrix has " + shape(cascade));
    require(cascade.cols() >= mk, ErrorCode::InfeasibleN,
            "ARIS needs N >= M*K = " + std::to_string(mk) + ", got N=" + std::to_string(cascade.cols()));
    require(numerical_rank(cascade, tol::rank_cutoff) == mk, ErrorCode::SingularGram,
            "cascade matrix is rank deficient");
    return RsConfig::aris(right_pinv(cascade) * vec(desired - h0));
}

[[nodiscard]] inline RsConfig solve_aris_for(const ChannelSet& cs, const CMatrix& desired) {
    require(cs.n >= cs.m * cs.k, ErrorCode::InfeasibleN,
            "ARIS needs N >= M*K = " + std::to_string(cs.m * cs.k) + ", got N=" + std::to_string(cs.n));
    return solve_aris_from_cascade(build_cascade_matrix(cs.h1, cs.h2), cs.h0, desired);
}

[[nodiscard]] inline RsConfig solve_aris(const ChannelSet& cs, const TargetChannel& target) {
    return solve_aris_for(cs, target.matrix());
}

/// Theta = right_pinv(H1) (desired - H0) left_pinv(H2), from (possibly estimated)
/// channel matrices.
[[nodiscard]] inline RsConfig solve_fris_from(const CMatrix& h0, const CMatrix& h1, const CMatrix& h2,
                                              const CMatrix& desired) {
    const Eigen::Index m = h0.rows();
    const Eigen::Index k = h0.cols();
    require(desired.rows() == m && desired.cols() == k, ErrorCode::DimensionMismatch,
            "desired channel " + shape(desired) + " vs direct channel " + shape(h0));
    require(h1.rows() == m && h2.cols() == k && h1.cols() == h2.rows(), ErrorCode::DimensionMismatch,
            "inconsistent h1 " + shape(h1) + " / h2 " + shape(h2));
    require(h1.cols() >= m, ErrorCode::InfeasibleN,
            "FRIS needs N >= M = " + std::to_string(m) + ", got N=" + std::to_string(h1.cols()));
    require(numerical_rank(h1, tol::rank_cutoff) == m, ErrorCode::SingularGram, "h1 is not full row rank");
    require(numerical_rank(h2, tol::rank_cutoff) == k, ErrorCode::SingularGram, "h2 is not full column rank");
    return RsConfig::fris(right_pinv(h1) * (desired - h0) * left_pinv(h2));
}

[[nodiscard]] inline RsConfig solve_fris_for(const ChannelSet& cs, const CMatrix& desired) {
    return solve_fris_from(cs.h0, cs.h1, cs.h2, desired);
}

[[nodiscard]] inline RsConfig solve_fris(const ChannelSet& cs, const TargetChannel& target) {
    return solve_fris_for(cs, target.matrix());
}

/// ||H^H H - beta I||_F / (beta K)
[[nodiscard]] inline double orthogonality_residual(const CMatrix& h, double beta) {
    const auto k = h.cols();
    return (h.adjoint() * h - beta * CMatrix::Identity(k, k)).norm() / (beta * static_cast<double>(k));
}

/// ||achieved - desired||_F / ||desired||_F
[[nodiscard]] inline double relative_residual(const CMatrix& achieved, const CMatrix& desired) {
    return (achieved - desired).norm() / desired.norm();
}

} // namespace rsorth
