#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "rsorth/error.hpp"
#include "rsorth/random.hpp"

namespace rsorth {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

namespace tol {
/// Gram solves below this reciprocal condition switch to the SVD route.
inline constexpr double gram_rcond = 1e-12;
/// Singular values below cutoff * sigma_max are treated as zero by the SVD route.
inline constexpr double svd_cutoff = 1e-12;
/// Orthonormality tolerance for SemiUnitary and unitary iterates.
inline constexpr double unitary = 1e-10;
inline constexpr double skew = 1e-10;
} // namespace tol

inline std::string shape(const CMatrix& a) {
    return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

[[nodiscard]] inline bool all_finite(const CMatrix& a) {
    return a.allFinite();
}

/// ||A^H A - I||_F
[[nodiscard]] inline double unitarity_defect(const CMatrix& a) {
    return (a.adjoint() * a - CMatrix::Identity(a.cols(), a.cols())).norm();
}

[[nodiscard]] inline RVector singular_values(const CMatrix& a) {
    return Eigen::JacobiSVD<CMatrix>(a).singularValues();
}

/// Numerical rank with a singular-value cutoff relative to sigma_max.
[[nodiscard]] inline Eigen::Index numerical_rank(const CMatrix& a, double rel_cutoff) {
    const RVector s = singular_values(a);
    if (s.size() == 0 || s(0) == 0.0) {
        return 0;
    }
    return static_cast<Eigen::Index>((s.array() > rel_cutoff * s(0)).count());
}

/// Tall matrix with orthonormal columns. The invariant U^H U = I is checked on
/// construction, so holding a SemiUnitary is proof that it was satisfied.
class SemiUnitary {
public:
    explicit SemiUnitary(CMatrix u, double tolerance = tol::unitary) : u_(std::move(u)) {
        require(u_.rows() >= 1 && u_.cols() >= 1 && u_.cols() <= u_.rows(), ErrorCode::InvalidDims,
                "semi-unitary matrix must be tall, got " + shape(u_));
        const double defect = unitarity_defect(u_);
        require(defect <= tolerance, ErrorCode::InvalidArgument,
                "columns are not orthonormal (defect " + std::to_string(defect) + ")");
    }

    [[nodiscard]] const CMatrix& matrix() const noexcept { return u_; }
    [[nodiscard]] Eigen::Index m() const noexcept { return u_.rows(); }
    [[nodiscard]] Eigen::Index k() const noexcept { return u_.cols(); }

private:
    CMatrix u_;
};

/// A^H (A A^H)^{-1}. Falls back to an SVD pseudo-inverse when the Gram matrix is
/// poorly conditioned; throws SingularGram only if A is numerically rank deficient.
[[nodiscard]] inline CMatrix right_pinv(const CMatrix& a) {
    require(a.rows() <= a.cols(), ErrorCode::SingularGram,
            "right pseudo-inverse needs full row rank, got " + shape(a));
    const CMatrix gram = a * a.adjoint();
    const Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
    const double lmax = eig.eigenvalues().maxCoeff();
    const double lmin = eig.eigenvalues().minCoeff();
    require(lmax > 0.0, ErrorCode::SingularGram, "zero matrix has no right inverse");
    if (lmin / lmax >= tol::gram_rcond) {
        return a.adjoint() * gram.llt().solve(CMatrix::Identity(a.rows(), a.rows()));
    }
    const Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVector& s = svd.singularValues();
    require(s(s.size() - 1) > tol::svd_cutoff * s(0), ErrorCode::SingularGram,
            "matrix " + shape(a) + " is rank deficient");
    return svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
}

/// (A^H A)^{-1} A^H, i.e. the adjoint of right_pinv(A^H).
[[nodiscard]] inline CMatrix left_pinv(const CMatrix& a) {
    require(a.rows() >= a.cols(), ErrorCode::SingularGram,
            "left pseudo-inverse needs full column rank, got " + shape(a));
    return right_pinv(a.adjoint()).adjoint();
}

/// Column-major stacking into an (rows*cols) x 1 matrix.
[[nodiscard]] inline CMatrix vec(const CMatrix& a) {
    return a.reshaped(a.size(), 1);
}

[[nodiscard]] inline CMatrix unvec(const CMatrix& v, Eigen::Index rows, Eigen::Index cols) {
    require(v.size() == rows * cols && rows >= 0 && cols >= 0, ErrorCode::DimensionMismatch,
            "cannot reshape " + shape(v) + " into " + std::to_string(rows) + "x" + std::to_string(cols));
    return v.reshaped(rows, cols);
}

/// sigma_max / sigma_min; +inf for rank-deficient input.
[[nodiscard]] inline double condition_number(const CMatrix& a) {
    const RVector s = singular_values(a);
    require(s.size() > 0 && s(0) > 0.0, ErrorCode::ZeroMatrix, "condition number of a zero matrix");
    const double smin = s(s.size() - 1);
    if (smin == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return std::max(1.0, s(0) / smin);
}

/// Thin QR with the diagonal of R forced positive real, which makes Q unique.
[[nodiscard]] inline CMatrix orthonormalize(const CMatrix& a) {
    const Eigen::HouseholderQR<CMatrix> qr(a);
    CMatrix q = qr.householderQ() * CMatrix::Identity(a.rows(), a.cols());
    const CMatrix& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        const cplx d = r(j, j);
        const double mag = std::abs(d);
        if (mag > 0.0) {
            q.col(j) *= d / mag;
        }
    }
    return q;
}

[[nodiscard]] inline CMatrix complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    CMatrix a(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            a(i, j) = rng.complex_normal();
        }
    }
    return a;
}

/// Haar-distributed m x k matrix with orthonormal columns.
[[nodiscard]] inline SemiUnitary random_semi_unitary(Eigen::Index m, Eigen::Index k, std::uint64_t seed) {
    require(k >= 1 && k <= m, ErrorCode::InvalidDims, "need 1 <= k <= m");
    Rng rng(seed);
    return SemiUnitary(orthonormalize(complex_gaussian(m, k, rng)));
}

/// Extends u to a full m x m unitary whose first k columns equal u.
[[nodiscard]] inline CMatrix complete_to_unitary(const SemiUnitary& u, std::uint64_t seed) {
    const Eigen::Index m = u.m();
    const Eigen::Index k = u.k();
    if (k == m) {
        return u.matrix();
    }
    Rng rng(seed);
    CMatrix a(m, m);
    a << u.matrix(), complex_gaussian(m, m - k, rng);
    CMatrix q = orthonormalize(a);
    // The leading block of R is the identity up to rounding, so this only removes
    // the rounding residue.
    q.leftCols(k) = u.matrix();
    return q;
}

[[nodiscard]] inline bool is_skew_hermitian(const CMatrix& g, double tolerance = tol::skew) {
    return g.rows() == g.cols() && (g + g.adjoint()).norm() <= tolerance;
}

/// exp(G) for skew-Hermitian G via the eigendecomposition of the Hermitian -iG.
[[nodiscard]] inline CMatrix expm_skew_hermitian(const CMatrix& g) {
    require(g.rows() == g.cols(), ErrorCode::NotSkewHermitian, "matrix must be square, got " + shape(g));
    require(is_skew_hermitian(g), ErrorCode::NotSkewHermitian,
            "||G + G^H|| = " + std::to_string((g + g.adjoint()).norm()));
    const cplx minus_i{0.0, -1.0};
    CMatrix h = minus_i * g;
    h = (0.5 * (h + h.adjoint())).eval();
    const Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
    const CMatrix& v = eig.eigenvectors();
    CVector phases(v.cols());
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        phases(j) = std::polar(1.0, eig.eigenvalues()(j));
    }
    return v * phases.asDiagonal() * v.adjoint();
}

} // namespace rsorth
