#pragma once

#include <cmath>
#include <cstdint>

#include "rsorth/linalg.hpp"
#include "rsorth/random.hpp"
#include "rsorth/surface.hpp"

namespace rsorth {

/// Direct channel h0 (M x K), BS-surface channel h1 (M x N) and surface-UE
/// channel h2 (N x K). n may be zero for a surface-less reference instance.
struct ChannelSet {
    Eigen::Index m = 0;
    Eigen::Index k = 0;
    Eigen::Index n = 0;
    CMatrix h0;
    CMatrix h1;
    CMatrix h2;
    double e0 = 0.0;

    ChannelSet() = default;

    ChannelSet(CMatrix direct, CMatrix bs_rs, CMatrix rs_ue, double direct_power)
        : m(direct.rows()), k(direct.cols()), n(bs_rs.cols()), h0(std::move(direct)), h1(std::move(bs_rs)),
          h2(std::move(rs_ue)), e0(direct_power) {
        require(m >= 1 && k >= 1, ErrorCode::InvalidDims, "direct channel must be non-empty");
        require(h1.rows() == m && h2.rows() == n && h2.cols() == k, ErrorCode::DimensionMismatch,
                "inconsistent channel shapes h0 " + shape(h0) + ", h1 " + shape(h1) + ", h2 " + shape(h2));
        require(e0 >= 0.0, ErrorCode::InvalidArgument, "e0 must be non-negative");
    }
};

namespace detail {
inline void normalize_frobenius(CMatrix& a, double target_squared_norm) {
    const double norm = a.norm();
    if (target_squared_norm == 0.0 || norm == 0.0) {
        a.setZero();
        return;
    }
    a *= std::sqrt(target_squared_norm) / norm;
}
} // namespace detail

/// IID Rayleigh channels rescaled per realization so that
/// ||H0||^2 = e0*M*K, ||H1||^2 = M*N and ||H2||^2 = N*K hold exactly.
/// The three matrices are always drawn in the same order, so for a fixed seed
/// only the scale of H0 depends on e0.
[[nodiscard]] inline ChannelSet generate_iid_rayleigh(Eigen::Index m, Eigen::Index k, Eigen::Index n, double e0,
                                                      std::uint64_t seed) {
    require(k >= 1 && m > k, ErrorCode::InvalidDims,
            "need M > K >= 1, got M=" + std::to_string(m) + " K=" + std::to_string(k));
    require(n >= 1, ErrorCode::InvalidDims, "need N >= 1");
    require(e0 >= 0.0 && std::isfinite(e0), ErrorCode::InvalidArgument, "e0 must be finite and non-negative");
    Rng rng(derive_seed(seed, Stream::Channel));
    CMatrix h0 = complex_gaussian(m, k, rng);
    CMatrix h1 = complex_gaussian(m, n, rng);
    CMatrix h2 = complex_gaussian(n, k, rng);
    const auto md = static_cast<double>(m);
    const auto kd = static_cast<double>(k);
    const auto nd = static_cast<double>(n);
    detail::normalize_frobenius(h0, e0 * md * kd);
    detail::normalize_frobenius(h1, md * nd);
    detail::normalize_frobenius(h2, nd * kd);
    return ChannelSet(std::move(h0), std::move(h1), std::move(h2), e0);
}

/// H = H0 + H1 * Theta * H2
[[nodiscard]] inline CMatrix effective_channel(const ChannelSet& cs, const RsConfig& theta) {
    require(theta.elements() == cs.n, ErrorCode::DimensionMismatch,
            "configuration has " + std::to_string(theta.elements()) + " elements, channel has " +
                std::to_string(cs.n));
    if (cs.n == 0) {
        return cs.h0;
    }
    if (const auto* a = theta.as_aris()) {
        return cs.h0 + cs.h1 * a->alpha.asDiagonal() * cs.h2;
    }
    return cs.h0 + cs.h1 * theta.reflection_matrix() * cs.h2;
}

/// Received block over a number of channel uses: samples = H*S + noise.
struct RxBlock {
    CMatrix samples;
    double noise_power = 0.0;
    double symbol_energy = 1.0;
};

/// y = H s + n with n ~ CN(0, n0 I), applied column-wise to the slots in s.
[[nodiscard]] inline RxBlock simulate_uplink(const CMatrix& h, const CMatrix& s, double n0, std::uint64_t seed,
                                             double symbol_energy = 1.0) {
    require(s.rows() == h.cols(), ErrorCode::DimensionMismatch,
            "symbols " + shape(s) + " do not match channel " + shape(h));
    require(n0 >= 0.0, ErrorCode::InvalidArgument, "noise power must be non-negative");
    RxBlock rx{h * s, n0, symbol_energy};
    if (n0 > 0.0) {
        Rng rng(derive_seed(seed, Stream::Noise));
        rx.samples += std::sqrt(n0) * complex_gaussian(rx.samples.rows(), rx.samples.cols(), rng);
    }
    return rx;
}

/// Post-processing SNR per UE of an orthogonal channel under MRC/MRT.
[[nodiscard]] constexpr double post_snr(double beta, double es, double n0) {
    return beta * es / n0;
}

} // namespace rsorth
