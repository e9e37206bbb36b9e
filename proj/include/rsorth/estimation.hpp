#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rsorth/channel.hpp"
#include "rsorth/orthogonalizer.hpp"

namespace rsorth {

/// Known UE pilot matrix (K x K, default identity) plus the link budget. Pilots are
/// transmitted as sqrt(es) * pilot_matrix.
struct PilotPlan {
    CMatrix pilot_matrix;
    double n0 = 0.0;
    double es = 1.0;

    static PilotPlan identity(Eigen::Index k, double n0 = 0.0, double es = 1.0) {
        return PilotPlan{CMatrix::Identity(k, k), n0, es};
    }

    void validate(Eigen::Index k) const {
        require(pilot_matrix.rows() == k && pilot_matrix.cols() == k, ErrorCode::DimensionMismatch,
                "pilot matrix must be " + std::to_string(k) + "x" + std::to_string(k) + ", got " +
                    shape(pilot_matrix));
        require(condition_number(pilot_matrix) < 1e12, ErrorCode::SingularGram, "pilot matrix is not invertible");
        require(n0 >= 0.0 && es > 0.0, ErrorCode::InvalidArgument, "need n0 >= 0 and es > 0");
    }
};

/// Over-the-air interface seen by the BS. Protocol code only learns about the
/// channels through received blocks, and every transmitted pilot column is
/// counted as one slot.
class UplinkSession {
public:
    UplinkSession(const ChannelSet& cs, const PilotPlan& plan, std::uint64_t seed)
        : cs_(cs), plan_(plan), seed_(seed) {
        plan_.validate(cs.k);
    }

    [[nodiscard]] Eigen::Index m() const noexcept { return cs_.m; }
    [[nodiscard]] Eigen::Index k() const noexcept { return cs_.k; }
    [[nodiscard]] Eigen::Index n() const noexcept { return cs_.n; }
    [[nodiscard]] const PilotPlan& plan() const noexcept { return plan_; }
    [[nodiscard]] Eigen::Index slots_used() const noexcept { return slots_; }

    /// UEs send sqrt(es) * P while the surface applies `config`.
    RxBlock ue_pilots(const RsConfig& config) {
        const CMatrix symbols = std::sqrt(plan_.es) * plan_.pilot_matrix;
        return transmit(effective_channel(cs_, config), symbols);
    }

    /// Surface elements send sqrt(es) * I_N (only meaningful for FRIS).
    RxBlock surface_pilots() {
        const CMatrix symbols = std::sqrt(plan_.es) * CMatrix::Identity(cs_.n, cs_.n);
        return transmit(cs_.h1, symbols);
    }

    /// LS de-spreading of a UE pilot block: Y (sqrt(es) P)^{-1}.
    [[nodiscard]] CMatrix despread(const RxBlock& rx) const {
        const CMatrix symbols = std::sqrt(plan_.es) * plan_.pilot_matrix;
        return symbols.transpose().partialPivLu().solve(rx.samples.transpose()).transpose();
    }

private:
    RxBlock transmit(const CMatrix& h, const CMatrix& symbols) {
        slots_ += symbols.cols();
        return simulate_uplink(h, symbols, plan_.n0, derive_seed(seed_, Stream::Noise, transmissions_++), plan_.es);
    }

    const ChannelSet& cs_;
    PilotPlan plan_;
    std::uint64_t seed_;
    Eigen::Index slots_ = 0;
    std::uint64_t transmissions_ = 0;
};

[[nodiscard]] inline RsConfig zero_config(SurfaceKind kind, Eigen::Index n) {
    if (kind == SurfaceKind::Fris) {
        return RsConfig::fris(CMatrix::Zero(n, n));
    }
    return RsConfig::aris(CVector::Zero(n));
}

/// Step 1 (both protocols): surface off, K UE pilots, LS estimate of H0.
[[nodiscard]] inline CMatrix estimate_h0(UplinkSession& link, SurfaceKind kind = SurfaceKind::Aris) {
    return link.despread(link.ue_pilots(zero_config(kind, link.n())));
}

[[nodiscard]] inline CMatrix estimate_h0(const ChannelSet& cs, const PilotPlan& plan, std::uint64_t seed) {
    UplinkSession link(cs, plan, seed);
    return estimate_h0(link);
}

/// Best rank-1 approximation (dominant singular triple).
[[nodiscard]] inline CMatrix rank_one_approximation(const CMatrix& a) {
    const Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.singularValues()(0) * svd.matrixU().col(0) * svd.matrixV().col(0).adjoint();
}

/// ARIS step 2: switch on one element at a time (alpha = e_n), cancel H0 and keep
/// the rank-1 part of the remainder as column n of the cascade estimate.
[[nodiscard]] inline CMatrix aris_estimate_cascade(UplinkSession& link, const CMatrix& h0_hat) {
    require(h0_hat.rows() == link.m() && h0_hat.cols() == link.k(), ErrorCode::DimensionMismatch,
            "h0 estimate has shape " + shape(h0_hat));
    CMatrix cascade(link.m() * link.k(), link.n());
    for (Eigen::Index n = 0; n < link.n(); ++n) {
        const RsConfig probe = RsConfig::aris(CVector::Unit(link.n(), n));
        const CMatrix outer = link.despread(link.ue_pilots(probe)) - h0_hat;
        cascade.col(n) = rank_one_approximation(outer).reshaped();
    }
    return cascade;
}

[[nodiscard]] inline CMatrix aris_estimate_cascade(const ChannelSet& cs, const CMatrix& h0_hat,
                                                   const PilotPlan& plan, std::uint64_t seed) {
    UplinkSession link(cs, plan, seed);
    return aris_estimate_cascade(link, h0_hat);
}

/// FRIS step 2: the surface sends N orthogonal pilots (P_FRIS = I_N).
[[nodiscard]] inline CMatrix fris_estimate_h1(UplinkSession& link) {
    return link.surface_pilots().samples / std::sqrt(link.plan().es);
}

[[nodiscard]] inline CMatrix fris_estimate_h1(const ChannelSet& cs, const PilotPlan& plan, std::uint64_t seed) {
    UplinkSession link(cs, plan, seed);
    return fris_estimate_h1(link);
}

namespace tol {
/// Minimum reciprocal condition of an H1 block used to recover H2.
inline constexpr double block_rcond = 1e-10;
} // namespace tol

/// FRIS step 3: switch on groups of M elements (identity on the block) and
/// recover the matching rows of H2 by inverting the estimated H1 block. The last
/// block is cropped to N and inverted with a left pseudo-inverse.
[[nodiscard]] inline CMatrix fris_estimate_h2(UplinkSession& link, const CMatrix& h0_hat, const CMatrix& h1_hat) {
    const Eigen::Index m = link.m();
    const Eigen::Index n = link.n();
    require(h0_hat.rows() == m && h0_hat.cols() == link.k(), ErrorCode::DimensionMismatch,
            "h0 estimate has shape " + shape(h0_hat));
    require(h1_hat.rows() == m && h1_hat.cols() == n, ErrorCode::DimensionMismatch,
            "h1 estimate has shape " + shape(h1_hat));
    CMatrix h2_hat(n, link.k());
    const Eigen::Index blocks = (n + m - 1) / m;
    for (Eigen::Index b = 0; b < blocks; ++b) {
        const Eigen::Index start = b * m;
        const Eigen::Index width = std::min(m, n - start);
        const CMatrix h1_block = h1_hat.middleCols(start, width);
        const RVector s = singular_values(h1_block);
        const double rcond = s(0) > 0.0 ? s(s.size() - 1) / s(0) : 0.0;
        if (rcond < tol::block_rcond) {
            throw IllConditionedBlockError(static_cast<std::size_t>(b), rcond);
        }
        CVector diag = CVector::Zero(n);
        diag.segment(start, width).setOnes();
        const RsConfig probe = RsConfig::fris(diag.asDiagonal());
        const CMatrix reflected = link.despread(link.ue_pilots(probe)) - h0_hat;
        if (width == m) {
            h2_hat.middleRows(start, width) = h1_block.partialPivLu().solve(reflected);
        } else {
            h2_hat.middleRows(start, width) = left_pinv(h1_block) * reflected;
        }
    }
    return h2_hat;
}

[[nodiscard]] inline CMatrix fris_estimate_h2(const ChannelSet& cs, const CMatrix& h0_hat, const CMatrix& h1_hat,
                                              const PilotPlan& plan, std::uint64_t seed) {
    UplinkSession link(cs, plan, seed);
    return fris_estimate_h2(link, h0_hat, h1_hat);
}

/// Pilot slots needed by each protocol. For RIS only a lower bound is known.
struct PilotCount {
    Eigen::Index slots;
    bool lower_bound;
};

[[nodiscard]] inline PilotCount pilot_count(SurfaceKind kind, Eigen::Index m, Eigen::Index k, Eigen::Index n) {
    switch (kind) {
    case SurfaceKind::Aris: return {(n + 1) * k, false};
    case SurfaceKind::Fris: return {(1 + (n + m - 1) / m) * k + n, false};
    case SurfaceKind::Ris: return {m * k + n * (m + k), true};
    }
    return {0, true};
}

struct SlotEntry {
    std::string step;
    Eigen::Index slots;
};

struct EstimationReport {
    SurfaceKind kind = SurfaceKind::Aris;
    CMatrix h0_hat;
    std::optional<CMatrix> cascade_hat;
    std::optional<CMatrix> h1_hat;
    std::optional<CMatrix> h2_hat;
    RsConfig config = RsConfig::aris(CVector());
    std::vector<SlotEntry> ledger;
    Eigen::Index pilot_slots_used = 0;
    /// ||H_achieved - sqrt(beta) U||_F / ||sqrt(beta) U||_F on the true channels.
    double residual = 0.0;
};

/// Runs the whole estimation protocol, computes the surface configuration from the
/// estimates and applies it to the true channels.
[[nodiscard]] inline EstimationReport end_to_end_configure(const ChannelSet& cs, SurfaceKind kind,
                                                           const TargetChannel& target, const PilotPlan& plan,
                                                           std::uint64_t seed) {
    require(target.u_tilde.m() == cs.m && target.u_tilde.k() == cs.k, ErrorCode::DimensionMismatch,
            "target channel does not match channel dimensions");
    const Eigen::Index needed = min_elements(kind, cs.m, cs.k);
    require(cs.n >= needed, ErrorCode::InfeasibleN,
            std::string(to_string(kind)) + " needs N >= " + std::to_string(needed));

    UplinkSession link(cs, plan, seed);
    EstimationReport report;
    report.kind = kind;
    const auto record = [&](std::string step, Eigen::Index before) {
        report.ledger.push_back({std::move(step), link.slots_used() - before});
    };

    Eigen::Index before = link.slots_used();
    report.h0_hat = estimate_h0(link, kind);
    record("direct channel H0 (UE pilots, surface off)", before);

    const CMatrix desired = target.matrix();
    if (kind == SurfaceKind::Aris) {
        before = link.slots_used();
        report.cascade_hat = aris_estimate_cascade(link, report.h0_hat);
        record("cascade matrix (UE pilots, one element on)", before);
        report.config = solve_aris_from_cascade(*report.cascade_hat, report.h0_hat, desired);
    } else {
        before = link.slots_used();
        report.h1_hat = fris_estimate_h1(link);
        record("H1 (surface pilots)", before);
        before = link.slots_used();
        report.h2_hat = fris_estimate_h2(link, report.h0_hat, *report.h1_hat);
        record("H2 (UE pilots, element groups on)", before);
        report.config = solve_fris_from(report.h0_hat, *report.h1_hat, *report.h2_hat, desired);
    }
    report.pilot_slots_used = link.slots_used();
    report.residual = relative_residual(effective_channel(cs, report.config), desired);
    return report;
}

} // namespace rsorth
