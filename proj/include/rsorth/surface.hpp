#pragma once

#include <optional>
#include <string_view>
#include <variant>

#include "rsorth/linalg.hpp"

namespace rsorth {

enum class SurfaceKind { Ris, Aris, Fris };

constexpr std::string_view to_string(SurfaceKind kind) noexcept {
    switch (kind) {
    case SurfaceKind::Ris: return "ris";
    case SurfaceKind::Aris: return "aris";
    case SurfaceKind::Fris: return "fris";
    }
    return "?";
}

inline std::optional<SurfaceKind> parse_surface_kind(std::string_view text) {
    if (text == "ris" || text == "RIS") return SurfaceKind::Ris;
    if (text == "aris" || text == "ARIS") return SurfaceKind::Aris;
    if (text == "fris" || text == "FRIS") return SurfaceKind::Fris;
    return std::nullopt;
}

/// Reflection configuration of an N-element surface.
///   Ris:  Theta = diag(exp(j*phi))
///   Aris: Theta = diag(alpha)
///   Fris: Theta is a full N x N matrix
class RsConfig {
public:
    struct Ris {
        RVector phases;
    };
    struct Aris {
        CVector alpha;
    };
    struct Fris {
        CMatrix theta;
    };

    static RsConfig ris(RVector phases) { return RsConfig(Ris{std::move(phases)}); }
    static RsConfig aris(CVector alpha) { return RsConfig(Aris{std::move(alpha)}); }
    static RsConfig fris(CMatrix theta) {
        require(theta.rows() == theta.cols(), ErrorCode::DimensionMismatch,
                "FRIS reflection matrix must be square, got " + shape(theta));
        return RsConfig(Fris{std::move(theta)});
    }

    [[nodiscard]] SurfaceKind kind() const noexcept {
        switch (payload_.index()) {
        case 0: return SurfaceKind::Ris;
        case 1: return SurfaceKind::Aris;
        default: return SurfaceKind::Fris;
        }
    }

    [[nodiscard]] Eigen::Index elements() const {
        return std::visit(
            [](const auto& p) -> Eigen::Index {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, Ris>) return p.phases.size();
                else if constexpr (std::is_same_v<T, Aris>) return p.alpha.size();
                else return p.theta.rows();
            },
            payload_);
    }

    [[nodiscard]] CMatrix reflection_matrix() const {
        return std::visit(
            [](const auto& p) -> CMatrix {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, Ris>) {
                    CVector d(p.phases.size());
                    for (Eigen::Index i = 0; i < d.size(); ++i) {
                        d(i) = std::polar(1.0, p.phases(i));
                    }
                    return d.asDiagonal();
                } else if constexpr (std::is_same_v<T, Aris>) {
                    return p.alpha.asDiagonal();
                } else {
                    return p.theta;
                }
            },
            payload_);
    }

    [[nodiscard]] const Ris* as_ris() const noexcept { return std::get_if<Ris>(&payload_); }
    [[nodiscard]] const Aris* as_aris() const noexcept { return std::get_if<Aris>(&payload_); }
    [[nodiscard]] const Fris* as_fris() const noexcept { return std::get_if<Fris>(&payload_); }

private:
    using Payload = std::variant<Ris, Aris, Fris>;
    explicit RsConfig(Payload p) : payload_(std::move(p)) {}

    Payload payload_;
};

/// Squared Frobenius norm of the reflection matrix (RS sum power).
[[nodiscard]] inline double rs_sum_power(const RsConfig& theta) {
    if (const auto* r = theta.as_ris()) {
        return static_cast<double>(r->phases.size());
    }
    if (const auto* a = theta.as_aris()) {
        return a->alpha.squaredNorm();
    }
    return theta.as_fris()->theta.squaredNorm();
}

} // namespace rsorth
