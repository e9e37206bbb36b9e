#pragma once

// Structured-text (JSON) encoding of channels, surface configurations and
// estimation reports. Complex matrices are nested arrays of rows, each entry a
// [re, im] pair:
//
//   {"m": 4, "k": 2, "n": 8, "e0": 1.0,
//    "h0": [[[re, im], [re, im]], ...], "h1": ..., "h2": ...}
//
//   {"kind": "aris", "n": 8, "alpha": [[re, im], ...]}
//   {"kind": "ris",  "n": 8, "phases": [phi, ...]}
//   {"kind": "fris", "n": 4, "theta": [[[re, im], ...], ...]}

#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "rsorth/channel.hpp"
#include "rsorth/estimation.hpp"
#include "rsorth/surface.hpp"

namespace rsorth {

using json = nlohmann::json;

[[nodiscard]] inline json complex_to_json(cplx z) {
    return json::array({z.real(), z.imag()});
}

[[nodiscard]] inline cplx complex_from_json(const json& j) {
    require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(), ErrorCode::ParseError,
            "complex entries are [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

[[nodiscard]] inline json matrix_to_json(const CMatrix& a) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            row.push_back(complex_to_json(a(i, j)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// `cols` is needed to restore matrices with zero rows.
[[nodiscard]] inline CMatrix matrix_from_json(const json& j, Eigen::Index expected_rows, Eigen::Index expected_cols) {
    require(j.is_array() && static_cast<Eigen::Index>(j.size()) == expected_rows, ErrorCode::ParseError,
            "expected " + std::to_string(expected_rows) + " rows");
    CMatrix a(expected_rows, expected_cols);
    for (Eigen::Index i = 0; i < expected_rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        require(row.is_array() && static_cast<Eigen::Index>(row.size()) == expected_cols, ErrorCode::ParseError,
                "row " + std::to_string(i) + " must have " + std::to_string(expected_cols) + " entries");
        for (Eigen::Index c = 0; c < expected_cols; ++c) {
            a(i, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
        }
    }
    require(a.allFinite(), ErrorCode::ParseError, "matrix entries must be finite");
    return a;
}

[[nodiscard]] inline CMatrix matrix_from_json(const json& j) {
    require(j.is_array() && !j.empty() && j[0].is_array(), ErrorCode::ParseError, "expected a non-empty matrix");
    return matrix_from_json(j, static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
}

[[nodiscard]] inline json to_json(const ChannelSet& cs) {
    return json{{"m", cs.m},
                {"k", cs.k},
                {"n", cs.n},
                {"e0", cs.e0},
                {"h0", matrix_to_json(cs.h0)},
                {"h1", matrix_to_json(cs.h1)},
                {"h2", matrix_to_json(cs.h2)}};
}

[[nodiscard]] inline ChannelSet channel_set_from_json(const json& j) {
    try {
        const auto m = j.at("m").get<Eigen::Index>();
        const auto k = j.at("k").get<Eigen::Index>();
        const auto n = j.at("n").get<Eigen::Index>();
        return ChannelSet(matrix_from_json(j.at("h0"), m, k), matrix_from_json(j.at("h1"), m, n),
                          matrix_from_json(j.at("h2"), n, k), j.at("e0").get<double>());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

[[nodiscard]] inline json to_json(const RsConfig& config) {
    json j{{"kind", std::string(to_string(config.kind()))}, {"n", config.elements()}};
    if (const auto* r = config.as_ris()) {
        j["phases"] = std::vector<double>(r->phases.begin(), r->phases.end());
    } else if (const auto* a = config.as_aris()) {
        json alpha = json::array();
        for (const cplx z : a->alpha) {
            alpha.push_back(complex_to_json(z));
        }
        j["alpha"] = std::move(alpha);
    } else {
        j["theta"] = matrix_to_json(config.as_fris()->theta);
    }
    return j;
}

[[nodiscard]] inline RsConfig rs_config_from_json(const json& j) {
    try {
        const auto kind = parse_surface_kind(j.at("kind").get<std::string>());
        require(kind.has_value(), ErrorCode::ParseError, "unknown surface kind");
        const auto n = j.at("n").get<Eigen::Index>();
        switch (*kind) {
        case SurfaceKind::Ris: {
            const auto phases = j.at("phases").get<std::vector<double>>();
            require(static_cast<Eigen::Index>(phases.size()) == n, ErrorCode::ParseError, "phase count != n");
            return RsConfig::ris(Eigen::Map<const RVector>(phases.data(), n));
        }
        case SurfaceKind::Aris: {
            const json& alpha = j.at("alpha");
            require(alpha.is_array() && static_cast<Eigen::Index>(alpha.size()) == n, ErrorCode::ParseError,
                    "alpha count != n");
            CVector a(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                a(i) = complex_from_json(alpha[static_cast<std::size_t>(i)]);
            }
            return RsConfig::aris(std::move(a));
        }
        case SurfaceKind::Fris: return RsConfig::fris(matrix_from_json(j.at("theta"), n, n));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    throw Error(ErrorCode::ParseError, "unreachable");
}

[[nodiscard]] inline json to_json(const EstimationReport& report) {
    json ledger = json::array();
    for (const auto& entry : report.ledger) {
        ledger.push_back({{"step", entry.step}, {"slots", entry.slots}});
    }
    json j{{"kind", std::string(to_string(report.kind))},
           {"h0_hat", matrix_to_json(report.h0_hat)},
           {"config", to_json(report.config)},
           {"ledger", std::move(ledger)},
           {"pilot_slots_used", report.pilot_slots_used},
           {"residual", report.residual}};
    if (report.cascade_hat) j["cascade_hat"] = matrix_to_json(*report.cascade_hat);
    if (report.h1_hat) j["h1_hat"] = matrix_to_json(*report.h1_hat);
    if (report.h2_hat) j["h2_hat"] = matrix_to_json(*report.h2_hat);
    return j;
}

[[nodiscard]] inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::ParseError, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    require(out.good(), ErrorCode::InvalidArgument, "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

} // namespace rsorth
