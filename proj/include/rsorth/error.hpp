#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rsorth {

enum class ErrorCode {
    SingularGram,
    DimensionMismatch,
    ZeroMatrix,
    NotSkewHermitian,
    InvalidDims,
    InfeasibleN,
    NotApplicable,
    IllConditionedBlock,
    InvalidArgument,
    ParseError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::SingularGram: return "SingularGram";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroMatrix: return "ZeroMatrix";
    case ErrorCode::NotSkewHermitian: return "NotSkewHermitian";
    case ErrorCode::InvalidDims: return "InvalidDims";
    case ErrorCode::InfeasibleN: return "InfeasibleN";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::IllConditionedBlock: return "IllConditionedBlock";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so that
/// callers (and the CLI) can tell structural infeasibility from numerical trouble.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised by the FRIS H2 estimator; `block()` is the zero-based block index.
class IllConditionedBlockError : public Error {
public:
    IllConditionedBlockError(std::size_t block, double rcond)
        : Error(ErrorCode::IllConditionedBlock,
                "block " + std::to_string(block) + " has reciprocal condition " + std::to_string(rcond)),
          block_(block) {}

    [[nodiscard]] std::size_t block() const noexcept { return block_; }

private:
    std::size_t block_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
    if (!condition) {
        throw Error(code, what);
    }
}

} // namespace rsorth
