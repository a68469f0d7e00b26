#pragma once

#include <stdexcept>
#include <string>

namespace hpdk {

enum class ErrorKind {
    NotHermitian,
    NotPositiveDefinite,
    NotInvertible,
    DimensionMismatch,
    InvalidArgument,
    ConvergenceFailure,
    NumericalInstability,
    PoleError,
    StepTooLarge,
    CalibrationInconsistent,
    NonRealResult,
    AlphaOutOfRange,
    SizeMismatch,
    OddSampleSize,
    EmptyGrid,
    CoefficientPole,
    GridTooLarge,
    Io,
};

inline const char* kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::NumericalInstability: return "NumericalInstability";
    case ErrorKind::PoleError: return "PoleError";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::CalibrationInconsistent: return "CalibrationInconsistent";
    case ErrorKind::NonRealResult: return "NonRealResult";
    case ErrorKind::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorKind::SizeMismatch: return "SizeMismatch";
    case ErrorKind::OddSampleSize: return "OddSampleSize";
    case ErrorKind::EmptyGrid: return "EmptyGrid";
    case ErrorKind::CoefficientPole: return "CoefficientPole";
    case ErrorKind::GridTooLarge: return "GridTooLarge";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) throw Error(kind, what);
}

}  // namespace hpdk
