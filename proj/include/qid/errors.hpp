#pragma once

#include <stdexcept>
#include <string>

namespace qid {

/// Failure categories raised by the library.  The CLI maps each kind to a
/// process exit code, so every thrown error carries one.
enum class ErrKind {
    BadInput,                ///< malformed or inconsistent input data
    NotSymmetric,            ///< gaussian matrix fails the symmetry tolerance
    NotPSD,                  ///< gaussian matrix has a genuinely negative eigenvalue
    ModeMismatch,            ///< operands use different representation modes
    UnsupportedStableImage,  ///< affine map does not preserve isotropy of the stable tail
    Unsupported,             ///< combination not representable in the atomic+stable container
    NotIntegrable,           ///< mode conversion needs a divergent small/large-jump integral
    QuadratureFailure,       ///< adaptive quadrature could not reach the requested tolerance
    GridTooCoarse,           ///< phase step between grid neighbours exceeds pi/2
    ImaginaryLeak,           ///< imaginary residue in extracted masses exceeds its bound
    LambdaOutOfRange,        ///< dominant atom weight outside (1/2, 1]
    HypothesisFails,         ///< moment hypothesis violated, value not computable
    StableUnsupported,       ///< operation defined for purely atomic measures only
    NotApplicable,           ///< preconditions of the requested check do not hold
    Inconclusive,            ///< result neither certified nor refuted at this resolution
    ZeroFound                ///< characteristic function vanishes, no valid logarithm
};

inline const char* to_string(ErrKind k) {
    switch (k) {
        case ErrKind::BadInput:               return "BadInput";
        case ErrKind::NotSymmetric:           return "NotSymmetric";
        case ErrKind::NotPSD:                 return "NotPSD";
        case ErrKind::ModeMismatch:           return "ModeMismatch";
        case ErrKind::UnsupportedStableImage: return "UnsupportedStableImage";
        case ErrKind::Unsupported:            return "Unsupported";
        case ErrKind::NotIntegrable:          return "NotIntegrable";
        case ErrKind::QuadratureFailure:      return "QuadratureFailure";
        case ErrKind::GridTooCoarse:          return "GridTooCoarse";
        case ErrKind::ImaginaryLeak:          return "ImaginaryLeak";
        case ErrKind::LambdaOutOfRange:       return "LambdaOutOfRange";
        case ErrKind::HypothesisFails:        return "HypothesisFails";
        case ErrKind::StableUnsupported:      return "StableUnsupported";
        case ErrKind::NotApplicable:          return "NotApplicable";
        case ErrKind::Inconclusive:           return "Inconclusive";
        case ErrKind::ZeroFound:              return "ZeroFound";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
  public:
    Error(ErrKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrKind kind() const noexcept { return kind_; }

  private:
    ErrKind kind_;
};

[[noreturn]] inline void fail(ErrKind kind, const std::string& msg) {
    throw Error(kind, msg);
}

inline void require(bool ok, ErrKind kind, const std::string& msg) {
    if (!ok) fail(kind, msg);
}

}  // namespace qid
