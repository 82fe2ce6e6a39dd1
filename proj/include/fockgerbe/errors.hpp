#pragma once

#include <stdexcept>
#include <string>

namespace fockgerbe {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// geometry
struct PoleError : Error { using Error::Error; };
struct ChartHoleError : Error { using Error::Error; };
struct ZeroQuaternionError : Error { using Error::Error; };
struct NonUnitError : Error { using Error::Error; };
struct SampleCountError : Error { using Error::Error; };

// modes
struct NotLagrangianError : Error { using Error::Error; };
struct BandTooWideError : Error { using Error::Error; };
struct TooFarError : Error { using Error::Error; };
struct NotSymError : Error { using Error::Error; };

struct SingularCError : Error {
    double smallest_singular_value;
    SingularCError(const std::string& what, double smin)
        : Error(what), smallest_singular_value(smin) {}
};

// fock
struct NonOrthogonalError : Error { using Error::Error; };
struct NonConvergedError : Error { using Error::Error; };
struct DegenerateSolutionError : Error { using Error::Error; };
struct NonOrthogonalBlocksError : Error { using Error::Error; };

// torsor / cech
struct TagMismatchError : Error { using Error::Error; };
struct NerveIncompleteError : Error { using Error::Error; };
struct InverseConventionError : Error { using Error::Error; };
struct GridMismatchError : Error { using Error::Error; };
struct SupportShapeError : Error { using Error::Error; };
struct RefineError : Error { using Error::Error; };

// hopf
struct DegeneratePointError : Error { using Error::Error; };

} // namespace fockgerbe
