#pragma once

#include <stdexcept>
#include <string>

namespace deso {

/// Numerical thresholds shared by every rank/residual/stability decision.
///
/// rank_tol is relative to the largest singular value of the matrix being
/// tested; residual_tol is an absolute Frobenius-norm bound; schur_margin is
/// the required gap below 1 for a spectral radius to count as stable.
struct Tolerances {
    double rank_tol = 1e-9;
    double residual_tol = 1e-8;
    double schur_margin = 1e-6;

    void validate() const {
        if (!(rank_tol > 0.0) || !(residual_tol > 0.0) || !(schur_margin > 0.0)) {
            throw std::invalid_argument("Tolerances: all thresholds must be strictly positive");
        }
    }
};

struct DimensionError : std::invalid_argument {
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

struct InvalidInputError : std::invalid_argument {
    explicit InvalidInputError(const std::string& what) : std::invalid_argument(what) {}
};

struct SingularPencilError : std::runtime_error {
    explicit SingularPencilError(const std::string& what) : std::runtime_error(what) {}
};

struct LengthError : std::invalid_argument {
    explicit LengthError(const std::string& what) : std::invalid_argument(what) {}
};

struct MissingDataError : std::invalid_argument {
    explicit MissingDataError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace deso
