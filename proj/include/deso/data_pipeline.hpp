#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "deso/descriptor_system.hpp"

namespace deso {

/// Excitation signal family for experiment inputs and disturbances.
struct InputLaw {
    enum class Kind { uniform, sinusoid };
    Kind kind = Kind::uniform;
    double lo = -5.0;
    double hi = 5.0;
    double amplitude = 4.0;

    /// rows x len sample matrix; sinusoids are amplitude * sin(k) per row.
    Mat sample(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index len) const;
};

/// One recorded experiment. Sequences are stored one sample per column.
/// u_d (and eta_d, when present) carry tail padding beyond the T samples the
/// data matrices consume: the fast subsystem anticipates future inputs, and
/// with unknown structural indices the conservative choice pads by n.
struct DataRecord {
    Eigen::Index T = 0;  // number of data-matrix columns
    Mat u_d;             // m x (T + pad), pad >= 0
    Mat x_d;             // n x (T + 1)
    Mat y_d;             // p x (T + 1)
    std::optional<Mat> eta_d;  // q x (T + pad)

    std::uint64_t seed = 0;
    std::string generator;

    Eigen::Index m() const { return u_d.rows(); }
    Eigen::Index n() const { return x_d.rows(); }
    Eigen::Index p() const { return y_d.rows(); }
    Eigen::Index q() const { return eta_d ? eta_d->rows() : 0; }
    Eigen::Index padding() const { return u_d.cols() - T; }

    void validate() const;
};

/// Stacked one-step data blocks; column k holds
/// (x_d(k), x_d(k+1), u_d(k), y_d(k), y_d(k+1)).
struct DataMatrices {
    Mat Xp;  // n x T
    Mat Xf;  // n x T
    Mat Up;  // m x T
    Mat Yp;  // p x T
    Mat Yf;  // p x T

    Eigen::Index T() const { return Xp.cols(); }
    Eigen::Index n() const { return Xp.rows(); }
    Eigen::Index m() const { return Up.rows(); }
    Eigen::Index p() const { return Yp.rows(); }

    /// [Xp; Up; Yp; Yf], the coefficient matrix of the data equation.
    Mat stacked_d() const;
    /// [Xp; Up; Yf], the right-hand side of the data-based rank tests.
    Mat stacked_rank_test() const;
};

/// Block-Hankel matrix of depth L from a vector sequence (one sample per
/// column): (w*L) x (T0 - L + 1).
Mat hankel(const Mat& f, Eigen::Index L);

DataMatrices build_data_matrices(const DataRecord& rec);

/// Persistent-excitation test on a signal: full row rank of its depth-L
/// block-Hankel matrix.
bool input_pe_order(const Mat& u, Eigen::Index L, const Tolerances& tol = {});

/// Model-aided informativity oracle: full row rank of H_1 of the slow-state
/// trajectory stacked over H_{s+1} of the input (of [u; eta] in the
/// unknown-input variant). Requires the generating plant's decomposition;
/// this is not observable from data alone.
bool pe_assumption_check(const DataRecord& rec, const WeierstrassForm& wf,
                         bool with_unknown_input = false, const Tolerances& tol = {});

/// Data-based sufficient test for dual normalizability:
/// rk[Xp; Up; Yf] = n + m.
bool corollary1_test(const DataMatrices& dm, Eigen::Index m, Eigen::Index n,
                     const Tolerances& tol = {});

/// Data-based sufficient test for the observer matching condition:
/// rk[Xp; Up; Yf] = n + m + q. Delegates to corollary1_test when q = 0.
bool corollary2_test(const DataMatrices& dm, Eigen::Index m, Eigen::Index n,
                     Eigen::Index q, const Tolerances& tol = {});

/// Runs one experiment on a descriptor plant: inputs (and the unknown input,
/// when a law is given and the plant has F) are drawn first, then the slow
/// initial state from (0, 2)^{n1}. pad extra input samples beyond T cover the
/// fast subsystem's anticipation window; pad >= the plant's nilpotency index
/// is required, and pad = n is the conservative model-free choice.
DataRecord collect_record(const DescriptorSystem& sys, const WeierstrassForm& wf,
                          Eigen::Index T, Eigen::Index pad, std::mt19937_64& rng,
                          const InputLaw& input_law,
                          const std::optional<InputLaw>& disturbance_law = std::nullopt,
                          const Tolerances& tol = {});

/// ESO experiment on an LTI plant: x(0) from (0, 2)^n, disturbance recorded
/// alongside the trajectory.
DataRecord collect_lti_record(const LtiSystem& lti, Eigen::Index T, Eigen::Index pad,
                              std::mt19937_64& rng, const InputLaw& input_law,
                              const InputLaw& disturbance_law);

}  // namespace deso
