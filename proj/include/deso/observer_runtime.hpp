#pragma once

#include <optional>

#include "deso/synthesis.hpp"

namespace deso {

/// Mutable stepping state for the causal realization
///   zeta(k+1) = A_O zeta + B_O_u u + (B_O_y + A_O N_O) y,
///   xhat(k)   = zeta(k) + N_O y(k),
/// which avoids the one-step output lookahead of the defining form.
struct ObserverState {
    Vec xhat;
    Vec zeta;
    Eigen::Index k = 0;
};

/// Trajectory of estimates plus error diagnostics when ground truth is known.
struct EstimationRun {
    Mat xhat_traj;            // n x (L+1)
    Vec err_traj;             // L+1 norms ||x(k) - xhat(k)|| (empty without truth)
    Vec recursion_residuals;  // L entries ||e(k+1) - A_O e(k)|| (empty without truth)
    double recursion_residual = 0.0;  // max over k
};

/// One step of the defining (non-causal) form: returns
/// A_O xhat + B_O_u u + B_O_y y + N_O y_next.
Vec step_noncausal(const ObserverGains& g, const Vec& xhat, const Vec& u,
                   const Vec& y, const Vec& y_next);

/// One step of the causal realization; returns (zeta(k+1), xhat(k)).
/// Initialize with zeta(0) = xhat(0) - N_O y(0) to match the non-causal form.
std::pair<Vec, Vec> step_causal(const ObserverGains& g, const Vec& zeta,
                                const Vec& u, const Vec& y);

/// Batch run of the non-causal driver over u(0..L-1), y(0..L). When truth is
/// supplied, err_traj and the autonomous-recursion residual are filled.
EstimationRun run(const ObserverGains& g, const Mat& u, const Mat& y,
                  const Vec& xhat0, const std::optional<Mat>& x_truth = std::nullopt);

/// Same trajectory through the causal realization (used to cross-check the
/// algebraic equivalence of the two forms).
EstimationRun run_causal(const ObserverGains& g, const Mat& u, const Mat& y,
                         const Vec& xhat0, const std::optional<Mat>& x_truth = std::nullopt);

}  // namespace deso
