#include "deso/observer_runtime.hpp"

namespace deso {

namespace {

void check_dims(const ObserverGains& g, const Vec& state, const Vec& u, const Vec& y) {
    if (state.size() != g.n() || u.size() != g.m() || y.size() != g.p()) {
        throw DimensionError("observer step: signal dimensions do not match gains");
    }
}

}  // namespace

Vec step_noncausal(const ObserverGains& g, const Vec& xhat, const Vec& u,
                   const Vec& y, const Vec& y_next) {
    check_dims(g, xhat, u, y);
    if (y_next.size() != g.p()) throw DimensionError("step_noncausal: y_next size != p");
    return g.A_O * xhat + g.B_O_u * u + g.B_O_y * y + g.N_O * y_next;
}

std::pair<Vec, Vec> step_causal(const ObserverGains& g, const Vec& zeta,
                                const Vec& u, const Vec& y) {
    check_dims(g, zeta, u, y);
    const Vec xhat = zeta + g.N_O * y;
    const Vec zeta_next = g.A_O * zeta + g.B_O_u * u + (g.B_O_y + g.A_O * g.N_O) * y;
    return {zeta_next, xhat};
}

namespace {

EstimationRun finalize_run(const ObserverGains& g, Mat xhat_traj,
                           const std::optional<Mat>& x_truth) {
    EstimationRun out;
    const Eigen::Index L = xhat_traj.cols() - 1;
    out.xhat_traj = std::move(xhat_traj);
    if (x_truth) {
        if (x_truth->rows() != g.n() || x_truth->cols() < L + 1) {
            throw DimensionError("run: ground truth does not cover the horizon");
        }
        out.err_traj.resize(L + 1);
        out.recursion_residuals.resize(L);
        Mat e = x_truth->leftCols(L + 1) - out.xhat_traj;
        for (Eigen::Index k = 0; k <= L; ++k) out.err_traj(k) = e.col(k).norm();
        for (Eigen::Index k = 0; k < L; ++k) {
            out.recursion_residuals(k) = (e.col(k + 1) - g.A_O * e.col(k)).norm();
        }
        out.recursion_residual =
            L > 0 ? out.recursion_residuals.maxCoeff() : 0.0;
    }
    return out;
}

}  // namespace

EstimationRun run(const ObserverGains& g, const Mat& u, const Mat& y,
                  const Vec& xhat0, const std::optional<Mat>& x_truth) {
    if (u.rows() != g.m() || y.rows() != g.p()) {
        throw DimensionError("run: signal dimensions do not match gains");
    }
    const Eigen::Index L = u.cols();
    if (y.cols() < L + 1) throw LengthError("run: non-causal driver needs L + 1 outputs");
    if (xhat0.size() != g.n()) throw DimensionError("run: xhat0 size != n");

    Mat xhat_traj(g.n(), L + 1);
    xhat_traj.col(0) = xhat0;
    for (Eigen::Index k = 0; k < L; ++k) {
        xhat_traj.col(k + 1) =
            step_noncausal(g, xhat_traj.col(k), u.col(k), y.col(k), y.col(k + 1));
    }
    return finalize_run(g, std::move(xhat_traj), x_truth);
}

EstimationRun run_causal(const ObserverGains& g, const Mat& u, const Mat& y,
                         const Vec& xhat0, const std::optional<Mat>& x_truth) {
    if (u.rows() != g.m() || y.rows() != g.p()) {
        throw DimensionError("run_causal: signal dimensions do not match gains");
    }
    const Eigen::Index L = u.cols();
    if (y.cols() < L + 1) throw LengthError("run_causal: needs L + 1 outputs");
    if (xhat0.size() != g.n()) throw DimensionError("run_causal: xhat0 size != n");

    Mat xhat_traj(g.n(), L + 1);
    Vec zeta = xhat0 - g.N_O * y.col(0);
    for (Eigen::Index k = 0; k <= L; ++k) {
        auto [zeta_next, xhat] = step_causal(g, zeta, k < L ? Vec(u.col(k)) : Vec(Vec::Zero(g.m())),
                                             y.col(k));
        xhat_traj.col(k) = xhat;
        if (k < L) zeta = zeta_next;
    }
    return finalize_run(g, std::move(xhat_traj), x_truth);
}

}  // namespace deso
