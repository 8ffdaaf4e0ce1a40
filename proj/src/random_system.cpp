#include "deso/random_system.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace deso {

Mat uniform_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                   double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Mat out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = dist(rng);
    }
    return out;
}

namespace {

double condition_number(const Mat& M) {
    Eigen::JacobiSVD<Mat> svd(M);
    const auto& sv = svd.singularValues();
    return sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                   : std::numeric_limits<double>::infinity();
}

Mat bounded_random_invertible(std::mt19937_64& rng, Eigen::Index n, double max_cond) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        Mat M = uniform_matrix(rng, n, n, -1.0, 1.0);
        if (condition_number(M) <= max_cond) return M;
    }
    return Mat::Identity(n, n);
}

// Nonzero vector floor so "observable" never degrades into "numerically
// barely observable".
void enforce_column_floor(Mat& M, Eigen::Index col, std::mt19937_64& rng) {
    if (M.col(col).norm() >= 0.3) return;
    std::uniform_real_distribution<double> dist(0.4, 1.0);
    std::uniform_int_distribution<Eigen::Index> pick(0, M.rows() - 1);
    M(pick(rng), col) += (rng() % 2 ? 1.0 : -1.0) * dist(rng);
}

}  // namespace

RandomPlant random_regular_plant(std::mt19937_64& rng, bool want_detectable,
                                 const RandomPlantOptions& opt, const Tolerances& tol) {
    std::uniform_int_distribution<Eigen::Index> n1_dist(1, opt.n1_max);
    std::uniform_int_distribution<Eigen::Index> n2_dist(0, opt.n2_max);
    std::uniform_int_distribution<Eigen::Index> m_dist(1, opt.m_max);
    std::uniform_int_distribution<Eigen::Index> p_dist(1, opt.p_max);
    std::uniform_real_distribution<double> stable_dist(-opt.stable_max, opt.stable_max);
    std::uniform_real_distribution<double> unstable_dist(opt.unstable_lo, opt.unstable_hi);

    const Eigen::Index n1 = n1_dist(rng);
    const Eigen::Index n2 = n2_dist(rng);
    const Eigen::Index n = n1 + n2;
    const Eigen::Index m = m_dist(rng);
    const Eigen::Index p = p_dist(rng);

    // Distinct real slow eigenvalues; at least one unstable when the plant
    // must be undetectable.
    std::uniform_int_distribution<Eigen::Index> unstable_count_dist(want_detectable ? 0 : 1, n1);
    const Eigen::Index n_unstable = unstable_count_dist(rng);
    Vec lams(n1);
    for (int attempt = 0;; ++attempt) {
        for (Eigen::Index i = 0; i < n1; ++i) {
            lams(i) = i < n_unstable ? (rng() % 2 ? 1.0 : -1.0) * unstable_dist(rng)
                                     : stable_dist(rng);
        }
        bool distinct = true;
        for (Eigen::Index i = 0; i < n1 && distinct; ++i) {
            for (Eigen::Index j = i + 1; j < n1; ++j) {
                if (std::abs(lams(i) - lams(j)) < 0.05) {
                    distinct = false;
                    break;
                }
            }
        }
        if (distinct || attempt > 100) break;
    }

    WeierstrassForm wf;
    wf.n1 = n1;
    wf.n2 = n2;
    wf.A1 = lams.asDiagonal();
    wf.R = Mat::Zero(n2, n2);
    for (Eigen::Index i = 0; i + 1 < n2; ++i) wf.R(i, i + 1) = 1.0;
    wf.s = n2 > 0 ? n2 : 0;

    Mat C1 = uniform_matrix(rng, p, n1, -1.0, 1.0);
    for (Eigen::Index i = 0; i < n_unstable; ++i) enforce_column_floor(C1, i, rng);
    if (!want_detectable) C1.col(0).setZero();  // column 0 is unstable here

    // B1 with a controllable slow pair (diagonal distinct A1: every row of B1
    // nonzero suffices; enforce by floor on the transpose).
    Mat B1 = uniform_matrix(rng, n1, m, -1.0, 1.0);
    {
        Mat B1t = B1.transpose();
        for (Eigen::Index i = 0; i < n1; ++i) enforce_column_floor(B1t, i, rng);
        B1 = B1t.transpose();
    }

    Mat C2 = uniform_matrix(rng, p, n2, -1.0, 1.0);
    Mat B2 = uniform_matrix(rng, n2, m, -1.0, 1.0);
    if (n2 > 0) {
        // rk[R; C2] = n2 needs only the first column covered (the shift block
        // covers the rest); B2's first row nonzero keeps the fast subsystem
        // controllable.
        enforce_column_floor(C2, 0, rng);
        Mat B2t = B2.transpose();
        enforce_column_floor(B2t, 0, rng);
        B2 = B2t.transpose();
    }

    const Mat Sr = bounded_random_invertible(rng, n, opt.max_transform_cond);
    const Mat Pr = bounded_random_invertible(rng, n, opt.max_transform_cond);
    wf.S = Sr;
    wf.P = Pr;
    wf.B1 = B1;
    wf.B2 = B2;

    Mat Ew = Mat::Zero(n, n);
    Ew.topLeftCorner(n1, n1) = Mat::Identity(n1, n1);
    Ew.bottomRightCorner(n2, n2) = wf.R;
    Mat Aw = Mat::Zero(n, n);
    Aw.topLeftCorner(n1, n1) = wf.A1;
    Aw.bottomRightCorner(n2, n2) = Mat::Identity(n2, n2);
    Mat Bw(n, m);
    Bw << B1, B2;
    Mat Cw(p, n);
    Cw << C1, C2;

    const auto sr_lu = Sr.partialPivLu();
    const auto prT_lu = Pr.transpose().partialPivLu();
    // X * Pr^{-1} computed as (Pr^{-T} X^T)^T
    const auto right_solve = [&](const Mat& X) {
        return Mat(prT_lu.solve(X.transpose()).transpose());
    };

    RandomPlant plant;
    plant.sys.E = sr_lu.solve(right_solve(Ew));
    plant.sys.A = sr_lu.solve(right_solve(Aw));
    plant.sys.B = sr_lu.solve(Bw);
    plant.sys.C = right_solve(Cw);
    wf.C1 = C1;
    wf.C2 = C2;
    wf.F1.resize(n1, 0);
    wf.F2.resize(n2, 0);
    plant.wf = wf;

    plant.detectable = true;
    for (Eigen::Index i = 0; i < n1; ++i) {
        if (std::abs(lams(i)) >= 1.0 - tol.schur_margin && C1.col(i).norm() == 0.0) {
            plant.detectable = false;
        }
    }
    return plant;
}

RandomPlant random_uio_plant(std::mt19937_64& rng, bool want_matching,
                             bool want_detectable, const RandomPlantOptions& opt,
                             const Tolerances& tol) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        RandomPlant plant = random_regular_plant(rng, want_detectable, opt, tol);
        const Eigen::Index n = plant.sys.n();
        const Eigen::Index p = plant.sys.p();

        Mat F;
        if (want_matching) {
            F = uniform_matrix(rng, n, 1, -1.0, 1.0);
        } else {
            // F = E * xi with xi in Ker(C): [xi; -1] lies in the kernel of
            // [E F; C 0], so the matching rank must drop. Assumption 1 keeps
            // E * xi nonzero.
            if (p >= n) continue;  // need a nontrivial output kernel
            const Mat kerC = null_space_basis(plant.sys.C, tol);
            if (kerC.cols() == 0) continue;
            Vec xi = kerC * uniform_matrix(rng, kerC.cols(), 1, -1.0, 1.0);
            if (xi.norm() < 1e-6) continue;
            F = plant.sys.E * xi;
            if (F.norm() < 1e-6) continue;
            F /= F.norm();
        }
        plant.sys.F = F;
        try {
            plant.sys.validate(tol);
        } catch (const std::exception&) {
            continue;
        }
        plant.matching = matching_condition(plant.sys, tol);
        if (plant.matching != want_matching) continue;

        const Mat SF = plant.wf.S * F;
        plant.wf.F1 = SF.topRows(plant.wf.n1);
        plant.wf.F2 = SF.bottomRows(plant.wf.n2);

        // The UIO data assumption needs the slow pair controllable through
        // the augmented input [B F].
        Mat B1F1(plant.wf.n1, plant.sys.m() + 1);
        B1F1 << plant.wf.B1, plant.wf.F1;
        WeierstrassForm probe = plant.wf;
        probe.B1 = B1F1;
        if (!r_controllable(probe, tol)) continue;
        return plant;
    }
    throw std::runtime_error("random_uio_plant: exhausted attempts");
}

}  // namespace deso
