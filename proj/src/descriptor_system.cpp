#include "deso/descriptor_system.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <numbers>

namespace deso {

void DescriptorSystem::validate(const Tolerances& tol) const {
    tol.validate();
    require_finite(E, "DescriptorSystem");
    require_finite(A, "DescriptorSystem");
    require_finite(B, "DescriptorSystem");
    require_finite(C, "DescriptorSystem");
    const Eigen::Index nn = E.rows();
    if (E.cols() != nn || A.rows() != nn || A.cols() != nn || B.rows() != nn || C.cols() != nn) {
        throw DimensionError("DescriptorSystem: inconsistent dimensions");
    }
    if (F) {
        require_finite(*F, "DescriptorSystem.F");
        if (F->rows() != nn) throw DimensionError("DescriptorSystem: F row count != n");
        if (numerical_rank(*F, tol) != F->cols()) {
            throw InvalidInputError("DescriptorSystem: F must have full column rank");
        }
    }
}

void LtiSystem::validate(const Tolerances& tol) const {
    tol.validate();
    require_finite(A0, "LtiSystem");
    require_finite(B0, "LtiSystem");
    require_finite(C0, "LtiSystem");
    const Eigen::Index nn = A0.rows();
    if (A0.cols() != nn || B0.rows() != nn || E0.rows() != nn || C0.cols() != nn ||
        F0.rows() != C0.rows() || F0.cols() != E0.cols()) {
        throw DimensionError("LtiSystem: inconsistent dimensions");
    }
    if (E0.cols() > 0) {
        require_finite(E0, "LtiSystem");
        require_finite(F0, "LtiSystem");
        Mat stacked(nn + C0.rows(), E0.cols());
        stacked << E0, F0;
        if (numerical_rank(stacked, tol) != E0.cols()) {
            throw InvalidInputError("LtiSystem: [E0; F0] must have full column rank");
        }
        if (numerical_rank(F0, tol) != F0.cols()) {
            throw InvalidInputError("LtiSystem: F0 must have full column rank");
        }
    }
}

bool check_regularity(const DescriptorSystem& sys, const Tolerances& tol) {
    sys.validate(tol);
    const Eigen::Index n = sys.n();
    const double scale = std::max(sys.E.norm(), sys.A.norm());
    if (scale == 0.0) return false;
    // det(lambda E - A) has degree <= n; sample at n+1 distinct points on a
    // circle whose radius keeps both terms comparable.
    const double radius = std::max(1.0, sys.A.norm() / std::max(sys.E.norm(), 1e-12));
    for (Eigen::Index k = 0; k <= n; ++k) {
        const double theta = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.5) / (n + 1);
        const Complex lambda = radius * Complex(std::cos(theta), std::sin(theta));
        if (relative_pencil_det(sys.E, sys.A, lambda) > tol.rank_tol) return true;
    }
    return false;
}

namespace {

// Orthonormal image/kernel bases of W and the subspace dimension split.
struct FittingSplit {
    Mat image;   // n x r
    Mat kernel;  // n x (n - r)
    Eigen::Index r = 0;
};

FittingSplit fitting_split(const Mat& W, const Tolerances& tol) {
    Eigen::JacobiSVD<Mat> svd(W, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 ? tol.rank_tol * std::max(sv(0), 0.0) : 0.0;
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) ++r;
    }
    return {svd.matrixU().leftCols(r), svd.matrixV().rightCols(W.cols() - r), r};
}

Mat matrix_power(const Mat& M, Eigen::Index k) {
    Mat out = Mat::Identity(M.rows(), M.cols());
    for (Eigen::Index i = 0; i < k; ++i) out = out * M;
    return out;
}

}  // namespace

WeierstrassForm weierstrass(const DescriptorSystem& sys, const Tolerances& tol) {
    if (!check_regularity(sys, tol)) {
        throw SingularPencilError("weierstrass: pencil is not regular");
    }
    const Eigen::Index n = sys.n();

    // Shift point with the best-conditioned resolvent among fixed candidates.
    const double candidates[] = {0.0, 1.0, -1.0, 2.0, -2.0, 0.5, -0.5, 3.0, -3.0, 1.6180339887, -2.7182818284};
    double best_rcond = -1.0;
    double lambda0 = 0.0;
    for (double cand : candidates) {
        Eigen::JacobiSVD<Mat> svd(cand * sys.E - sys.A);
        const auto& sv = svd.singularValues();
        const double rc = sv(0) > 0.0 ? sv(sv.size() - 1) / sv(0) : 0.0;
        if (rc > best_rcond) {
            best_rcond = rc;
            lambda0 = cand;
        }
    }
    if (best_rcond <= tol.rank_tol) {
        throw SingularPencilError("weierstrass: no well-conditioned shift found");
    }

    const Mat shifted = lambda0 * sys.E - sys.A;
    Eigen::PartialPivLU<Mat> lu(shifted);
    const Mat Ehat = lu.solve(sys.E);                                 // right structure
    const Mat Fhat = shifted.transpose().partialPivLu().solve(sys.E.transpose()).transpose();

    // After n-fold powering the zero eigenvalue's generalized eigenspace and
    // the complementary invariant subspace split cleanly (Fitting lemma);
    // these are the fast/slow right (resp. left) deflating subspaces.
    const FittingSplit right = fitting_split(matrix_power(Ehat, n), tol);
    const FittingSplit left = fitting_split(matrix_power(Fhat, n), tol);
    if (right.r != left.r) {
        throw SingularPencilError("weierstrass: left/right subspace dimensions disagree");
    }
    const Eigen::Index n1 = right.r;
    const Eigen::Index n2 = n - n1;

    Mat P(n, n);
    P << right.image, right.kernel;
    Mat Sinv(n, n);
    Sinv << left.image, left.kernel;
    const Mat S0 = Sinv.partialPivLu().solve(Mat::Identity(n, n));

    const Mat Et = S0 * sys.E * P;
    const Mat At = S0 * sys.A * P;
    const Mat E11 = Et.topLeftCorner(n1, n1);
    const Mat A22 = At.bottomRightCorner(n2, n2);

    WeierstrassForm wf;
    wf.n1 = n1;
    wf.n2 = n2;
    wf.P = P;
    wf.S.resize(n, n);
    wf.S.topRows(n1) = E11.partialPivLu().solve(S0.topRows(n1));
    wf.S.bottomRows(n2) = A22.partialPivLu().solve(S0.bottomRows(n2));
    wf.A1 = E11.partialPivLu().solve(At.topLeftCorner(n1, n1));
    wf.R = A22.partialPivLu().solve(Et.bottomRightCorner(n2, n2));

    const Mat SB = wf.S * sys.B;
    wf.B1 = SB.topRows(n1);
    wf.B2 = SB.bottomRows(n2);
    const Mat CP = sys.C * P;
    wf.C1 = CP.leftCols(n1);
    wf.C2 = CP.rightCols(n2);
    if (sys.F) {
        const Mat SF = wf.S * (*sys.F);
        wf.F1 = SF.topRows(n1);
        wf.F2 = SF.bottomRows(n2);
    } else {
        wf.F1.resize(n1, 0);
        wf.F2.resize(n2, 0);
    }

    // Nilpotency index of R.
    wf.s = 0;
    if (n2 > 0) {
        Mat Rk = Mat::Identity(n2, n2);
        for (Eigen::Index k = 1; k <= n2; ++k) {
            Rk = Rk * wf.R;
            if (Rk.norm() < tol.residual_tol) {
                wf.s = k;
                break;
            }
        }
        if (wf.s == 0) {
            throw SingularPencilError("weierstrass: fast block failed nilpotency check");
        }
    }
    return wf;
}

Trajectory simulate(const DescriptorSystem& sys, const WeierstrassForm& wf,
                    const Vec& z1_init, const Mat& u, Eigen::Index L,
                    const std::optional<Mat>& eta, const Tolerances& tol) {
    tol.validate();
    const Eigen::Index n = sys.n();
    const Eigen::Index s = wf.s;
    if (z1_init.size() != wf.n1) throw DimensionError("simulate: z1_init size != n1");
    if (u.rows() != sys.m()) throw DimensionError("simulate: input row count != m");
    if (u.cols() < L + s) throw LengthError("simulate: need L + s input samples");
    if (eta) {
        if (!sys.F) throw InvalidInputError("simulate: eta supplied but system has no F");
        if (eta->rows() != sys.q()) throw DimensionError("simulate: eta row count != q");
        if (eta->cols() < L + s) throw LengthError("simulate: need L + s disturbance samples");
    }

    // Effective input [u; eta] through [B1 F1] / [B2 F2].
    const Eigen::Index mq = sys.m() + (eta ? sys.q() : 0);
    Mat ueff(mq, L + s);
    ueff.topRows(sys.m()) = u.leftCols(L + s);
    Mat Bs1(wf.n1, mq), Bs2(wf.n2, mq);
    Bs1.leftCols(sys.m()) = wf.B1;
    Bs2.leftCols(sys.m()) = wf.B2;
    if (eta) {
        ueff.bottomRows(sys.q()) = eta->leftCols(L + s);
        Bs1.rightCols(sys.q()) = wf.F1;
        Bs2.rightCols(sys.q()) = wf.F2;
    }

    Mat z1(wf.n1, L + 1);
    if (wf.n1 > 0) {
        z1.col(0) = z1_init;
        for (Eigen::Index k = 0; k < L; ++k) {
            z1.col(k + 1) = wf.A1 * z1.col(k) + Bs1 * ueff.col(k);
        }
    }

    // Anticausal fast subsystem: z2(k) = -sum_{j=0}^{s-1} R^j B2 ueff(k+j).
    Mat z2 = Mat::Zero(wf.n2, L + 1);
    if (wf.n2 > 0) {
        std::vector<Mat> RjB2(s, Mat());
        Mat Rj = Mat::Identity(wf.n2, wf.n2);
        for (Eigen::Index j = 0; j < s; ++j) {
            RjB2[j] = Rj * Bs2;
            Rj = Rj * wf.R;
        }
        for (Eigen::Index k = 0; k <= L; ++k) {
            Vec acc = Vec::Zero(wf.n2);
            for (Eigen::Index j = 0; j < s; ++j) acc += RjB2[j] * ueff.col(k + j);
            z2.col(k) = -acc;
        }
    }

    Trajectory traj;
    traj.x.resize(n, L + 1);
    for (Eigen::Index k = 0; k <= L; ++k) {
        Vec z(n);
        z.head(wf.n1) = z1.col(k);
        z.tail(wf.n2) = z2.col(k);
        traj.x.col(k) = wf.P * z;
    }
    traj.y = sys.C * traj.x;
    return traj;
}

bool dual_normalizability(const DescriptorSystem& sys, const Tolerances& tol) {
    sys.validate(tol);
    Mat stacked(sys.n() + sys.p(), sys.n());
    stacked << sys.E, sys.C;
    return numerical_rank(stacked, tol) == sys.n();
}

bool matching_condition(const DescriptorSystem& sys, const Tolerances& tol) {
    sys.validate(tol);
    if (!sys.F) throw MissingDataError("matching_condition: system has no F");
    Mat stacked(sys.n() + sys.p(), sys.n() + sys.q());
    stacked << sys.E, *sys.F, sys.C, Mat::Zero(sys.p(), sys.q());
    return numerical_rank(stacked, tol) == sys.n() + sys.q();
}

namespace {

bool rank_at_lambda(const Mat& E, const Mat& A, const Mat& C, Complex lambda,
                    Eigen::Index want, const Tolerances& tol) {
    CMat stacked(E.rows() + C.rows(), E.cols());
    stacked.topRows(E.rows()) = lambda * E.cast<Complex>() - A.cast<Complex>();
    stacked.bottomRows(C.rows()) = C.cast<Complex>();
    return numerical_rank_complex(stacked, tol) == want;
}

}  // namespace

bool pbh_detectable(const DescriptorSystem& sys, const Tolerances& tol) {
    const auto spectrum = finite_spectrum(sys.E, sys.A, tol);
    for (const Complex& lambda : spectrum) {
        if (std::abs(lambda) < 1.0 - tol.schur_margin) continue;
        if (!rank_at_lambda(sys.E, sys.A, sys.C, lambda, sys.n(), tol)) return false;
    }
    return true;
}

bool r_controllable(const WeierstrassForm& wf, const Tolerances& tol) {
    tol.validate();
    if (wf.n1 == 0) return true;
    const Eigen::Index m = wf.B1.cols();
    Mat ctrl(wf.n1, wf.n1 * m);
    Mat AkB = wf.B1;
    for (Eigen::Index k = 0; k < wf.n1; ++k) {
        ctrl.middleCols(k * m, m) = AkB;
        AkB = wf.A1 * AkB;
    }
    return numerical_rank(ctrl, tol) == wf.n1;
}

bool c_controllable(const WeierstrassForm& wf, const Tolerances& tol) {
    if (!r_controllable(wf, tol)) return false;
    if (wf.n2 == 0) return true;
    const Eigen::Index m = wf.B2.cols();
    if (wf.s == 0 || m == 0) return false;
    Mat fast(wf.n2, wf.s * m);
    Mat RkB = wf.B2;
    for (Eigen::Index k = 0; k < wf.s; ++k) {
        fast.middleCols(k * m, m) = RkB;
        RkB = wf.R * RkB;
    }
    return numerical_rank(fast, tol) == wf.n2;
}

bool strong_detectability(const LtiSystem& lti, const Tolerances& tol) {
    lti.validate(tol);
    const Eigen::Index n = lti.n();
    const Eigen::Index r = lti.r();
    const Eigen::Index p = lti.p();

    std::vector<Complex> candidates;
    {
        Eigen::EigenSolver<Mat> es(lti.A0, false);
        for (Eigen::Index i = 0; i < n; ++i) candidates.push_back(es.eigenvalues()(i));
    }
    if (p == r) {
        // Square Rosenbrock matrix: rank drops exactly at the finite spectrum
        // of the zero pencil (diag(I, 0), [A0 E0; -C0 -F0]).
        Mat Ez = Mat::Zero(n + r, n + r);
        Ez.topLeftCorner(n, n) = Mat::Identity(n, n);
        Mat Az(n + r, n + r);
        Az << lti.A0, lti.E0, -lti.C0, -lti.F0;
        try {
            for (const Complex& z : finite_spectrum(Ez, Az, tol)) candidates.push_back(z);
        } catch (const SingularPencilError&) {
            // identically rank-deficient zero pencil: candidates from A0 suffice,
            // the rank test below fails wherever the deficiency is unstable
        }
    }

    for (const Complex& lambda : candidates) {
        if (std::abs(lambda) < 1.0 - tol.schur_margin) continue;
        CMat ros(n + p, n + r);
        ros.topLeftCorner(n, n) = lambda * Mat::Identity(n, n).cast<Complex>() - lti.A0.cast<Complex>();
        ros.topRightCorner(n, r) = -lti.E0.cast<Complex>();
        ros.bottomLeftCorner(p, n) = lti.C0.cast<Complex>();
        ros.bottomRightCorner(p, r) = lti.F0.cast<Complex>();
        if (numerical_rank_complex(ros, tol) != n + r) return false;
    }
    return true;
}

Trajectory simulate_lti(const LtiSystem& lti, const Vec& x0, const Mat& u,
                        const Mat& d, Eigen::Index L) {
    lti.validate();
    if (x0.size() != lti.n()) throw DimensionError("simulate_lti: x0 size != n");
    if (u.rows() != lti.m() || u.cols() < L) throw LengthError("simulate_lti: need L inputs");
    if (d.rows() != lti.r() || d.cols() < L + 1) {
        throw LengthError("simulate_lti: need L + 1 disturbance samples");
    }
    Trajectory traj;
    traj.x.resize(lti.n(), L + 1);
    traj.x.col(0) = x0;
    for (Eigen::Index k = 0; k < L; ++k) {
        traj.x.col(k + 1) = lti.A0 * traj.x.col(k) + lti.B0 * u.col(k) + lti.E0 * d.col(k);
    }
    traj.y = lti.C0 * traj.x + lti.F0 * d.leftCols(L + 1);
    return traj;
}

DescriptorSystem augment_for_eso(const LtiSystem& lti) {
    lti.validate();
    const Eigen::Index n = lti.n();
    const Eigen::Index r = lti.r();
    DescriptorSystem sys;
    sys.E = Mat::Zero(n + r, n + r);
    sys.E.topLeftCorner(n, n) = Mat::Identity(n, n);
    sys.A = Mat::Zero(n + r, n + r);
    sys.A.topLeftCorner(n, n) = lti.A0;
    sys.A.topRightCorner(n, r) = lti.E0;
    sys.B = Mat::Zero(n + r, lti.m());
    sys.B.topRows(n) = lti.B0;
    sys.C.resize(lti.p(), n + r);
    sys.C << lti.C0, lti.F0;
    return sys;
}

}  // namespace deso
