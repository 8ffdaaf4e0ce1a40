#pragma once

#include <optional>
#include <vector>

#include "deso/linalg.hpp"

namespace deso {

/// Discrete-time descriptor plant E x(k+1) = A x(k) + B u(k) (+ F eta(k)),
/// y(k) = C x(k). E may be rank-deficient; when F is present it must have
/// full column rank. Regularity of the pencil (E, A) is not demanded at
/// construction (the ESO augmentation is deliberately irregular); it is a
/// precondition of weierstrass() and simulate() and is checked there.
struct DescriptorSystem {
    Mat E;
    Mat A;
    Mat B;
    Mat C;
    std::optional<Mat> F;

    Eigen::Index n() const { return E.rows(); }
    Eigen::Index m() const { return B.cols(); }
    Eigen::Index p() const { return C.rows(); }
    Eigen::Index q() const { return F ? F->cols() : 0; }

    void validate(const Tolerances& tol = {}) const;
};

/// Ordinary LTI plant with a disturbance channel:
///   x(k+1) = A0 x(k) + B0 u(k) + E0 d(k),  y(k) = C0 x(k) + F0 d(k).
/// F0 must have full column rank (which also makes [E0; F0] full column
/// rank); this is what makes the disturbance reconstructible one step later.
struct LtiSystem {
    Mat A0;
    Mat B0;
    Mat E0;
    Mat C0;
    Mat F0;

    Eigen::Index n() const { return A0.rows(); }
    Eigen::Index m() const { return B0.cols(); }
    Eigen::Index r() const { return E0.cols(); }
    Eigen::Index p() const { return C0.rows(); }

    void validate(const Tolerances& tol = {}) const;
};

/// Decoupled slow/fast coordinates of a regular pencil:
///   S*E*P = diag(I_{n1}, R),  S*A*P = diag(A1, I_{n2}),
///   S*B = [B1; B2],  C*P = [C1 C2],  S*F = [F1; F2],
/// with R nilpotent of index s (s = 0 when n2 = 0).
struct WeierstrassForm {
    Mat S;
    Mat P;
    Mat A1;   // n1 x n1 slow dynamics
    Mat R;    // n2 x n2 nilpotent
    Mat B1;
    Mat B2;
    Mat C1;
    Mat C2;
    Mat F1;   // 0 x q when F absent
    Mat F2;
    Eigen::Index n1 = 0;
    Eigen::Index n2 = 0;
    Eigen::Index s = 0;  // nilpotency index of R

    Eigen::Index n() const { return n1 + n2; }
};

/// One simulated trajectory: states x(0..L) and outputs y(0..L) as columns.
struct Trajectory {
    Mat x;  // n x (L+1)
    Mat y;  // p x (L+1)
};

/// True iff det(lambda E - A) is not identically zero, decided by sampling
/// the determinant at n+1 points on a circle (a degree-<=n polynomial that
/// vanishes at n+1 distinct points is identically zero).
bool check_regularity(const DescriptorSystem& sys, const Tolerances& tol = {});

/// Slow/fast decomposition of a regular pencil. Computed from the shifted
/// resolvent (lambda0 E - A)^{-1} E whose image/kernel after n-fold powering
/// are exactly the slow and fast deflating subspaces; no ordered QZ needed.
/// Throws SingularPencilError for irregular pencils.
WeierstrassForm weierstrass(const DescriptorSystem& sys, const Tolerances& tol = {});

/// Simulates the unique consistent trajectory determined by z1(0) = z1_init.
/// u has one column per step and must supply L + s samples because the fast
/// subsystem anticipates s future inputs; eta (when present) has the same
/// length and enters through F.
Trajectory simulate(const DescriptorSystem& sys, const WeierstrassForm& wf,
                    const Vec& z1_init, const Mat& u, Eigen::Index L,
                    const std::optional<Mat>& eta = std::nullopt,
                    const Tolerances& tol = {});

/// PBH detectability: rk[lambda E - A; C] = n at every finite generalized
/// eigenvalue with |lambda| >= 1 - schur_margin.
bool pbh_detectable(const DescriptorSystem& sys, const Tolerances& tol = {});

/// Assumption "rk[E; C] = n" (fast subsystem observable).
bool dual_normalizability(const DescriptorSystem& sys, const Tolerances& tol = {});

/// Observer matching condition rk[E F; C 0] = n + q. Requires F present.
bool matching_condition(const DescriptorSystem& sys, const Tolerances& tol = {});

/// Kalman rank test on the slow pair (A1, B1).
bool r_controllable(const WeierstrassForm& wf, const Tolerances& tol = {});

/// r_controllable plus full row rank of [B2, R B2, ..., R^{s-1} B2].
bool c_controllable(const WeierstrassForm& wf, const Tolerances& tol = {});

/// rk[lambda I - A0, -E0; C0, F0] = n + r at candidate lambda with
/// |lambda| >= 1 - schur_margin. Candidates are the eigenvalues of A0 plus,
/// when the compound matrix is square, the finite spectrum of the associated
/// zero pencil.
bool strong_detectability(const LtiSystem& lti, const Tolerances& tol = {});

/// Disturbance-as-state augmentation: E = diag(I_n, 0), A = [A0 E0; 0 0],
/// B = [B0; 0], C = [C0 F0]. The result is dual-normalizable by construction
/// and deliberately irregular (the disturbance rows read 0 = 0).
DescriptorSystem augment_for_eso(const LtiSystem& lti);

/// Plain LTI recursion x(k+1) = A0 x + B0 u + E0 d with y = C0 x + F0 d.
/// u needs L samples, d needs L + 1 (y(L) reads d(L)).
Trajectory simulate_lti(const LtiSystem& lti, const Vec& x0, const Mat& u,
                        const Mat& d, Eigen::Index L);

}  // namespace deso
