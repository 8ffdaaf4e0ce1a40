#include "deso/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace deso {

void require_finite(const Eigen::Ref<const Mat>& M, const char* who) {
    if (M.rows() < 1 || M.cols() < 1) {
        throw InvalidInputError(std::string(who) + ": empty matrix");
    }
    if (!M.allFinite()) {
        throw InvalidInputError(std::string(who) + ": non-finite entries");
    }
}

namespace {

template <typename MatrixType>
Eigen::Index rank_from_singular_values(const MatrixType& M, const Tolerances& tol) {
    Eigen::JacobiSVD<MatrixType> svd(M);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double cutoff = tol.rank_tol * sv(0);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) ++r;
    }
    return r;
}

}  // namespace

Eigen::Index numerical_rank(const Eigen::Ref<const Mat>& M, const Tolerances& tol) {
    require_finite(M, "numerical_rank");
    tol.validate();
    return rank_from_singular_values<Mat>(M, tol);
}

Eigen::Index numerical_rank_complex(const CMat& M, const Tolerances& tol) {
    tol.validate();
    if (M.rows() < 1 || M.cols() < 1 || !M.allFinite()) {
        throw InvalidInputError("numerical_rank_complex: invalid complex matrix");
    }
    return rank_from_singular_values<CMat>(M, tol);
}

Mat pseudoinverse(const Eigen::Ref<const Mat>& M, const Tolerances& tol) {
    require_finite(M, "pseudoinverse");
    tol.validate();
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 ? tol.rank_tol * sv(0) : 0.0;
    Vec inv_sv = Vec::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) inv_sv(i) = 1.0 / sv(i);
    }
    return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

Mat null_space_basis(const Eigen::Ref<const Mat>& M, const Tolerances& tol) {
    require_finite(M, "null_space_basis");
    tol.validate();
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 ? tol.rank_tol * sv(0) : 0.0;
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) ++r;
    }
    return svd.matrixV().rightCols(M.cols() - r);
}

double spectral_radius(const Eigen::Ref<const Mat>& M) {
    require_finite(M, "spectral_radius");
    if (M.rows() != M.cols()) {
        throw DimensionError("spectral_radius: matrix must be square");
    }
    if (M.rows() == 0) return 0.0;
    Eigen::EigenSolver<Mat> es(M, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_schur(const Eigen::Ref<const Mat>& M, const Tolerances& tol) {
    tol.validate();
    return spectral_radius(M) < 1.0 - tol.schur_margin;
}

double relative_pencil_det(const Eigen::Ref<const Mat>& E,
                           const Eigen::Ref<const Mat>& A, Complex lambda) {
    CMat P = lambda * E.cast<Complex>() - A.cast<Complex>();
    // Hadamard bound: product of row norms; scale-free zero test for det.
    double bound = 1.0;
    for (Eigen::Index i = 0; i < P.rows(); ++i) bound *= P.row(i).norm();
    if (!(bound > 0.0) || !std::isfinite(bound)) return 0.0;
    const Complex det = Eigen::PartialPivLU<CMat>(P).determinant();
    return std::abs(det) / bound;
}

std::vector<Complex> finite_spectrum(const Eigen::Ref<const Mat>& E,
                                     const Eigen::Ref<const Mat>& A,
                                     const Tolerances& tol) {
    require_finite(E, "finite_spectrum");
    require_finite(A, "finite_spectrum");
    tol.validate();
    if (E.rows() != E.cols() || A.rows() != A.cols() || E.rows() != A.rows()) {
        throw DimensionError("finite_spectrum: E, A must be square and same size");
    }
    const Eigen::Index n = E.rows();
    const double pencil_scale = std::max(E.norm(), A.norm());
    if (pencil_scale == 0.0) {
        throw SingularPencilError("finite_spectrum: zero pencil");
    }

    // QZ on (A, E): det(A - lambda E) = 0 at generalized eigenvalues.
    Eigen::RealQZ<Mat> qz(A, E);
    if (qz.info() != Eigen::Success) {
        throw SingularPencilError("finite_spectrum: QZ iteration failed (singular pencil?)");
    }
    const Mat& S = qz.matrixS();
    const Mat& T = qz.matrixT();

    const double beta_cut = tol.rank_tol * pencil_scale;
    std::vector<Complex> out;
    Eigen::Index i = 0;
    while (i < n) {
        const bool pair_block = (i + 1 < n) && (std::abs(S(i + 1, i)) > beta_cut);
        if (!pair_block) {
            const double alpha = S(i, i);
            const double beta = T(i, i);
            if (std::abs(beta) <= beta_cut) {
                if (std::abs(alpha) <= beta_cut) {
                    throw SingularPencilError("finite_spectrum: pencil numerically singular");
                }
                // infinite eigenvalue: skip
            } else {
                out.emplace_back(alpha / beta, 0.0);
            }
            ++i;
        } else {
            // 2x2 block: roots of det(S2 - lambda T2) with T2 upper triangular.
            const double s11 = S(i, i), s12 = S(i, i + 1), s21 = S(i + 1, i), s22 = S(i + 1, i + 1);
            const double t11 = T(i, i), t12 = T(i, i + 1), t22 = T(i + 1, i + 1);
            const double a = t11 * t22;
            const double b = -(s11 * t22 + t11 * s22 - t12 * s21);
            const double c = s11 * s22 - s12 * s21;
            const double quad_scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
            if (quad_scale == 0.0) {
                throw SingularPencilError("finite_spectrum: pencil numerically singular");
            }
            if (std::abs(a) > beta_cut * beta_cut) {
                const Complex disc = std::sqrt(Complex(b * b - 4.0 * a * c, 0.0));
                out.push_back((-b + disc) / (2.0 * a));
                out.push_back((-b - disc) / (2.0 * a));
            } else if (std::abs(b) > beta_cut * quad_scale) {
                out.emplace_back(-c / b, 0.0);  // one finite root, one infinite
            }
            i += 2;
        }
    }
    return out;
}

std::optional<Mat> stabilize_output_injection(const Eigen::Ref<const Mat>& M,
                                              const Eigen::Ref<const Mat>& G,
                                              const Tolerances& tol) {
    require_finite(M, "stabilize_output_injection");
    require_finite(G, "stabilize_output_injection");
    tol.validate();
    if (M.rows() != M.cols() || G.cols() != M.cols()) {
        throw DimensionError("stabilize_output_injection: need M n x n and G w x n");
    }
    const Eigen::Index n = M.rows();
    const Eigen::Index w = G.rows();

    if (is_schur(M, tol)) {
        return Mat::Zero(n, w);
    }

    // Value iteration for the DARE of the dual pair (A, B) = (M^T, G^T),
    // Q = R = I. Divergence of P signals an undetectable pair. Each iterate
    // is re-symmetrized: rounding noise in the antisymmetric part would
    // otherwise be amplified by A^T (.) A along unstable directions.
    const Mat A = M.transpose();
    const Mat B = G.transpose();
    Mat P = Mat::Identity(n, n);
    const int max_iter = 20000;
    for (int it = 0; it < max_iter; ++it) {
        const Mat BtP = B.transpose() * P;
        const Mat R_eff = Mat::Identity(w, w) + BtP * B;
        Mat Pn = A.transpose() * P * A -
                 (BtP * A).transpose() * R_eff.ldlt().solve(BtP * A) +
                 Mat::Identity(n, n);
        Pn = 0.5 * (Pn + Pn.transpose());
        const double step = (Pn - P).norm();
        P = Pn;
        if (!P.allFinite() || P.norm() > 1e12) return std::nullopt;
        if (step <= 1e-12 * std::max(1.0, P.norm())) break;
    }

    // The closed-loop check below, not the iteration count, decides
    // feasibility.
    const Mat BtP = B.transpose() * P;
    const Mat L = (Mat::Identity(w, w) + BtP * B).ldlt().solve(BtP * A);
    Mat K = -L.transpose();
    if (!is_schur(M + K * G, tol)) return std::nullopt;
    return K;
}

}  // namespace deso
