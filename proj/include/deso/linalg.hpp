#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "deso/tolerances.hpp"

namespace deso {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Throws InvalidInputError if M is empty or contains NaN/Inf entries.
void require_finite(const Eigen::Ref<const Mat>& M, const char* who);

/// Number of singular values above tol.rank_tol * sigma_max.
Eigen::Index numerical_rank(const Eigen::Ref<const Mat>& M, const Tolerances& tol = {});
Eigen::Index numerical_rank_complex(const CMat& M, const Tolerances& tol = {});

/// Moore-Penrose inverse via SVD truncation at the relative rank cutoff.
Mat pseudoinverse(const Eigen::Ref<const Mat>& M, const Tolerances& tol = {});

/// Orthonormal basis of the right kernel; cols(M) - numerical_rank(M) columns
/// (zero columns when the kernel is trivial).
Mat null_space_basis(const Eigen::Ref<const Mat>& M, const Tolerances& tol = {});

/// Largest eigenvalue modulus of a square matrix.
double spectral_radius(const Eigen::Ref<const Mat>& M);

/// True iff spectral_radius(M) < 1 - tol.schur_margin.
bool is_schur(const Eigen::Ref<const Mat>& M, const Tolerances& tol = {});

/// Finite generalized eigenvalues of the pencil (E, A), i.e. the roots of
/// det(lambda*E - A). Eigenvalue directions whose E-side component is below
/// rank_tol * pencil scale are classified as infinite and dropped.
/// Throws SingularPencilError when the pencil is singular for every lambda.
std::vector<Complex> finite_spectrum(const Eigen::Ref<const Mat>& E,
                                     const Eigen::Ref<const Mat>& A,
                                     const Tolerances& tol = {});

/// Finds K with M + K*G Schur stable, or nullopt when the pair (M, G) is not
/// detectable in the output-injection sense. K = 0 is accepted whenever M is
/// already stable; otherwise the discrete Riccati equation for the dual pair
/// (M^T, G^T) with unit weights supplies the gain, and the closed loop is
/// re-checked before returning.
std::optional<Mat> stabilize_output_injection(const Eigen::Ref<const Mat>& M,
                                              const Eigen::Ref<const Mat>& G,
                                              const Tolerances& tol = {});

/// det(lambda*E - A) sampled against the Hadamard bound of the same matrix;
/// used by regularity tests. Returns |det| / bound (0 when bound underflows).
double relative_pencil_det(const Eigen::Ref<const Mat>& E,
                           const Eigen::Ref<const Mat>& A, Complex lambda);

}  // namespace deso
