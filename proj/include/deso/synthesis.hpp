#pragma once

#include <map>
#include <optional>
#include <string>

#include "deso/data_pipeline.hpp"

namespace deso {

/// The data equation X_f = Sigma * D with D = [Xp; Up; Yp; Yf], together with
/// the ingredients of its general solution
///   Sigma(K1) = Xf D^+ + K1 (I - D D^+).
struct DataEquation {
    Mat D;             // (n+m+2p) x T
    Mat Xf;            // n x T
    Mat D_pinv;        // T x (n+m+2p)
    Mat projector;     // I - D D^+, idempotent and symmetric
    Mat kernel_basis;  // T x k orthonormal basis of Ker(D)

    Eigen::Index n = 0, m = 0, p = 0;
};

/// Solution family of the data equation plus the pair whose output-injection
/// detectability decides stabilizability of the free parameter.
struct ObserverFamily {
    DataEquation deq;
    Mat sigma0;  // particular solution Xf D^+
    Mat M;       // Xf H_Xp (H_Xp = first n columns of D^+)
    Mat G;       // Delta_Xp (first n columns of the projector)
};

enum class ObserverKind { standard, uio, eso };

const char* to_string(ObserverKind kind);

/// Gains of the one-step-lookahead observer
///   xhat(k+1) = A_O xhat(k) + B_O_u u(k) + B_O_y y(k) + N_O y(k+1).
/// A_O is Schur stable whenever the gains come out of a feasible synthesis.
struct ObserverGains {
    Mat A_O;    // n x n
    Mat B_O_u;  // n x m
    Mat B_O_y;  // n x p
    Mat N_O;    // n x p
    ObserverKind kind = ObserverKind::standard;

    Eigen::Index n() const { return A_O.rows(); }
    Eigen::Index m() const { return B_O_u.cols(); }
    Eigen::Index p() const { return B_O_y.cols(); }
};

struct KernelInclusionResult {
    bool holds = false;
    double frobenius = 0.0;
    double max_column_norm = 0.0;
};

struct SynthesisReport {
    bool feasible = false;
    std::string reason;  // empty when feasible; failure tag otherwise
    double data_residual = 0.0;
    double spectral_radius = 0.0;
    Mat K1;  // zero when the default free parameter suffices
    std::optional<double> kernel_inclusion_residual;
    std::map<std::string, bool> checks;
};

struct SynthesisResult {
    std::optional<ObserverGains> gains;  // empty when infeasible
    SynthesisReport report;
};

/// Particular solution, projector and the stabilization pair (M, G).
ObserverFamily solve_family(const DataMatrices& dm, const Tolerances& tol = {});

/// Residual of Xf against the kernel of D; the data-side certificate that the
/// future state is a function of (x, u, y, y+).
KernelInclusionResult kernel_inclusion_check(const DataEquation& deq,
                                             const Tolerances& tol = {});

/// rk[lambda Xp - Xf; Up; Yp; Yf] = rk[Xp; Up; Yf] at every candidate lambda
/// with |lambda| >= 1 - schur_margin. Candidates are the eigenvalues of the
/// particular solution's Xp block plus fixed grids on the circles of radius
/// 1 and 1.25; outside that finite set the universal condition is not
/// checked (no algorithm exists for it).
bool rank_condition_check(const DataMatrices& dm, const Tolerances& tol = {});

/// Standard observer synthesis: K1 = 0 first, dual-Riccati output-injection
/// fallback when the particular solution is not Schur.
SynthesisResult synthesize_observer(const DataMatrices& dm, const Tolerances& tol = {});

/// Unknown-input observer synthesis: refuses on an uninformative record
/// (corollary2 fails) or when the kernel inclusion condition fails; otherwise
/// identical family machinery (the projector annihilates D, so any K1
/// preserves the data equation).
SynthesisResult synthesize_uio(const DataMatrices& dm, Eigen::Index q,
                               const Tolerances& tol = {});

/// Extended state observer: appends the recorded disturbance to the state,
/// rebuilds the data matrices for the augmented n+r system and runs the
/// standard path. The measured outputs already contain F0 d(k), so y is
/// reused as-is.
SynthesisResult synthesize_eso(const LtiSystem& lti, const DataRecord& rec,
                               const Tolerances& tol = {});

/// The augmented-state record used by synthesize_eso (exposed for tests and
/// the verification CLI).
DataRecord augment_record_for_eso(const LtiSystem& lti, const DataRecord& rec);

}  // namespace deso
