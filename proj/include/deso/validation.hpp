#pragma once

#include <cstdint>
#include <vector>

#include "deso/observer_runtime.hpp"
#include "deso/random_system.hpp"
#include "deso/synthesis.hpp"

namespace deso {

/// Model-side left inverses of the output-extended descriptor:
/// T E + N C = I_n, and for the unknown-input variant additionally
/// Tbar F = 0. These rewrite the plant as
/// x(k+1) = T A x(k) + T B u(k) + N y(k+1) and anchor every model-side
/// oracle.
struct ModelBaseline {
    Mat T_mat;  // n x n
    Mat N_mat;  // n x p
    std::optional<Mat> Tbar;
    std::optional<Mat> Nbar;
};

/// Minimum-norm solution of [T N][E; C] = I (and of the zero-annihilation
/// variant through [E F; C 0] when uio is set). Returns nullopt when the
/// stacked matrix is column-rank deficient, i.e. the corresponding
/// assumption fails.
std::optional<ModelBaseline> solve_tn(const DescriptorSystem& sys, bool uio,
                                      const Tolerances& tol = {});

/// Classical observer built from the model: A_O = T A - L C with a
/// Riccati-stabilized L, B_O_u = T B, B_O_y = L, N_O = N (barred variants in
/// the unknown-input case). Returns nullopt when no stabilizing L exists.
std::optional<ObserverGains> model_observer(const DescriptorSystem& sys,
                                            const ModelBaseline& base, bool uio = false,
                                            const Tolerances& tol = {});

/// Model-side UIO existence: the matching condition together with
/// rk[lambda E - A, -F; C, 0] = n + q at every candidate lambda with
/// |lambda| >= 1 - schur_margin (candidates: finite spectrum of (E, A) and,
/// when p = q, of the associated zero pencil).
bool uio_model_existence(const DescriptorSystem& sys, const Tolerances& tol = {});

/// Two-directional brute force behind the trajectory-equivalence lemmas:
/// (a) random unit-norm combinations of the recorded data columns must
/// satisfy the plant equations (modulo Im(F) in the unknown-input case);
/// (b) fresh simulated tuples must lie in the recorded column space.
/// Returns true iff all 2 * trials checks stay below residual_tol.
bool lemma1_oracle(const DescriptorSystem& sys, const WeierstrassForm& wf,
                   const DataRecord& rec, int trials, std::uint64_t seed,
                   const Tolerances& tol = {});

enum class EquivalenceMode { theorem2, theorem4 };

struct MonteCarloCase {
    std::uint64_t trial = 0;
    bool pe_valid = false;
    bool data_feasible = false;
    bool rank_condition = false;
    bool model_verdict = false;
    bool agree = false;
};

struct MonteCarloSummary {
    int trials = 0;
    int pe_passed = 0;
    int agreements = 0;
    int disagreements = 0;
    std::vector<MonteCarloCase> cases;
};

struct MonteCarloOptions {
    Eigen::Index T = 30;
    RandomPlantOptions plant;
};

/// Per-trial comparison of the data-side verdicts (synthesis feasibility and
/// the data rank condition) against the model-side one (PBH detectability,
/// or the model UIO existence conditions in theorem4 mode). Trials whose PE
/// oracle fails are recorded but not scored.
MonteCarloSummary montecarlo_equivalence(EquivalenceMode mode, int trials,
                                         std::uint64_t seed,
                                         const MonteCarloOptions& opt = {},
                                         const Tolerances& tol = {});

}  // namespace deso
