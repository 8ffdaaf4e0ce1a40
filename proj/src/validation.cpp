#include "deso/validation.hpp"

#include <cmath>

namespace deso {

std::optional<ModelBaseline> solve_tn(const DescriptorSystem& sys, bool uio,
                                      const Tolerances& tol) {
    sys.validate(tol);
    const Eigen::Index n = sys.n();
    const Eigen::Index p = sys.p();

    Mat stacked(n + p, n);
    stacked << sys.E, sys.C;
    if (numerical_rank(stacked, tol) != n) return std::nullopt;

    std::optional<ModelBaseline> base(std::in_place);
    const Mat tn = pseudoinverse(stacked, tol);  // n x (n+p), [T N] = stacked^+
    base->T_mat = tn.leftCols(n);
    base->N_mat = tn.rightCols(p);

    if (uio) {
        if (!sys.F) throw MissingDataError("solve_tn: UIO variant needs F");
        const Eigen::Index q = sys.q();
        Mat wide(n + p, n + q);
        wide << sys.E, *sys.F, sys.C, Mat::Zero(p, q);
        if (numerical_rank(wide, tol) != n + q) return std::nullopt;
        // [Tbar Nbar] [E F; C 0] = [I 0] picks up Tbar F = 0 for free.
        Mat rhs(n, n + q);
        rhs << Mat::Identity(n, n), Mat::Zero(n, q);
        const Mat tnbar = rhs * pseudoinverse(wide, tol);
        base->Tbar = tnbar.leftCols(n);
        base->Nbar = tnbar.rightCols(p);
    }
    return base;
}

std::optional<ObserverGains> model_observer(const DescriptorSystem& sys,
                                            const ModelBaseline& base, bool uio,
                                            const Tolerances& tol) {
    sys.validate(tol);
    const Mat& T = uio ? *base.Tbar : base.T_mat;
    const Mat& N = uio ? *base.Nbar : base.N_mat;
    const Mat TA = T * sys.A;

    const auto K = stabilize_output_injection(TA, sys.C, tol);
    if (!K) return std::nullopt;

    ObserverGains g;
    g.A_O = TA + *K * sys.C;  // = T A - L C with L = -K
    g.B_O_u = T * sys.B;
    g.B_O_y = -*K;
    g.N_O = N;
    g.kind = uio ? ObserverKind::uio : ObserverKind::standard;
    return g;
}

bool uio_model_existence(const DescriptorSystem& sys, const Tolerances& tol) {
    sys.validate(tol);
    if (!sys.F) throw MissingDataError("uio_model_existence: system has no F");
    if (!matching_condition(sys, tol)) return false;

    const Eigen::Index n = sys.n();
    const Eigen::Index p = sys.p();
    const Eigen::Index q = sys.q();

    std::vector<Complex> candidates = finite_spectrum(sys.E, sys.A, tol);
    if (p == q) {
        Mat Ez = Mat::Zero(n + p, n + p);
        Ez.topLeftCorner(n, n) = sys.E;
        Mat Az(n + p, n + p);
        Az << sys.A, *sys.F, -sys.C, Mat::Zero(p, q);
        try {
            for (const Complex& z : finite_spectrum(Ez, Az, tol)) candidates.push_back(z);
        } catch (const SingularPencilError&) {
            // zero pencil identically singular; spectrum candidates suffice
        }
    }

    for (const Complex& lambda : candidates) {
        if (std::abs(lambda) < 1.0 - tol.schur_margin) continue;
        CMat ros(n + p, n + q);
        ros.topLeftCorner(n, n) = lambda * sys.E.cast<Complex>() - sys.A.cast<Complex>();
        ros.topRightCorner(n, q) = -sys.F->cast<Complex>();
        ros.bottomLeftCorner(p, n) = sys.C.cast<Complex>();
        ros.bottomRightCorner(p, q).setZero();
        if (numerical_rank_complex(ros, tol) != n + q) return false;
    }
    return true;
}

namespace {

// Orthogonal projector off Im(F); identity when F is absent.
Mat off_image_projector(const DescriptorSystem& sys, const Tolerances& tol) {
    const Eigen::Index n = sys.n();
    if (!sys.F) return Mat::Identity(n, n);
    return Mat::Identity(n, n) - *sys.F * pseudoinverse(*sys.F, tol);
}

}  // namespace

bool lemma1_oracle(const DescriptorSystem& sys, const WeierstrassForm& wf,
                   const DataRecord& rec, int trials, std::uint64_t seed,
                   const Tolerances& tol) {
    sys.validate(tol);
    rec.validate();
    std::mt19937_64 rng(seed);

    const DataMatrices dm = build_data_matrices(rec);
    const Eigen::Index n = sys.n(), m = sys.m(), p = sys.p(), T = rec.T;

    Mat full(2 * n + m + 2 * p, T);
    full << dm.Xp, dm.Xf, dm.Up, dm.Yp, dm.Yf;
    const Mat full_pinv = pseudoinverse(full, tol);
    const Mat offF = off_image_projector(sys, tol);

    // (a) recorded-combination direction: every column mix is a one-step
    // system tuple.
    for (int t = 0; t < trials; ++t) {
        Vec g = uniform_matrix(rng, T, 1, -1.0, 1.0).col(0);
        if (g.norm() == 0.0) continue;
        g /= g.norm();
        const Vec v = full * g;
        const Vec x0 = v.segment(0, n);
        const Vec x1 = v.segment(n, n);
        const Vec u0 = v.segment(2 * n, m);
        const Vec y0 = v.segment(2 * n + m, p);
        const Vec y1 = v.segment(2 * n + m + p, p);
        const double res_dyn = (offF * (sys.E * x1 - sys.A * x0 - sys.B * u0)).norm();
        const double res_y0 = (y0 - sys.C * x0).norm();
        const double res_y1 = (y1 - sys.C * x1).norm();
        if (std::max({res_dyn, res_y0, res_y1}) >= tol.residual_tol) return false;
    }

    // (b) fresh-tuple direction: newly simulated tuples project onto the
    // recorded column space with negligible residual.
    for (int t = 0; t < trials; ++t) {
        const Mat u = uniform_matrix(rng, m, 1 + wf.s, -1.0, 1.0);
        std::optional<Mat> eta;
        if (sys.F) eta = uniform_matrix(rng, sys.q(), 1 + wf.s, -1.0, 1.0);
        const Vec z1_init = uniform_matrix(rng, wf.n1, 1, -1.0, 1.0).col(0);
        const Trajectory traj = simulate(sys, wf, z1_init, u, 1, eta, tol);

        Vec v(2 * n + m + 2 * p);
        v << traj.x.col(0), traj.x.col(1), u.col(0), traj.y.col(0), traj.y.col(1);
        if (v.norm() == 0.0) continue;
        v /= v.norm();
        const double res = (v - full * (full_pinv * v)).norm();
        if (res >= tol.residual_tol) return false;
    }
    return true;
}

namespace {

MonteCarloCase run_theorem2_trial(std::uint64_t trial, std::mt19937_64& rng,
                                  const MonteCarloOptions& opt, const Tolerances& tol) {
    MonteCarloCase c;
    c.trial = trial;
    const bool want_detectable = trial % 2 == 0;
    const RandomPlant plant = random_regular_plant(rng, want_detectable, opt.plant, tol);
    const Eigen::Index n = plant.sys.n();

    InputLaw law{InputLaw::Kind::uniform, -1.0, 1.0, 0.0};
    const DataRecord rec = collect_record(plant.sys, plant.wf, opt.T, n, rng, law,
                                          std::nullopt, tol);
    c.pe_valid = pe_assumption_check(rec, plant.wf, false, tol);
    if (!c.pe_valid) return c;

    const DataMatrices dm = build_data_matrices(rec);
    c.data_feasible = synthesize_observer(dm, tol).report.feasible;
    c.rank_condition = rank_condition_check(dm, tol);
    c.model_verdict = pbh_detectable(plant.sys, tol);
    c.agree = (c.data_feasible == c.model_verdict) && (c.rank_condition == c.model_verdict);
    return c;
}

MonteCarloCase run_theorem4_trial(std::uint64_t trial, std::mt19937_64& rng,
                                  const MonteCarloOptions& opt, const Tolerances& tol) {
    MonteCarloCase c;
    c.trial = trial;
    const bool want_matching = trial % 2 == 0;
    const bool want_detectable = trial % 4 < 2;
    const RandomPlant plant =
        random_uio_plant(rng, want_matching, want_detectable, opt.plant, tol);
    const Eigen::Index n = plant.sys.n();

    InputLaw law{InputLaw::Kind::uniform, -1.0, 1.0, 0.0};
    const DataRecord rec =
        collect_record(plant.sys, plant.wf, opt.T, n, rng, law, law, tol);
    c.pe_valid = pe_assumption_check(rec, plant.wf, true, tol);
    if (!c.pe_valid) return c;

    const DataMatrices dm = build_data_matrices(rec);
    c.data_feasible = synthesize_uio(dm, plant.sys.q(), tol).report.feasible;
    c.rank_condition = rank_condition_check(dm, tol);
    c.model_verdict = uio_model_existence(plant.sys, tol);
    // The data rank equality is equivalent to existence only under the
    // matching condition; outside it only the feasibility verdicts must
    // agree.
    c.agree = c.data_feasible == c.model_verdict;
    if (plant.matching) c.agree = c.agree && (c.rank_condition == c.model_verdict);
    return c;
}

}  // namespace

MonteCarloSummary montecarlo_equivalence(EquivalenceMode mode, int trials,
                                         std::uint64_t seed, const MonteCarloOptions& opt,
                                         const Tolerances& tol) {
    if (trials < 1) throw InvalidInputError("montecarlo_equivalence: trials must be >= 1");
    MonteCarloSummary summary;
    summary.trials = trials;
    for (int t = 0; t < trials; ++t) {
        // one generator per trial keeps trials independent and parallelizable
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(t) * 0x9e3779b97f4a7c15ULL);
        const MonteCarloCase c = mode == EquivalenceMode::theorem2
                                     ? run_theorem2_trial(t, rng, opt, tol)
                                     : run_theorem4_trial(t, rng, opt, tol);
        summary.cases.push_back(c);
        if (!c.pe_valid) continue;
        ++summary.pe_passed;
        if (c.agree) {
            ++summary.agreements;
        } else {
            ++summary.disagreements;
        }
    }
    return summary;
}

}  // namespace deso
