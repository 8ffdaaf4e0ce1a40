#include "deso/synthesis.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

namespace deso {

const char* to_string(ObserverKind kind) {
    switch (kind) {
        case ObserverKind::standard: return "standard";
        case ObserverKind::uio: return "uio";
        case ObserverKind::eso: return "eso";
    }
    return "standard";
}

ObserverFamily solve_family(const DataMatrices& dm, const Tolerances& tol) {
    tol.validate();
    ObserverFamily fam;
    fam.deq.D = dm.stacked_d();
    fam.deq.Xf = dm.Xf;
    fam.deq.n = dm.n();
    fam.deq.m = dm.m();
    fam.deq.p = dm.p();
    fam.deq.D_pinv = pseudoinverse(fam.deq.D, tol);
    fam.deq.projector = Mat::Identity(fam.deq.D.rows(), fam.deq.D.rows()) -
                        fam.deq.D * fam.deq.D_pinv;
    fam.deq.kernel_basis = null_space_basis(fam.deq.D, tol);
    fam.sigma0 = dm.Xf * fam.deq.D_pinv;
    fam.M = dm.Xf * fam.deq.D_pinv.leftCols(dm.n());
    fam.G = fam.deq.projector.leftCols(dm.n());
    return fam;
}

KernelInclusionResult kernel_inclusion_check(const DataEquation& deq, const Tolerances& tol) {
    tol.validate();
    KernelInclusionResult res;
    if (deq.kernel_basis.cols() == 0) {
        res.holds = true;
        return res;
    }
    const Mat prod = deq.Xf * deq.kernel_basis;
    res.frobenius = prod.norm();
    res.max_column_norm = prod.colwise().norm().maxCoeff();
    res.holds = res.frobenius < tol.residual_tol;
    return res;
}

namespace {

CMat complex_rank_stack(const DataMatrices& dm, Complex lambda) {
    const Eigen::Index n = dm.n(), m = dm.m(), p = dm.p(), T = dm.T();
    CMat st(n + m + 2 * p, T);
    st.topRows(n) = lambda * dm.Xp.cast<Complex>() - dm.Xf.cast<Complex>();
    st.middleRows(n, m) = dm.Up.cast<Complex>();
    st.middleRows(n + m, p) = dm.Yp.cast<Complex>();
    st.bottomRows(p) = dm.Yf.cast<Complex>();
    return st;
}

struct FamilyOutcome {
    Mat sigma;          // final solution, row blocks (n | m | p | p)
    Mat K1;             // free parameter actually used
    bool stabilizable;  // K1 = 0 Schur or Riccati gain found
};

FamilyOutcome stabilize_family(const ObserverFamily& fam, const Tolerances& tol) {
    const Eigen::Index n = fam.deq.n;
    FamilyOutcome out;
    out.K1 = Mat::Zero(n, fam.deq.D.rows());
    out.sigma = fam.sigma0;
    out.stabilizable = true;
    if (is_schur(out.sigma.leftCols(n), tol)) return out;

    const auto gain = stabilize_output_injection(fam.M, fam.G, tol);
    if (!gain) {
        out.stabilizable = false;
        return out;
    }
    out.K1 = *gain;
    out.sigma = fam.sigma0 + out.K1 * fam.deq.projector;
    return out;
}

ObserverGains partition_gains(const Mat& sigma, Eigen::Index n, Eigen::Index m,
                              Eigen::Index p, ObserverKind kind) {
    ObserverGains g;
    g.A_O = sigma.leftCols(n);
    g.B_O_u = sigma.middleCols(n, m);
    g.B_O_y = sigma.middleCols(n + m, p);
    g.N_O = sigma.rightCols(p);
    g.kind = kind;
    return g;
}

SynthesisResult run_family_synthesis(const DataMatrices& dm, ObserverKind kind,
                                     const ObserverFamily& fam,
                                     const KernelInclusionResult& kern,
                                     const Tolerances& tol) {
    SynthesisResult res;
    const Eigen::Index n = dm.n();

    const FamilyOutcome outcome = stabilize_family(fam, tol);
    res.report.K1 = outcome.K1;
    res.report.checks["detectability_of_family_pair"] = outcome.stabilizable;
    res.report.checks["rank_condition"] = rank_condition_check(dm, tol);
    res.report.data_residual = (dm.Xf - outcome.sigma * fam.deq.D).norm();
    res.report.spectral_radius = spectral_radius(outcome.sigma.leftCols(n));

    if (!outcome.stabilizable) {
        res.report.feasible = false;
        res.report.reason = "unstabilizable";
        return res;
    }
    if (res.report.data_residual >= tol.residual_tol) {
        // kernel not included in Ker(Xf): the family cannot reproduce Xf
        res.report.feasible = false;
        res.report.reason = kern.holds ? "data_residual" : "kernel_inclusion";
        return res;
    }
    if (res.report.spectral_radius >= 1.0 - tol.schur_margin) {
        res.report.feasible = false;
        res.report.reason = "unstabilizable";
        return res;
    }
    res.report.feasible = true;
    res.gains = partition_gains(outcome.sigma, n, dm.m(), dm.p(), kind);
    return res;
}

}  // namespace

bool rank_condition_check(const DataMatrices& dm, const Tolerances& tol) {
    tol.validate();
    const Eigen::Index rhs = numerical_rank(dm.stacked_rank_test(), tol);

    std::vector<Complex> candidates;
    {
        const Mat d_pinv = pseudoinverse(dm.stacked_d(), tol);
        const Mat m_block = dm.Xf * d_pinv.leftCols(dm.n());
        Eigen::EigenSolver<Mat> es(m_block, false);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            const Complex lam = es.eigenvalues()(i);
            if (std::abs(lam) >= 1.0 - tol.schur_margin) candidates.push_back(lam);
        }
    }
    constexpr int grid = 720;
    candidates.reserve(candidates.size() + 2 * grid);
    for (int k = 0; k < grid; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / grid;
        const Complex point(std::cos(theta), std::sin(theta));
        candidates.push_back(point);
        candidates.push_back(1.25 * point);
    }
    for (const Complex& lambda : candidates) {
        if (numerical_rank_complex(complex_rank_stack(dm, lambda), tol) != rhs) return false;
    }
    return true;
}

SynthesisResult synthesize_observer(const DataMatrices& dm, const Tolerances& tol) {
    const ObserverFamily fam = solve_family(dm, tol);
    const KernelInclusionResult kern = kernel_inclusion_check(fam.deq, tol);
    SynthesisResult res = run_family_synthesis(dm, ObserverKind::standard, fam, kern, tol);
    res.report.checks["corollary1"] = corollary1_test(dm, dm.m(), dm.n(), tol);
    return res;
}

SynthesisResult synthesize_uio(const DataMatrices& dm, Eigen::Index q, const Tolerances& tol) {
    const ObserverFamily fam = solve_family(dm, tol);
    const KernelInclusionResult kern = kernel_inclusion_check(fam.deq, tol);

    SynthesisResult res;
    const bool informative = corollary2_test(dm, dm.m(), dm.n(), q, tol);
    if (!informative || !kern.holds) {
        // synthesis refused before stabilization: either the unknown-input
        // directions were never exercised, or the future state is not a
        // function of the measured tuple
        res.report.feasible = false;
        res.report.reason = informative ? "kernel_inclusion" : "data_informativity";
        res.report.K1 = Mat::Zero(dm.n(), fam.deq.D.rows());
        res.report.kernel_inclusion_residual = kern.frobenius;
        res.report.checks["corollary2"] = informative;
        res.report.checks["kernel_inclusion"] = kern.holds;
        res.report.data_residual = (dm.Xf - fam.sigma0 * fam.deq.D).norm();
        res.report.spectral_radius = spectral_radius(fam.sigma0.leftCols(dm.n()));
        if (informative) res.report.checks["rank_condition"] = rank_condition_check(dm, tol);
        return res;
    }

    res = run_family_synthesis(dm, ObserverKind::uio, fam, kern, tol);
    res.report.kernel_inclusion_residual = kern.frobenius;
    res.report.checks["corollary2"] = true;
    res.report.checks["kernel_inclusion"] = true;
    return res;
}

DataRecord augment_record_for_eso(const LtiSystem& lti, const DataRecord& rec) {
    rec.validate();
    if (rec.x_d.rows() != lti.n()) {
        throw DimensionError("synthesize_eso: record does not match the plant");
    }
    if (lti.r() == 0) {
        // no disturbance channel: the augmentation is the identity
        DataRecord plain = rec;
        plain.eta_d.reset();
        return plain;
    }
    if (!rec.eta_d) {
        throw MissingDataError("synthesize_eso: record has no disturbance data");
    }
    if (rec.eta_d->cols() < rec.T + 1) {
        throw LengthError("synthesize_eso: need T + 1 disturbance samples");
    }
    if (rec.eta_d->rows() != lti.r()) {
        throw DimensionError("synthesize_eso: record does not match the plant");
    }
    DataRecord aug;
    aug.T = rec.T;
    aug.u_d = rec.u_d;
    aug.y_d = rec.y_d;
    aug.x_d.resize(lti.n() + lti.r(), rec.T + 1);
    aug.x_d.topRows(lti.n()) = rec.x_d;
    aug.x_d.bottomRows(lti.r()) = rec.eta_d->leftCols(rec.T + 1);
    aug.seed = rec.seed;
    aug.generator = rec.generator;
    return aug;
}

SynthesisResult synthesize_eso(const LtiSystem& lti, const DataRecord& rec,
                               const Tolerances& tol) {
    lti.validate(tol);
    const DataRecord aug = augment_record_for_eso(lti, rec);
    const DataMatrices dm = build_data_matrices(aug);
    SynthesisResult res = synthesize_observer(dm, tol);
    if (res.gains) res.gains->kind = ObserverKind::eso;
    // The corollary-1 rank equality presupposes a regular generator; the
    // augmentation leaves the disturbance rows free, so the informativity
    // certificate here is the kernel inclusion instead.
    res.report.checks.erase("corollary1");
    const auto kern = kernel_inclusion_check(solve_family(dm, tol).deq, tol);
    res.report.checks["kernel_inclusion"] = kern.holds;
    res.report.kernel_inclusion_residual = kern.frobenius;
    return res;
}

}  // namespace deso
