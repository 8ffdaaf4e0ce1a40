#include "deso/data_pipeline.hpp"

#include <cmath>

namespace deso {

Mat InputLaw::sample(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index len) const {
    Mat out(rows, len);
    if (kind == Kind::uniform) {
        std::uniform_real_distribution<double> dist(lo, hi);
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index k = 0; k < len; ++k) out(i, k) = dist(rng);
        }
    } else {
        for (Eigen::Index k = 0; k < len; ++k) {
            out.col(k).setConstant(amplitude * std::sin(static_cast<double>(k)));
        }
    }
    return out;
}

void DataRecord::validate() const {
    if (T < 1) throw LengthError("DataRecord: T must be >= 1");
    require_finite(u_d, "DataRecord.u_d");
    require_finite(x_d, "DataRecord.x_d");
    require_finite(y_d, "DataRecord.y_d");
    if (x_d.cols() != T + 1) throw LengthError("DataRecord: x_d must hold T + 1 samples");
    if (y_d.cols() != T + 1) throw LengthError("DataRecord: y_d must hold T + 1 samples");
    if (u_d.cols() < T) throw LengthError("DataRecord: u_d must hold at least T samples");
    if (eta_d) {
        require_finite(*eta_d, "DataRecord.eta_d");
        if (eta_d->cols() != u_d.cols()) {
            throw LengthError("DataRecord: eta_d must match u_d length");
        }
    }
}

Mat DataMatrices::stacked_d() const {
    Mat d(n() + m() + 2 * p(), T());
    d << Xp, Up, Yp, Yf;
    return d;
}

Mat DataMatrices::stacked_rank_test() const {
    Mat d(n() + m() + p(), T());
    d << Xp, Up, Yf;
    return d;
}

Mat hankel(const Mat& f, Eigen::Index L) {
    require_finite(f, "hankel");
    const Eigen::Index T0 = f.cols();
    const Eigen::Index w = f.rows();
    if (L < 1 || T0 < L) throw LengthError("hankel: need 1 <= L <= sequence length");
    Mat h(w * L, T0 - L + 1);
    for (Eigen::Index i = 0; i < L; ++i) {
        h.middleRows(i * w, w) = f.middleCols(i, T0 - L + 1);
    }
    return h;
}

DataMatrices build_data_matrices(const DataRecord& rec) {
    rec.validate();
    DataMatrices dm;
    dm.Xp = rec.x_d.leftCols(rec.T);
    dm.Xf = rec.x_d.rightCols(rec.T);
    dm.Up = rec.u_d.leftCols(rec.T);
    dm.Yp = rec.y_d.leftCols(rec.T);
    dm.Yf = rec.y_d.rightCols(rec.T);
    return dm;
}

bool input_pe_order(const Mat& u, Eigen::Index L, const Tolerances& tol) {
    const Mat h = hankel(u, L);
    return numerical_rank(h, tol) == h.rows();
}

bool pe_assumption_check(const DataRecord& rec, const WeierstrassForm& wf,
                         bool with_unknown_input, const Tolerances& tol) {
    rec.validate();
    tol.validate();
    if (with_unknown_input && !rec.eta_d) {
        throw MissingDataError("pe_assumption_check: unknown-input variant needs eta_d");
    }
    const Eigen::Index s = wf.s;
    if (rec.u_d.cols() < rec.T + s) return false;  // cannot even form H_{s+1}

    // Slow-subsystem trajectory: first n1 components of P^{-1} x_d.
    const Mat z = wf.P.partialPivLu().solve(rec.x_d.leftCols(rec.T));
    const Mat z1 = z.topRows(wf.n1);

    Mat signal;
    if (with_unknown_input) {
        signal.resize(rec.m() + rec.q(), rec.T + s);
        signal.topRows(rec.m()) = rec.u_d.leftCols(rec.T + s);
        signal.bottomRows(rec.q()) = rec.eta_d->leftCols(rec.T + s);
    } else {
        signal = rec.u_d.leftCols(rec.T + s);
    }
    const Mat hu = hankel(signal, s + 1);

    Mat stacked(z1.rows() + hu.rows(), rec.T);
    stacked << z1, hu;
    return numerical_rank(stacked, tol) == stacked.rows();
}

bool corollary1_test(const DataMatrices& dm, Eigen::Index m, Eigen::Index n,
                     const Tolerances& tol) {
    return numerical_rank(dm.stacked_rank_test(), tol) == n + m;
}

bool corollary2_test(const DataMatrices& dm, Eigen::Index m, Eigen::Index n,
                     Eigen::Index q, const Tolerances& tol) {
    if (q == 0) return corollary1_test(dm, m, n, tol);
    return numerical_rank(dm.stacked_rank_test(), tol) == n + m + q;
}

DataRecord collect_record(const DescriptorSystem& sys, const WeierstrassForm& wf,
                          Eigen::Index T, Eigen::Index pad, std::mt19937_64& rng,
                          const InputLaw& input_law,
                          const std::optional<InputLaw>& disturbance_law,
                          const Tolerances& tol) {
    if (T < 1) throw LengthError("collect_record: T must be >= 1");
    if (pad < wf.s) throw LengthError("collect_record: pad must cover the nilpotency index");

    DataRecord rec;
    rec.T = T;
    rec.u_d = input_law.sample(rng, sys.m(), T + pad);
    std::optional<Mat> eta;
    if (disturbance_law) {
        if (!sys.F) {
            throw InvalidInputError("collect_record: disturbance law given but plant has no F");
        }
        eta = disturbance_law->sample(rng, sys.q(), T + pad);
        rec.eta_d = eta;
    }
    InputLaw init_law{InputLaw::Kind::uniform, 0.0, 2.0, 0.0};
    const Vec z1_init = init_law.sample(rng, wf.n1, 1).col(0);

    const Trajectory traj = simulate(sys, wf, z1_init, rec.u_d, T, eta, tol);
    rec.x_d = traj.x;
    rec.y_d = traj.y;
    return rec;
}

DataRecord collect_lti_record(const LtiSystem& lti, Eigen::Index T, Eigen::Index pad,
                              std::mt19937_64& rng, const InputLaw& input_law,
                              const InputLaw& disturbance_law) {
    if (T < 1) throw LengthError("collect_lti_record: T must be >= 1");
    if (pad < 1) throw LengthError("collect_lti_record: pad must be >= 1 (y(T) reads d(T))");
    DataRecord rec;
    rec.T = T;
    rec.u_d = input_law.sample(rng, lti.m(), T + pad);
    rec.eta_d = disturbance_law.sample(rng, lti.r(), T + pad);
    InputLaw init_law{InputLaw::Kind::uniform, 0.0, 2.0, 0.0};
    const Vec x0 = init_law.sample(rng, lti.n(), 1).col(0);

    const Trajectory traj = simulate_lti(lti, x0, rec.u_d, *rec.eta_d, T);
    rec.x_d = traj.x;
    rec.y_d = traj.y;
    return rec;
}

}  // namespace deso
