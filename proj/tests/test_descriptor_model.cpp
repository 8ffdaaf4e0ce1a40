#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "deso/random_system.hpp"
#include "test_support.hpp"

using namespace deso;
using testsupport::descriptor_relation_residual;
using testsupport::gauss_rank;
using testsupport::random_matrix;

TEST_CASE("check_regularity") {
    std::mt19937_64 rng(1);
    DescriptorSystem sys;
    sys.E = Mat::Identity(3, 3);
    sys.A = random_matrix(rng, 3, 3);
    sys.B = random_matrix(rng, 3, 1);
    sys.C = random_matrix(rng, 1, 3);
    CHECK(check_regularity(sys));

    DescriptorSystem zero;
    zero.E = Mat::Zero(1, 1);
    zero.A = Mat::Zero(1, 1);
    zero.B = Mat::Zero(1, 1);
    zero.C = Mat::Ones(1, 1);
    CHECK_FALSE(check_regularity(zero));

    CHECK(check_regularity(demo_descriptor_plant()));
}

TEST_CASE("weierstrass: nonsingular E gives a purely slow decomposition") {
    std::mt19937_64 rng(5);
    DescriptorSystem sys;
    sys.E = Mat::Identity(3, 3);
    sys.A = random_matrix(rng, 3, 3);
    sys.B = random_matrix(rng, 3, 2);
    sys.C = random_matrix(rng, 2, 3);
    const WeierstrassForm wf = weierstrass(sys);
    CHECK(wf.n1 == 3);
    CHECK(wf.n2 == 0);
    CHECK(wf.s == 0);
    // A1 similar to A: same spectrum
    CHECK(spectral_radius(wf.A1) == doctest::Approx(spectral_radius(sys.A)).epsilon(1e-9));
}

TEST_CASE("weierstrass: diagonal singular pencil") {
    DescriptorSystem sys;
    sys.E = Mat::Zero(2, 2);
    sys.E(0, 0) = 1.0;
    sys.A = Mat::Zero(2, 2);
    sys.A(0, 0) = 0.3;
    sys.A(1, 1) = 1.0;
    sys.B = Mat::Ones(2, 1);
    sys.C = Mat::Ones(1, 2);
    const WeierstrassForm wf = weierstrass(sys);
    CHECK(wf.n1 == 1);
    CHECK(wf.n2 == 1);
    CHECK(wf.s == 1);
    CHECK(wf.R.norm() < 1e-10);
}

namespace {

void check_reconstruction(const DescriptorSystem& sys, const WeierstrassForm& wf,
                          double tol = 1e-8) {
    const Eigen::Index n1 = wf.n1, n2 = wf.n2;
    Mat Ew = Mat::Zero(n1 + n2, n1 + n2);
    Ew.topLeftCorner(n1, n1) = Mat::Identity(n1, n1);
    Ew.bottomRightCorner(n2, n2) = wf.R;
    Mat Aw = Mat::Zero(n1 + n2, n1 + n2);
    Aw.topLeftCorner(n1, n1) = wf.A1;
    Aw.bottomRightCorner(n2, n2) = Mat::Identity(n2, n2);
    CHECK((wf.S * sys.E * wf.P - Ew).norm() < tol);
    CHECK((wf.S * sys.A * wf.P - Aw).norm() < tol);
    Mat Bw(n1 + n2, sys.m());
    Bw << wf.B1, wf.B2;
    CHECK((wf.S * sys.B - Bw).norm() < tol);
    Mat Cw(sys.p(), n1 + n2);
    Cw << wf.C1, wf.C2;
    CHECK((sys.C * wf.P - Cw).norm() < tol);
}

}  // namespace

TEST_CASE("weierstrass: demo plant reconstruction residuals") {
    const DescriptorSystem sys = demo_descriptor_plant();
    const WeierstrassForm wf = weierstrass(sys);
    CHECK(wf.n1 == 2);
    CHECK(wf.n2 == 1);
    CHECK(wf.s == 1);
    check_reconstruction(sys, wf);
}

TEST_CASE("weierstrass: random regular plants reconstruct and R is nilpotent") {
    std::mt19937_64 rng(99);
    for (int t = 0; t < 25; ++t) {
        const RandomPlant plant = random_regular_plant(rng, t % 2 == 0);
        const WeierstrassForm wf = weierstrass(plant.sys);
        CHECK(wf.n1 == plant.wf.n1);
        check_reconstruction(plant.sys, wf);
        if (wf.n2 > 0) {
            Mat Rs = Mat::Identity(wf.n2, wf.n2);
            for (Eigen::Index k = 0; k < wf.s; ++k) Rs = Rs * wf.R;
            CHECK(Rs.norm() < 1e-8);
            if (wf.s > 1) {
                Mat Rs1 = Mat::Identity(wf.n2, wf.n2);
                for (Eigen::Index k = 0; k + 1 < wf.s; ++k) Rs1 = Rs1 * wf.R;
                CHECK(Rs1.norm() >= 1e-9);
            }
        }
    }
}

TEST_CASE("weierstrass rejects irregular pencils") {
    DescriptorSystem sys;
    sys.E = Mat::Zero(2, 2);
    sys.A = Mat::Zero(2, 2);
    sys.A(0, 0) = 1.0;  // det(lambda E - A) == 0 for all lambda
    sys.B = Mat::Ones(2, 1);
    sys.C = Mat::Ones(1, 2);
    CHECK_THROWS_AS(weierstrass(sys), SingularPencilError);
}

TEST_CASE("simulate: zero input and zero initial state stay at zero") {
    const DescriptorSystem sys = demo_descriptor_plant();
    const WeierstrassForm wf = weierstrass(sys);
    const Trajectory traj = simulate(sys, wf, Vec::Zero(wf.n1), Mat::Zero(1, 15), 14);
    CHECK(traj.x.norm() == doctest::Approx(0.0));
    CHECK(traj.y.norm() == doctest::Approx(0.0));
}

TEST_CASE("simulate: nonsingular E matches the direct recursion") {
    std::mt19937_64 rng(17);
    DescriptorSystem sys;
    sys.E = Mat::Identity(3, 3);
    sys.A = 0.4 * random_matrix(rng, 3, 3);
    sys.B = random_matrix(rng, 3, 2);
    sys.C = random_matrix(rng, 2, 3);
    const WeierstrassForm wf = weierstrass(sys);
    REQUIRE(wf.s == 0);

    const Mat u = random_matrix(rng, 2, 10);
    const Vec z10 = random_matrix(rng, 3, 1).col(0);
    const Trajectory traj = simulate(sys, wf, z10, u, 10);

    Mat x_direct(3, 11);
    x_direct.col(0) = traj.x.col(0);
    for (int k = 0; k < 10; ++k) {
        x_direct.col(k + 1) = sys.A * x_direct.col(k) + sys.B * u.col(k);
    }
    CHECK((traj.x - x_direct).norm() < 1e-10);
}

TEST_CASE("simulate: demo plant satisfies the descriptor relation stepwise") {
    const DescriptorSystem sys = demo_descriptor_plant();
    const WeierstrassForm wf = weierstrass(sys);
    std::mt19937_64 rng(23);
    const Mat u = random_matrix(rng, 1, 21, -5.0, 5.0);
    const Vec z10 = random_matrix(rng, wf.n1, 1, 0.0, 2.0).col(0);
    const Trajectory traj = simulate(sys, wf, z10, u, 20);
    CHECK(descriptor_relation_residual(sys, traj.x, u) < 1e-9);
}

TEST_CASE("simulate: unknown input enters through F") {
    const DescriptorSystem sys = demo_uio_plant();
    const WeierstrassForm wf = weierstrass(sys);
    std::mt19937_64 rng(29);
    const Mat u = random_matrix(rng, 1, 21, -5.0, 5.0);
    const Mat eta = random_matrix(rng, 1, 21, -5.0, 5.0);
    const Vec z10 = random_matrix(rng, wf.n1, 1, 0.0, 2.0).col(0);
    const Trajectory traj = simulate(sys, wf, z10, u, 20, eta);
    CHECK(descriptor_relation_residual(sys, traj.x, u, eta) < 1e-9);
}

TEST_CASE("simulate rejects short inputs") {
    const DescriptorSystem sys = demo_descriptor_plant();
    const WeierstrassForm wf = weierstrass(sys);
    CHECK_THROWS_AS(simulate(sys, wf, Vec::Zero(wf.n1), Mat::Zero(1, 20), 20), LengthError);
}

TEST_CASE("pbh_detectable") {
    CHECK(pbh_detectable(demo_descriptor_plant()));  // stable spectrum, vacuous

    DescriptorSystem bad;
    bad.E = Mat::Identity(1, 1);
    bad.A = 2.0 * Mat::Identity(1, 1);
    bad.B = Mat::Ones(1, 1);
    bad.C = Mat::Zero(1, 1);
    CHECK_FALSE(pbh_detectable(bad));
}

TEST_CASE("pbh_detectable agrees with a dense unit-circle rank scan") {
    std::mt19937_64 rng(31);
    const Tolerances tol;
    for (int t = 0; t < 50; ++t) {
        const RandomPlant plant = random_regular_plant(rng, t % 2 == 0);
        const bool fast = pbh_detectable(plant.sys, tol);

        bool scan = true;
        const Eigen::Index n = plant.sys.n();
        for (int g = 0; g < 721 && scan; ++g) {
            const double theta = 2.0 * 3.14159265358979323846 * g / 721.0;
            for (double radius : {1.0, 1.5}) {
                const Complex lam = radius * Complex(std::cos(theta), std::sin(theta));
                CMat st(n + plant.sys.p(), n);
                st.topRows(n) = lam * plant.sys.E.cast<Complex>() - plant.sys.A.cast<Complex>();
                st.bottomRows(plant.sys.p()) = plant.sys.C.cast<Complex>();
                if (numerical_rank_complex(st, tol) < n) {
                    scan = false;
                    break;
                }
            }
        }
        // The grid almost never lands on an eigenvalue exactly, so the scan
        // can only catch rank drops the eigenvalue test also catches; when
        // the plant is detectable both must return true.
        if (fast) CHECK(scan);
        if (!scan) CHECK_FALSE(fast);
        // Construction-time ground truth is authoritative.
        CHECK(fast == plant.detectable);
    }
}

TEST_CASE("dual_normalizability") {
    std::mt19937_64 rng(37);
    DescriptorSystem sys;
    sys.E = Mat::Identity(2, 2);
    sys.A = random_matrix(rng, 2, 2);
    sys.B = random_matrix(rng, 2, 1);
    sys.C = random_matrix(rng, 1, 2);
    CHECK(dual_normalizability(sys));

    sys.E = Mat::Zero(2, 2);
    sys.C = Mat::Zero(1, 2);
    CHECK_FALSE(dual_normalizability(sys));

    CHECK(dual_normalizability(demo_descriptor_plant()));
}

TEST_CASE("matching_condition") {
    const DescriptorSystem uio = demo_uio_plant();
    Mat stacked(uio.n() + uio.p(), uio.n() + uio.q());
    stacked << uio.E, *uio.F, uio.C, Mat::Zero(uio.p(), uio.q());
    CHECK(gauss_rank(stacked) == 4);
    CHECK(matching_condition(uio));

    // E = I reduces the condition to rk(C F) = rk(F)
    std::mt19937_64 rng(41);
    DescriptorSystem lti;
    lti.E = Mat::Identity(3, 3);
    lti.A = random_matrix(rng, 3, 3);
    lti.B = random_matrix(rng, 3, 1);
    lti.C = random_matrix(rng, 2, 3);
    lti.F = random_matrix(rng, 3, 1);
    const bool classical =
        numerical_rank(Mat(lti.C * *lti.F)) == numerical_rank(*lti.F);
    CHECK(matching_condition(lti) == classical);

    // misaligned F against a singular E drops the stacked rank
    DescriptorSystem mis;
    mis.E = Mat::Zero(2, 2);
    mis.E(0, 0) = 1.0;
    mis.A = Mat::Identity(2, 2);
    mis.B = Mat::Ones(2, 1);
    mis.C.resize(1, 2);
    mis.C << 1, 0;
    Mat F(2, 1);
    F << 0, 1;
    mis.F = F;
    Mat st2(3, 3);
    st2 << mis.E, F, mis.C, Mat::Zero(1, 1);
    CHECK(matching_condition(mis) == (gauss_rank(st2) == 3));
}

TEST_CASE("r_controllable and c_controllable") {
    WeierstrassForm wf;
    wf.n1 = 2;
    wf.n2 = 0;
    wf.s = 0;
    wf.A1 = Mat::Zero(2, 2);
    wf.B1 = Mat::Identity(2, 2);
    wf.R.resize(0, 0);
    wf.B2.resize(0, 2);
    CHECK(r_controllable(wf));
    CHECK(c_controllable(wf));

    wf.n2 = 1;
    wf.s = 1;
    wf.R = Mat::Zero(1, 1);
    wf.B2 = Mat::Zero(1, 2);
    CHECK_FALSE(c_controllable(wf));  // fast block unreachable

    // brute-force reachability cross-check on the demo decomposition
    const DescriptorSystem sys = demo_descriptor_plant();
    const WeierstrassForm dwf = weierstrass(sys);
    Mat ctrl(dwf.n1, dwf.n1 * sys.m());
    Mat AkB = dwf.B1;
    for (Eigen::Index k = 0; k < dwf.n1; ++k) {
        ctrl.middleCols(k * sys.m(), sys.m()) = AkB;
        AkB = dwf.A1 * AkB;
    }
    CHECK(r_controllable(dwf) == (gauss_rank(ctrl) == dwf.n1));
    Mat fast(dwf.n2, dwf.s * sys.m());
    Mat RkB = dwf.B2;
    for (Eigen::Index k = 0; k < dwf.s; ++k) {
        fast.middleCols(k * sys.m(), sys.m()) = RkB;
        RkB = dwf.R * RkB;
    }
    CHECK(c_controllable(dwf) ==
          (r_controllable(dwf) && gauss_rank(fast) == dwf.n2));
}

TEST_CASE("strong_detectability") {
    // Schur A0 with square invertible F0: vacuous quantifier
    LtiSystem easy;
    easy.A0 = 0.5 * Mat::Identity(2, 2);
    easy.B0 = Mat::Ones(2, 1);
    easy.E0 = Mat::Zero(2, 2);
    easy.E0(0, 0) = 1.0;
    easy.C0 = Mat::Identity(2, 2);
    easy.F0 = Mat::Identity(2, 2);
    CHECK(strong_detectability(easy));

    CHECK(strong_detectability(demo_lti_plant()));

    // unstable mode invisible to both output and disturbance rows
    LtiSystem bad;
    bad.A0 = Mat::Zero(2, 2);
    bad.A0(0, 0) = 2.0;
    bad.A0(1, 1) = 0.5;
    bad.B0 = Mat::Ones(2, 1);
    bad.E0.resize(2, 1);
    bad.E0 << 0, 1;
    bad.C0.resize(1, 2);
    bad.C0 << 0, 1;
    bad.F0 = Mat::Identity(1, 1);
    CHECK_FALSE(strong_detectability(bad));
}

TEST_CASE("augment_for_eso block layout and dual normalizability") {
    LtiSystem scalar;
    scalar.A0 = 0.3 * Mat::Identity(1, 1);
    scalar.B0 = Mat::Ones(1, 1);
    scalar.E0 = Mat::Ones(1, 1);
    scalar.C0 = Mat::Ones(1, 1);
    scalar.F0 = Mat::Ones(1, 1);
    const DescriptorSystem aug = augment_for_eso(scalar);
    CHECK(aug.n() == 2);
    CHECK(aug.E(0, 0) == 1.0);
    CHECK(aug.E(1, 1) == 0.0);
    CHECK(aug.A(0, 1) == 1.0);
    CHECK(dual_normalizability(aug));

    const DescriptorSystem aug4 = augment_for_eso(demo_lti_plant());
    CHECK(aug4.n() == 5);
    CHECK(dual_normalizability(aug4));
}

TEST_CASE("augment_for_eso keeps dual normalizability for random plants") {
    std::mt19937_64 rng(43);
    for (int t = 0; t < 20; ++t) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 4);
        const Eigen::Index r = 1 + static_cast<Eigen::Index>(rng() % 2);
        const Eigen::Index p = r + static_cast<Eigen::Index>(rng() % 2);
        LtiSystem lti;
        lti.A0 = random_matrix(rng, n, n);
        lti.B0 = random_matrix(rng, n, 1);
        lti.E0 = random_matrix(rng, n, r);
        lti.C0 = random_matrix(rng, p, n);
        lti.F0 = random_matrix(rng, p, r);
        try {
            lti.validate();
        } catch (const InvalidInputError&) {
            continue;  // rank-deficient draw
        }
        CHECK(dual_normalizability(augment_for_eso(lti)));
    }
}

TEST_CASE("simulate_lti matches the recursion and output equation") {
    const LtiSystem lti = demo_lti_plant();
    std::mt19937_64 rng(47);
    const Mat u = random_matrix(rng, 1, 10, -5.0, 5.0);
    const Mat d = random_matrix(rng, 2, 11, -3.0, 3.0);
    const Vec x0 = random_matrix(rng, 3, 1).col(0);
    const Trajectory traj = simulate_lti(lti, x0, u, d, 10);
    for (int k = 0; k < 10; ++k) {
        const Vec step = lti.A0 * traj.x.col(k) + lti.B0 * u.col(k) + lti.E0 * d.col(k);
        CHECK((traj.x.col(k + 1) - step).norm() < 1e-12);
    }
    CHECK((traj.y.col(10) - lti.C0 * traj.x.col(10) - lti.F0 * d.col(10)).norm() < 1e-12);
}
