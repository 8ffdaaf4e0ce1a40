#pragma once

#include <random>

#include "deso/descriptor_system.hpp"

namespace deso {

/// Uniform i.i.d. matrix on (lo, hi).
Mat uniform_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                   double lo, double hi);

struct RandomPlantOptions {
    Eigen::Index n1_max = 3;
    Eigen::Index n2_max = 1;
    Eigen::Index m_max = 2;
    Eigen::Index p_max = 2;
    /// Unstable slow eigenvalues are drawn with modulus in this band, keeping
    /// a safety margin around the unit circle so numerical verdicts cannot
    /// flip.
    double unstable_lo = 1.05;
    double unstable_hi = 1.3;
    double stable_max = 0.9;
    double max_transform_cond = 50.0;
};

/// A plant built directly in slow/fast coordinates with known structure, then
/// scrambled by condition-bounded invertible transforms. The returned
/// decomposition is exact by construction, and the detectability label is a
/// construction-time ground truth (unstable slow modes are made unobservable
/// by zeroing their output columns).
struct RandomPlant {
    DescriptorSystem sys;
    WeierstrassForm wf;
    bool detectable = false;
    bool matching = false;  // meaningful only when sys.F is present
};

/// Regular descriptor plant satisfying rk[E; C] = n, R-controllable, with
/// detectability chosen by the caller.
RandomPlant random_regular_plant(std::mt19937_64& rng, bool want_detectable,
                                 const RandomPlantOptions& opt = {},
                                 const Tolerances& tol = {});

/// Same construction plus an unknown-input column F. want_matching = false
/// plants take F = E * xi with xi in Ker(C), which defeats the matching
/// condition while keeping F full column rank.
RandomPlant random_uio_plant(std::mt19937_64& rng, bool want_matching,
                             bool want_detectable,
                             const RandomPlantOptions& opt = {},
                             const Tolerances& tol = {});

}  // namespace deso
