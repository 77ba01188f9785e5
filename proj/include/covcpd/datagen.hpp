#pragma once

#include <cstdint>
#include <utility>

#include "covcpd/cusum.hpp"
#include "covcpd/rng.hpp"

namespace covcpd {

enum class NoiseFamily {
    gaussian,           // L z, z ~ N(0, I)
    scaled_rademacher,  // L r, r i.i.d. +-1 (sub-Gaussian, non-Gaussian)
};

struct GenSpec {
    SegmentModel model;
    NoiseFamily noise = NoiseFamily::gaussian;
    std::uint64_t seed = 0;
};

/// Draw row i independently with mean zero and the covariance of the
/// segment containing i. Deterministic given the seed. Throws
/// GenerationError (naming the segment) if a covariance fails Cholesky
/// after the documented PSD repair jitter of 1e-10 * op_norm * I.
ObservationMatrix gen_series(const GenSpec& spec);

/// sigma2 * I + kappa * u u^T (operator norm sigma2 + kappa).
SymMat spiked_cov(double sigma2, double kappa, const UnitVector& u);

/// Random direction with coordinates +-1/sqrt(p).
UnitVector rademacher_direction(int p, Rng& rng);

enum class Side { early, late };

/// Single-change spiked-covariance instance: `early` puts the spiked
/// segment on the first `delta` points, `late` mirrors it to the last
/// `delta`. Requires 2 <= delta <= n/3 and 0 < kappa <= sigma2/4 (the
/// distribution-class constraints); the spike direction is a fresh
/// rademacher_direction.
std::pair<ObservationMatrix, SegmentModel> hard_instance(std::int64_t n, int p,
                                                         std::int64_t delta,
                                                         double kappa, double sigma2,
                                                         Side side, Rng& rng);

}  // namespace covcpd
