#pragma once

#include <cstdint>
#include <optional>

#include "covcpd/cusum.hpp"
#include "covcpd/detection.hpp"

namespace covcpd {

struct BsopParams {
    /// Detection threshold. Unset means automatic:
    /// tau = tau_scale * sigma_hat^2 * sqrt(p * ln n), where sigma_hat^2 is
    /// the operator norm of the pooled sample covariance.
    std::optional<double> tau;
    double tau_scale = 1.0;

    /// Multiplier on the p*ln(n) boundary margin. 1.0 is the analysis
    /// default; lowering it is logged in params_used.
    double margin_scale = 1.0;

    EigOptions eig;
};

/// Recursive binary segmentation maximizing the operator norm of the
/// covariance scan statistic over the margin-interior of each interval.
/// On (s, e): stop if e - s <= 2m + 1 with m = ceil(margin_scale*p*ln n);
/// otherwise take a = max over t in [s+m, e-m], stop if a <= tau, else
/// record b = argmax (smallest t on ties) and recurse on (s, b-1) and
/// (b, e).
DetectionResult bsop_detect(const ObservationMatrix& x, const BsopParams& params);

}  // namespace covcpd
