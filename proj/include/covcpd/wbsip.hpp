#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "covcpd/cusum.hpp"
#include "covcpd/detection.hpp"
#include "covcpd/rng.hpp"

namespace covcpd {

/// Candidate intervals for wild segmentation, endpoints in [0, n].
struct IntervalSet {
    std::vector<std::pair<std::int64_t, std::int64_t>> intervals;
    std::uint64_t seed = 0;
};

/// Draw M intervals: a, b i.i.d. uniform on {0, ..., n}, (alpha, beta) =
/// (min, max), redrawn while beta - alpha < 2 or beta - alpha > max_len.
/// Deterministic given the seed, which is recorded on the result.
IntervalSet draw_intervals(std::int64_t n, std::int64_t m, std::uint64_t seed,
                           std::optional<std::int64_t> max_len = {});

/// Even/odd split of a series into two independent halves of common
/// length floor(N/2). `x` takes odd original positions (1, 3, ...), `w`
/// the even ones; to_original maps a half-scale index back (t -> 2t).
struct SplitSeries {
    ObservationMatrix w;
    ObservationMatrix x;
    static std::int64_t to_original(std::int64_t t) { return 2 * t; }
};

SplitSeries split_series(const ObservationMatrix& z);

std::vector<std::int64_t> to_original_scale(const std::vector<std::int64_t>& half_cps);

/// Per-interval projection directions (Algorithm: principal component
/// estimation). Intervals shorter than 2*ceil(margin_scale*p*ln n)+1 get
/// the zero sentinel.
struct ShadowVectors {
    std::vector<UnitVector> vectors;
};

ShadowVectors pc_directions(const ObservationMatrix& w, const IntervalSet& intervals,
                            double margin_scale = 1.0, const EigOptions& eig = {});
/// Serial reference for the OpenMP variant above; identical output.
ShadowVectors pc_directions_serial(const ObservationMatrix& w,
                                   const IntervalSet& intervals,
                                   double margin_scale = 1.0,
                                   const EigOptions& eig = {});

struct WbsipParams {
    /// Detection threshold on the projected series. Unset means automatic:
    /// tau = tau_scale * sigma_hat^2 * sqrt(ln n) with sigma_hat^2 the
    /// operator norm of the pooled sample covariance of x.
    std::optional<double> tau;
    double tau_scale = 1.0;

    /// Exclusion margin around interval endpoints. Unset means
    /// min(ceil(ln(n)^2), floor(n/10)).
    std::optional<std::int64_t> delta;

    /// Scales both the p*ln(n) direction-estimation margin and the ln(n)
    /// inner scan margin.
    double margin_scale = 1.0;

    /// Upper bound passed to draw_intervals by callers that honor a
    /// max-length condition; echoed in params_used when set.
    std::optional<std::int64_t> max_interval_len;

    EigOptions eig;
};

/// One inner-scan evaluation, loggable for cross-checks against the
/// exhaustive reference.
struct WbsipTraceEntry {
    std::int64_t seg_lo = 0, seg_hi = 0;  // recursion interval
    std::int64_t m = 0;                   // candidate interval index
    std::int64_t s_m = 0, e_m = 0;        // clipped + delta-trimmed interval
    std::int64_t b_m = 0;
    double a_m = 0.0;
};

/// Wild binary segmentation of the projected series: directions come from
/// pc_directions on w; on interval (s, e) each candidate interval m is
/// clipped to (s, e), trimmed by delta, scanned with an ln(n) margin for
/// b_m = argmax |scan of (u_m . X_i)^2| and a_m (or a_m = -1 if too
/// short); the best m (smallest index on ties) is kept, and if a_{m*} >
/// tau then b_{m*} is recorded and recursion continues on (s, b_{m*}) and
/// (b_{m*}+1, e). Results are half-scale; map with to_original_scale.
DetectionResult wbsip_detect(const ObservationMatrix& x, const ObservationMatrix& w,
                             const IntervalSet& intervals, const WbsipParams& params,
                             std::vector<WbsipTraceEntry>* trace = nullptr);

}  // namespace covcpd
