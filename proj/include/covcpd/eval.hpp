#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "covcpd/cusum.hpp"

namespace covcpd {

/// Comparison of estimated vs true change points. matched_error is the
/// max absolute location error under order-preserving matching and is
/// present iff k_est == k_true; hausdorff covers the mismatched case,
/// with empty-vs-nonempty defined as n.
struct EvalReport {
    std::int64_t k_true = 0;
    std::int64_t k_est = 0;
    std::optional<std::int64_t> matched_error;
    std::int64_t hausdorff = 0;
    double normalized_error = 0.0;  // hausdorff / n
};

EvalReport compare(std::span<const std::int64_t> true_cps,
                   std::span<const std::int64_t> est_cps, std::int64_t n);

/// Exhaustive reference for a single split: scans every admissible t in
/// [max(s+margin, s+1), min(e-margin, e-1)] with sums accumulated directly
/// (no shared prefix structure) and a full dense eigendecomposition per
/// point. Smallest t on ties.
struct OracleResult {
    std::int64_t b = 0;
    double a = 0.0;
    UnitVector v;
};

OracleResult oracle_single_cp(const ObservationMatrix& x, std::int64_t s,
                              std::int64_t e, double margin);

/// Exhaustive 1D analogue (reference for the projected inner scan).
struct Oracle1dResult {
    std::int64_t b = 0;
    double a = 0.0;
};

Oracle1dResult oracle_1d_argmax(std::span<const double> y, std::int64_t s,
                                std::int64_t e, double margin);

}  // namespace covcpd
