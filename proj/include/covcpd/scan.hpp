#pragma once

#include <cstdint>

#include "covcpd/cusum.hpp"

namespace covcpd {

/// Result of an argmax scan. b = -1 / a = -1 means the scan range was
/// empty.
struct ArgmaxResult {
    std::int64_t b = -1;
    double a = -1.0;
};

/// max over t in [lo, hi] of ||cov_cusum(pre, s, e, t)||_op, ties broken
/// to the smallest t. The OpenMP variant produces bit-identical results
/// to the serial reference: per-candidate values are computed by the same
/// code and the reduction is a total order on (value desc, index asc).
ArgmaxResult opnorm_scan_serial(const OuterPrefix& pre, std::int64_t s,
                                std::int64_t e, std::int64_t lo, std::int64_t hi,
                                const EigOptions& eig = {});
ArgmaxResult opnorm_scan(const OuterPrefix& pre, std::int64_t s, std::int64_t e,
                         std::int64_t lo, std::int64_t hi,
                         const EigOptions& eig = {});

/// max over t in [lo, hi] of |cusum_1d(y, s, e, t)|, smallest-t ties.
ArgmaxResult abs_cusum1d_scan_serial(const PrefixSeries& y, std::int64_t s,
                                     std::int64_t e, std::int64_t lo,
                                     std::int64_t hi);
ArgmaxResult abs_cusum1d_scan(const PrefixSeries& y, std::int64_t s,
                              std::int64_t e, std::int64_t lo, std::int64_t hi);

}  // namespace covcpd
