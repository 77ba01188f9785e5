#include "covcpd/scan.hpp"

#include <cmath>

#include "covcpd/errors.hpp"

namespace covcpd {

namespace {

constexpr std::int64_t kParallelGrain = 16;

inline bool better(const ArgmaxResult& cand, const ArgmaxResult& best) {
    return cand.a > best.a || (cand.a == best.a && cand.b < best.b);
}

}  // namespace

ArgmaxResult opnorm_scan_serial(const OuterPrefix& pre, std::int64_t s, std::int64_t e,
                                std::int64_t lo, std::int64_t hi,
                                const EigOptions& eig) {
    if (lo > hi) return {};
    require(lo > s && hi < e, "opnorm_scan: scan range must lie strictly inside (s, e)");
    ArgmaxResult best;
    SymMat buf(pre.p());
    for (std::int64_t t = lo; t <= hi; ++t) {
        pre.cusum_packed(s, e, t, buf.packed());
        const double a = op_norm(buf, eig);
        if (a > best.a) best = {t, a};
    }
    return best;
}

ArgmaxResult opnorm_scan(const OuterPrefix& pre, std::int64_t s, std::int64_t e,
                         std::int64_t lo, std::int64_t hi, const EigOptions& eig) {
    if (hi - lo < kParallelGrain) return opnorm_scan_serial(pre, s, e, lo, hi, eig);
    require(lo > s && hi < e, "opnorm_scan: scan range must lie strictly inside (s, e)");
    ArgmaxResult best;
#pragma omp parallel
    {
        SymMat buf(pre.p());
        ArgmaxResult mine;
#pragma omp for schedule(static) nowait
        for (std::int64_t t = lo; t <= hi; ++t) {
            pre.cusum_packed(s, e, t, buf.packed());
            const double a = op_norm(buf, eig);
            if (a > mine.a) mine = {t, a};
        }
#pragma omp critical(covcpd_opnorm_scan)
        if (mine.b >= 0 && better(mine, best)) best = mine;
    }
    return best;
}

ArgmaxResult abs_cusum1d_scan_serial(const PrefixSeries& y, std::int64_t s,
                                     std::int64_t e, std::int64_t lo, std::int64_t hi) {
    if (lo > hi) return {};
    require(lo > s && hi < e, "abs_cusum1d_scan: scan range must lie strictly inside (s, e)");
    ArgmaxResult best;
    for (std::int64_t t = lo; t <= hi; ++t) {
        const double a = std::fabs(cusum_1d(y, s, e, t));
        if (a > best.a) best = {t, a};
    }
    return best;
}

ArgmaxResult abs_cusum1d_scan(const PrefixSeries& y, std::int64_t s, std::int64_t e,
                              std::int64_t lo, std::int64_t hi) {
    if (hi - lo < 4096) return abs_cusum1d_scan_serial(y, s, e, lo, hi);
    require(lo > s && hi < e, "abs_cusum1d_scan: scan range must lie strictly inside (s, e)");
    ArgmaxResult best;
#pragma omp parallel
    {
        ArgmaxResult mine;
#pragma omp for schedule(static) nowait
        for (std::int64_t t = lo; t <= hi; ++t) {
            const double a = std::fabs(cusum_1d(y, s, e, t));
            if (a > mine.a) mine = {t, a};
        }
#pragma omp critical(covcpd_cusum1d_scan)
        if (mine.b >= 0 && better(mine, best)) best = mine;
    }
    return best;
}

}  // namespace covcpd
