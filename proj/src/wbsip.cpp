#include "covcpd/wbsip.hpp"

#include <algorithm>
#include <cmath>

#include "covcpd/errors.hpp"
#include "covcpd/scan.hpp"

namespace covcpd {

IntervalSet draw_intervals(std::int64_t n, std::int64_t m, std::uint64_t seed,
                           std::optional<std::int64_t> max_len) {
    require(n >= 2, "draw_intervals: n must be at least 2");
    require(m >= 0, "draw_intervals: interval count must be nonnegative");
    if (max_len) require(*max_len >= 2, "draw_intervals: max_len must be at least 2");

    IntervalSet out;
    out.seed = seed;
    out.intervals.reserve(static_cast<std::size_t>(m));
    Rng rng(seed);
    for (std::int64_t k = 0; k < m; ++k) {
        for (;;) {
            const std::int64_t a = rng.uniform_int(0, n);
            const std::int64_t b = rng.uniform_int(0, n);
            const std::int64_t alpha = std::min(a, b);
            const std::int64_t beta = std::max(a, b);
            if (beta - alpha < 2) continue;
            if (max_len && beta - alpha > *max_len) continue;
            out.intervals.emplace_back(alpha, beta);
            break;
        }
    }
    return out;
}

SplitSeries split_series(const ObservationMatrix& z) {
    require(z.n() >= 4, "split_series: need at least 4 observations");
    const std::int64_t half = z.n() / 2;
    const int p = z.p();
    ObservationMatrix w = ObservationMatrix::zeros(half, p);
    ObservationMatrix x = ObservationMatrix::zeros(half, p);
    for (std::int64_t j = 0; j < half; ++j) {
        auto odd = z.row(2 * j);       // original position 2j+1
        auto even = z.row(2 * j + 1);  // original position 2j+2
        std::copy(odd.begin(), odd.end(), x.row(j).begin());
        std::copy(even.begin(), even.end(), w.row(j).begin());
    }
    return {std::move(w), std::move(x)};
}

std::vector<std::int64_t> to_original_scale(const std::vector<std::int64_t>& half_cps) {
    std::vector<std::int64_t> out;
    out.reserve(half_cps.size());
    for (std::int64_t t : half_cps) out.push_back(SplitSeries::to_original(t));
    return out;
}

namespace {

ShadowVectors pc_directions_impl(const ObservationMatrix& w, const IntervalSet& intervals,
                                 double margin_scale, const EigOptions& eig,
                                 bool parallel) {
    require(margin_scale > 0.0, "pc_directions: margin_scale must be positive");
    const std::int64_t n = w.n();
    const int p = w.p();
    for (const auto& [alpha, beta] : intervals.intervals)
        require(0 <= alpha && alpha < beta && beta <= n,
                "pc_directions: interval endpoints must satisfy 0 <= alpha < beta <= n");

    const std::int64_t margin = static_cast<std::int64_t>(
        std::ceil(margin_scale * p * std::log(static_cast<double>(n))));
    const OuterPrefix pre(w);
    const std::int64_t m_count = static_cast<std::int64_t>(intervals.intervals.size());

    ShadowVectors out;
    out.vectors.assign(static_cast<std::size_t>(m_count), UnitVector::zero(p));

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::int64_t m = 0; m < m_count; ++m) {
        const auto [alpha, beta] = intervals.intervals[static_cast<std::size_t>(m)];
        if (beta - alpha <= 2 * margin + 1) continue;  // keep the zero sentinel
        const ArgmaxResult r =
            opnorm_scan_serial(pre, alpha, beta, alpha + margin, beta - margin, eig);
        if (r.b < 0) continue;
        out.vectors[static_cast<std::size_t>(m)] =
            op_norm_eig(cov_cusum(pre, alpha, beta, r.b), eig).v;
    }
    return out;
}

}  // namespace

ShadowVectors pc_directions(const ObservationMatrix& w, const IntervalSet& intervals,
                            double margin_scale, const EigOptions& eig) {
    return pc_directions_impl(w, intervals, margin_scale, eig, true);
}

ShadowVectors pc_directions_serial(const ObservationMatrix& w, const IntervalSet& intervals,
                                   double margin_scale, const EigOptions& eig) {
    return pc_directions_impl(w, intervals, margin_scale, eig, false);
}

namespace {

struct WbsipRun {
    const std::vector<std::pair<std::int64_t, std::int64_t>>& intervals;
    const std::vector<PrefixSeries>& projected;
    std::int64_t delta;
    double tau;
    double inner_margin;  // margin_scale * ln(n)
    std::int64_t ceil_inner;
    std::vector<WbsipTraceEntry>* trace;

    std::vector<DetectionRecord> records;

    struct Candidate {
        std::int64_t m = -1;
        std::int64_t s_m = 0, e_m = 0;
        ArgmaxResult r;
    };

    // a_m for candidate interval m clipped to (s, e); r.a = -1 when the
    // trimmed interval is too short to scan.
    Candidate evaluate(std::int64_t m, std::int64_t s, std::int64_t e) const {
        Candidate c;
        c.m = m;
        const auto [alpha, beta] = intervals[static_cast<std::size_t>(m)];
        const std::int64_t s1 = std::max(s, alpha);
        const std::int64_t e1 = std::min(e, beta);
        if (e1 - s1 < 2) return c;
        c.s_m = s1 + delta;
        c.e_m = e1 - delta;
        if (static_cast<double>(c.e_m - c.s_m) < 2.0 * inner_margin + 1.0) return c;
        const std::int64_t lo = c.s_m + ceil_inner;
        const std::int64_t hi = c.e_m - ceil_inner;
        if (lo > hi) return c;
        c.r = abs_cusum1d_scan_serial(projected[static_cast<std::size_t>(m)], c.s_m,
                                      c.e_m, lo, hi);
        return c;
    }

    void recurse(std::int64_t s, std::int64_t e) {
        const std::int64_t m_count = static_cast<std::int64_t>(intervals.size());
        Candidate best;
        best.r.a = -1.0;
        if (trace == nullptr) {
#pragma omp parallel
            {
                Candidate mine;
                mine.r.a = -1.0;
#pragma omp for schedule(dynamic) nowait
                for (std::int64_t m = 0; m < m_count; ++m) {
                    Candidate c = evaluate(m, s, e);
                    if (c.r.a > mine.r.a) mine = c;  // ascending m keeps smallest tie
                }
#pragma omp critical(covcpd_wbsip_best)
                if (mine.m >= 0 &&
                    (mine.r.a > best.r.a || (mine.r.a == best.r.a && mine.m < best.m)))
                    best = mine;
            }
        } else {
            // trace mode runs the candidate loop serially so entries come out
            // in a stable order
            for (std::int64_t m = 0; m < m_count; ++m) {
                Candidate c = evaluate(m, s, e);
                if (c.r.b >= 0)
                    trace->push_back({s, e, m, c.s_m, c.e_m, c.r.b, c.r.a});
                if (c.r.a > best.r.a) best = c;
            }
        }

        if (best.m < 0 || best.r.a <= tau) return;
        records.push_back({best.r.b, best.r.a, s, e, best.s_m, best.e_m, best.m,
                           std::nullopt});
        recurse(s, best.r.b);
        recurse(best.r.b + 1, e);
    }
};

}  // namespace

DetectionResult wbsip_detect(const ObservationMatrix& x, const ObservationMatrix& w,
                             const IntervalSet& intervals, const WbsipParams& params,
                             std::vector<WbsipTraceEntry>* trace) {
    require(x.n() == w.n() && x.p() == w.p(),
            "wbsip_detect: the two sample halves must have the same shape");
    require(!params.tau || *params.tau > 0.0, "wbsip_detect: tau must be positive");
    require(!params.delta || *params.delta >= 0, "wbsip_detect: delta must be nonnegative");
    require(params.margin_scale > 0.0, "wbsip_detect: margin_scale must be positive");

    const std::int64_t n = x.n();
    const double ln_n = std::log(static_cast<double>(n));

    DetectionResult out;

    std::int64_t delta;
    if (params.delta) {
        delta = *params.delta;
    } else {
        delta = std::min(static_cast<std::int64_t>(std::ceil(ln_n * ln_n)), n / 10);
        out.params_used.emplace_back("delta_auto", static_cast<double>(delta));
    }

    double tau;
    if (params.tau) {
        tau = *params.tau;
    } else {
        const OuterPrefix pre(x);
        SymMat pooled(x.p());
        auto total = pre.at(n);
        auto dst = pooled.packed();
        for (std::size_t k = 0; k < dst.size(); ++k)
            dst[k] = total[k] / static_cast<double>(n);
        const double sigma_hat2 = op_norm(pooled, params.eig);
        tau = params.tau_scale * sigma_hat2 * std::sqrt(ln_n);
        out.params_used.emplace_back("tau_auto", tau);
        out.params_used.emplace_back("sigma_hat2", sigma_hat2);
    }
    if (params.margin_scale != 1.0)
        out.params_used.emplace_back("margin_scale", params.margin_scale);
    if (params.max_interval_len)
        out.params_used.emplace_back("max_interval_len",
                                     static_cast<double>(*params.max_interval_len));

    if (intervals.intervals.empty()) {
        out.warnings.push_back("empty interval set: nothing to search");
        return out;
    }

    const ShadowVectors shadows =
        pc_directions(w, intervals, params.margin_scale, params.eig);

    std::vector<PrefixSeries> projected;
    projected.reserve(shadows.vectors.size());
    for (const UnitVector& u : shadows.vectors)
        projected.emplace_back(project_series(x, u));

    const double inner_margin = params.margin_scale * ln_n;
    WbsipRun run{intervals.intervals,
                 projected,
                 delta,
                 tau,
                 inner_margin,
                 static_cast<std::int64_t>(std::ceil(inner_margin)),
                 trace,
                 {}};
    run.recurse(0, n);

    std::sort(run.records.begin(), run.records.end(),
              [](const DetectionRecord& a, const DetectionRecord& b) {
                  return a.location < b.location;
              });
    for (DetectionRecord& r : run.records) {
        if (!out.change_points.empty() && out.change_points.back() == r.location) continue;
        r.shadow = shadows.vectors[static_cast<std::size_t>(r.interval_index)];
        out.change_points.push_back(r.location);
        out.records.push_back(std::move(r));
    }
    return out;
}

}  // namespace covcpd
