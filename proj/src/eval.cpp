#include "covcpd/eval.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "covcpd/errors.hpp"

namespace covcpd {

namespace {

void check_sorted(std::span<const std::int64_t> cps, std::int64_t n, const char* who) {
    for (std::size_t i = 0; i < cps.size(); ++i) {
        require(cps[i] > 0 && cps[i] < n,
                std::string(who) + ": change points must lie within (0, n)");
        if (i > 0)
            require(cps[i] > cps[i - 1],
                    std::string(who) + ": change points must be strictly increasing");
    }
}

std::int64_t directed_hausdorff(std::span<const std::int64_t> a,
                                std::span<const std::int64_t> b) {
    std::int64_t worst = 0;
    for (std::int64_t x : a) {
        std::int64_t best = std::numeric_limits<std::int64_t>::max();
        for (std::int64_t y : b) best = std::min(best, std::abs(x - y));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

EvalReport compare(std::span<const std::int64_t> true_cps,
                   std::span<const std::int64_t> est_cps, std::int64_t n) {
    require(n >= 1, "compare: n must be positive");
    check_sorted(true_cps, n, "compare(true)");
    check_sorted(est_cps, n, "compare(est)");

    EvalReport rep;
    rep.k_true = static_cast<std::int64_t>(true_cps.size());
    rep.k_est = static_cast<std::int64_t>(est_cps.size());

    if (rep.k_true == rep.k_est) {
        std::int64_t worst = 0;
        for (std::size_t i = 0; i < true_cps.size(); ++i)
            worst = std::max(worst, std::abs(true_cps[i] - est_cps[i]));
        rep.matched_error = worst;
    }

    if (true_cps.empty() && est_cps.empty())
        rep.hausdorff = 0;
    else if (true_cps.empty() || est_cps.empty())
        rep.hausdorff = n;
    else
        rep.hausdorff = std::max(directed_hausdorff(true_cps, est_cps),
                                 directed_hausdorff(est_cps, true_cps));
    rep.normalized_error = static_cast<double>(rep.hausdorff) / static_cast<double>(n);
    return rep;
}

namespace {

struct MarginRange {
    std::int64_t lo, hi;
};

MarginRange margin_range(std::int64_t s, std::int64_t e, double margin) {
    const std::int64_t shift = static_cast<std::int64_t>(std::ceil(margin));
    return {std::max(s + shift, s + 1), std::min(e - shift, e - 1)};
}

}  // namespace

OracleResult oracle_single_cp(const ObservationMatrix& x, std::int64_t s, std::int64_t e,
                              double margin) {
    require(0 <= s && s < e && e <= x.n(), "oracle_single_cp: bad interval");
    require(margin >= 0.0, "oracle_single_cp: margin must be nonnegative");
    require(static_cast<double>(e - s) > 2.0 * margin + 1.0,
            "oracle_single_cp: interval shorter than twice the margin");
    const auto [lo, hi] = margin_range(s, e, margin);
    require(lo <= hi, "oracle_single_cp: empty scan range");

    const int p = x.p();
    Eigen::MatrixXd left = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(p, p);
    for (std::int64_t i = s; i < e; ++i) {
        auto r = x.row(i);
        for (int a = 0; a < p; ++a)
            for (int b = 0; b < p; ++b)
                total(a, b) += r[static_cast<std::size_t>(a)] * r[static_cast<std::size_t>(b)];
    }

    std::int64_t best_b = -1;
    double best_a = -1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    for (std::int64_t t = s + 1; t <= hi; ++t) {
        auto r = x.row(t - 1);
        for (int a = 0; a < p; ++a)
            for (int b = 0; b < p; ++b)
                left(a, b) += r[static_cast<std::size_t>(a)] * r[static_cast<std::size_t>(b)];
        if (t < lo) continue;
        const double es_d = static_cast<double>(e - s);
        const double wl = std::sqrt(static_cast<double>(e - t) /
                                    (es_d * static_cast<double>(t - s)));
        const double wr = std::sqrt(static_cast<double>(t - s) /
                                    (es_d * static_cast<double>(e - t)));
        const Eigen::MatrixXd stat = wl * left - wr * (total - left);
        es.compute(stat, Eigen::EigenvaluesOnly);
        const double a =
            std::max(std::fabs(es.eigenvalues()(0)), std::fabs(es.eigenvalues()(p - 1)));
        if (a > best_a) {
            best_a = a;
            best_b = t;
        }
    }

    // recompute at the argmax for the eigenvector
    Eigen::MatrixXd lsum = Eigen::MatrixXd::Zero(p, p);
    for (std::int64_t i = s; i < best_b; ++i) {
        auto r = x.row(i);
        for (int a = 0; a < p; ++a)
            for (int b = 0; b < p; ++b)
                lsum(a, b) += r[static_cast<std::size_t>(a)] * r[static_cast<std::size_t>(b)];
    }
    const double es_d = static_cast<double>(e - s);
    const double wl = std::sqrt(static_cast<double>(e - best_b) /
                                (es_d * static_cast<double>(best_b - s)));
    const double wr = std::sqrt(static_cast<double>(best_b - s) /
                                (es_d * static_cast<double>(e - best_b)));
    const Eigen::MatrixXd stat = wl * lsum - wr * (total - lsum);
    es.compute(stat);
    const double lo_ev = es.eigenvalues()(0);
    const double hi_ev = es.eigenvalues()(p - 1);
    const int idx = (std::fabs(hi_ev) >= std::fabs(lo_ev)) ? p - 1 : 0;
    std::vector<double> v(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) v[static_cast<std::size_t>(i)] = es.eigenvectors()(i, idx);
    return {best_b, best_a, UnitVector::canonical(std::move(v))};
}

Oracle1dResult oracle_1d_argmax(std::span<const double> y, std::int64_t s, std::int64_t e,
                                double margin) {
    const std::int64_t n = static_cast<std::int64_t>(y.size());
    require(0 <= s && s < e && e <= n, "oracle_1d_argmax: bad interval");
    require(margin >= 0.0, "oracle_1d_argmax: margin must be nonnegative");
    require(static_cast<double>(e - s) > 2.0 * margin + 1.0,
            "oracle_1d_argmax: interval shorter than twice the margin");
    const auto [lo, hi] = margin_range(s, e, margin);
    require(lo <= hi, "oracle_1d_argmax: empty scan range");

    double total = 0.0;
    for (std::int64_t i = s; i < e; ++i) total += y[static_cast<std::size_t>(i)];

    std::int64_t best_b = -1;
    double best_a = -1.0;
    double left = 0.0;
    for (std::int64_t t = s + 1; t <= hi; ++t) {
        left += y[static_cast<std::size_t>(t - 1)];
        if (t < lo) continue;
        const double es_d = static_cast<double>(e - s);
        const double wl = std::sqrt(static_cast<double>(e - t) /
                                    (es_d * static_cast<double>(t - s)));
        const double wr = std::sqrt(static_cast<double>(t - s) /
                                    (es_d * static_cast<double>(e - t)));
        const double a = std::fabs(wl * left - wr * (total - left));
        if (a > best_a) {
            best_a = a;
            best_b = t;
        }
    }
    return {best_b, best_a};
}

}  // namespace covcpd
