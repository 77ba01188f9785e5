#include "covcpd/cusum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "covcpd/errors.hpp"

namespace covcpd {

ObservationMatrix::ObservationMatrix(std::int64_t n, int p, std::vector<double> row_major)
    : n_(n), p_(p), data_(std::move(row_major)) {
    require(n >= 2, "ObservationMatrix: need at least 2 observations");
    require(p >= 1, "ObservationMatrix: dimension must be positive");
    require(data_.size() == static_cast<std::size_t>(n) * static_cast<std::size_t>(p),
            "ObservationMatrix: data size does not match n*p");
    check_finite();
}

ObservationMatrix ObservationMatrix::zeros(std::int64_t n, int p) {
    return ObservationMatrix(n, p,
                             std::vector<double>(static_cast<std::size_t>(n) *
                                                     static_cast<std::size_t>(p),
                                                 0.0));
}

ObservationMatrix ObservationMatrix::scaled(double c) const {
    require(std::isfinite(c), "ObservationMatrix::scaled: scale must be finite");
    std::vector<double> d = data_;
    for (double& v : d) v *= c;
    return ObservationMatrix(n_, p_, std::move(d));
}

ObservationMatrix ObservationMatrix::centered() const {
    std::vector<double> mean(static_cast<std::size_t>(p_), 0.0);
    for (std::int64_t i = 0; i < n_; ++i) {
        auto r = row(i);
        for (int j = 0; j < p_; ++j) mean[static_cast<std::size_t>(j)] += r[static_cast<std::size_t>(j)];
    }
    for (double& m : mean) m /= static_cast<double>(n_);
    std::vector<double> d = data_;
    for (std::int64_t i = 0; i < n_; ++i)
        for (int j = 0; j < p_; ++j)
            d[static_cast<std::size_t>(i * p_ + j)] -= mean[static_cast<std::size_t>(j)];
    return ObservationMatrix(n_, p_, std::move(d));
}

void ObservationMatrix::check_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) throw ContractError("ObservationMatrix: non-finite entry");
}

OuterPrefix::OuterPrefix(const ObservationMatrix& x)
    : n_(x.n()), p_(x.p()), q_(SymMat::packed_size(x.p())) {
    flat_.assign(static_cast<std::size_t>(n_ + 1) * q_, 0.0);
    for (std::int64_t t = 1; t <= n_; ++t) {
        const double* prev = flat_.data() + static_cast<std::size_t>(t - 1) * q_;
        double* cur = flat_.data() + static_cast<std::size_t>(t) * q_;
        auto r = x.row(t - 1);
        std::size_t k = 0;
        for (int i = 0; i < p_; ++i)
            for (int j = i; j < p_; ++j, ++k)
                cur[k] = prev[k] + r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(j)];
    }
}

namespace detail {

void check_split(std::int64_t s, std::int64_t e, std::int64_t t, std::int64_t n) {
    if (!(0 <= s && s < t && t < e && e <= n)) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "cusum: require 0 <= s < t < e <= n, got s=%lld t=%lld e=%lld n=%lld",
                      static_cast<long long>(s), static_cast<long long>(t),
                      static_cast<long long>(e), static_cast<long long>(n));
        throw ContractError(buf);
    }
}

void cusum_weights(std::int64_t s, std::int64_t e, std::int64_t t, double& left,
                   double& right) {
    const double es = static_cast<double>(e - s);
    const double ts = static_cast<double>(t - s);
    const double et = static_cast<double>(e - t);
    left = std::sqrt(et / (es * ts));
    right = std::sqrt(ts / (es * et));
}

}  // namespace detail

void OuterPrefix::cusum_packed(std::int64_t s, std::int64_t e, std::int64_t t,
                               std::span<double> out) const {
    detail::check_split(s, e, t, n_);
    require(out.size() == q_, "OuterPrefix::cusum_packed: output size mismatch");
    double wl, wr;
    detail::cusum_weights(s, e, t, wl, wr);
    const double* ps = flat_.data() + static_cast<std::size_t>(s) * q_;
    const double* pt = flat_.data() + static_cast<std::size_t>(t) * q_;
    const double* pe = flat_.data() + static_cast<std::size_t>(e) * q_;
    for (std::size_t k = 0; k < q_; ++k)
        out[k] = wl * (pt[k] - ps[k]) - wr * (pe[k] - pt[k]);
}

SymMat cov_cusum(const OuterPrefix& pre, std::int64_t s, std::int64_t e, std::int64_t t) {
    SymMat out(pre.p());
    pre.cusum_packed(s, e, t, out.packed());
    return out;
}

SegmentModel::SegmentModel(std::int64_t n, std::vector<std::int64_t> change_points,
                           std::vector<SymMat> sigmas)
    : n_(n), cps_(std::move(change_points)), sigmas_(std::move(sigmas)) {
    require(n_ >= 1, "SegmentModel: n must be positive");
    require(!sigmas_.empty(), "SegmentModel: need at least one covariance");
    require(sigmas_.size() == cps_.size() + 1,
            "SegmentModel: need exactly one covariance per segment");
    const int p = sigmas_.front().dim();
    for (const SymMat& s : sigmas_) {
        require(s.dim() == p, "SegmentModel: covariance dimension mismatch");
        require(s.all_finite(), "SegmentModel: non-finite covariance entry");
    }
    for (std::size_t k = 0; k < cps_.size(); ++k) {
        require(cps_[k] >= 1 && cps_[k] <= n_ - 1,
                "SegmentModel: change points must lie in {1, ..., n-1}");
        if (k > 0)
            require(cps_[k] > cps_[k - 1], "SegmentModel: change points must be strictly increasing");
    }
    for (std::size_t k = 0; k < sigmas_.size(); ++k) {
        const double opn = op_norm(sigmas_[k]);
        require(min_eigenvalue(sigmas_[k]) >= -1e-10 * opn,
                "SegmentModel: covariance is not positive semidefinite");
        if (k > 0) {
            bool differ = false;
            auto a = sigmas_[k].packed();
            auto b = sigmas_[k - 1].packed();
            for (std::size_t i = 0; i < a.size(); ++i)
                if (a[i] != b[i]) {
                    differ = true;
                    break;
                }
            require(differ, "SegmentModel: consecutive covariances must differ");
        }
    }
}

std::int64_t SegmentModel::min_spacing() const {
    std::int64_t prev = 0, best = n_;
    for (std::int64_t cp : cps_) {
        best = std::min(best, cp - prev);
        prev = cp;
    }
    return std::min(best, n_ - prev);
}

double SegmentModel::kappa_min() const {
    if (cps_.empty()) return 0.0;
    double best = -1.0;
    for (std::size_t k = 1; k < sigmas_.size(); ++k) {
        SymMat diff = sigmas_[k];
        diff -= sigmas_[k - 1];
        const double jump = op_norm(diff);
        if (best < 0.0 || jump < best) best = jump;
    }
    return best;
}

double SegmentModel::max_sigma_op_norm() const {
    double best = 0.0;
    for (const SymMat& s : sigmas_) best = std::max(best, op_norm(s));
    return best;
}

const SymMat& SegmentModel::sigma_at(std::int64_t i) const {
    require(i >= 1 && i <= n_, "SegmentModel::sigma_at: index out of range");
    const auto it = std::lower_bound(cps_.begin(), cps_.end(), i);
    return sigmas_[static_cast<std::size_t>(it - cps_.begin())];
}

SymMat SegmentModel::sum_sigma(std::int64_t a, std::int64_t b) const {
    require(0 <= a && a <= b && b <= n_, "SegmentModel::sum_sigma: bad range");
    SymMat total(p());
    std::int64_t lo = 0;
    for (std::size_t k = 0; k < sigmas_.size(); ++k) {
        const std::int64_t hi = (k < cps_.size()) ? cps_[k] : n_;
        const std::int64_t count = std::min(b, hi) - std::max(a, lo);
        if (count > 0) total.axpy(static_cast<double>(count), sigmas_[k]);
        lo = hi;
    }
    return total;
}

SymMat pop_cusum(const SegmentModel& model, std::int64_t s, std::int64_t e,
                 std::int64_t t) {
    detail::check_split(s, e, t, model.n());
    double wl, wr;
    detail::cusum_weights(s, e, t, wl, wr);
    SymMat out = model.sum_sigma(s, t);
    out *= wl;
    out.axpy(-wr, model.sum_sigma(t, e));
    return out;
}

std::vector<double> project_series(const ObservationMatrix& x, const UnitVector& v) {
    require(v.dim() == x.p(), "project_series: dimension mismatch");
    std::vector<double> y(static_cast<std::size_t>(x.n()), 0.0);
    if (v.is_zero()) return y;  // sentinel direction maps to the zero series
    for (std::int64_t i = 0; i < x.n(); ++i) {
        const double d = v.dot(x.row(i));
        y[static_cast<std::size_t>(i)] = d * d;
    }
    return y;
}

PrefixSeries::PrefixSeries(std::span<const double> y) {
    pre_.assign(y.size() + 1, 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        require(std::isfinite(y[i]), "PrefixSeries: non-finite entry");
        pre_[i + 1] = pre_[i] + y[i];
    }
}

double cusum_1d(const PrefixSeries& y, std::int64_t s, std::int64_t e, std::int64_t t) {
    detail::check_split(s, e, t, y.n());
    double wl, wr;
    detail::cusum_weights(s, e, t, wl, wr);
    return wl * y.sum(s, t) - wr * y.sum(t, e);
}

}  // namespace covcpd
