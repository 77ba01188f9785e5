#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "covcpd/linalg.hpp"

namespace covcpd {

/// n observations of dimension p, row i holding X_{i+1} (time indices are
/// 1-based in the statistics, 0-based in storage). Entries must be finite
/// and n >= 2.
class ObservationMatrix {
public:
    ObservationMatrix(std::int64_t n, int p, std::vector<double> row_major);

    /// Zero-filled matrix for incremental construction by generators.
    static ObservationMatrix zeros(std::int64_t n, int p);

    std::int64_t n() const { return n_; }
    int p() const { return p_; }

    std::span<const double> row(std::int64_t i) const {
        return {data_.data() + i * p_, static_cast<std::size_t>(p_)};
    }
    std::span<double> row(std::int64_t i) {
        return {data_.data() + i * p_, static_cast<std::size_t>(p_)};
    }

    const std::vector<double>& data() const { return data_; }

    /// Every entry scaled by c.
    ObservationMatrix scaled(double c) const;

    /// Rows with the column means subtracted (optional preprocessing for
    /// data that is not centered; detection assumes centered input).
    ObservationMatrix centered() const;

    /// Re-validate finiteness (used after external mutation of rows).
    void check_finite() const;

private:
    std::int64_t n_;
    int p_;
    std::vector<double> data_;
};

/// prefix[t] = sum_{i=1}^{t} X_i X_i^T, t = 0..n, packed storage. Built
/// once so every scan statistic evaluation is O(p^2). Immutable after
/// construction; concurrent queries are safe.
class OuterPrefix {
public:
    explicit OuterPrefix(const ObservationMatrix& x);

    std::int64_t n() const { return n_; }
    int p() const { return p_; }

    std::span<const double> at(std::int64_t t) const {
        return {flat_.data() + static_cast<std::size_t>(t) * q_, q_};
    }

    /// Packed scan statistic for split t of (s, e], written into `out`
    /// (length p*(p+1)/2).
    void cusum_packed(std::int64_t s, std::int64_t e, std::int64_t t,
                      std::span<double> out) const;

private:
    std::int64_t n_;
    int p_;
    std::size_t q_;
    std::vector<double> flat_;
};

/// Ground-truth piecewise-constant covariance description. change_points
/// are strictly increasing in {1, ..., n-1}; sigmas[k] is the covariance
/// on segment {eta_{k-1}+1, ..., eta_k} with eta_0 = 0, eta_{K+1} = n.
/// Each sigma must be PSD (up to -1e-10 * op_norm) and consecutive sigmas
/// must differ.
class SegmentModel {
public:
    SegmentModel(std::int64_t n, std::vector<std::int64_t> change_points,
                 std::vector<SymMat> sigmas);

    std::int64_t n() const { return n_; }
    int p() const { return sigmas_.front().dim(); }
    std::int64_t k() const { return static_cast<std::int64_t>(cps_.size()); }
    const std::vector<std::int64_t>& change_points() const { return cps_; }
    const std::vector<SymMat>& sigmas() const { return sigmas_; }

    /// Minimum spacing between consecutive change points (boundaries
    /// included).
    std::int64_t min_spacing() const;

    /// Smallest jump: min_k ||sigmas[k] - sigmas[k-1]||_op.
    double kappa_min() const;

    /// max_i ||Sigma_i||_op.
    double max_sigma_op_norm() const;

    /// Covariance at time index i (1-based).
    const SymMat& sigma_at(std::int64_t i) const;

    /// sum_{i=a+1}^{b} Sigma_i, evaluated segment-by-segment.
    SymMat sum_sigma(std::int64_t a, std::int64_t b) const;

private:
    std::int64_t n_;
    std::vector<std::int64_t> cps_;
    std::vector<SymMat> sigmas_;
};

/// Prefix sums of a univariate series, for O(1) scan statistic queries.
class PrefixSeries {
public:
    explicit PrefixSeries(std::span<const double> y);

    std::int64_t n() const { return static_cast<std::int64_t>(pre_.size()) - 1; }

    /// sum_{i=a+1}^{b} y_i
    double sum(std::int64_t a, std::int64_t b) const {
        return pre_[static_cast<std::size_t>(b)] - pre_[static_cast<std::size_t>(a)];
    }

private:
    std::vector<double> pre_;
};

namespace detail {
/// Validates 0 <= s < t < e <= n; throws ContractError otherwise.
void check_split(std::int64_t s, std::int64_t e, std::int64_t t, std::int64_t n);
/// Left/right weights of the scan statistic at split t of (s, e].
void cusum_weights(std::int64_t s, std::int64_t e, std::int64_t t,
                   double& left, double& right);
}  // namespace detail

/// Sample covariance scan statistic on (s, e] split at t:
///   sqrt((e-t)/((e-s)(t-s))) * sum_{i=s+1}^{t} X_i X_i^T
/// - sqrt((t-s)/((e-s)(e-t))) * sum_{i=t+1}^{e} X_i X_i^T.
SymMat cov_cusum(const OuterPrefix& pre, std::int64_t s, std::int64_t e,
                 std::int64_t t);

/// Population version: the same weighted difference with Sigma_i in place
/// of X_i X_i^T.
SymMat pop_cusum(const SegmentModel& model, std::int64_t s, std::int64_t e,
                 std::int64_t t);

/// Y_i = (v . X_i)^2. The zero sentinel maps to the all-zeros series.
std::vector<double> project_series(const ObservationMatrix& x, const UnitVector& v);

/// Scalar scan statistic of a univariate series.
double cusum_1d(const PrefixSeries& y, std::int64_t s, std::int64_t e,
                std::int64_t t);

}  // namespace covcpd
