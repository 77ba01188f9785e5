#include "covcpd/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>

#include "covcpd/errors.hpp"
#include "covcpd/rng.hpp"

namespace covcpd {

SymMat::SymMat(int dim) : dim_(dim) {
    require(dim >= 1, "SymMat: dimension must be positive");
    a_.assign(packed_size(dim), 0.0);
}

SymMat SymMat::identity(int dim) {
    SymMat s(dim);
    for (int i = 0; i < dim; ++i) s.set(i, i, 1.0);
    return s;
}

SymMat SymMat::diagonal(std::span<const double> d) {
    SymMat s(static_cast<int>(d.size()));
    for (int i = 0; i < s.dim(); ++i) s.set(i, i, d[static_cast<std::size_t>(i)]);
    return s;
}

SymMat SymMat::outer(std::span<const double> x) {
    SymMat s(static_cast<int>(x.size()));
    std::size_t k = 0;
    for (int i = 0; i < s.dim_; ++i)
        for (int j = i; j < s.dim_; ++j)
            s.a_[k++] = x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
    return s;
}

std::size_t SymMat::pack(int i, int j) const {
    require(i >= 0 && j >= 0 && i < dim_ && j < dim_, "SymMat: index out of range");
    if (i > j) std::swap(i, j);
    const std::size_t ii = static_cast<std::size_t>(i);
    return ii * static_cast<std::size_t>(dim_) - ii * (ii - 1) / 2 +
           static_cast<std::size_t>(j - i);
}

SymMat& SymMat::axpy(double c, const SymMat& other) {
    require(other.dim_ == dim_, "SymMat: dimension mismatch");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += c * other.a_[k];
    return *this;
}

SymMat& SymMat::operator*=(double c) {
    for (double& v : a_) v *= c;
    return *this;
}

double SymMat::frobenius_norm() const {
    double total = 0.0;
    std::size_t k = 0;
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j, ++k)
            total += (i == j ? 1.0 : 2.0) * a_[k] * a_[k];
    return std::sqrt(total);
}

double SymMat::trace() const {
    double total = 0.0;
    for (int i = 0; i < dim_; ++i) total += (*this)(i, i);
    return total;
}

double SymMat::quad_form(std::span<const double> v) const {
    require(static_cast<int>(v.size()) == dim_, "SymMat: vector size mismatch");
    double total = 0.0;
    std::size_t k = 0;
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j, ++k)
            total += (i == j ? 1.0 : 2.0) * a_[k] * v[static_cast<std::size_t>(i)] *
                     v[static_cast<std::size_t>(j)];
    return total;
}

std::vector<double> SymMat::apply(std::span<const double> v) const {
    require(static_cast<int>(v.size()) == dim_, "SymMat: vector size mismatch");
    std::vector<double> y(static_cast<std::size_t>(dim_), 0.0);
    std::size_t k = 0;
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j, ++k) {
            y[static_cast<std::size_t>(i)] += a_[k] * v[static_cast<std::size_t>(j)];
            if (i != j) y[static_cast<std::size_t>(j)] += a_[k] * v[static_cast<std::size_t>(i)];
        }
    return y;
}

bool SymMat::all_finite() const {
    for (double v : a_)
        if (!std::isfinite(v)) return false;
    return true;
}

bool SymMat::is_zero() const {
    for (double v : a_)
        if (v != 0.0) return false;
    return true;
}

UnitVector UnitVector::zero(int dim) {
    require(dim >= 1, "UnitVector: dimension must be positive");
    return UnitVector(std::vector<double>(static_cast<std::size_t>(dim), 0.0), true);
}

UnitVector UnitVector::normalize(std::vector<double> coords) {
    require(!coords.empty(), "UnitVector: dimension must be positive");
    double sq = 0.0;
    for (double c : coords) sq += c * c;
    require(sq > 0.0 && std::isfinite(sq), "UnitVector: cannot normalize a zero vector");
    const double inv = 1.0 / std::sqrt(sq);
    for (double& c : coords) c *= inv;
    return UnitVector(std::move(coords), false);
}

UnitVector UnitVector::canonical(std::vector<double> coords) {
    UnitVector u = normalize(std::move(coords));
    double maxabs = 0.0;
    for (double c : u.coords_) maxabs = std::max(maxabs, std::fabs(c));
    for (double c : u.coords_) {
        if (std::fabs(c) > 1e-12 * maxabs) {
            if (c < 0.0)
                for (double& x : u.coords_) x = -x;
            break;
        }
    }
    return u;
}

double UnitVector::dot(std::span<const double> x) const {
    require(x.size() == coords_.size(), "UnitVector: size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < coords_.size(); ++i) total += coords_[i] * x[i];
    return total;
}

namespace {

Eigen::MatrixXd to_dense(const SymMat& s) {
    const int p = s.dim();
    Eigen::MatrixXd m(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) m(i, j) = m(j, i) = s(i, j);
    return m;
}

OpNormResult dense_extreme(const SymMat& s) {
    const Eigen::MatrixXd m = to_dense(s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success)
        throw NumericalError("op_norm_eig: dense eigendecomposition failed");
    const int p = s.dim();
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(p - 1);
    // eigenvalues ascend; on a |lo| == hi tie prefer the positive one
    const int idx = (std::fabs(hi) >= std::fabs(lo)) ? p - 1 : 0;
    std::vector<double> v(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) v[static_cast<std::size_t>(i)] = es.eigenvectors()(i, idx);
    return {std::fabs(es.eigenvalues()(idx)), UnitVector::canonical(std::move(v))};
}

// Gershgorin bounds on the spectrum.
std::pair<double, double> gershgorin(const SymMat& s) {
    const int p = s.dim();
    double lo = 0.0, hi = 0.0;
    for (int i = 0; i < p; ++i) {
        double radius = 0.0;
        for (int j = 0; j < p; ++j)
            if (j != i) radius += std::fabs(s(i, j));
        const double d = s(i, i);
        if (i == 0 || d - radius < lo) lo = d - radius;
        if (i == 0 || d + radius > hi) hi = d + radius;
    }
    return {lo, hi};
}

struct PowerEstimate {
    double theta = 0.0;  // dominant eigenvalue of the shifted matrix
    std::vector<double> v;
    bool converged = false;
};

// Power iteration on S + shift*I (sign = +1) or shift*I - S (sign = -1).
PowerEstimate power_iterate(const SymMat& s, double sign, double shift,
                            double resid_tol, long max_iter) {
    const int p = s.dim();
    Rng rng(0x5DEECE66DULL + static_cast<std::uint64_t>(p));
    std::vector<double> v(static_cast<std::size_t>(p));
    double norm = 0.0;
    for (double& c : v) {
        c = rng.normal();
        norm += c * c;
    }
    norm = std::sqrt(norm);
    for (double& c : v) c /= norm;

    PowerEstimate est;
    for (long it = 0; it < max_iter; ++it) {
        std::vector<double> w = s.apply(v);
        for (int i = 0; i < p; ++i) {
            const std::size_t ii = static_cast<std::size_t>(i);
            w[ii] = sign * w[ii] + shift * v[ii];
        }
        double theta = 0.0;
        for (int i = 0; i < p; ++i) theta += v[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
        double resid = 0.0;
        for (int i = 0; i < p; ++i) {
            const double d = w[static_cast<std::size_t>(i)] - theta * v[static_cast<std::size_t>(i)];
            resid += d * d;
        }
        resid = std::sqrt(resid);
        double wnorm = 0.0;
        for (double c : w) wnorm += c * c;
        wnorm = std::sqrt(wnorm);
        if (wnorm == 0.0) {  // v landed in the kernel of the shifted matrix
            est.theta = 0.0;
            est.v = v;
            est.converged = true;
            return est;
        }
        for (int i = 0; i < p; ++i) v[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] / wnorm;
        if (resid <= resid_tol) {
            est.theta = theta;
            est.v = v;
            est.converged = true;
            return est;
        }
    }
    return est;
}

OpNormResult power_extreme(const SymMat& s, const EigOptions& opts) {
    const int p = s.dim();
    const auto [glo, ghi] = gershgorin(s);
    const double scale = s.frobenius_norm();
    // Residual threshold tol*scale/sqrt(p) bounds the eigenvalue error by
    // tol times a lower bound on max|lambda|.
    const double resid_tol = opts.tol * scale / std::sqrt(static_cast<double>(p));
    const long max_iter =
        static_cast<long>(10.0 * p * std::log(static_cast<double>(p))) + 1000;

    const double shift_plus = std::max(0.0, -glo);   // S + shift -> targets lambda_max
    const double shift_minus = std::max(0.0, ghi);   // shift - S -> targets -lambda_min
    PowerEstimate up = power_iterate(s, +1.0, shift_plus, resid_tol, max_iter);
    PowerEstimate dn = power_iterate(s, -1.0, shift_minus, resid_tol, max_iter);
    if (!up.converged || !dn.converged)
        throw NumericalError("op_norm_eig: power iteration did not converge within its cap");

    const double cand_up = up.theta - shift_plus;   // ~ lambda_max
    const double cand_dn = dn.theta - shift_minus;  // ~ -lambda_min
    if (cand_up >= cand_dn)
        return {cand_up, UnitVector::canonical(std::move(up.v))};
    return {cand_dn, UnitVector::canonical(std::move(dn.v))};
}

}  // namespace

OpNormResult op_norm_eig(const SymMat& s, const EigOptions& opts) {
    require(opts.tol > 0.0, "op_norm_eig: tol must be positive");
    require(s.all_finite(), "op_norm_eig: matrix has non-finite entries");
    const int p = s.dim();
    if (s.is_zero()) {
        std::vector<double> e1(static_cast<std::size_t>(p), 0.0);
        e1[0] = 1.0;
        return {0.0, UnitVector::normalize(std::move(e1))};
    }
    if (p <= opts.dense_threshold) return dense_extreme(s);
    return power_extreme(s, opts);
}

double op_norm(const SymMat& s, const EigOptions& opts) {
    return op_norm_eig(s, opts).lambda_abs;
}

double min_eigenvalue(const SymMat& s) {
    require(s.all_finite(), "min_eigenvalue: matrix has non-finite entries");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_dense(s),
                                                      Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericalError("min_eigenvalue: eigendecomposition failed");
    return es.eigenvalues()(0);
}

}  // namespace covcpd
