#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace covcpd {

/// Dense symmetric matrix stored as a packed upper triangle, so symmetry
/// holds by construction and no operation can produce an asymmetric
/// instance.
class SymMat {
public:
    explicit SymMat(int dim);  // zero matrix

    static SymMat identity(int dim);
    static SymMat diagonal(std::span<const double> d);

    /// Rank-one outer product x x^T.
    static SymMat outer(std::span<const double> x);

    int dim() const { return dim_; }

    double operator()(int i, int j) const { return a_[pack(i, j)]; }
    void set(int i, int j, double v) { a_[pack(i, j)] = v; }

    /// *this += c * other
    SymMat& axpy(double c, const SymMat& other);
    SymMat& operator*=(double c);
    SymMat& operator+=(const SymMat& other) { return axpy(1.0, other); }
    SymMat& operator-=(const SymMat& other) { return axpy(-1.0, other); }

    friend SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
    friend SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
    friend SymMat operator*(double c, SymMat a) { return a *= c; }

    double frobenius_norm() const;
    double trace() const;

    /// v^T S v
    double quad_form(std::span<const double> v) const;
    /// S v
    std::vector<double> apply(std::span<const double> v) const;

    bool all_finite() const;
    bool is_zero() const;

    /// Packed upper triangle, row-major, length dim*(dim+1)/2.
    std::span<const double> packed() const { return a_; }
    std::span<double> packed() { return a_; }

    static std::size_t packed_size(int dim) {
        return static_cast<std::size_t>(dim) * (dim + 1) / 2;
    }

private:
    std::size_t pack(int i, int j) const;

    int dim_;
    std::vector<double> a_;
};

/// Unit-norm direction, or the all-zeros sentinel emitted for intervals
/// too short to estimate a direction on.
class UnitVector {
public:
    /// The all-zeros sentinel.
    static UnitVector zero(int dim);

    /// Normalize a nonzero vector to unit length (no sign adjustment).
    static UnitVector normalize(std::vector<double> coords);

    /// Normalize and fix the sign so the first nonzero coordinate is
    /// positive. This is the convention used for eigenvectors.
    static UnitVector canonical(std::vector<double> coords);

    bool is_zero() const { return zero_; }
    int dim() const { return static_cast<int>(coords_.size()); }
    double operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& coords() const { return coords_; }

    double dot(std::span<const double> x) const;

private:
    UnitVector(std::vector<double> coords, bool zero)
        : coords_(std::move(coords)), zero_(zero) {}

    std::vector<double> coords_;
    bool zero_;
};

struct EigOptions {
    double tol = 1e-10;       // relative tolerance on the extreme eigenvalue
    int dense_threshold = 64; // full decomposition up to this dimension,
                              // shifted power iteration above it
};

struct OpNormResult {
    double lambda_abs = 0.0;  // max_i |lambda_i|
    UnitVector v;             // corresponding eigenvector, canonical sign
};

/// Largest-magnitude eigenvalue and its eigenvector. The zero matrix maps
/// to (0, e1). Throws NumericalError if the iterative path fails to
/// converge within 10*p*log(p)+1000 iterations.
OpNormResult op_norm_eig(const SymMat& s, const EigOptions& opts = {});

/// Operator norm only.
double op_norm(const SymMat& s, const EigOptions& opts = {});

/// Smallest eigenvalue, dense path (used for PSD validation).
double min_eigenvalue(const SymMat& s);

}  // namespace covcpd
