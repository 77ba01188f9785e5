#include "covcpd/datagen.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "covcpd/errors.hpp"

namespace covcpd {

namespace {

// Sampling transform T with T T^T = sigma, via pivoted LDLT. Diagonal
// entries within -1e-10 * op_norm of zero are clamped (the documented PSD
// repair); anything more negative is an error naming the segment.
Eigen::MatrixXd sampling_transform(const SymMat& sigma, std::size_t segment) {
    const int p = sigma.dim();
    Eigen::MatrixXd dense(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) dense(i, j) = dense(j, i) = sigma(i, j);

    Eigen::LDLT<Eigen::MatrixXd> ldlt(dense);
    const double opn = op_norm(sigma);
    Eigen::VectorXd d = ldlt.vectorD();
    for (int i = 0; i < p; ++i) {
        if (d(i) < -1e-10 * opn)
            throw GenerationError("gen_series: covariance of segment " +
                                  std::to_string(segment) + " is not positive semidefinite");
        if (d(i) < 0.0) d(i) = 0.0;
    }
    Eigen::MatrixXd t = ldlt.matrixL();
    t = t * d.cwiseSqrt().asDiagonal();
    t = ldlt.transpositionsP().transpose() * t;
    return t;
}

}  // namespace

ObservationMatrix gen_series(const GenSpec& spec) {
    const SegmentModel& model = spec.model;
    const std::int64_t n = model.n();
    const int p = model.p();
    require(n >= 2, "gen_series: need at least 2 observations");

    std::vector<Eigen::MatrixXd> transforms;
    transforms.reserve(model.sigmas().size());
    for (std::size_t k = 0; k < model.sigmas().size(); ++k)
        transforms.push_back(sampling_transform(model.sigmas()[k], k));

    Rng rng(spec.seed);
    ObservationMatrix x = ObservationMatrix::zeros(n, p);
    Eigen::VectorXd z(p);
    std::int64_t lo = 0;
    for (std::size_t k = 0; k < model.sigmas().size(); ++k) {
        const std::int64_t hi =
            (k < model.change_points().size()) ? model.change_points()[k] : n;
        for (std::int64_t i = lo; i < hi; ++i) {
            for (int j = 0; j < p; ++j)
                z(j) = (spec.noise == NoiseFamily::gaussian) ? rng.normal()
                                                             : rng.rademacher();
            const Eigen::VectorXd row = transforms[k] * z;
            auto dst = x.row(i);
            for (int j = 0; j < p; ++j) dst[static_cast<std::size_t>(j)] = row(j);
        }
        lo = hi;
    }
    x.check_finite();
    return x;
}

SymMat spiked_cov(double sigma2, double kappa, const UnitVector& u) {
    require(sigma2 > 0.0, "spiked_cov: sigma2 must be positive");
    require(kappa >= 0.0, "spiked_cov: kappa must be nonnegative");
    require(!u.is_zero(), "spiked_cov: direction must be unit norm");
    SymMat s = SymMat::outer(u.coords());
    s *= kappa;
    s.axpy(sigma2, SymMat::identity(u.dim()));
    return s;
}

UnitVector rademacher_direction(int p, Rng& rng) {
    require(p >= 1, "rademacher_direction: dimension must be positive");
    std::vector<double> signs(static_cast<std::size_t>(p));
    for (double& s : signs) s = rng.rademacher();
    return UnitVector::normalize(std::move(signs));
}

std::pair<ObservationMatrix, SegmentModel> hard_instance(std::int64_t n, int p,
                                                         std::int64_t delta, double kappa,
                                                         double sigma2, Side side,
                                                         Rng& rng) {
    require(delta >= 2 && delta <= n / 3,
            "hard_instance: require 2 <= delta <= n/3 (distribution-class constraint)");
    require(kappa > 0.0 && kappa <= sigma2 / 4.0,
            "hard_instance: require 0 < kappa <= sigma2/4 (distribution-class constraint)");

    const UnitVector u = rademacher_direction(p, rng);
    const SymMat spike = spiked_cov(sigma2, kappa, u);
    SymMat base = SymMat::identity(p);
    base *= sigma2;

    std::vector<std::int64_t> cps;
    std::vector<SymMat> sigmas;
    if (side == Side::early) {
        cps = {delta};
        sigmas = {spike, base};
    } else {
        cps = {n - delta};
        sigmas = {base, spike};
    }
    SegmentModel model(n, std::move(cps), std::move(sigmas));
    GenSpec spec{model, NoiseFamily::gaussian, rng.next_u64()};
    return {gen_series(spec), std::move(model)};
}

}  // namespace covcpd
