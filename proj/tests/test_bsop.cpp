#include <doctest.h>

#include <cmath>

#include "covcpd/bsop.hpp"
#include "covcpd/datagen.hpp"
#include "covcpd/eval.hpp"
#include "test_helpers.hpp"

using namespace covcpd;

namespace {

// n=400, p=2, I -> 4I at 200; margin is ceil(2*ln 400) = 12 at scale 1
ObservationMatrix single_change_data(std::uint64_t seed) {
    SymMat base = SymMat::identity(2);
    SymMat alt = SymMat::identity(2);
    alt *= 4.0;
    const SegmentModel m(400, {200}, {base, alt});
    return gen_series({m, NoiseFamily::gaussian, seed});
}

// upper-weighted midpoint of the admissible range (weight fixed by pilot:
// the variance-4 segment's noise maxima sit above the geometric mean)
double midway_tau(std::int64_t n, int p, double kappa, double delta, double b2) {
    const double lo = b2 * std::sqrt(p * std::log(static_cast<double>(n)));
    const double hi = kappa * delta / std::sqrt(static_cast<double>(n));
    return std::exp(0.25 * std::log(lo) + 0.75 * std::log(hi));
}

}  // namespace

TEST_CASE("huge threshold finds nothing") {
    const ObservationMatrix x = single_change_data(1);
    double max_row_sq = 0.0;
    for (std::int64_t i = 0; i < x.n(); ++i) {
        double sq = 0.0;
        for (double v : x.row(i)) sq += v * v;
        max_row_sq = std::max(max_row_sq, sq);
    }
    BsopParams params;
    params.tau = 10.0 * static_cast<double>(x.n()) * max_row_sq;
    const DetectionResult res = bsop_detect(x, params);
    CHECK(res.change_points.empty());
    CHECK(res.warnings.empty());
}

TEST_CASE("single change matches the exhaustive reference") {
    for (std::uint64_t seed : {11u, 12u, 13u, 14u, 15u}) {
        const ObservationMatrix x = single_change_data(seed);
        BsopParams params;
        params.tau = midway_tau(400, 2, 3.0, 200.0, 4.0);
        const DetectionResult res = bsop_detect(x, params);
        REQUIRE(res.change_points.size() == 1);
        const OracleResult oracle = oracle_single_cp(x, 0, 400, 12.0);
        CHECK(res.change_points[0] == oracle.b);
        CHECK(std::fabs(res.change_points[0] - 200) < 60);
        CHECK(res.records[0].stat > *params.tau);
    }
}

TEST_CASE("scaled data with scaled threshold gives identical points") {
    const ObservationMatrix x = single_change_data(21);
    BsopParams params;
    params.tau = midway_tau(400, 2, 3.0, 200.0, 4.0);
    const DetectionResult base = bsop_detect(x, params);
    for (double c : {0.1, 3.0}) {
        BsopParams scaled = params;
        scaled.tau = *params.tau * c * c;
        const DetectionResult res = bsop_detect(x.scaled(c), scaled);
        CHECK(res.change_points == base.change_points);
    }
}

TEST_CASE("margin guard warns instead of throwing") {
    Rng rng(3);
    ObservationMatrix x = ObservationMatrix::zeros(50, 8);
    for (std::int64_t i = 0; i < 50; ++i)
        for (int j = 0; j < 8; ++j) x.row(i)[static_cast<std::size_t>(j)] = rng.normal();
    BsopParams params;
    params.tau = 1.0;
    const DetectionResult res = bsop_detect(x, params);  // margin 32, 2m+1 = 65 > 50
    CHECK(res.change_points.empty());
    REQUIRE(res.warnings.size() == 1);
    CHECK(res.warnings[0] == "interval shorter than twice the boundary margin");
}

TEST_CASE("detections stay inside the margin interior") {
    const ObservationMatrix x = single_change_data(31);
    BsopParams params;
    params.tau = 6.0;  // low: force a deep recursion
    const DetectionResult res = bsop_detect(x, params);
    for (const auto& r : res.records) {
        CHECK(r.location >= r.seg_lo + 12);
        CHECK(r.location <= r.seg_hi - 12);
        CHECK(r.stat > 6.0);
    }
    // strictly increasing, deduplicated
    for (std::size_t i = 1; i < res.change_points.size(); ++i)
        CHECK(res.change_points[i] > res.change_points[i - 1]);
}

TEST_CASE("deterministic across repeated runs") {
    const ObservationMatrix x = single_change_data(41);
    BsopParams params;
    params.tau = 15.0;
    const DetectionResult a = bsop_detect(x, params);
    const DetectionResult b = bsop_detect(x, params);
    CHECK(a.change_points == b.change_points);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i)
        CHECK(a.records[i].stat == b.records[i].stat);
}

TEST_CASE("automatic threshold is recorded") {
    const ObservationMatrix x = single_change_data(51);
    BsopParams params;  // no tau
    const DetectionResult res = bsop_detect(x, params);
    bool has_tau = false, has_sigma = false;
    for (const auto& [k, v] : res.params_used) {
        if (k == "tau_auto") has_tau = v > 0.0;
        if (k == "sigma_hat2") has_sigma = v > 0.0;
    }
    CHECK(has_tau);
    CHECK(has_sigma);
}
