#include <doctest.h>

#include <cmath>

#include "covcpd/bsop.hpp"
#include "covcpd/datagen.hpp"
#include "covcpd/errors.hpp"
#include "covcpd/eval.hpp"
#include "test_helpers.hpp"

using namespace covcpd;

TEST_CASE("compare on singletons and empties") {
    {
        const std::vector<std::int64_t> t{100}, e{103};
        const EvalReport r = compare(t, e, 400);
        CHECK(r.matched_error == 3);
        CHECK(r.hausdorff == 3);
        CHECK(r.normalized_error == doctest::Approx(3.0 / 400));
    }
    {
        const std::vector<std::int64_t> t{100}, e{};
        const EvalReport r = compare(t, e, 400);
        CHECK(!r.matched_error.has_value());
        CHECK(r.hausdorff == 400);
        CHECK(r.normalized_error == doctest::Approx(1.0));
    }
    {
        const std::vector<std::int64_t> t{}, e{};
        const EvalReport r = compare(t, e, 400);
        CHECK(r.matched_error == 0);
        CHECK(r.hausdorff == 0);
    }
    {
        // exhaustive pairwise distances: matched max(2,1)=2, hausdorff 2
        const std::vector<std::int64_t> t{10, 20}, e{12, 19};
        const EvalReport r = compare(t, e, 100);
        CHECK(r.matched_error == 2);
        CHECK(r.hausdorff == 2);
    }
}

TEST_CASE("compare input contracts") {
    const std::vector<std::int64_t> bad{20, 10};
    const std::vector<std::int64_t> ok{10};
    CHECK_THROWS_AS((void)compare(bad, ok, 100), ContractError);
    const std::vector<std::int64_t> out{100};
    CHECK_THROWS_AS((void)compare(out, ok, 100), ContractError);
    const std::vector<std::int64_t> dup{10, 10};
    CHECK_THROWS_AS((void)compare(dup, ok, 100), ContractError);
}

TEST_CASE("hausdorff is symmetric") {
    Rng rng(3);
    for (int rep = 0; rep < 50; ++rep) {
        const std::int64_t n = 200;
        auto draw = [&](std::int64_t count) {
            std::vector<std::int64_t> v;
            std::int64_t cur = 0;
            for (std::int64_t i = 0; i < count; ++i) {
                cur += 1 + static_cast<std::int64_t>(rng.below(30));
                if (cur >= n) break;
                v.push_back(cur);
            }
            return v;
        };
        const auto a = draw(1 + static_cast<std::int64_t>(rng.below(5)));
        const auto b = draw(1 + static_cast<std::int64_t>(rng.below(5)));
        CHECK(compare(a, b, n).hausdorff == compare(b, a, n).hausdorff);
    }
}

TEST_CASE("oracle_single_cp hand-enumerated case") {
    // p=1, X=(1,1,3,3), margin 0: t in {1,2,3}, |stat| = (4.6188, 8, 4.6188)
    const ObservationMatrix x(4, 1, {1, 1, 3, 3});
    const OracleResult r = oracle_single_cp(x, 0, 4, 0.0);
    CHECK(r.b == 2);
    CHECK(r.a == doctest::Approx(8.0).epsilon(1e-12));

    const double at1 = std::fabs(std::sqrt(3.0 / 4.0) * 1.0 - std::sqrt(1.0 / 12.0) * 19.0);
    CHECK(at1 == doctest::Approx(4.61880215351701).epsilon(1e-12));
}

TEST_CASE("oracle_single_cp finds the change on population surrogate data") {
    const std::vector<std::vector<double>> diags{{1.0, 1.0}, {5.0, 1.0}};
    const ObservationMatrix x = testutil::population_surrogate(120, diags, {60});
    const OracleResult r = oracle_single_cp(x, 0, 120, 4.0);
    CHECK(r.b == 60);
}

TEST_CASE("oracle_single_cp contracts") {
    const ObservationMatrix x(4, 1, {1, 1, 3, 3});
    CHECK_THROWS_AS((void)oracle_single_cp(x, 0, 4, 2.0), ContractError);
    CHECK_THROWS_AS((void)oracle_single_cp(x, 2, 1, 0.0), ContractError);
}

TEST_CASE("oracle_single_cp scale property") {
    Rng rng(5);
    SymMat base = SymMat::identity(2);
    SymMat alt = SymMat::identity(2);
    alt *= 3.0;
    const SegmentModel m(120, {60}, {base, alt});
    const ObservationMatrix x = gen_series({m, NoiseFamily::gaussian, 77});
    const OracleResult r = oracle_single_cp(x, 0, 120, 5.0);
    const OracleResult rs = oracle_single_cp(x.scaled(3.0), 0, 120, 5.0);
    CHECK(rs.b == r.b);
    CHECK(testutil::approx(rs.a, 9.0 * r.a, 1e-10));
    double align = 0.0;
    for (int i = 0; i < 2; ++i) align += r.v[i] * rs.v[i];
    CHECK(std::fabs(align) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("oracle_1d_argmax") {
    const std::vector<double> zero(10, 0.0);
    const Oracle1dResult z = oracle_1d_argmax(zero, 0, 10, 0.0);
    CHECK(z.b == 1);  // smallest interior t by convention
    CHECK(z.a == 0.0);

    const std::vector<double> y{1, 1, 9, 9};
    const Oracle1dResult r = oracle_1d_argmax(y, 0, 4, 0.0);
    CHECK(r.b == 2);
    CHECK(r.a == doctest::Approx(8.0).epsilon(1e-12));

    const std::vector<double> c(16, 2.0);
    const Oracle1dResult rc = oracle_1d_argmax(c, 0, 16, 0.0);
    CHECK(rc.a <= 1e-12 * 32);
}

TEST_CASE("bsop first split agrees with the oracle on seeded instances") {
    SymMat base = SymMat::identity(2);
    SymMat alt = SymMat::identity(2);
    alt *= 4.0;
    const SegmentModel m(400, {200}, {base, alt});
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const ObservationMatrix x = gen_series({m, NoiseFamily::gaussian, seed});
        const OracleResult oracle = oracle_single_cp(x, 0, 400, 12.0);
        BsopParams params;
        params.tau = oracle.a / 2.0;
        const DetectionResult res = bsop_detect(x, params);
        REQUIRE(!res.records.empty());
        // the record whose interval is (0, n) is the first split
        bool checked = false;
        for (const auto& r : res.records)
            if (r.seg_lo == 0 && r.seg_hi == 400) {
                CHECK(r.location == oracle.b);
                checked = true;
            }
        CHECK(checked);
    }
}
