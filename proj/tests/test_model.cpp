#include "doctest.h"

#include "kelly/error.hpp"
#include "kelly/model.hpp"
#include "kelly/stats.hpp"

#include <cmath>
#include <random>

using namespace kelly;

namespace
{

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected kelly::Error");
    return ErrorCode::IoError;
}

} // namespace

TEST_SUITE("model")
{
    TEST_CASE("four-point pdf has the documented states and weights")
    {
        const DiscreteModel m = build_discrete_model({0.004, 0.10}, {0.02, 0.10, 0.0, 0.0});
        REQUIRE(m.size() == 3);
        const auto o = m.outcomes();
        CHECK(o[0].value == doctest::Approx(-0.10));
        CHECK(o[0].probability == doctest::Approx(0.02));
        CHECK(o[1].value == doctest::Approx(-0.096));
        CHECK(o[1].probability == doctest::Approx(0.49));
        CHECK(o[2].value == doctest::Approx(0.104));
        CHECK(o[2].probability == doctest::Approx(0.49));
    }

    TEST_CASE("coincident outcomes merge and the result stays sorted")
    {
        // mu - sigma = -0.1 coincides with the tail loss.
        const DiscreteModel m = build_discrete_model({0.0, 0.10}, {0.1, 0.10, 0.1, 0.3});
        REQUIRE(m.size() == 3);
        CHECK(m.outcomes()[0].probability == doctest::Approx(0.1 + 0.4));
        CHECK(m.min_value() == doctest::Approx(-0.10));
        CHECK(m.max_value() == doctest::Approx(0.30));
    }

    TEST_CASE("core and tail validation")
    {
        CHECK(code_of([] { validate(GaussianCore{0.004, 0.004}); }) == ErrorCode::InvalidParameter);
        CHECK(code_of([] { validate(GaussianCore{0.0, 0.0}); }) == ErrorCode::InvalidParameter);
        CHECK(code_of([] { validate(TailSpec{-0.1, 0.1, 0, 0}); }) == ErrorCode::InvalidParameter);
        CHECK(code_of([] { validate(TailSpec{0.6, 0.1, 0.5, 0.1}); }) == ErrorCode::InvalidParameter);
        CHECK(code_of([] { validate(TailSpec{0.1, -0.1, 0, 0}); }) == ErrorCode::InvalidParameter);
        CHECK_NOTHROW(validate(TailSpec{0.1, 0.2, 0.1, 0.2}));
    }

    TEST_CASE("DiscreteModel rejects a mass that does not sum to one")
    {
        CHECK(code_of([] { DiscreteModel({{0.1, 0.5}, {-0.1, 0.4}}); }) == ErrorCode::InvalidParameter);
        CHECK(code_of([] { DiscreteModel({{0.1, 1.5}, {-0.1, -0.5}}); }) == ErrorCode::InvalidParameter);
    }

    TEST_CASE("one-sided calibration example")
    {
        // mu = (0.002 + 0.002) / 0.98; sigma^2 = 0.01/0.98 - 0.02 (0.1 + mu)^2
        const GaussianCore c = calibrate_center(0.002, 0.10, 0.02, 0.10);
        const double mu = 0.004 / 0.98;
        CHECK(c.mu == doctest::Approx(mu).epsilon(1e-14));
        CHECK(c.sigma * c.sigma == doctest::Approx(0.01 / 0.98 - 0.02 * (0.1 + mu) * (0.1 + mu)).epsilon(1e-13));
        CHECK(c.sigma * c.sigma == doctest::Approx(0.00998742).epsilon(1e-6));
    }

    TEST_CASE("two-sided calibration reduces to one-sided when beta = 0")
    {
        const GaussianCore a = calibrate_center(0.003, 0.08, 0.03, 0.12);
        const GaussianCore b = calibrate_center(0.003, 0.08, TailSpec{0.03, 0.12, 0.0, 0.0});
        CHECK(a.mu == b.mu);
        CHECK(a.sigma == b.sigma);
    }

    TEST_CASE("calibration round trip reproduces the observed moments")
    {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int checked = 0;
        for (int i = 0; i < 500; ++i) {
            const double mu0 = -0.01 + 0.03 * u(rng);
            const double sigma0 = 0.05 + 0.2 * u(rng);
            const TailSpec t{0.05 * u(rng), 0.3 * u(rng), i % 2 ? 0.05 * u(rng) : 0.0, 0.3 * u(rng)};
            GaussianCore core;
            try {
                core = calibrate_center(mu0, sigma0, t);
            } catch (const Error& e) {
                CHECK(e.code() == ErrorCode::CalibrationInfeasible);
                continue;
            }
            const Moments m = model_moments(build_discrete_model(core, t));
            CHECK(std::abs(m.mean - mu0) < 1e-12);
            CHECK(std::abs(std::sqrt(m.variance) - sigma0) < 1e-12);
            ++checked;
        }
        CHECK(checked > 400);
    }

    TEST_CASE("calibration too heavy for the variance is infeasible")
    {
        CHECK(code_of([] { calibrate_center(0.0, 0.02, 0.05, 0.5); }) == ErrorCode::CalibrationInfeasible);
    }

    TEST_CASE("moments of a hand-computed pdf")
    {
        const DiscreteModel m({{-1.0, 0.25}, {1.0, 0.75}});
        const Moments mo = model_moments(m);
        CHECK(mo.mean == doctest::Approx(0.5));
        CHECK(mo.variance == doctest::Approx(0.75));
    }

    TEST_CASE("regime flags")
    {
        const RegimeFlags f = regime_flags({0.004, 0.10}, {0.02, 0.10, 0, 0});
        CHECK(f.positive_edge);  // 0.98*0.004 - 0.002 > 0
        CHECK(f.low_leverage_regime);
        CHECK(f.tail_preserves_maximum);
        CHECK(f.perturbative_tail);
        CHECK(f.meaningful_tail);
        const RegimeFlags g = regime_flags({0.004, 0.10}, {0.02, 0.30, 0, 0});
        CHECK_FALSE(g.positive_edge);
        CHECK_FALSE(regime_flags({0.05, 0.1}, {0.2, 0.01, 0, 0}).perturbative_tail);
    }

    TEST_CASE("type-7 quantile matches hand interpolation")
    {
        const std::vector<double> xs{1.0, 2.0, 3.0, 4.0, 5.0};
        CHECK(quantile(xs, 0.0) == 1.0);
        CHECK(quantile(xs, 1.0) == 5.0);
        CHECK(quantile(xs, 0.1) == doctest::Approx(1.4));
        CHECK(quantile({3.0, 1.0, 2.0, 10.0}, 0.5) == doctest::Approx(2.5));
    }

    TEST_CASE("compensated sum keeps small terms")
    {
        CompensatedSum s;
        s.add(1e16);
        for (int i = 0; i < 1000; ++i)
            s.add(1.0);
        s.add(-1e16);
        CHECK(s.value() == 1000.0);
    }
}
