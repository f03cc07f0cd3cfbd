#include "doctest.h"

#include "kelly/error.hpp"
#include "kelly/estimate.hpp"
#include "kelly/simulate.hpp"

#include <cmath>
#include <random>
#include <sstream>

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

ReturnSeries sample_model(const DiscreteModel& m, std::size_t n, std::uint64_t seed)
{
    const OutcomeSampler sampler(m);
    PathRng rng(seed, 0);
    ReturnSeries s;
    for (std::size_t i = 0; i < n; ++i)
        s.values.push_back(m.outcomes()[sampler.sample(rng.uniform())].value);
    return s;
}

} // namespace

TEST_SUITE("estimate")
{
    TEST_CASE("hand-computed buckets on an evenly spaced series")
    {
        ReturnSeries s;
        for (int i = 1; i <= 40; ++i)
            s.values.push_back((i - 20.5) / 1000.0);
        const Estimate e = estimate_params(s, 0.05);
        // Type 7: h = (n - 1) q + 1 = 2.95, so the left threshold sits between x2 and x3
        // and x1, x2 fall strictly below it.
        CHECK(e.diagnostics.left_threshold == doctest::Approx(-0.0185 + 0.95 * 0.001));
        CHECK(e.diagnostics.left_count == 2);
        // h = 38.05 on the right: x39 and x40 lie above.
        CHECK(e.diagnostics.right_threshold == doctest::Approx(0.0175 + 0.05 * 0.001));
        CHECK(e.diagnostics.right_count == 2);
        CHECK(e.tails.alpha == doctest::Approx(2.0 / 40.0));
        CHECK(e.tails.etl == doctest::Approx((0.0195 + 0.0185) / 2.0));
        CHECK(e.tails.beta == doctest::Approx(2.0 / 40.0));
        CHECK(e.tails.etw == doctest::Approx((0.0185 + 0.0195) / 2.0));
        CHECK(e.diagnostics.interior_count == 36);
        CHECK(e.diagnostics.sample_mean == doctest::Approx(0.0).scale(1.0));

        // The fitted model reproduces the full-sample mean and population variance.
        const Moments m = model_moments(build_discrete_model(e.core, e.tails));
        double var = 0.0;
        for (const double x : s.values)
            var += x * x / 40.0;
        CHECK(std::abs(m.mean) < 1e-15);
        CHECK(m.variance == doctest::Approx(var).epsilon(1e-12));
    }

    TEST_CASE("round trip recovers alpha and ETL from 1e5 samples")
    {
        const DiscreteModel m = build_discrete_model({0.004, 0.10}, {0.02, 0.10, 0.0, 0.0});
        const Estimate e = estimate_params(sample_model(m, 100000, 99), 0.03);
        CHECK(std::abs(e.tails.alpha - 0.02) < 0.005);
        CHECK(std::abs(e.tails.etl - 0.10) < 0.01);
        CHECK(e.diagnostics.degenerate_right);
        CHECK(e.tails.beta == 0.0);
    }

    TEST_CASE("symmetric data gives balanced tails")
    {
        std::mt19937_64 rng(4);
        std::normal_distribution<double> normal(0.0, 0.02);
        ReturnSeries s;
        for (int i = 0; i < 50000; ++i)
            s.values.push_back(normal(rng));
        const Estimate e = estimate_params(s);
        const double left = e.tails.alpha * e.tails.etl, right = e.tails.beta * e.tails.etw;
        CHECK(std::abs(left - right) < 0.1 * left);
    }

    TEST_CASE("estimation is deterministic")
    {
        const DiscreteModel m = build_discrete_model({0.004, 0.10}, {0.02, 0.10, 0.01, 0.2});
        const ReturnSeries s = sample_model(m, 5000, 1);
        const Estimate a = estimate_params(s), b = estimate_params(s);
        CHECK(a.core.mu == b.core.mu);
        CHECK(a.core.sigma == b.core.sigma);
        CHECK(a.tails.etw == b.tails.etw);
    }

    TEST_CASE("errors")
    {
        ReturnSeries shorty{{0.01, -0.02}, ""};
        CHECK(code_of([&] { estimate_params(shorty); }) == ErrorCode::SeriesTooShort);
        ReturnSeries constant{std::vector<double>(50, 0.01), ""};
        CHECK_THROWS_AS(estimate_params(constant), Error);
        ReturnSeries ruin{std::vector<double>(50, 0.01), ""};
        ruin.values[3] = -1.0;
        CHECK(code_of([&] { estimate_params(ruin); }) == ErrorCode::InvalidParameter);
        ReturnSeries ok{std::vector<double>(50, 0.01), ""};
        CHECK(code_of([&] { estimate_params(ok, 0.3); }) == ErrorCode::InvalidParameter);
    }

    TEST_CASE("CSV: bare column, header with return column, blank lines")
    {
        std::istringstream bare("0.01\n-0.02\n");
        CHECK(parse_returns_csv(bare).values == std::vector<double>{0.01, -0.02});

        std::ostringstream table;
        table << "date,return\n";
        for (int i = 0; i < 100; ++i)
            table << "2024-01-" << i << "," << i * 0.001 << "\n\n";
        std::istringstream in(table.str());
        const ReturnSeries s = parse_returns_csv(in);
        REQUIRE(s.values.size() == 100);
        CHECK(s.values[42] == doctest::Approx(0.042));

        std::istringstream named("Return\n0.5\n+0.25\n");
        CHECK(parse_returns_csv(named).values == std::vector<double>{0.5, 0.25});
    }

    TEST_CASE("CSV errors carry line numbers")
    {
        std::istringstream bad("0.01\n0.02\nabc\n");
        try {
            parse_returns_csv(bad);
            FAIL("expected ParseError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ParseError);
            CHECK(e.line() == 3);
        }
        std::istringstream empty("\n\n");
        CHECK(code_of([&] { parse_returns_csv(empty); }) == ErrorCode::EmptyFile);
        std::istringstream header_only("date,return\n");
        CHECK(code_of([&] { parse_returns_csv(header_only); }) == ErrorCode::EmptyFile);
        std::istringstream no_column("date,price\n1,2\n");
        CHECK(code_of([&] { parse_returns_csv(no_column); }) == ErrorCode::ParseError);
        CHECK(code_of([] { read_returns_csv("/nonexistent/returns.csv"); }) == ErrorCode::IoError);
    }
}
