#include "doctest.h"

#include "kelly/error.hpp"
#include "kelly/frontier.hpp"

#include <cmath>
#include <functional>

using namespace kelly;

namespace
{

const DiscreteModel fig1 = build_discrete_model({0.004, 0.10}, {0.02, 0.10, 0.0, 0.0});

// Brute force over every ordered outcome sequence: an oracle independent of
// the multinomial bookkeeping.
double ddva_brute_force(const DiscreteModel& m, double f, double d, int n)
{
    double total = 0.0;
    std::function<void(int, double, double)> walk = [&](int depth, double prob, double wealth) {
        if (depth == n) {
            total += prob * std::max(1.0 - d - wealth, 0.0);
            return;
        }
        for (const auto& o : m.outcomes())
            walk(depth + 1, prob * o.probability, wealth * (1.0 + f * o.value));
    };
    walk(0, 1.0, 1.0);
    return total;
}

} // namespace

TEST_SUITE("frontier")
{
    TEST_CASE("state count")
    {
        CHECK(multinomial_state_count(3, 2) == 6.0);
        CHECK(multinomial_state_count(4, 52) == 26235.0);
        CHECK(multinomial_state_count(1, 100) == 1.0);
    }

    TEST_CASE("enumeration matches brute force over all sequences")
    {
        const DiscreteModel four = build_discrete_model({0.01, 0.06}, {0.02, 0.15, 0.02, 0.15});
        for (const double f : {0.5, 1.0, 3.0}) {
            CHECK(ddva_enumerated(fig1, f, 0.10, 8).cost == doctest::Approx(ddva_brute_force(fig1, f, 0.10, 8)).epsilon(1e-12));
            CHECK(ddva_enumerated(four, f, 0.05, 7).cost == doctest::Approx(ddva_brute_force(four, f, 0.05, 7)).epsilon(1e-12));
        }
    }

    TEST_CASE("enumeration and Monte Carlo agree within 3 SE")
    {
        const DdvaQuote exact = ddva_enumerated(fig1, 0.19 * 5, 0.10, 12);
        const DdvaQuote mc = ddva_monte_carlo(fig1, 0.19 * 5, 0.10, 12, 400000, 17, 0);
        CHECK_FALSE(mc.enumerated);
        CHECK(mc.standard_error > 0.0);
        CHECK(std::abs(exact.cost - mc.cost) < 3.0 * mc.standard_error);
    }

    TEST_CASE("Monte Carlo is deterministic across worker counts")
    {
        const DdvaQuote a = ddva_monte_carlo(fig1, 1.0, 0.10, 20, 20000, 5, 1);
        const DdvaQuote b = ddva_monte_carlo(fig1, 1.0, 0.10, 20, 20000, 5, 4);
        CHECK(a.cost == b.cost);
        CHECK(a.standard_error == b.standard_error);
    }

    TEST_CASE("zero leverage needs no protection and cost is bounded")
    {
        CHECK(ddva(fig1, 0.0, 0.10, 12).cost == 0.0);
        const DdvaQuote q = ddva(fig1, 9.0, 0.10, 12);
        CHECK(q.cost > 0.0);
        CHECK(q.cost <= 0.9);
    }

    TEST_CASE("monotonicity in drawdown level, leverage, alpha and ETL")
    {
        const double levels[] = {0.05, 0.10, 0.15, 0.20, 0.25};
        for (int i = 1; i < 5; ++i)
            CHECK(ddva(fig1, 1.0, levels[i], 12).cost < ddva(fig1, 1.0, levels[i - 1], 12).cost);
        const double fs[] = {0.5, 1.0, 1.5, 2.0, 2.5};
        for (int i = 1; i < 5; ++i)
            CHECK(ddva(fig1, fs[i], 0.10, 12).cost > ddva(fig1, fs[i - 1], 0.10, 12).cost);
        const double alphas[] = {0.01, 0.02, 0.03, 0.04, 0.05};
        for (int i = 1; i < 5; ++i) {
            const auto hi = build_discrete_model({0.004, 0.10}, {alphas[i], 0.10, 0, 0});
            const auto lo = build_discrete_model({0.004, 0.10}, {alphas[i - 1], 0.10, 0, 0});
            CHECK(ddva(hi, 1.0, 0.10, 12).cost > ddva(lo, 1.0, 0.10, 12).cost);
        }
        const double etls[] = {0.10, 0.15, 0.20, 0.25, 0.30};
        for (int i = 1; i < 5; ++i) {
            const auto hi = build_discrete_model({0.004, 0.10}, {0.02, etls[i], 0, 0});
            const auto lo = build_discrete_model({0.004, 0.10}, {0.02, etls[i - 1], 0, 0});
            CHECK(ddva(hi, 1.0, 0.10, 12).cost > ddva(lo, 1.0, 0.10, 12).cost);
        }
    }

    TEST_CASE("input validation")
    {
        CHECK_THROWS_AS(ddva(fig1, 1.0, 0.0, 12), Error);
        CHECK_THROWS_AS(ddva(fig1, 1.0, 0.1, 0), Error);
        try {
            ddva(fig1, 10.0, 0.1, 12);
            FAIL("expected InfeasibleLeverage");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InfeasibleLeverage);
        }
    }

    TEST_CASE("comparison frontiers are concave and ordered")
    {
        const FrontierSet set = comparison_frontiers({});
        for (const auto* curve : {&set.no_tail, &set.symmetric, &set.skewed}) {
            const ConcavityReport r = frontier_concavity_check(*curve);
            CHECK(r.concave);
            CHECK(r.max_second_difference < 0.0);
        }
        for (std::size_t i = 0; i < set.no_tail.size(); ++i) {
            CHECK(set.no_tail[i].gross_return == doctest::Approx(set.skewed[i].gross_return));
            if (set.no_tail[i].leverage < 1.0)
                continue;
            CHECK(set.no_tail[i].net_return > set.symmetric[i].net_return);
            CHECK(set.symmetric[i].net_return > set.skewed[i].net_return);
        }
    }

    TEST_CASE("financing spread lowers net return only above 1x")
    {
        const std::vector<double> grid{0.5, 1.0, 2.0};
        const auto free = frontier_curve(0.01, 0.06, std::nullopt, 0.1, 52, 0.0, grid);
        const auto paid = frontier_curve(0.01, 0.06, std::nullopt, 0.1, 52, 0.002, grid);
        CHECK(paid[0].net_return == free[0].net_return);
        CHECK(paid[1].net_return == free[1].net_return);
        CHECK(paid[2].net_return == doctest::Approx(free[2].net_return - 0.002));
    }

    TEST_CASE("infeasible leverage rows are flagged, not thrown")
    {
        const std::vector<double> grid{1.0, 20.0};
        const auto pts = frontier_curve(0.01, 0.06, TailSpec{0.02, 0.15, 0, 0}, 0.1, 12, 0.0, grid);
        CHECK(pts[0].feasible);
        CHECK_FALSE(pts[1].feasible);
    }

    TEST_CASE("concavity check on hand-made points")
    {
        std::vector<FrontierPoint> pts(3);
        pts[0].volatility = 0.0, pts[0].net_return = 0.0;
        pts[1].volatility = 1.0, pts[1].net_return = 1.0;
        pts[2].volatility = 3.0, pts[2].net_return = 1.5;
        const ConcavityReport r = frontier_concavity_check(pts);
        CHECK(r.concave);
        // chord at 1 is 0.5; doubled gap = 2 * (0.5 - 1)
        CHECK(r.max_second_difference == doctest::Approx(-1.0));
        pts[1].net_return = 0.2;
        CHECK_FALSE(frontier_concavity_check(pts).concave);
        pts[2].volatility = 1.0;
        CHECK_THROWS_AS(frontier_concavity_check(pts), Error);
    }
}
