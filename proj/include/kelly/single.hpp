/**
 * @file single.hpp
 * @brief Single-asset growth-optimal leverage (Kelly) with and without fat tails.
 *
 * The growth function of a constant-fraction bettor on a discrete model is
 *
 *   g(f) = sum_i p_i * ln(1 + f * v_i)
 *
 * which is strictly concave on its feasible interval {f : 1 + f*v_i > 0}.
 * Closed forms are the small-parameter approximations; kelly_fat_exact is
 * the reference they are measured against.
 */
#pragma once

#include "kelly/model.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace kelly
{

struct KellyPoint
{
    double fraction = 0.0;
    double growth = 0.0;
};

/// Open interval of leverages with every log argument positive. Bounds may
/// be infinite when all outcomes share a sign.
struct FeasibleInterval
{
    double lower = 0.0;
    double upper = 0.0;

    bool contains(double f) const noexcept { return f > lower && f < upper; }
};

/// (b*p - q)/b for a bet paying b per unit staked with win probability p.
double kelly_binary(double p, double b);

/// Two-point core only: f = mu/(sigma^2 - mu^2), growth evaluated exactly.
KellyPoint kelly_simple(const GaussianCore& core);

FeasibleInterval feasible_interval(const DiscreteModel& model);

/// g(f). Throws DomainViolation if any 1 + f*v_i <= 0.
double growth_at(const DiscreteModel& model, double f);
double growth_slope(const DiscreteModel& model, double f);
double growth_curvature(const DiscreteModel& model, double f);

/// Both-tails closed-form approximation for the optimal fraction and growth.
KellyPoint kelly_fat_closed(const GaussianCore& core, const TailSpec& tails);

/// Loss-tail-only closed form, written exactly as the one-sided result:
///   f = (mu/sigma^2) (1 - a ETL/(mu(1-a))) / (1 + a ETL^2/(sigma^2 (1-a)))
KellyPoint kelly_one_sided_closed(const GaussianCore& core, double alpha, double etl);

/**
 * Exact maximizer of g over the feasible interval.
 *
 * Bisection on g' (strictly decreasing) bracketed just inside the domain
 * edges, then Newton polish until |g'| < 1e-12 or no further progress.
 *
 * @throws kelly::Error NoInteriorMaximum when all outcomes share a sign.
 */
KellyPoint kelly_fat_exact(const DiscreteModel& model);

enum class SweepMode
{
    FixedCenter,  ///< hold the core (mu, sigma) fixed, vary ETL
    Recalibrated  ///< hold observed moments (mu0, sigma0) fixed, recalibrate the core per ETL
};

struct SweepRow
{
    double etl = 0.0;
    bool feasible = false;
    std::string error;  ///< error code when !feasible
    GaussianCore core{};
    double f_closed = 0.0;
    double f_exact = 0.0;
    double g_closed = 0.0;
    double g_exact = 0.0;
    double g_exact_at_f_closed = 0.0;  ///< NaN when f_closed lies outside the feasible interval
};

/**
 * Closed-form and exact Kelly points along an ETL grid.
 *
 * In FixedCenter mode (mu, sigma) is the core; in Recalibrated mode it is
 * the observed (mu0, sigma0) of the full distribution. A grid point with
 * ETL = 0 is treated as "no tail event". Infeasible calibrations are
 * marked per row rather than thrown.
 */
std::vector<SweepRow> etl_sweep(double mu, double sigma, double alpha, std::span<const double> etl_grid,
                                SweepMode mode = SweepMode::FixedCenter);

/// 2 alpha ETL / (mu (1 - alpha)). Requires mu > 0.
double tail_impact(const GaussianCore& core, const TailSpec& tails);

struct ArithmeticGrowth
{
    double mean_return = 0.0;  ///< (1-a-b) mu - a ETL + b ETW
    double log_drift = 0.0;    ///< mu - sigma^2/2, the f = 1 no-tail log drift
};

ArithmeticGrowth arithmetic_growth(const GaussianCore& core, const TailSpec& tails = {});

/// Optimal no-tail growth g*(mu, sigma) = -0.5 ln(1 - mu^2/sigma^2).
double optimal_growth_no_tail(double mu, double sigma);

struct GrowthSensitivity
{
    double dg_dsigma = 0.0;
    double d2g_dsigma2 = 0.0;
    double z_g = 0.0;  ///< -dg*/dsigma + 2 sigma d2g*/dsigma2
};

/// Central finite differences of an arbitrary g*(sigma) at sigma.
GrowthSensitivity sensitivity_of(const std::function<double(double)>& g_of_sigma, double sigma,
                                 double relative_step = 1e-4);

/// Sensitivity of the exact no-tail optimal growth to the core volatility.
GrowthSensitivity growth_sensitivity(const GaussianCore& core, double relative_step = 1e-4);

struct SkewConvexity
{
    double skew = 0.0;
    double convexity = 0.0;
};

/// Growth skew/convexity from the volatility skew/convexity: both scale by Z_g.
SkewConvexity map_skew_convexity(double z_g, double volatility_skew, double volatility_convexity);

struct ScenarioLeg
{
    int count = 0;
    double outcome = 0.0;  ///< payoff per unit staked, e.g. +1, -1, -3
};

struct ScenarioResult
{
    double wealth_multiple = 1.0;
    double per_bet_growth = 0.0;  ///< ln(multiple) / total count
};

/// prod (1 + f * outcome_i)^count_i. Throws DomainViolation on a ruin factor.
ScenarioResult scenario_growth(std::span<const ScenarioLeg> legs, double f);

enum class TailConvention
{
    Replacement,  ///< tail bet replaces one ordinary bet, 100 bets total
    Append        ///< tail bets are added on top of the 100 ordinary bets
};

struct NamedScenario
{
    std::string name;
    std::vector<ScenarioLeg> legs;
};

/// Base run of 60 wins / 40 losses plus tail-loss, tail-win and both-tails
/// variants with 3x payoffs.
std::vector<NamedScenario> brown_scenarios(TailConvention convention = TailConvention::Replacement);

} // namespace kelly
