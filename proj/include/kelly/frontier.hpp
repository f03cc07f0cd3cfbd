/**
 * @file frontier.hpp
 * @brief Drawdown protection cost (DDVA) and the drawdown-adjusted frontier.
 *
 * An investor who will not accept a loss beyond D buys a put struck at
 * 1 - D on terminal wealth after N periods. Its cost is priced actuarially
 * under the model's own (real-world) distribution:
 *
 *   cost = E[ max((1 - D) - W_N, 0) ],   W_N = prod_t (1 + f * y_t)
 *
 * There is no risk-neutral calibration in a discrete toy model, so this is
 * an expected-shortfall price, not an arbitrage-free one. The floor is on
 * terminal wealth; a running-minimum barrier is a Monte Carlo-only
 * variant available through the simulate module.
 */
#pragma once

#include "kelly/model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace kelly
{

struct DdvaQuote
{
    double drawdown_level = 0.0;
    std::size_t horizon = 0;
    double cost = 0.0;
    double standard_error = 0.0;  ///< 0 for exact enumeration
    bool enumerated = true;
};

/// Largest multinomial state count priced by exact enumeration.
inline constexpr double enumeration_limit = 2e5;

/// C(N + k - 1, k - 1): number of outcome-count vectors for k outcomes over N periods.
double multinomial_state_count(std::size_t outcomes, std::size_t horizon);

/// Exact enumeration when the state count is within enumeration_limit,
/// otherwise seeded Monte Carlo with `mc_paths` paths.
DdvaQuote ddva(const DiscreteModel& model, double leverage, double drawdown_level, std::size_t horizon,
               std::uint64_t seed = 0, std::size_t mc_paths = 1'000'000, unsigned workers = 0);

DdvaQuote ddva_enumerated(const DiscreteModel& model, double leverage, double drawdown_level, std::size_t horizon);

DdvaQuote ddva_monte_carlo(const DiscreteModel& model, double leverage, double drawdown_level, std::size_t horizon,
                           std::size_t n_paths, std::uint64_t seed, unsigned workers = 0);

struct FrontierPoint
{
    double leverage = 0.0;
    double volatility = 0.0;       ///< leverage * sigma0
    double gross_return = 0.0;     ///< leverage * mu0
    double protection_cost = 0.0;  ///< DDVA cost / N
    double financing_cost = 0.0;   ///< spread * max(leverage - 1, 0)
    double net_return = 0.0;
    bool feasible = true;
};

/**
 * One frontier curve. The per-period model is built with tails and a core
 * calibrated so that its mean and volatility are (mu0, sigma0); each grid
 * leverage scales outcomes, prices the protection and charges financing.
 * Rows whose leverage ruins some outcome are marked infeasible.
 */
std::vector<FrontierPoint> frontier_curve(double mu0, double sigma0, const std::optional<TailSpec>& tails,
                                          double drawdown_level, std::size_t horizon, double spread,
                                          std::span<const double> leverage_grid);

/// Defaults chosen so the three comparison curves are well inside the
/// enumeration limit and resolve above the lattice kinks of the pdf.
struct FrontierInputs
{
    double mu0 = 0.01;
    double sigma0 = 0.06;
    double alpha = 0.02;
    double etl = 0.15;
    double drawdown_level = 0.10;
    std::size_t horizon = 52;
    double spread = 0.0;
    std::vector<double> leverage_grid{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
};

struct FrontierSet
{
    std::vector<FrontierPoint> no_tail;
    std::vector<FrontierPoint> symmetric;  ///< beta = alpha, ETW = ETL: convexity only
    std::vector<FrontierPoint> skewed;     ///< loss tail only: convexity plus skew
};

FrontierSet comparison_frontiers(const FrontierInputs& inputs);

struct ConcavityReport
{
    bool concave = true;
    double max_second_difference = 0.0;
};

/// Discrete second differences of net return against volatility (spacing-aware;
/// equals a - 2b + c on a uniform grid). Requires >= 3 points with strictly
/// increasing volatility.
ConcavityReport frontier_concavity_check(std::span<const FrontierPoint> points, double tolerance = 1e-10);

} // namespace kelly
