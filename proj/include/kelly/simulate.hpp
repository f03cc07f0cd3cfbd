/**
 * @file simulate.hpp
 * @brief Seeded Monte Carlo of constant-fraction multiplicative wealth paths.
 *
 * Every path owns a counter-based random stream derived from
 * (seed, path index), and per-path results are reduced in path order, so
 * results are bit-identical for any worker count.
 */
#pragma once

#include "kelly/model.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

namespace kelly
{

/// Counter-based generator: output k of stream (seed, stream) is a
/// splitmix64 finalizer applied to key + k * golden-gamma.
class PathRng
{
public:
    PathRng(std::uint64_t seed, std::uint64_t stream) noexcept;

    std::uint64_t next() noexcept;
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Inverse-CDF sampler over a DiscreteModel's outcomes.
class OutcomeSampler
{
public:
    explicit OutcomeSampler(const DiscreteModel& model);
    std::size_t sample(double u) const noexcept;
    std::size_t size() const noexcept { return cumulative_.size(); }

private:
    std::vector<double> cumulative_;
};

struct SimConfig
{
    std::uint64_t seed = 0;
    std::size_t n_paths = 1000;
    std::size_t n_periods = 250;
    double leverage = 0.0;
    double ruin_floor = 0.01;  ///< fraction of initial wealth
    unsigned workers = 0;      ///< 0 = KELLY_TAILS_THREADS or hardware concurrency
};

inline const std::vector<double> drawdown_quantile_levels{0.5, 0.9, 0.95, 0.99};

struct PathStats
{
    std::size_t n_paths = 0;
    std::size_t n_periods = 0;
    double mean_log_growth = 0.0;  ///< average of ln(W_N)/N
    double se_log_growth = 0.0;
    double median_terminal = 0.0;
    double mean_terminal = 0.0;
    double se_mean_terminal = 0.0;
    std::map<double, double> max_drawdown_quantiles;
    double ruin_fraction = 0.0;
};

/// Worker count: explicit request, else KELLY_TAILS_THREADS (0 = auto), else
/// hardware concurrency.
unsigned resolve_workers(unsigned requested);

/// Throws InfeasibleLeverage when some outcome makes 1 + f*v <= 0, and
/// InvalidParameter on empty path/period counts.
PathStats simulate_paths(const DiscreteModel& model, const SimConfig& cfg);

std::map<double, double> drawdown_distribution(const DiscreteModel& model, const SimConfig& cfg);

/// Log-wealth trajectory of one path (length n_periods + 1, starting at 0),
/// drawn from the same stream simulate_paths uses for that path index.
std::vector<double> simulate_log_wealth_path(const DiscreteModel& model, const SimConfig& cfg,
                                             std::size_t path_index);

/// Maximum peak-to-trough decline, as a fraction of the peak.
double max_drawdown_from_log_wealth(std::span<const double> log_wealth);
double max_drawdown(std::span<const double> wealth);

struct CrossoverRow
{
    std::size_t n_periods = 0;
    double mean_terminal = 0.0;
    double median_terminal = 0.0;
    double gap = 0.0;  ///< ln(mean) - ln(median)
};

/// Mean vs median terminal wealth over a horizon grid (same seed per row,
/// so longer horizons extend the shorter paths).
std::vector<CrossoverRow> crossover_diagnostic(const DiscreteModel& model, double leverage,
                                               std::span<const std::size_t> n_periods_grid, std::size_t n_paths,
                                               std::uint64_t seed, unsigned workers = 0);

namespace detail
{

/// Runs fn(block) for block in [0, n_blocks) on up to `workers` threads.
/// Blocks are claimed dynamically; callers must write results by block index.
void parallel_blocks(std::size_t n_blocks, unsigned workers, const std::function<void(std::size_t)>& fn);

} // namespace detail

} // namespace kelly
