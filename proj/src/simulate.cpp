#include "kelly/simulate.hpp"

#include "kelly/error.hpp"
#include "kelly/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>
#include <thread>

namespace kelly
{

namespace
{

constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<double> log_factors(const DiscreteModel& model, double f)
{
    std::vector<double> out;
    out.reserve(model.size());
    for (const auto& o : model.outcomes()) {
        const double factor = 1.0 + f * o.value;
        if (!(factor > 0.0)) {
            std::ostringstream os;
            os << "leverage " << f << " ruins capital on outcome " << o.value;
            throw Error(ErrorCode::InfeasibleLeverage, os.str());
        }
        out.push_back(std::log1p(f * o.value));
    }
    return out;
}

void check_config(const SimConfig& cfg)
{
    if (cfg.n_paths == 0 || cfg.n_periods == 0)
        throw Error(ErrorCode::InvalidParameter, "n_paths and n_periods must be at least 1");
    if (!std::isfinite(cfg.leverage))
        throw Error(ErrorCode::InvalidParameter, "leverage must be finite");
    if (!(cfg.ruin_floor > 0.0 && cfg.ruin_floor < 1.0))
        throw Error(ErrorCode::InvalidParameter, "ruin floor must lie in (0, 1)");
}

struct PathOutcome
{
    double log_terminal = 0.0;
    double max_drawdown = 0.0;
    bool ruined = false;
};

PathOutcome run_path(const OutcomeSampler& sampler, std::span<const double> logs, const SimConfig& cfg,
                     std::size_t path_index, double log_floor)
{
    PathRng rng(cfg.seed, path_index);
    PathOutcome out;
    double level = 0.0;
    double peak = 0.0;
    for (std::size_t t = 0; t < cfg.n_periods; ++t) {
        level += logs[sampler.sample(rng.uniform())];
        if (level > peak)
            peak = level;
        else
            out.max_drawdown = std::max(out.max_drawdown, -std::expm1(level - peak));
        if (level <= log_floor)
            out.ruined = true;
    }
    out.log_terminal = level;
    return out;
}

constexpr std::size_t block_size = 256;

} // namespace

PathRng::PathRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix64(seed ^ mix64(stream + golden_gamma)))
{
}

std::uint64_t PathRng::next() noexcept
{
    return mix64(key_ + (++counter_) * golden_gamma);
}

OutcomeSampler::OutcomeSampler(const DiscreteModel& model)
{
    double acc = 0.0;
    for (const auto& o : model.outcomes()) {
        acc += o.probability;
        cumulative_.push_back(acc);
    }
    cumulative_.back() = 1.0;
}

std::size_t OutcomeSampler::sample(double u) const noexcept
{
    std::size_t i = 0;
    while (i + 1 < cumulative_.size() && u >= cumulative_[i])
        ++i;
    return i;
}

unsigned resolve_workers(unsigned requested)
{
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("KELLY_TAILS_THREADS")) {
        try {
            const long n = std::stol(env);
            if (n > 0)
                return static_cast<unsigned>(n);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail
{

void parallel_blocks(std::size_t n_blocks, unsigned workers, const std::function<void(std::size_t)>& fn)
{
    const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), n_blocks));
    if (n_threads <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b)
            fn(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t b = next++; b < n_blocks; b = next++)
                fn(b);
        });
    }
}

} // namespace detail

PathStats simulate_paths(const DiscreteModel& model, const SimConfig& cfg)
{
    check_config(cfg);
    const std::vector<double> logs = log_factors(model, cfg.leverage);
    const OutcomeSampler sampler(model);
    const double log_floor = std::log(cfg.ruin_floor);

    std::vector<PathOutcome> paths(cfg.n_paths);
    const std::size_t n_blocks = (cfg.n_paths + block_size - 1) / block_size;
    detail::parallel_blocks(n_blocks, cfg.workers, [&](std::size_t b) {
        const std::size_t end = std::min(cfg.n_paths, (b + 1) * block_size);
        for (std::size_t i = b * block_size; i < end; ++i)
            paths[i] = run_path(sampler, logs, cfg, i, log_floor);
    });

    const double n = static_cast<double>(cfg.n_paths);
    const double periods = static_cast<double>(cfg.n_periods);
    PathStats stats;
    stats.n_paths = cfg.n_paths;
    stats.n_periods = cfg.n_periods;

    CompensatedSum growth_sum;
    std::size_t ruined = 0;
    double max_log = -std::numeric_limits<double>::infinity();
    for (const auto& p : paths) {
        growth_sum.add(p.log_terminal / periods);
        ruined += p.ruined ? 1 : 0;
        max_log = std::max(max_log, p.log_terminal);
    }
    stats.mean_log_growth = growth_sum.value() / n;
    stats.ruin_fraction = static_cast<double>(ruined) / n;

    CompensatedSum growth_dev, scaled_sum;
    for (const auto& p : paths) {
        const double d = p.log_terminal / periods - stats.mean_log_growth;
        growth_dev.add(d * d);
        scaled_sum.add(std::exp(p.log_terminal - max_log));
    }
    const double scaled_mean = scaled_sum.value() / n;
    CompensatedSum scaled_dev;
    for (const auto& p : paths) {
        const double d = std::exp(p.log_terminal - max_log) - scaled_mean;
        scaled_dev.add(d * d);
    }
    if (cfg.n_paths > 1) {
        stats.se_log_growth = std::sqrt(growth_dev.value() / (n - 1.0) / n);
        stats.se_mean_terminal = std::exp(max_log) * std::sqrt(scaled_dev.value() / (n - 1.0) / n);
    }
    stats.mean_terminal = std::exp(max_log + std::log(scaled_mean));

    std::vector<double> values(cfg.n_paths);
    std::transform(paths.begin(), paths.end(), values.begin(), [](const PathOutcome& p) { return p.log_terminal; });
    std::sort(values.begin(), values.end());
    stats.median_terminal = std::exp(quantile_sorted(values, 0.5));

    std::transform(paths.begin(), paths.end(), values.begin(), [](const PathOutcome& p) { return p.max_drawdown; });
    std::sort(values.begin(), values.end());
    for (const double q : drawdown_quantile_levels)
        stats.max_drawdown_quantiles[q] = quantile_sorted(values, q);
    return stats;
}

std::map<double, double> drawdown_distribution(const DiscreteModel& model, const SimConfig& cfg)
{
    return simulate_paths(model, cfg).max_drawdown_quantiles;
}

std::vector<double> simulate_log_wealth_path(const DiscreteModel& model, const SimConfig& cfg,
                                             std::size_t path_index)
{
    check_config(cfg);
    const std::vector<double> logs = log_factors(model, cfg.leverage);
    const OutcomeSampler sampler(model);
    PathRng rng(cfg.seed, path_index);
    std::vector<double> out;
    out.reserve(cfg.n_periods + 1);
    double level = 0.0;
    out.push_back(level);
    for (std::size_t t = 0; t < cfg.n_periods; ++t) {
        level += logs[sampler.sample(rng.uniform())];
        out.push_back(level);
    }
    return out;
}

double max_drawdown_from_log_wealth(std::span<const double> log_wealth)
{
    double worst = 0.0;
    double peak = log_wealth.empty() ? 0.0 : log_wealth.front();
    for (const double level : log_wealth) {
        if (level > peak)
            peak = level;
        else
            worst = std::max(worst, -std::expm1(level - peak));
    }
    return worst;
}

double max_drawdown(std::span<const double> wealth)
{
    double worst = 0.0;
    double peak = wealth.empty() ? 0.0 : wealth.front();
    for (const double w : wealth) {
        peak = std::max(peak, w);
        if (peak > 0.0)
            worst = std::max(worst, 1.0 - w / peak);
    }
    return worst;
}

std::vector<CrossoverRow> crossover_diagnostic(const DiscreteModel& model, double leverage,
                                               std::span<const std::size_t> n_periods_grid, std::size_t n_paths,
                                               std::uint64_t seed, unsigned workers)
{
    std::vector<CrossoverRow> rows;
    for (const std::size_t periods : n_periods_grid) {
        SimConfig cfg;
        cfg.seed = seed;
        cfg.n_paths = n_paths;
        cfg.n_periods = periods;
        cfg.leverage = leverage;
        cfg.workers = workers;
        const PathStats s = simulate_paths(model, cfg);
        rows.push_back({periods, s.mean_terminal, s.median_terminal,
                        std::log(s.mean_terminal) - std::log(s.median_terminal)});
    }
    return rows;
}

} // namespace kelly
