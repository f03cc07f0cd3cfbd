#include "kelly/frontier.hpp"

#include "kelly/error.hpp"
#include "kelly/simulate.hpp"
#include "kelly/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace kelly
{

namespace
{

void check_quote_inputs(const DiscreteModel& model, double f, double drawdown_level, std::size_t horizon)
{
    if (!(drawdown_level > 0.0 && drawdown_level < 1.0))
        throw Error(ErrorCode::InvalidParameter, "drawdown level must lie in (0, 1)");
    if (horizon == 0)
        throw Error(ErrorCode::InvalidParameter, "horizon must be at least one period");
    if (!std::isfinite(f))
        throw Error(ErrorCode::InvalidParameter, "leverage must be finite");
    for (const auto& o : model.outcomes()) {
        if (!(1.0 + f * o.value > 0.0)) {
            std::ostringstream os;
            os << "leverage " << f << " ruins capital on outcome " << o.value;
            throw Error(ErrorCode::InfeasibleLeverage, os.str());
        }
    }
}

struct Enumerator
{
    std::size_t horizon;
    double strike;
    std::vector<double> log_p;
    std::vector<double> log_factor;
    std::vector<double> log_factorial;
    CompensatedSum cost;

    void run(std::size_t i, std::size_t remaining, double log_prob, double log_wealth)
    {
        const std::size_t last = log_p.size() - 1;
        if (i == last) {
            const double n = static_cast<double>(remaining);
            const double lp = log_factorial[horizon] + log_prob - log_factorial[remaining] + n * log_p[i];
            const double lw = log_wealth + n * log_factor[i];
            const double payoff = strike - std::exp(lw);
            if (payoff > 0.0)
                cost.add(std::exp(lp) * payoff);
            return;
        }
        for (std::size_t n = 0; n <= remaining; ++n) {
            const double dn = static_cast<double>(n);
            run(i + 1, remaining - n, log_prob - log_factorial[n] + dn * log_p[i], log_wealth + dn * log_factor[i]);
        }
    }
};

} // namespace

double multinomial_state_count(std::size_t outcomes, std::size_t horizon)
{
    if (outcomes == 0)
        return 0.0;
    // C(N + k - 1, k - 1) via lgamma to avoid overflow.
    const double n = static_cast<double>(horizon);
    const double k = static_cast<double>(outcomes);
    return std::round(std::exp(std::lgamma(n + k) - std::lgamma(k) - std::lgamma(n + 1.0)));
}

DdvaQuote ddva_enumerated(const DiscreteModel& model, double f, double drawdown_level, std::size_t horizon)
{
    check_quote_inputs(model, f, drawdown_level, horizon);
    if (multinomial_state_count(model.size(), horizon) > enumeration_limit)
        throw Error(ErrorCode::InvalidParameter, "too many outcome-count states for exact enumeration");

    Enumerator e{horizon, 1.0 - drawdown_level, {}, {}, {}, {}};
    for (const auto& o : model.outcomes()) {
        e.log_p.push_back(std::log(o.probability));
        e.log_factor.push_back(std::log1p(f * o.value));
    }
    e.log_factorial.resize(horizon + 1);
    for (std::size_t n = 0; n <= horizon; ++n)
        e.log_factorial[n] = std::lgamma(static_cast<double>(n) + 1.0);
    e.run(0, horizon, 0.0, 0.0);

    DdvaQuote q;
    q.drawdown_level = drawdown_level;
    q.horizon = horizon;
    q.cost = std::clamp(e.cost.value(), 0.0, 1.0);
    q.enumerated = true;
    return q;
}

DdvaQuote ddva_monte_carlo(const DiscreteModel& model, double f, double drawdown_level, std::size_t horizon,
                           std::size_t n_paths, std::uint64_t seed, unsigned workers)
{
    check_quote_inputs(model, f, drawdown_level, horizon);
    if (n_paths < 2)
        throw Error(ErrorCode::InvalidParameter, "Monte Carlo pricing needs at least two paths");

    std::vector<double> logs;
    for (const auto& o : model.outcomes())
        logs.push_back(std::log1p(f * o.value));
    const OutcomeSampler sampler(model);
    const double strike = 1.0 - drawdown_level;

    constexpr std::size_t block = 4096;
    const std::size_t n_blocks = (n_paths + block - 1) / block;
    std::vector<CompensatedSum> sums(n_blocks), squares(n_blocks);
    detail::parallel_blocks(n_blocks, workers, [&](std::size_t b) {
        const std::size_t end = std::min(n_paths, (b + 1) * block);
        for (std::size_t i = b * block; i < end; ++i) {
            PathRng rng(seed, i);
            double level = 0.0;
            for (std::size_t t = 0; t < horizon; ++t)
                level += logs[sampler.sample(rng.uniform())];
            const double payoff = std::max(strike - std::exp(level), 0.0);
            sums[b].add(payoff);
            squares[b].add(payoff * payoff);
        }
    });
    CompensatedSum total, total_sq;
    for (std::size_t b = 0; b < n_blocks; ++b) {
        total.add(sums[b]);
        total_sq.add(squares[b]);
    }
    const double n = static_cast<double>(n_paths);
    const double mean = total.value() / n;
    const double variance = std::max(0.0, (total_sq.value() - n * mean * mean) / (n - 1.0));

    DdvaQuote q;
    q.drawdown_level = drawdown_level;
    q.horizon = horizon;
    q.cost = mean;
    q.standard_error = std::sqrt(variance / n);
    q.enumerated = false;
    return q;
}

DdvaQuote ddva(const DiscreteModel& model, double f, double drawdown_level, std::size_t horizon, std::uint64_t seed,
               std::size_t mc_paths, unsigned workers)
{
    if (multinomial_state_count(model.size(), horizon) <= enumeration_limit)
        return ddva_enumerated(model, f, drawdown_level, horizon);
    return ddva_monte_carlo(model, f, drawdown_level, horizon, mc_paths, seed, workers);
}

std::vector<FrontierPoint> frontier_curve(double mu0, double sigma0, const std::optional<TailSpec>& tails,
                                          double drawdown_level, std::size_t horizon, double spread,
                                          std::span<const double> leverage_grid)
{
    if (!(spread >= 0.0))
        throw Error(ErrorCode::InvalidParameter, "financing spread must be non-negative");
    const bool has_tails = tails.has_value() && !tails->empty();
    const TailSpec t = has_tails ? *tails : TailSpec{};
    const GaussianCore core = has_tails ? calibrate_center(mu0, sigma0, t) : GaussianCore{mu0, sigma0};
    const DiscreteModel model = build_discrete_model(core, t);

    std::vector<FrontierPoint> points;
    points.reserve(leverage_grid.size());
    for (const double lev : leverage_grid) {
        FrontierPoint p;
        p.leverage = lev;
        p.volatility = lev * sigma0;
        p.gross_return = lev * mu0;
        p.financing_cost = spread * std::max(lev - 1.0, 0.0);
        try {
            p.protection_cost = ddva(model, lev, drawdown_level, horizon).cost / static_cast<double>(horizon);
            p.feasible = true;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::InfeasibleLeverage)
                throw;
            p.feasible = false;
            p.protection_cost = std::numeric_limits<double>::quiet_NaN();
        }
        p.net_return = p.gross_return - p.protection_cost - p.financing_cost;
        points.push_back(p);
    }
    return points;
}

FrontierSet comparison_frontiers(const FrontierInputs& in)
{
    const TailSpec symmetric{in.alpha, in.etl, in.alpha, in.etl};
    const TailSpec skewed{in.alpha, in.etl, 0.0, 0.0};
    FrontierSet set;
    set.no_tail = frontier_curve(in.mu0, in.sigma0, std::nullopt, in.drawdown_level, in.horizon, in.spread,
                                 in.leverage_grid);
    set.symmetric = frontier_curve(in.mu0, in.sigma0, symmetric, in.drawdown_level, in.horizon, in.spread,
                                   in.leverage_grid);
    set.skewed = frontier_curve(in.mu0, in.sigma0, skewed, in.drawdown_level, in.horizon, in.spread,
                                in.leverage_grid);
    return set;
}

ConcavityReport frontier_concavity_check(std::span<const FrontierPoint> points, double tolerance)
{
    if (points.size() < 3)
        throw Error(ErrorCode::InvalidParameter, "concavity check needs at least three points");
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i].volatility > points[i - 1].volatility))
            throw Error(ErrorCode::InvalidParameter, "volatility must be strictly increasing");

    ConcavityReport report;
    report.max_second_difference = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < points.size(); ++i) {
        const auto& a = points[i - 1];
        const auto& b = points[i];
        const auto& c = points[i + 1];
        // Chord value at b minus the curve value, doubled (a - 2b + c when uniform).
        const double w = (c.volatility - b.volatility) / (c.volatility - a.volatility);
        const double chord = w * a.net_return + (1.0 - w) * c.net_return;
        const double second = 2.0 * (chord - b.net_return);
        report.max_second_difference = std::max(report.max_second_difference, second);
    }
    report.concave = report.max_second_difference <= tolerance;
    return report;
}

} // namespace kelly
