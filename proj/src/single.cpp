#include "kelly/single.hpp"

#include "kelly/error.hpp"
#include "kelly/stats.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace kelly
{

namespace
{

constexpr double infinity = std::numeric_limits<double>::infinity();

void require_feasible(const DiscreteModel& model, double f)
{
    for (const auto& o : model.outcomes()) {
        if (!(1.0 + f * o.value > 0.0)) {
            std::ostringstream os;
            os << "leverage " << f << " ruins capital on outcome " << o.value;
            throw Error(ErrorCode::DomainViolation, os.str());
        }
    }
}

} // namespace

double kelly_binary(double p, double b)
{
    if (!(p > 0.0 && p < 1.0))
        throw Error(ErrorCode::InvalidParameter, "win probability must lie in (0, 1)");
    if (!(b > 0.0))
        throw Error(ErrorCode::InvalidParameter, "payout must be positive");
    return (b * p - (1.0 - p)) / b;
}

KellyPoint kelly_simple(const GaussianCore& core)
{
    validate(core);
    const double f = core.mu / (core.sigma * core.sigma - core.mu * core.mu);
    const double g = 0.5 * std::log1p(f * (core.mu + core.sigma)) + 0.5 * std::log1p(f * (core.mu - core.sigma));
    return {f, g};
}

FeasibleInterval feasible_interval(const DiscreteModel& model)
{
    const double hi = model.max_value();
    const double lo = model.min_value();
    return {hi > 0.0 ? -1.0 / hi : -infinity, lo < 0.0 ? -1.0 / lo : infinity};
}

double growth_at(const DiscreteModel& model, double f)
{
    require_feasible(model, f);
    CompensatedSum g;
    for (const auto& o : model.outcomes())
        g.add(o.probability * std::log1p(f * o.value));
    return g.value();
}

double growth_slope(const DiscreteModel& model, double f)
{
    require_feasible(model, f);
    CompensatedSum s;
    for (const auto& o : model.outcomes())
        s.add(o.probability * o.value / (1.0 + f * o.value));
    return s.value();
}

double growth_curvature(const DiscreteModel& model, double f)
{
    require_feasible(model, f);
    CompensatedSum s;
    for (const auto& o : model.outcomes()) {
        const double r = o.value / (1.0 + f * o.value);
        s.add(-o.probability * r * r);
    }
    return s.value();
}

KellyPoint kelly_fat_closed(const GaussianCore& core, const TailSpec& t)
{
    validate(core);
    validate(t);
    const double core_mass = 1.0 - t.alpha - t.beta;
    const double s2 = core.sigma * core.sigma;
    // mu * (1 + (b ETW - a ETL)/(mu c)) written without dividing by mu.
    const double skewed_edge = core.mu + (t.beta * t.etw - t.alpha * t.etl) / core_mass;
    const double convexity = 1.0 + (t.beta * t.etw * t.etw + t.alpha * t.etl * t.etl) / (s2 * core_mass);
    const double f = skewed_edge / s2 / convexity;
    const double g = 0.5 * core_mass * skewed_edge * skewed_edge / (s2 * convexity);
    return {f, g};
}

KellyPoint kelly_one_sided_closed(const GaussianCore& core, double alpha, double etl)
{
    validate(core);
    validate(TailSpec{alpha, etl, 0.0, 0.0});
    if (core.mu == 0.0)
        throw Error(ErrorCode::InvalidParameter, "one-sided closed form needs mu != 0");
    const double mu = core.mu;
    const double s2 = core.sigma * core.sigma;
    const double impact = 1.0 - alpha * etl / (mu * (1.0 - alpha));
    const double convexity = 1.0 + alpha * etl * etl / (s2 * (1.0 - alpha));
    const double f = (mu / s2) * impact / convexity;
    const double g = mu * mu / (2.0 * s2) * (1.0 - alpha) * impact * impact / convexity;
    return {f, g};
}

KellyPoint kelly_fat_exact(const DiscreteModel& model)
{
    const FeasibleInterval domain = feasible_interval(model);
    if (!std::isfinite(domain.lower) || !std::isfinite(domain.upper))
        throw Error(ErrorCode::NoInteriorMaximum, "growth is monotone: all outcomes share a sign");

    // g' -> +inf at the lower edge and -inf at the upper edge.
    const double width = domain.upper - domain.lower;
    double a = domain.lower;
    double b = domain.upper;
    for (double eps : {1e-9, 1e-12, 1e-15}) {
        const double lo = domain.lower + eps * width;
        const double hi = domain.upper - eps * width;
        if (growth_slope(model, lo) > 0.0 && growth_slope(model, hi) < 0.0) {
            a = lo;
            b = hi;
            break;
        }
    }
    if (a == domain.lower) {
        a = std::nextafter(domain.lower, domain.upper);
        b = std::nextafter(domain.upper, domain.lower);
    }

    for (int iter = 0; iter < 2000; ++iter) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b)
            break;
        if (growth_slope(model, mid) > 0.0)
            a = mid;
        else
            b = mid;
    }
    double f = std::abs(growth_slope(model, a)) < std::abs(growth_slope(model, b)) ? a : b;

    // Newton polish: accept a step only if it lowers |g'| and stays feasible.
    for (int iter = 0; iter < 20; ++iter) {
        const double slope = growth_slope(model, f);
        if (std::abs(slope) < 1e-15)
            break;
        const double next = f - slope / growth_curvature(model, f);
        if (!domain.contains(next) || std::abs(growth_slope(model, next)) >= std::abs(slope))
            break;
        f = next;
    }
    return {f, growth_at(model, f)};
}

std::vector<SweepRow> etl_sweep(double mu, double sigma, double alpha, std::span<const double> etl_grid,
                                SweepMode mode)
{
    std::vector<SweepRow> rows;
    rows.reserve(etl_grid.size());
    for (const double etl : etl_grid) {
        SweepRow row;
        row.etl = etl;
        try {
            const TailSpec tails{etl > 0.0 ? alpha : 0.0, etl, 0.0, 0.0};
            row.core = mode == SweepMode::FixedCenter ? GaussianCore{mu, sigma}
                                                      : calibrate_center(mu, sigma, tails.alpha, tails.etl);
            const DiscreteModel model = build_discrete_model(row.core, tails);
            const KellyPoint closed = kelly_fat_closed(row.core, tails);
            const KellyPoint exact = kelly_fat_exact(model);
            row.f_closed = closed.fraction;
            row.g_closed = closed.growth;
            row.f_exact = exact.fraction;
            row.g_exact = exact.growth;
            row.g_exact_at_f_closed = feasible_interval(model).contains(closed.fraction)
                                          ? growth_at(model, closed.fraction)
                                          : std::numeric_limits<double>::quiet_NaN();
            row.feasible = true;
        } catch (const Error& e) {
            row.feasible = false;
            row.error = std::string(to_string(e.code()));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

double tail_impact(const GaussianCore& core, const TailSpec& t)
{
    validate(t);
    if (!(core.mu > 0.0))
        throw Error(ErrorCode::InvalidParameter, "tail impact is defined for mu > 0");
    return 2.0 * t.alpha * t.etl / (core.mu * (1.0 - t.alpha));
}

ArithmeticGrowth arithmetic_growth(const GaussianCore& core, const TailSpec& t)
{
    validate(core);
    validate(t);
    return {(1.0 - t.alpha - t.beta) * core.mu - t.alpha * t.etl + t.beta * t.etw,
            core.mu - 0.5 * core.sigma * core.sigma};
}

double optimal_growth_no_tail(double mu, double sigma)
{
    validate(GaussianCore{mu, sigma});
    const double ratio = mu / sigma;
    return -0.5 * std::log1p(-ratio * ratio);
}

GrowthSensitivity sensitivity_of(const std::function<double(double)>& g_of_sigma, double sigma,
                                 double relative_step)
{
    if (!(sigma > 0.0) || !(relative_step > 0.0))
        throw Error(ErrorCode::InvalidParameter, "sigma and step must be positive");
    const double h = relative_step * sigma;
    const double up = g_of_sigma(sigma + h);
    const double mid = g_of_sigma(sigma);
    const double down = g_of_sigma(sigma - h);
    GrowthSensitivity s;
    s.dg_dsigma = (up - down) / (2.0 * h);
    s.d2g_dsigma2 = (up - 2.0 * mid + down) / (h * h);
    s.z_g = -s.dg_dsigma + 2.0 * sigma * s.d2g_dsigma2;
    return s;
}

GrowthSensitivity growth_sensitivity(const GaussianCore& core, double relative_step)
{
    validate(core);
    if (core.sigma * (1.0 - relative_step) <= std::abs(core.mu))
        throw Error(ErrorCode::InvalidParameter, "finite-difference stencil leaves the sigma > |mu| region");
    const double mu = core.mu;
    return sensitivity_of([mu](double s) { return optimal_growth_no_tail(mu, s); }, core.sigma, relative_step);
}

SkewConvexity map_skew_convexity(double z_g, double volatility_skew, double volatility_convexity)
{
    return {z_g * volatility_skew, z_g * volatility_convexity};
}

ScenarioResult scenario_growth(std::span<const ScenarioLeg> legs, double f)
{
    CompensatedSum log_wealth;
    long total = 0;
    for (const auto& leg : legs) {
        if (leg.count < 0)
            throw Error(ErrorCode::InvalidParameter, "scenario counts must be non-negative");
        if (leg.count == 0)
            continue;
        const double factor = 1.0 + f * leg.outcome;
        if (!(factor > 0.0)) {
            std::ostringstream os;
            os << "bet fraction " << f << " ruins capital on outcome " << leg.outcome;
            throw Error(ErrorCode::DomainViolation, os.str());
        }
        log_wealth.add(leg.count * std::log(factor));
        total += leg.count;
    }
    ScenarioResult r;
    r.wealth_multiple = std::exp(log_wealth.value());
    r.per_bet_growth = total > 0 ? log_wealth.value() / static_cast<double>(total) : 0.0;
    return r;
}

std::vector<NamedScenario> brown_scenarios(TailConvention convention)
{
    if (convention == TailConvention::Replacement) {
        return {
            {"base", {{60, 1.0}, {40, -1.0}}},
            {"tail_loss", {{60, 1.0}, {39, -1.0}, {1, -3.0}}},
            {"tail_win", {{59, 1.0}, {1, 3.0}, {40, -1.0}}},
            {"both_tails", {{59, 1.0}, {1, 3.0}, {39, -1.0}, {1, -3.0}}},
        };
    }
    return {
        {"base", {{60, 1.0}, {40, -1.0}}},
        {"tail_loss", {{60, 1.0}, {40, -1.0}, {1, -3.0}}},
        {"tail_win", {{60, 1.0}, {1, 3.0}, {40, -1.0}}},
        {"both_tails", {{60, 1.0}, {1, 3.0}, {40, -1.0}, {1, -3.0}}},
    };
}

} // namespace kelly
