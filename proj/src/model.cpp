#include "kelly/model.hpp"

#include "kelly/error.hpp"
#include "kelly/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kelly
{

namespace
{

constexpr double probability_tolerance = 1e-12;

std::string describe(const char* what, double value)
{
    std::ostringstream os;
    os << what << " (got " << value << ")";
    return os.str();
}

} // namespace

DiscreteModel::DiscreteModel(std::vector<Outcome> outcomes)
{
    for (const auto& o : outcomes) {
        if (!std::isfinite(o.value) || !std::isfinite(o.probability))
            throw Error(ErrorCode::InvalidParameter, "outcome values and probabilities must be finite");
        if (o.probability < 0.0 || o.probability > 1.0)
            throw Error(ErrorCode::InvalidParameter, describe("outcome probability must lie in [0, 1]", o.probability));
    }
    std::erase_if(outcomes, [](const Outcome& o) { return o.probability == 0.0; });
    if (outcomes.empty())
        throw Error(ErrorCode::InvalidParameter, "model needs at least one outcome with positive probability");

    std::stable_sort(outcomes.begin(), outcomes.end(),
                     [](const Outcome& a, const Outcome& b) { return a.value < b.value; });
    outcomes_.reserve(outcomes.size());
    for (const auto& o : outcomes) {
        if (!outcomes_.empty() && outcomes_.back().value == o.value)
            outcomes_.back().probability += o.probability;
        else
            outcomes_.push_back(o);
    }

    CompensatedSum total;
    for (const auto& o : outcomes_)
        total.add(o.probability);
    if (std::abs(total.value() - 1.0) > probability_tolerance)
        throw Error(ErrorCode::InvalidParameter, describe("probabilities must sum to 1", total.value()));
}

void validate(const GaussianCore& core)
{
    if (!std::isfinite(core.mu) || !std::isfinite(core.sigma))
        throw Error(ErrorCode::InvalidParameter, "mu and sigma must be finite");
    if (core.sigma <= 0.0)
        throw Error(ErrorCode::InvalidParameter, describe("sigma must be positive", core.sigma));
    if (std::abs(core.mu) >= core.sigma)
        throw Error(ErrorCode::InvalidParameter, describe("sigma must exceed |mu|", core.mu));
}

void validate(const TailSpec& t)
{
    if (!std::isfinite(t.alpha) || !std::isfinite(t.etl) || !std::isfinite(t.beta) || !std::isfinite(t.etw))
        throw Error(ErrorCode::InvalidParameter, "tail parameters must be finite");
    if (t.alpha < 0.0 || t.alpha >= 1.0)
        throw Error(ErrorCode::InvalidParameter, describe("alpha must lie in [0, 1)", t.alpha));
    if (t.beta < 0.0 || t.beta >= 1.0)
        throw Error(ErrorCode::InvalidParameter, describe("beta must lie in [0, 1)", t.beta));
    if (t.alpha + t.beta >= 1.0)
        throw Error(ErrorCode::InvalidParameter, describe("alpha + beta must be below 1", t.alpha + t.beta));
    if (t.etl < 0.0)
        throw Error(ErrorCode::InvalidParameter, describe("ETL must be non-negative", t.etl));
    if (t.etw < 0.0)
        throw Error(ErrorCode::InvalidParameter, describe("ETW must be non-negative", t.etw));
}

DiscreteModel build_discrete_model(const GaussianCore& core, const TailSpec& tails)
{
    validate(core);
    validate(tails);
    const double core_mass = 0.5 * (1.0 - tails.alpha - tails.beta);
    return DiscreteModel({
        {-tails.etl, tails.alpha},
        {core.mu - core.sigma, core_mass},
        {core.mu + core.sigma, core_mass},
        {tails.etw, tails.beta},
    });
}

GaussianCore calibrate_center(double mu0, double sigma0, double alpha, double etl)
{
    validate(TailSpec{alpha, etl, 0.0, 0.0});
    if (!std::isfinite(mu0) || !std::isfinite(sigma0) || sigma0 <= 0.0)
        throw Error(ErrorCode::InvalidParameter, describe("observed sigma0 must be positive", sigma0));

    const double mu = mu0 / (1.0 - alpha) + alpha * etl / (1.0 - alpha);
    const double variance = sigma0 * sigma0 / (1.0 - alpha) - alpha * (etl + mu) * (etl + mu);
    if (!(variance > 0.0))
        throw Error(ErrorCode::CalibrationInfeasible, describe("tail too heavy for the observed variance, sigma^2", variance));
    const GaussianCore core{mu, std::sqrt(variance)};
    if (std::abs(core.mu) >= core.sigma)
        throw Error(ErrorCode::CalibrationInfeasible, "calibrated core violates sigma > |mu|");
    return core;
}

GaussianCore calibrate_center(double mu0, double sigma0, const TailSpec& tails)
{
    if (tails.beta == 0.0)
        return calibrate_center(mu0, sigma0, tails.alpha, tails.etl);

    validate(tails);
    if (!std::isfinite(mu0) || !std::isfinite(sigma0) || sigma0 <= 0.0)
        throw Error(ErrorCode::InvalidParameter, describe("observed sigma0 must be positive", sigma0));

    const double core_mass = 1.0 - tails.alpha - tails.beta;
    const double mu = (mu0 + tails.alpha * tails.etl - tails.beta * tails.etw) / core_mass;
    const double second = sigma0 * sigma0 + mu0 * mu0 - tails.alpha * tails.etl * tails.etl - tails.beta * tails.etw * tails.etw;
    const double variance = second / core_mass - mu * mu;
    if (!(variance > 0.0))
        throw Error(ErrorCode::CalibrationInfeasible, describe("tails too heavy for the observed variance, sigma^2", variance));
    const GaussianCore core{mu, std::sqrt(variance)};
    if (std::abs(core.mu) >= core.sigma)
        throw Error(ErrorCode::CalibrationInfeasible, "calibrated core violates sigma > |mu|");
    return core;
}

Moments model_moments(const DiscreteModel& model)
{
    CompensatedSum mean;
    for (const auto& o : model.outcomes())
        mean.add(o.probability * o.value);
    const double m = mean.value();

    CompensatedSum var;
    for (const auto& o : model.outcomes())
        var.add(o.probability * (o.value - m) * (o.value - m));
    return {m, var.value()};
}

RegimeFlags regime_flags(const GaussianCore& core, const TailSpec& t)
{
    RegimeFlags flags;
    const double mean = (1.0 - t.alpha - t.beta) * core.mu - t.alpha * t.etl + t.beta * t.etw;
    flags.positive_edge = mean > 0.0;
    flags.low_leverage_regime = core.sigma > 5.0 * std::abs(core.mu);
    if (t.alpha > 0.0 && t.etl > 0.0) {
        flags.tail_preserves_maximum = core.mu / (core.sigma * core.sigma) < 1.0 / t.etl;
        flags.meaningful_tail = t.etl > std::abs(core.mu);
    }
    flags.perturbative_tail = t.alpha <= 0.1;
    return flags;
}

} // namespace kelly
