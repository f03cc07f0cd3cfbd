/**
 * @file model.hpp
 * @brief Per-period outcome model: a symmetric two-point core plus discrete tails.
 *
 * The per-period return y of an asset is modeled as
 *
 *   P(y) = alpha * delta(y + ETL)
 *        + (1 - alpha - beta)/2 * [delta(y - (mu + sigma)) + delta(y - (mu - sigma))]
 *        + beta * delta(y - ETW)
 *
 * The core (mu, sigma) carries ordinary volatility risk; the tails carry
 * the rare, poorly quantifiable events. All quantities are fractions of
 * capital per period.
 */
#pragma once

#include <span>
#include <vector>

namespace kelly
{

/// Center of the return distribution. Requires sigma > |mu|.
struct GaussianCore
{
    double mu = 0.0;
    double sigma = 0.0;
};

/// Discrete tail loss (alpha, ETL) and tail win (beta, ETW).
struct TailSpec
{
    double alpha = 0.0;
    double etl = 0.0;
    double beta = 0.0;
    double etw = 0.0;

    bool empty() const noexcept { return alpha == 0.0 && beta == 0.0; }
};

struct Outcome
{
    double value = 0.0;
    double probability = 0.0;
};

/**
 * @brief Finite discrete per-period outcome distribution.
 *
 * Construction drops zero-probability states, sorts by value and merges
 * coincident values, so outcomes() is strictly increasing in value with
 * probabilities in (0, 1] summing to one within 1e-12.
 *
 * @throws kelly::Error (InvalidParameter) on negative or non-finite input,
 *         or when probabilities do not sum to one.
 */
class DiscreteModel
{
public:
    explicit DiscreteModel(std::vector<Outcome> outcomes);

    std::span<const Outcome> outcomes() const noexcept { return outcomes_; }
    std::size_t size() const noexcept { return outcomes_.size(); }
    double min_value() const noexcept { return outcomes_.front().value; }
    double max_value() const noexcept { return outcomes_.back().value; }

private:
    std::vector<Outcome> outcomes_;
};

struct Moments
{
    double mean = 0.0;
    double variance = 0.0;
};

/// Soft diagnostics for the validity regime of the closed-form approximations.
struct RegimeFlags
{
    bool positive_edge = false;        ///< arithmetic mean of the model > 0
    bool low_leverage_regime = false;  ///< sigma > 5|mu|
    bool tail_preserves_maximum = true; ///< mu/sigma^2 < 1/ETL (true when no tail)
    bool perturbative_tail = true;     ///< alpha <= 0.1
    bool meaningful_tail = true;       ///< ETL > |mu| (true when no tail)
};

void validate(const GaussianCore& core);
void validate(const TailSpec& tails);

/// Four-point (or fewer) model from a core and tails.
DiscreteModel build_discrete_model(const GaussianCore& core, const TailSpec& tails = {});

/**
 * Recover the core (mu, sigma) from observed full-distribution moments
 * (mu0, sigma0) given a one-sided tail loss:
 *
 *   mu      = mu0/(1-alpha) + alpha*ETL/(1-alpha)
 *   sigma^2 = sigma0^2/(1-alpha) - alpha*(ETL + mu)^2
 *
 * @throws kelly::Error CalibrationInfeasible when sigma^2 <= 0 or |mu| >= sigma.
 */
GaussianCore calibrate_center(double mu0, double sigma0, double alpha, double etl);

/// Two-sided generalization; identical to the one-sided form when beta = 0.
GaussianCore calibrate_center(double mu0, double sigma0, const TailSpec& tails);

Moments model_moments(const DiscreteModel& model);

RegimeFlags regime_flags(const GaussianCore& core, const TailSpec& tails);

} // namespace kelly
