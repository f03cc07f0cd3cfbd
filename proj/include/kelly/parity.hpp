/**
 * @file parity.hpp
 * @brief Multi-asset Kelly allocation ("Kelly Parity") and its relation to
 *        max-Sharpe tangency and Risk Parity, plus the two-asset fat-tail model.
 *
 * In the Gaussian regime the growth-optimal leverage vector solves C f = M
 * and the growth rate is f'M - f'Cf/2. Normalizing f to unit total leverage
 * gives the tangency portfolio; with a diagonal C and equal Sharpe ratios
 * f_i = SR / sigma_i, i.e. Risk Parity up to a leverage scale.
 */
#pragma once

#include "kelly/model.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace kelly
{

enum class Alignment
{
    None,        ///< no tail states
    CoAligned,   ///< both assets hit their tail loss together
    Opposed,     ///< asset 1 tail loss coincides with asset 2 tail gain
    Independent  ///< each asset's tails occur independently
};

struct PortfolioSpec
{
    Eigen::VectorXd premiums;    ///< M, per-asset excess returns
    Eigen::MatrixXd covariance;  ///< C, symmetric positive-definite
    std::vector<TailSpec> tails; ///< empty or one per asset
    Alignment alignment = Alignment::None;
};

/// Throws InvalidParameter on shape/symmetry problems, SingularCovariance
/// when C is not positive-definite.
void validate(const PortfolioSpec& spec);

struct AssetContribution
{
    double fraction = 0.0;
    double premium_contribution = 0.0;  ///< f_i M_i
    double risk_contribution = 0.0;     ///< f_i (C f)_i
};

struct AllocationResult
{
    Eigen::VectorXd fractions;
    double total_leverage = 0.0;
    double growth_rate = 0.0;
    bool feasible = false;
    std::vector<AssetContribution> diagnostics;
};

/// Solves C f = M by Cholesky; growth is the Gaussian quadratic f'M - f'Cf/2.
AllocationResult kelly_allocation(const PortfolioSpec& spec);

double quadratic_growth(const PortfolioSpec& spec, const Eigen::VectorXd& fractions);

struct TwoAssetLeverage
{
    double first = 0.0;
    double second = 0.0;
    double total = 0.0;
};

/// Closed-form two-asset Kelly leverages (no matrix algebra).
TwoAssetLeverage two_asset_closed(double mu1, double sigma1, double mu2, double sigma2, double rho);

/// Covariance from volatilities and a correlation matrix.
Eigen::MatrixXd covariance_from(const Eigen::VectorXd& sigmas, const Eigen::MatrixXd& correlation);

/// Fully invested max-Sharpe weights C^-1 M / (1' C^-1 M).
/// Throws DegenerateNormalization when 1' C^-1 M vanishes.
Eigen::VectorXd max_sharpe_tangency(const PortfolioSpec& spec);

/// Weights proportional to 1/sigma_i, summing to one.
Eigen::VectorXd risk_parity_weights(const Eigen::VectorXd& sigmas);

struct AssetParams
{
    GaussianCore core;
    TailSpec tails;
};

/**
 * Two assets whose core states are jointly distributed on the four points
 * (mu1 +- sigma1, mu2 +- sigma2) with weights (1 +- rho)/4, plus a tail
 * structure selected by `alignment`:
 *
 * - CoAligned: with probability joint_alpha the state is (-ETL1, -ETL2).
 * - Opposed: with probability joint_alpha the state is (-ETL1, x2) with
 *   x2 = opposed_outcome or +ETW2 by default.
 * - Independent: each asset keeps its own (alpha, ETL, beta, ETW); the
 *   core pairing (1 +- rho)/4 applies only when both are in their core.
 * - None: core states only.
 */
struct JointTwoAssetModel
{
    AssetParams first;
    AssetParams second;
    double rho = 0.0;
    Alignment alignment = Alignment::None;
    double joint_alpha = 0.0;
    std::optional<double> opposed_outcome;
};

struct JointOutcome
{
    double first = 0.0;
    double second = 0.0;
    double probability = 0.0;
};

/// Joint pdf; zero-probability states are dropped. Throws InvalidJoint on
/// any negative probability or a mass that does not sum to one.
std::vector<JointOutcome> build_joint_model(const JointTwoAssetModel& model);

double joint_growth(std::span<const JointOutcome> pdf, const Eigen::Vector2d& f);
Eigen::Vector2d joint_gradient(std::span<const JointOutcome> pdf, const Eigen::Vector2d& f);
Eigen::Matrix2d joint_hessian(std::span<const JointOutcome> pdf, const Eigen::Vector2d& f);
bool joint_feasible(std::span<const JointOutcome> pdf, const Eigen::Vector2d& f);

struct JointAllocation
{
    AllocationResult allocation;
    double gradient_norm = 0.0;
    int iterations = 0;
    bool coordinate_fallback = false;
};

/**
 * Maximizes E[ln(1 + f1 X1 + f2 X2)] by damped Newton ascent from f = 0
 * with feasibility-preserving backtracking. If Newton stalls, cyclic
 * coordinate bisection takes over and Newton polishes the result.
 *
 * @throws kelly::Error NoInteriorMaximum when the feasible region is
 *         unbounded in some direction (growth unbounded or flat).
 */
JointAllocation joint_fat_allocation(const JointTwoAssetModel& model);

} // namespace kelly
