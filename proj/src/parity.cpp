#include "kelly/parity.hpp"

#include "kelly/error.hpp"
#include "kelly/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace kelly
{

namespace
{

Eigen::LLT<Eigen::MatrixXd> factorize(const Eigen::MatrixXd& covariance)
{
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::SingularCovariance, "covariance is not positive-definite");
    const Eigen::VectorXd diag = llt.matrixL().toDenseMatrix().diagonal();
    if ((diag.array() <= 0.0).any() || !diag.allFinite())
        throw Error(ErrorCode::SingularCovariance, "covariance is not positive-definite");
    // A pivot that is rounding noise relative to its variance means the
    // matrix is singular in all but name (condition number beyond ~1e12).
    for (Eigen::Index i = 0; i < diag.size(); ++i)
        if (diag(i) * diag(i) <= 1e-12 * covariance(i, i))
            throw Error(ErrorCode::SingularCovariance, "covariance is numerically singular");
    return llt;
}

AllocationResult make_result(const PortfolioSpec& spec, Eigen::VectorXd f)
{
    AllocationResult r;
    const Eigen::VectorXd cf = spec.covariance * f;
    r.total_leverage = f.sum();
    r.growth_rate = quadratic_growth(spec, f);
    r.feasible = f.allFinite();
    for (Eigen::Index i = 0; i < f.size(); ++i)
        r.diagnostics.push_back({f(i), f(i) * spec.premiums(i), f(i) * cf(i)});
    r.fractions = std::move(f);
    return r;
}

// Each asset's marginal categories: tail loss, tail win, core.
struct Category
{
    double value;
    double probability;
    bool core;
};

std::vector<Category> categories(const AssetParams& a)
{
    return {
        {-a.tails.etl, a.tails.alpha, false},
        {a.tails.etw, a.tails.beta, false},
        {0.0, 1.0 - a.tails.alpha - a.tails.beta, true},
    };
}

void push_core_pairs(std::vector<JointOutcome>& out, const JointTwoAssetModel& m, double mass)
{
    const auto& c1 = m.first.core;
    const auto& c2 = m.second.core;
    for (const int s1 : {1, -1}) {
        for (const int s2 : {1, -1}) {
            const double w = 0.25 * (1.0 + s1 * s2 * m.rho);
            out.push_back({c1.mu + s1 * c1.sigma, c2.mu + s2 * c2.sigma, mass * w});
        }
    }
}

// The feasible set {f : 1 + f.x_s > 0} is bounded iff the outcome vectors
// are not contained in any closed half-plane, i.e. every angular gap < pi.
bool feasible_region_bounded(std::span<const JointOutcome> pdf)
{
    std::vector<double> angles;
    for (const auto& o : pdf)
        if (o.first != 0.0 || o.second != 0.0)
            angles.push_back(std::atan2(o.second, o.first));
    if (angles.size() < 3)
        return false;
    std::sort(angles.begin(), angles.end());
    double max_gap = 2.0 * std::numbers::pi - (angles.back() - angles.front());
    for (std::size_t i = 1; i < angles.size(); ++i)
        max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
    return max_gap < std::numbers::pi - 1e-12;
}

// Maximizes G along f + t e_k by bisection on the directional derivative.
double line_maximize(std::span<const JointOutcome> pdf, const Eigen::Vector2d& f, int k)
{
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto& o : pdf) {
        const double xk = k == 0 ? o.first : o.second;
        if (xk == 0.0)
            continue;
        const double base = 1.0 + f(0) * o.first + f(1) * o.second;
        const double bound = -base / xk;
        if (xk > 0.0)
            lo = std::max(lo, bound);
        else
            hi = std::min(hi, bound);
    }
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw Error(ErrorCode::NoInteriorMaximum, "growth unbounded along a coordinate");

    auto slope = [&](double t) {
        Eigen::Vector2d p = f;
        p(k) += t;
        return joint_gradient(pdf, p)(k);
    };
    const double width = hi - lo;
    double a = lo + 1e-12 * width;
    double b = hi - 1e-12 * width;
    for (int iter = 0; iter < 2000; ++iter) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b)
            break;
        if (slope(mid) > 0.0)
            a = mid;
        else
            b = mid;
    }
    return 0.5 * (a + b);
}

} // namespace

void validate(const PortfolioSpec& spec)
{
    const auto n = spec.premiums.size();
    if (n == 0)
        throw Error(ErrorCode::InvalidParameter, "portfolio needs at least one asset");
    if (spec.covariance.rows() != n || spec.covariance.cols() != n)
        throw Error(ErrorCode::InvalidParameter, "covariance dimensions do not match premiums");
    if (!spec.tails.empty() && static_cast<Eigen::Index>(spec.tails.size()) != n)
        throw Error(ErrorCode::InvalidParameter, "tail list length does not match premiums");
    if (!spec.premiums.allFinite() || !spec.covariance.allFinite())
        throw Error(ErrorCode::InvalidParameter, "premiums and covariance must be finite");
    const double scale = std::max(1.0, spec.covariance.cwiseAbs().maxCoeff());
    if ((spec.covariance - spec.covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw Error(ErrorCode::InvalidParameter, "covariance is not symmetric");
    for (const auto& t : spec.tails)
        validate(t);
    factorize(spec.covariance);
}

double quadratic_growth(const PortfolioSpec& spec, const Eigen::VectorXd& f)
{
    return f.dot(spec.premiums) - 0.5 * f.dot(spec.covariance * f);
}

AllocationResult kelly_allocation(const PortfolioSpec& spec)
{
    validate(spec);
    return make_result(spec, factorize(spec.covariance).solve(spec.premiums));
}

TwoAssetLeverage two_asset_closed(double mu1, double sigma1, double mu2, double sigma2, double rho)
{
    if (!(sigma1 > 0.0) || !(sigma2 > 0.0))
        throw Error(ErrorCode::InvalidParameter, "volatilities must be positive");
    if (!(std::abs(rho) < 1.0))
        throw Error(ErrorCode::InvalidParameter, "correlation must lie in (-1, 1)");
    const double det = 1.0 - rho * rho;
    const double cross = rho / (sigma1 * sigma2);
    TwoAssetLeverage z;
    z.first = (mu1 / (sigma1 * sigma1) - cross * mu2) / det;
    z.second = (mu2 / (sigma2 * sigma2) - cross * mu1) / det;
    z.total = (mu1 / (sigma1 * sigma1) + mu2 / (sigma2 * sigma2) - cross * (mu1 + mu2)) / det;
    return z;
}

Eigen::MatrixXd covariance_from(const Eigen::VectorXd& sigmas, const Eigen::MatrixXd& correlation)
{
    if (correlation.rows() != sigmas.size() || correlation.cols() != sigmas.size())
        throw Error(ErrorCode::InvalidParameter, "correlation dimensions do not match volatilities");
    return sigmas.asDiagonal() * correlation * sigmas.asDiagonal();
}

Eigen::VectorXd max_sharpe_tangency(const PortfolioSpec& spec)
{
    validate(spec);
    const Eigen::VectorXd raw = factorize(spec.covariance).solve(spec.premiums);
    const double total = raw.sum();
    if (!(std::abs(total) > 1e-12 * raw.cwiseAbs().sum()))
        throw Error(ErrorCode::DegenerateNormalization, "1' C^-1 M vanishes; no fully invested tangency portfolio");
    return raw / total;
}

Eigen::VectorXd risk_parity_weights(const Eigen::VectorXd& sigmas)
{
    if (sigmas.size() == 0 || !((sigmas.array() > 0.0).all()) || !sigmas.allFinite())
        throw Error(ErrorCode::InvalidParameter, "volatilities must be positive");
    const Eigen::VectorXd inv = sigmas.cwiseInverse();
    return inv / inv.sum();
}

std::vector<JointOutcome> build_joint_model(const JointTwoAssetModel& m)
{
    validate(m.first.core);
    validate(m.second.core);
    validate(m.first.tails);
    validate(m.second.tails);
    if (!std::isfinite(m.rho) || !std::isfinite(m.joint_alpha))
        throw Error(ErrorCode::InvalidJoint, "rho and joint_alpha must be finite");

    std::vector<JointOutcome> out;
    switch (m.alignment) {
    case Alignment::None:
        push_core_pairs(out, m, 1.0);
        break;
    case Alignment::CoAligned:
        out.push_back({-m.first.tails.etl, -m.second.tails.etl, m.joint_alpha});
        push_core_pairs(out, m, 1.0 - m.joint_alpha);
        break;
    case Alignment::Opposed:
        out.push_back({-m.first.tails.etl, m.opposed_outcome.value_or(m.second.tails.etw), m.joint_alpha});
        push_core_pairs(out, m, 1.0 - m.joint_alpha);
        break;
    case Alignment::Independent:
        for (const auto& a : categories(m.first)) {
            for (const auto& b : categories(m.second)) {
                const double mass = a.probability * b.probability;
                if (a.core && b.core) {
                    push_core_pairs(out, m, mass);
                } else if (a.core) {
                    out.push_back({m.first.core.mu + m.first.core.sigma, b.value, 0.5 * mass});
                    out.push_back({m.first.core.mu - m.first.core.sigma, b.value, 0.5 * mass});
                } else if (b.core) {
                    out.push_back({a.value, m.second.core.mu + m.second.core.sigma, 0.5 * mass});
                    out.push_back({a.value, m.second.core.mu - m.second.core.sigma, 0.5 * mass});
                } else {
                    out.push_back({a.value, b.value, mass});
                }
            }
        }
        break;
    }

    CompensatedSum total;
    for (const auto& o : out) {
        if (o.probability < 0.0 || !std::isfinite(o.probability)) {
            std::ostringstream os;
            os << "negative joint state probability " << o.probability;
            throw Error(ErrorCode::InvalidJoint, os.str());
        }
        total.add(o.probability);
    }
    if (std::abs(total.value() - 1.0) > 1e-12)
        throw Error(ErrorCode::InvalidJoint, "joint probabilities do not sum to one");
    std::erase_if(out, [](const JointOutcome& o) { return o.probability == 0.0; });
    return out;
}

bool joint_feasible(std::span<const JointOutcome> pdf, const Eigen::Vector2d& f)
{
    return std::all_of(pdf.begin(), pdf.end(),
                       [&](const JointOutcome& o) { return 1.0 + f(0) * o.first + f(1) * o.second > 0.0; });
}

double joint_growth(std::span<const JointOutcome> pdf, const Eigen::Vector2d& f)
{
    if (!joint_feasible(pdf, f))
        throw Error(ErrorCode::DomainViolation, "leverage ruins capital in some joint state");
    CompensatedSum g;
    for (const auto& o : pdf)
        g.add(o.probability * std::log1p(f(0) * o.first + f(1) * o.second));
    return g.value();
}

Eigen::Vector2d joint_gradient(std::span<const JointOutcome> pdf, const Eigen::Vector2d& f)
{
    CompensatedSum g0, g1;
    for (const auto& o : pdf) {
        const double w = o.probability / (1.0 + f(0) * o.first + f(1) * o.second);
        g0.add(w * o.first);
        g1.add(w * o.second);
    }
    return {g0.value(), g1.value()};
}

Eigen::Matrix2d joint_hessian(std::span<const JointOutcome> pdf, const Eigen::Vector2d& f)
{
    Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
    for (const auto& o : pdf) {
        const double d = 1.0 + f(0) * o.first + f(1) * o.second;
        const Eigen::Vector2d x(o.first, o.second);
        h -= (o.probability / (d * d)) * (x * x.transpose());
    }
    return h;
}

JointAllocation joint_fat_allocation(const JointTwoAssetModel& model)
{
    const std::vector<JointOutcome> pdf = build_joint_model(model);
    if (!feasible_region_bounded(pdf))
        throw Error(ErrorCode::NoInteriorMaximum, "joint outcomes lie in a half-plane; growth has no interior maximum");

    constexpr double gradient_tolerance = 1e-13;
    JointAllocation result;
    Eigen::Vector2d f = Eigen::Vector2d::Zero();

    auto newton = [&](int max_iterations) {
        for (int iter = 0; iter < max_iterations; ++iter) {
            ++result.iterations;
            const Eigen::Vector2d grad = joint_gradient(pdf, f);
            if (grad.norm() < gradient_tolerance)
                return true;
            const Eigen::Matrix2d hess = joint_hessian(pdf, f);
            Eigen::Vector2d step = -hess.ldlt().solve(grad);
            if (!step.allFinite() || step.dot(grad) <= 0.0)
                step = grad;
            const double value = joint_growth(pdf, f);
            double t = 1.0;
            bool accepted = false;
            while (t > 1e-20) {
                const Eigen::Vector2d trial = f + t * step;
                if (joint_feasible(pdf, trial)) {
                    // Armijo, or (near the optimum, where G differences drown in
                    // rounding) a strict decrease of the gradient norm.
                    if (joint_growth(pdf, trial) >= value + 1e-4 * t * step.dot(grad) ||
                        joint_gradient(pdf, trial).norm() < grad.norm()) {
                        f = trial;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if (!accepted)
                return joint_gradient(pdf, f).norm() < gradient_tolerance;
        }
        return joint_gradient(pdf, f).norm() < gradient_tolerance;
    };

    if (!newton(200)) {
        result.coordinate_fallback = true;
        for (int sweep = 0; sweep < 5000; ++sweep) {
            const Eigen::Vector2d before = f;
            for (int k = 0; k < 2; ++k)
                f(k) += line_maximize(pdf, f, k);
            if ((f - before).norm() <= 1e-15 * (1.0 + f.norm()))
                break;
        }
        newton(50);
    }

    const Eigen::Vector2d grad = joint_gradient(pdf, f);
    result.gradient_norm = grad.norm();
    if (!(result.gradient_norm < 1e-10))
        throw Error(ErrorCode::NewtonStall, "joint optimizer did not reach a stationary point");

    // Diagnostics use the joint covariance and means of the pdf.
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& o : pdf)
        mean += o.probability * Eigen::Vector2d(o.first, o.second);
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& o : pdf) {
        const Eigen::Vector2d d = Eigen::Vector2d(o.first, o.second) - mean;
        cov += o.probability * d * d.transpose();
    }
    const Eigen::Vector2d cf = cov * f;

    AllocationResult& r = result.allocation;
    r.fractions = f;
    r.total_leverage = f.sum();
    r.growth_rate = joint_growth(pdf, f);
    r.feasible = true;
    for (int i = 0; i < 2; ++i)
        r.diagnostics.push_back({f(i), f(i) * mean(i), f(i) * cf(i)});
    return result;
}

} // namespace kelly
