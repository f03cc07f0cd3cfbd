#include "cli.hpp"

#include "report.hpp"

#include "kelly/error.hpp"
#include "kelly/estimate.hpp"
#include "kelly/frontier.hpp"
#include "kelly/model.hpp"
#include "kelly/parity.hpp"
#include "kelly/simulate.hpp"
#include "kelly/single.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#ifndef KELLY_TAILS_VERSION
#define KELLY_TAILS_VERSION "0.0.0"
#endif

namespace kelly::cli
{

namespace
{

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

struct Globals
{
    std::uint64_t seed = 0;
    std::string output = "text";
    std::string out;
};

struct TailArgs
{
    double alpha = 0.0;
    double etl = 0.0;
    double beta = 0.0;
    double etw = 0.0;

    TailSpec spec() const { return {alpha, etl, beta, etw}; }
};

void add_tail_options(CLI::App* app, TailArgs& t, const std::string& suffix = "")
{
    app->add_option("--alpha" + suffix, t.alpha, "tail-loss probability");
    app->add_option("--etl" + suffix, t.etl, "tail-loss size (fraction of capital)");
    app->add_option("--beta" + suffix, t.beta, "tail-win probability");
    app->add_option("--etw" + suffix, t.etw, "tail-win size (fraction of capital)");
}

std::vector<double> parse_list(const std::string& text, const std::string& what)
{
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        if (first == std::string::npos)
            continue;
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item.substr(first), &used));
            if (item.find_first_not_of(" \t", first + used) != std::string::npos)
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidParameter, what + ": cannot parse '" + item + "'");
        }
    }
    return values;
}

// List options accept "a,b,c" on the command line and in config files; CLI11
// splits either form into items, which are re-joined here.
std::string joined(const std::vector<std::string>& items)
{
    std::string out;
    for (const auto& item : items)
        out += (out.empty() ? "" : ",") + item;
    return out;
}

Eigen::MatrixXd square_from(const std::vector<double>& values, std::size_t n, const std::string& what)
{
    if (values.size() != n * n)
        throw Error(ErrorCode::InvalidParameter,
                    what + " needs " + std::to_string(n * n) + " row-major entries, got " + std::to_string(values.size()));
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = values[i * n + j];
    return m;
}

double flag(bool b)
{
    return b ? 1.0 : 0.0;
}

// single

struct SingleArgs
{
    double mu = 0.0;
    double sigma = 0.0;
    TailArgs tails;
};

Report cmd_single(const SingleArgs& a)
{
    const GaussianCore core{a.mu, a.sigma};
    const TailSpec tails = a.tails.spec();
    validate(core);
    validate(tails);

    const KellyPoint simple = kelly_simple(core);
    const KellyPoint closed = kelly_fat_closed(core, tails);
    const KellyPoint exact = kelly_fat_exact(build_discrete_model(core, tails));
    const double impact = (tails.alpha > 0.0 && core.mu > 0.0) ? tail_impact(core, tails) : nan;
    const ArithmeticGrowth arith = arithmetic_growth(core, tails);
    const RegimeFlags flags = regime_flags(core, tails);

    Report r{"single", {}};
    auto& t = r.add("kelly", {"mu", "sigma", "alpha", "etl", "beta", "etw", "f0", "g0", "f1_closed", "g1_closed",
                              "f1_exact", "g1_exact", "tail_impact", "mean_return", "log_drift", "positive_edge",
                              "low_leverage_regime", "tail_preserves_maximum", "perturbative_tail", "meaningful_tail"});
    t.add_row({core.mu, core.sigma, tails.alpha, tails.etl, tails.beta, tails.etw, simple.fraction, simple.growth,
               closed.fraction, closed.growth, exact.fraction, exact.growth, impact, arith.mean_return, arith.log_drift,
               flag(flags.positive_edge), flag(flags.low_leverage_regime), flag(flags.tail_preserves_maximum),
               flag(flags.perturbative_tail), flag(flags.meaningful_tail)});
    return r;
}

// sweep

struct SweepArgs
{
    double mu0 = 0.004;
    double sigma0 = 0.10;
    double alpha = 0.02;
    double etl_max = 0.20;
    int steps = 40;
    std::string mode = "fixed";
};

Report cmd_sweep(const SweepArgs& a)
{
    if (a.steps < 1)
        throw Error(ErrorCode::InvalidParameter, "steps must be at least 1");
    if (!(a.etl_max > 0.0))
        throw Error(ErrorCode::InvalidParameter, "etl-max must be positive");
    std::vector<double> grid;
    for (int i = 0; i <= a.steps; ++i)
        grid.push_back(a.etl_max * static_cast<double>(i) / static_cast<double>(a.steps));
    const SweepMode mode = a.mode == "recalibrated" ? SweepMode::Recalibrated : SweepMode::FixedCenter;

    Report r{"sweep", {}};
    auto& t = r.add("sweep", {"etl", "feasible", "mu", "sigma", "f_closed", "f_exact", "g_closed", "g_exact",
                              "g_exact_at_f_closed", "status"});
    for (const auto& row : etl_sweep(a.mu0, a.sigma0, a.alpha, grid, mode)) {
        if (row.feasible)
            t.add_row({row.etl, 1.0, row.core.mu, row.core.sigma, row.f_closed, row.f_exact, row.g_closed, row.g_exact,
                       row.g_exact_at_f_closed, std::string("OK")});
        else
            t.add_row({row.etl, 0.0, nan, nan, nan, nan, nan, nan, nan, row.error});
    }
    return r;
}

// parity

struct ParityArgs
{
    std::vector<std::string> premiums;
    std::vector<std::string> cov;
    std::vector<std::string> sigmas;
    std::vector<std::string> corr;
    std::string joint = "none";
    TailArgs tails1;
    TailArgs tails2;
    double joint_alpha = 0.0;
    std::optional<double> opposed_outcome;
};

Alignment parse_alignment(const std::string& s)
{
    if (s == "coaligned")
        return Alignment::CoAligned;
    if (s == "opposed")
        return Alignment::Opposed;
    if (s == "independent")
        return Alignment::Independent;
    return Alignment::None;
}

Report cmd_parity(const ParityArgs& a)
{
    const std::vector<double> m = parse_list(joined(a.premiums), "premiums");
    if (m.empty())
        throw Error(ErrorCode::InvalidParameter, "premiums are required");
    const std::size_t n = m.size();

    PortfolioSpec spec;
    spec.premiums = Eigen::Map<const Eigen::VectorXd>(m.data(), static_cast<Eigen::Index>(n));
    if (!a.cov.empty()) {
        spec.covariance = square_from(parse_list(joined(a.cov), "cov"), n, "cov");
    } else if (!a.sigmas.empty()) {
        const std::vector<double> s = parse_list(joined(a.sigmas), "sigmas");
        if (s.size() != n)
            throw Error(ErrorCode::InvalidParameter, "sigmas must have one entry per premium");
        Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(n, n);
        if (!a.corr.empty())
            corr = square_from(parse_list(joined(a.corr), "corr"), n, "corr");
        spec.covariance = covariance_from(Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(n)), corr);
    } else {
        throw Error(ErrorCode::InvalidParameter, "either cov or sigmas is required");
    }

    const AllocationResult alloc = kelly_allocation(spec);
    const Eigen::VectorXd sig = spec.covariance.diagonal().cwiseSqrt();
    const Eigen::VectorXd parity = risk_parity_weights(sig);
    Eigen::VectorXd tangency = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), nan);
    Eigen::VectorXd normalized = tangency;
    double gap = nan;
    try {
        tangency = max_sharpe_tangency(spec);
        normalized = alloc.fractions / alloc.fractions.sum();
        gap = (normalized - tangency).cwiseAbs().maxCoeff();
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateNormalization)
            throw;
    }

    Report r{"parity", {}};
    auto& t = r.add("allocation", {"asset", "fraction", "premium_contribution", "risk_contribution", "normalized_kelly",
                                   "tangency", "risk_parity"});
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        const auto& d = alloc.diagnostics[i];
        t.add_row({static_cast<long long>(i + 1), d.fraction, d.premium_contribution, d.risk_contribution, normalized(k),
                   tangency(k), parity(k)});
    }
    auto& s = r.add("portfolio", {"total_leverage", "growth_rate", "max_tangency_gap"});
    s.add_row({alloc.total_leverage, alloc.growth_rate, gap});

    if (n == 2) {
        const double rho = spec.covariance(0, 1) / (sig(0) * sig(1));
        const TwoAssetLeverage two = two_asset_closed(m[0], sig(0), m[1], sig(1), rho);
        auto& c = r.add("two_asset_closed", {"rho", "first", "second", "total"});
        c.add_row({rho, two.first, two.second, two.total});

        const Alignment alignment = parse_alignment(a.joint);
        if (alignment != Alignment::None) {
            JointTwoAssetModel jm;
            jm.first = {{m[0], sig(0)}, a.tails1.spec()};
            jm.second = {{m[1], sig(1)}, a.tails2.spec()};
            jm.rho = rho;
            jm.alignment = alignment;
            jm.joint_alpha = a.joint_alpha;
            jm.opposed_outcome = a.opposed_outcome;
            const JointAllocation ja = joint_fat_allocation(jm);
            auto& j = r.add("joint", {"alignment", "first", "second", "total_leverage", "growth_rate", "gradient_norm",
                                      "iterations", "coordinate_fallback"});
            j.add_row({a.joint, ja.allocation.fractions(0), ja.allocation.fractions(1), ja.allocation.total_leverage,
                       ja.allocation.growth_rate, ja.gradient_norm, static_cast<long long>(ja.iterations),
                       flag(ja.coordinate_fallback)});
        }
    } else if (a.joint != "none") {
        throw Error(ErrorCode::InvalidParameter, "the joint tail model needs exactly two assets");
    }
    return r;
}

// simulate

struct SimulateArgs
{
    double mu = 0.0;
    double sigma = 0.0;
    TailArgs tails;
    std::optional<double> leverage;
    std::size_t paths = 1000;
    std::size_t periods = 250;
    double ruin_floor = 0.01;
    unsigned workers = 0;
    std::vector<std::string> crossover;
};

Report cmd_simulate(const SimulateArgs& a, std::uint64_t seed)
{
    const GaussianCore core{a.mu, a.sigma};
    const DiscreteModel model = build_discrete_model(core, a.tails.spec());
    SimConfig cfg;
    cfg.seed = seed;
    cfg.n_paths = a.paths;
    cfg.n_periods = a.periods;
    cfg.leverage = a.leverage ? *a.leverage : kelly_fat_exact(model).fraction;
    cfg.ruin_floor = a.ruin_floor;
    cfg.workers = a.workers;
    const PathStats s = simulate_paths(model, cfg);

    Report r{"simulate", {}};
    auto& t = r.add("summary", {"leverage", "n_paths", "n_periods", "mean_log_growth", "se_log_growth",
                                "expected_log_growth", "median_terminal", "mean_terminal", "se_mean_terminal",
                                "ruin_fraction"});
    t.add_row({cfg.leverage, static_cast<long long>(s.n_paths), static_cast<long long>(s.n_periods), s.mean_log_growth,
               s.se_log_growth, growth_at(model, cfg.leverage), s.median_terminal, s.mean_terminal, s.se_mean_terminal,
               s.ruin_fraction});
    auto& d = r.add("drawdown", {"quantile", "max_drawdown"});
    for (const auto& [q, v] : s.max_drawdown_quantiles)
        d.add_row({q, v});

    if (!a.crossover.empty()) {
        std::vector<std::size_t> grid;
        for (const double h : parse_list(joined(a.crossover), "crossover")) {
            if (!(h >= 1.0) || h != std::floor(h))
                throw Error(ErrorCode::InvalidParameter, "crossover horizons must be positive integers");
            grid.push_back(static_cast<std::size_t>(h));
        }
        auto& c = r.add("crossover", {"n_periods", "mean_terminal", "median_terminal", "gap"});
        for (const auto& row : crossover_diagnostic(model, cfg.leverage, grid, a.paths, seed, a.workers))
            c.add_row({static_cast<long long>(row.n_periods), row.mean_terminal, row.median_terminal, row.gap});
    }
    return r;
}

// scenario

struct ScenarioArgs
{
    std::string preset = "brown";
    double bet = 0.2;
    bool append = false;
    std::vector<std::string> legs;
};

std::vector<ScenarioLeg> parse_legs(const std::string& text)
{
    std::vector<ScenarioLeg> legs;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw Error(ErrorCode::InvalidParameter, "legs are count:outcome pairs, got '" + item + "'");
        const auto count = parse_list(item.substr(0, colon), "legs");
        const auto outcome = parse_list(item.substr(colon + 1), "legs");
        if (count.size() != 1 || outcome.size() != 1 || count[0] < 0 || count[0] != std::floor(count[0]))
            throw Error(ErrorCode::InvalidParameter, "bad leg '" + item + "'");
        legs.push_back({static_cast<int>(count[0]), outcome[0]});
    }
    return legs;
}

Report cmd_scenario(const ScenarioArgs& a)
{
    std::vector<NamedScenario> scenarios;
    if (!a.legs.empty()) {
        scenarios.push_back({"custom", parse_legs(joined(a.legs))});
    } else if (a.preset == "brown") {
        scenarios = brown_scenarios(a.append ? TailConvention::Append : TailConvention::Replacement);
    } else {
        throw Error(ErrorCode::InvalidParameter, "unknown preset '" + a.preset + "'");
    }

    Report r{"scenario", {}};
    auto& t = r.add("scenario", {"scenario", "bets", "wealth_multiple", "per_bet_growth"});
    for (const auto& s : scenarios) {
        long long bets = 0;
        for (const auto& leg : s.legs)
            bets += leg.count;
        const ScenarioResult res = scenario_growth(s.legs, a.bet);
        t.add_row({s.name, bets, res.wealth_multiple, res.per_bet_growth});
    }
    return r;
}

// frontier

struct FrontierArgs
{
    FrontierInputs inputs;
    double lev_max = 3.0;
    double lev_step = 0.5;
};

Report cmd_frontier(const FrontierArgs& a)
{
    if (!(a.lev_step > 0.0) || !(a.lev_max > 0.0))
        throw Error(ErrorCode::InvalidParameter, "leverage grid needs positive lev-max and lev-step");
    FrontierInputs in = a.inputs;
    in.leverage_grid.clear();
    const auto n = static_cast<int>(std::floor(a.lev_max / a.lev_step + 1e-9));
    for (int i = 0; i <= n; ++i)
        in.leverage_grid.push_back(a.lev_step * i);
    const FrontierSet set = comparison_frontiers(in);

    Report r{"frontier", {}};
    auto& t = r.add("frontier", {"curve", "leverage", "volatility", "gross_return", "protection_cost", "financing_cost",
                                 "net_return", "feasible"});
    auto& c = r.add("concavity", {"curve", "concave", "max_second_difference"});
    const std::pair<const char*, const std::vector<FrontierPoint>*> curves[] = {
        {"no_tail", &set.no_tail}, {"symmetric", &set.symmetric}, {"skewed", &set.skewed}};
    for (const auto& [name, points] : curves) {
        std::vector<FrontierPoint> feasible;
        for (const auto& p : *points) {
            t.add_row({std::string(name), p.leverage, p.volatility, p.gross_return, p.protection_cost,
                       p.financing_cost, p.net_return, flag(p.feasible)});
            if (p.feasible)
                feasible.push_back(p);
        }
        if (feasible.size() >= 3) {
            const ConcavityReport rep = frontier_concavity_check(feasible);
            c.add_row({std::string(name), flag(rep.concave), rep.max_second_difference});
        } else {
            c.add_row({std::string(name), nan, nan});
        }
    }
    return r;
}

// estimate

struct EstimateArgs
{
    std::string input;
    double quantile = 0.05;
};

Report cmd_estimate(const EstimateArgs& a, std::ostream& err)
{
    const ReturnSeries series = read_returns_csv(a.input);
    const Estimate e = estimate_params(series, a.quantile);
    const auto& d = e.diagnostics;
    if (d.degenerate_left)
        err << "DEGENERATE_TAIL: no observations below the left threshold, alpha set to 0\n";
    if (d.degenerate_right)
        err << "DEGENERATE_TAIL: no observations above the right threshold, beta set to 0\n";

    Report r{"estimate", {}};
    auto& t = r.add("estimate", {"n", "mu", "sigma", "alpha", "etl", "beta", "etw", "left_threshold",
                                 "right_threshold", "left_count", "right_count", "interior_count", "interior_mean",
                                 "interior_sd", "sample_mean", "sample_sd", "degenerate_left", "degenerate_right"});
    t.add_row({static_cast<long long>(series.values.size()), e.core.mu, e.core.sigma, e.tails.alpha, e.tails.etl,
               e.tails.beta, e.tails.etw, d.left_threshold, d.right_threshold, static_cast<long long>(d.left_count),
               static_cast<long long>(d.right_count), static_cast<long long>(d.interior_count), d.interior_mean,
               d.interior_sd, d.sample_mean, d.sample_sd, flag(d.degenerate_left), flag(d.degenerate_right)});
    return r;
}

// plumbing

int exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidParameter:
    case ErrorCode::SeriesTooShort:
    case ErrorCode::InvalidJoint:
        return exit_invalid;
    case ErrorCode::IoError:
    case ErrorCode::ParseError:
    case ErrorCode::EmptyFile:
        return exit_io;
    default:
        return exit_infeasible;
    }
}

nlohmann::ordered_json option_values(const CLI::App& app)
{
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (const CLI::Option* opt : app.get_options()) {
        const std::string name = opt->get_single_name();
        if (name == "help" || name == "config" || !opt->get_configurable())
            continue;
        if (opt->count() > 0) {
            obj[name] = opt->get_type_size() == 0 ? "true" : joined(opt->results());
        } else {
            const std::string def = opt->get_default_str();
            obj[name] = def == "{}" ? "" : def;
        }
    }
    return obj;
}

void write_atomically(const std::filesystem::path& path, const std::string& content)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f)
            throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::IoError, "cannot rename onto " + path.string());
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Growth-optimal leverage with fat tails", "kelly_tails"};
    app.option_defaults()->always_capture_default();
    app.set_config("--config", "", "INI config file; one [section] per command, unknown keys rejected");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.fallthrough();
    app.require_subcommand(1);
    app.set_version_flag("--version", KELLY_TAILS_VERSION);

    Globals g;
    app.add_option("--seed", g.seed, "random seed");
    app.add_option("--output", g.output, "output format")->check(CLI::IsMember({"text", "csv", "json"}));
    app.add_option("--out", g.out, "write the report here (plus <out>.meta.json) instead of stdout");

    SingleArgs single;
    auto* c_single = app.add_subcommand("single", "optimal leverage for one asset");
    c_single->add_option("--mu", single.mu, "core mean")->required();
    c_single->add_option("--sigma", single.sigma, "core half-spread")->required();
    add_tail_options(c_single, single.tails);

    SweepArgs sweep;
    auto* c_sweep = app.add_subcommand("sweep", "optimal leverage and growth against ETL");
    c_sweep->add_option("--mu0,--mu", sweep.mu0, "core mean (fixed) or observed mean (recalibrated)");
    c_sweep->add_option("--sigma0,--sigma", sweep.sigma0, "core sigma (fixed) or observed sigma (recalibrated)");
    c_sweep->add_option("--alpha", sweep.alpha, "tail-loss probability");
    c_sweep->add_option("--etl-max", sweep.etl_max, "largest ETL on the grid");
    c_sweep->add_option("--steps", sweep.steps, "grid intervals");
    c_sweep->add_option("--mode", sweep.mode, "hold the core fixed or recalibrate it per ETL")
        ->check(CLI::IsMember({"fixed", "recalibrated"}));

    ParityArgs parity;
    auto* c_parity = app.add_subcommand("parity", "multi-asset allocation f = C^-1 M");
    c_parity->add_option("--premiums", parity.premiums, "comma-separated excess returns M")->delimiter(',');
    c_parity->add_option("--cov", parity.cov, "row-major covariance C")->delimiter(',');
    c_parity->add_option("--sigmas", parity.sigmas, "volatilities (alternative to --cov)")->delimiter(',');
    c_parity->add_option("--corr", parity.corr, "row-major correlation used with --sigmas")->delimiter(',');
    c_parity->add_option("--joint", parity.joint, "two-asset joint tail model")
        ->check(CLI::IsMember({"none", "coaligned", "opposed", "independent"}));
    add_tail_options(c_parity, parity.tails1, "1");
    add_tail_options(c_parity, parity.tails2, "2");
    c_parity->add_option("--joint-alpha", parity.joint_alpha, "probability of the joint tail state");
    c_parity->add_option("--opposed-outcome", parity.opposed_outcome, "asset 2 outcome in the opposed tail state");

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo wealth paths");
    c_sim->add_option("--mu", sim.mu, "core mean")->required();
    c_sim->add_option("--sigma", sim.sigma, "core half-spread")->required();
    add_tail_options(c_sim, sim.tails);
    c_sim->add_option("--leverage", sim.leverage, "constant fraction (default: exact optimum)");
    c_sim->add_option("--paths", sim.paths, "number of paths");
    c_sim->add_option("--periods", sim.periods, "periods per path");
    c_sim->add_option("--ruin-floor", sim.ruin_floor, "ruin threshold as a fraction of initial wealth");
    c_sim->add_option("--workers", sim.workers, "threads (0 = KELLY_TAILS_THREADS or all cores)");
    c_sim->add_option("--crossover", sim.crossover, "comma-separated horizons for the mean/median table")->delimiter(',');

    ScenarioArgs scen;
    auto* c_scen = app.add_subcommand("scenario", "wealth multiple of a fixed bet sequence");
    c_scen->add_option("--preset", scen.preset, "named scenario set")->check(CLI::IsMember({"brown"}));
    c_scen->add_option("--bet", scen.bet, "fraction staked per bet");
    c_scen->add_flag("--append", scen.append, "add tail bets on top of the base run instead of replacing");
    c_scen->add_option("--legs", scen.legs, "custom count:outcome pairs, e.g. 60:1,40:-1")->delimiter(',');

    FrontierArgs front;
    auto* c_front = app.add_subcommand("frontier", "drawdown-adjusted return against volatility");
    c_front->add_option("--mu0", front.inputs.mu0, "observed per-period mean");
    c_front->add_option("--sigma0", front.inputs.sigma0, "observed per-period volatility");
    c_front->add_option("--alpha", front.inputs.alpha, "tail probability");
    c_front->add_option("--etl", front.inputs.etl, "tail size");
    c_front->add_option("--drawdown", front.inputs.drawdown_level, "protected drawdown level D");
    c_front->add_option("--horizon", front.inputs.horizon, "periods N covered by the protection");
    c_front->add_option("--spread", front.inputs.spread, "financing spread per unit above 1x");
    c_front->add_option("--lev-max", front.lev_max, "largest leverage on the grid");
    c_front->add_option("--lev-step", front.lev_step, "leverage grid spacing");

    EstimateArgs est;
    auto* c_est = app.add_subcommand("estimate", "fit core and tails to a return series");
    c_est->add_option("--input", est.input, "CSV of returns")->required();
    c_est->add_option("--quantile", est.quantile, "tail quantile q in (0, 0.25]");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::CallForVersion&) {
        out << KELLY_TAILS_VERSION << '\n';
        return exit_ok;
    } catch (const CLI::FileError& e) {
        err << "IO_ERROR: " << e.what() << '\n';
        return exit_io;
    } catch (const CLI::ParseError& e) {
        err << "INVALID_PARAMETER: " << e.what() << '\n';
        return exit_invalid;
    }

    const CLI::App* active = app.get_subcommands().front();
    const Format format = g.output == "csv" ? Format::Csv : g.output == "json" ? Format::Json : Format::Text;
    try {
        Report report;
        const std::string name = active->get_name();
        if (name == "single")
            report = cmd_single(single);
        else if (name == "sweep")
            report = cmd_sweep(sweep);
        else if (name == "parity")
            report = cmd_parity(parity);
        else if (name == "simulate")
            report = cmd_simulate(sim, g.seed);
        else if (name == "scenario")
            report = cmd_scenario(scen);
        else if (name == "frontier")
            report = cmd_frontier(front);
        else
            report = cmd_estimate(est, err);

        std::ostringstream body;
        write_report(body, report, format);
        if (g.out.empty()) {
            out << body.str();
            return exit_ok;
        }

        nlohmann::ordered_json meta;
        meta["command"] = name;
        meta["version"] = KELLY_TAILS_VERSION;
        meta["seed"] = g.seed;
        meta["output"] = g.output;
        meta["config"] = option_values(*active);
        write_atomically(g.out, body.str());
        write_atomically(g.out + ".meta.json", meta.dump(2) + "\n");
        return exit_ok;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "INVALID_PARAMETER: " << e.what() << '\n';
        return exit_invalid;
    }
}

} // namespace kelly::cli
