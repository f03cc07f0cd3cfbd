/**
 * @file estimate.hpp
 * @brief Fit a core-plus-tails model to a historical return series.
 *
 * Tail buckets are the observations strictly beyond the empirical q and
 * 1 - q quantiles (type 7). ETL and ETW are mean absolute returns in each
 * bucket. The core is then recalibrated so the fitted model reproduces the
 * full-sample mean and (population) variance.
 */
#pragma once

#include "kelly/model.hpp"

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace kelly
{

struct ReturnSeries
{
    std::vector<double> values;  ///< simple per-period returns, each > -1
    std::string period_label;
};

inline constexpr std::size_t min_estimation_length = 30;

struct EstimateDiagnostics
{
    double tail_quantile = 0.05;
    double left_threshold = 0.0;
    double right_threshold = 0.0;
    std::size_t left_count = 0;
    std::size_t right_count = 0;
    std::size_t interior_count = 0;
    double interior_mean = 0.0;
    double interior_sd = 0.0;
    double sample_mean = 0.0;
    double sample_sd = 0.0;
    bool degenerate_left = false;   ///< empty loss bucket, alpha set to 0
    bool degenerate_right = false;  ///< empty win bucket, beta set to 0
};

struct Estimate
{
    GaussianCore core;
    TailSpec tails;
    EstimateDiagnostics diagnostics;
};

/// @throws kelly::Error SeriesTooShort, InvalidParameter (bad q or a value
///         <= -1), or the calibration error when no valid core exists.
Estimate estimate_params(const ReturnSeries& series, double tail_quantile = 0.05);

/// One return per line, or a comma-separated table with a "return" column.
/// A non-numeric first line is treated as a header; blank lines are skipped.
ReturnSeries parse_returns_csv(std::istream& in);
ReturnSeries read_returns_csv(const std::filesystem::path& path);

} // namespace kelly
