#include "kelly/estimate.hpp"

#include "kelly/error.hpp"
#include "kelly/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

namespace kelly
{

namespace
{

struct SampleMoments
{
    double mean = 0.0;
    double sd = 0.0;
};

SampleMoments population_moments(std::span<const double> xs)
{
    if (xs.empty())
        return {};
    CompensatedSum s;
    for (const double x : xs)
        s.add(x);
    const double mean = s.value() / static_cast<double>(xs.size());
    CompensatedSum v;
    for (const double x : xs)
        v.add((x - mean) * (x - mean));
    return {mean, std::sqrt(v.value() / static_cast<double>(xs.size()))};
}

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return cells;
}

bool parse_number(std::string_view text, double& out)
{
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size() && std::isfinite(out);
}

std::string lowercase(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

} // namespace

Estimate estimate_params(const ReturnSeries& series, double q)
{
    if (!(q > 0.0 && q <= 0.25))
        throw Error(ErrorCode::InvalidParameter, "tail quantile must lie in (0, 0.25]");
    const auto& xs = series.values;
    if (xs.size() < min_estimation_length) {
        std::ostringstream os;
        os << "need at least " << min_estimation_length << " returns, got " << xs.size();
        throw Error(ErrorCode::SeriesTooShort, os.str());
    }
    for (const double x : xs)
        if (!std::isfinite(x) || x <= -1.0)
            throw Error(ErrorCode::InvalidParameter, "returns must be finite and above -1");

    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());

    Estimate est;
    auto& d = est.diagnostics;
    d.tail_quantile = q;
    d.left_threshold = quantile_sorted(sorted, q);
    d.right_threshold = quantile_sorted(sorted, 1.0 - q);

    CompensatedSum left_mag, right_mag;
    std::vector<double> interior;
    for (const double x : xs) {
        if (x < d.left_threshold) {
            ++d.left_count;
            left_mag.add(std::abs(x));
        } else if (x > d.right_threshold) {
            ++d.right_count;
            right_mag.add(std::abs(x));
        } else {
            interior.push_back(x);
        }
    }
    d.interior_count = interior.size();

    const double n = static_cast<double>(xs.size());
    d.degenerate_left = d.left_count == 0;
    d.degenerate_right = d.right_count == 0;
    if (!d.degenerate_left) {
        est.tails.alpha = static_cast<double>(d.left_count) / n;
        est.tails.etl = left_mag.value() / static_cast<double>(d.left_count);
    }
    if (!d.degenerate_right) {
        est.tails.beta = static_cast<double>(d.right_count) / n;
        est.tails.etw = right_mag.value() / static_cast<double>(d.right_count);
    }

    const SampleMoments inner = population_moments(interior);
    const SampleMoments full = population_moments(xs);
    d.interior_mean = inner.mean;
    d.interior_sd = inner.sd;
    d.sample_mean = full.mean;
    d.sample_sd = full.sd;

    est.core = calibrate_center(full.mean, full.sd, est.tails);
    return est;
}

ReturnSeries parse_returns_csv(std::istream& in)
{
    ReturnSeries series;
    std::string line;
    std::size_t line_no = 0;
    std::size_t column = 0;
    bool first_content = true;
    bool any_content = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view view = trim(line);
        if (view.empty())
            continue;
        any_content = true;
        const auto cells = split(view);

        if (first_content) {
            first_content = false;
            double probe = 0.0;
            bool numeric = false;
            if (cells.size() == 1)
                numeric = parse_number(cells[0], probe);
            else
                numeric = std::any_of(cells.begin(), cells.end(),
                                      [&](std::string_view c) { return parse_number(c, probe); });
            if (!numeric) {
                const auto it = std::find_if(cells.begin(), cells.end(),
                                             [](std::string_view c) { return lowercase(c) == "return"; });
                if (it != cells.end())
                    column = static_cast<std::size_t>(it - cells.begin());
                else if (cells.size() > 1)
                    throw Error(ErrorCode::ParseError, "header has no \"return\" column", line_no);
                continue;
            }
            if (cells.size() > 1)
                throw Error(ErrorCode::ParseError, "multi-column data needs a header naming the \"return\" column",
                            line_no);
        }

        if (column >= cells.size())
            throw Error(ErrorCode::ParseError, "missing return column on line " + std::to_string(line_no), line_no);
        double value = 0.0;
        if (!parse_number(cells[column], value))
            throw Error(ErrorCode::ParseError,
                        "non-numeric value '" + std::string(cells[column]) + "' on line " + std::to_string(line_no),
                        line_no);
        series.values.push_back(value);
    }
    if (!any_content || series.values.empty())
        throw Error(ErrorCode::EmptyFile, "no returns found");
    return series;
}

ReturnSeries read_returns_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    ReturnSeries series = parse_returns_csv(in);
    series.period_label = path.stem().string();
    return series;
}

} // namespace kelly
