#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace kelly
{

/// Neumaier compensated summation.
class CompensatedSum
{
public:
    void add(double x) noexcept
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            compensation_ += (sum_ - t) + x;
        else
            compensation_ += (x - t) + sum_;
        sum_ = t;
    }

    void add(const CompensatedSum& other) noexcept
    {
        add(other.sum_);
        add(other.compensation_);
    }

    double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

/// Quantile of already sorted data, linear interpolation between order
/// statistics (Hyndman-Fan type 7, the R/NumPy default).
inline double quantile_sorted(std::span<const double> sorted, double q)
{
    if (sorted.empty())
        throw std::invalid_argument("quantile of empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::vector<double> values, double q)
{
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, q);
}

} // namespace kelly
