#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace rtp {

struct MeanEstimate {
    double mean;
    double stderr_;
    std::size_t n;
};

inline MeanEstimate mean_estimate(const std::vector<double>& v)
{
    if (v.empty())
        throw std::invalid_argument("mean of an empty sample");
    double m = 0.0;
    for (double x : v)
        m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v)
        ss += (x - m) * (x - m);
    const double n = static_cast<double>(v.size());
    const double var = v.size() > 1 ? ss / (n - 1.0) : 0.0;
    return {m, std::sqrt(var / n), v.size()};
}

/// Smallest sample value q with (#{v <= q} / n) >= p.
inline double empirical_quantile(std::vector<double> v, double p)
{
    if (v.empty())
        throw std::invalid_argument("quantile of an empty sample");
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    auto k = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
    k = std::clamp<std::size_t>(k, 1, v.size());
    return v[k - 1];
}

} // namespace rtp
