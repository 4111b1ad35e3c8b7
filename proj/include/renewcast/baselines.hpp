#pragma once

#include <vector>

#include "renewcast/series.hpp"

namespace renewcast {

/// Point forecast over a horizon; constant for the baselines here.
struct PointForecast {
    std::vector<double> per_period;
};

/// Ratio of the EWMA of sizes to the EWMA of intervals, each initialized
/// with its first observation. Throws ValidationError without issue points.
double croston_rate(const DemandSeries& series, double alpha = 0.1);
PointForecast croston_forecast(const DemandSeries& series, std::size_t horizon, double alpha = 0.1);

/// Croston scaled by (1 - alpha / 2).
PointForecast sba_forecast(const DemandSeries& series, std::size_t horizon, double alpha = 0.1);

/// State of the Teunter-Syntetos-Babai recursion after the last period.
struct TsbState {
    double probability = 0.0;
    double size = 0.0;
    double forecast() const noexcept { return probability * size; }
};

/// Runs over every period: probability smoothed with beta against the
/// demand indicator, size smoothed with alpha at issue points. Starts from
/// p0 = issue points / N and s0 = first positive size (0 if none).
TsbState tsb_state(const DemandSeries& series, double alpha = 0.1, double beta = 0.1);
PointForecast tsb_forecast(const DemandSeries& series, std::size_t horizon, double alpha = 0.1,
                           double beta = 0.1);

PointForecast zero_forecast(std::size_t horizon);

}  // namespace renewcast
