#include "renewcast/baselines.hpp"

#include <algorithm>

#include "renewcast/errors.hpp"

namespace renewcast {
namespace {

void check_weight(double w, const char* name) {
    if (!(w >= 0.0 && w <= 1.0)) throw DomainError(std::string(name) + " must lie in [0, 1]");
}

/// EWMA with first-observation initialization; alpha = 0 keeps the first value.
double smooth(const std::vector<Count>& xs, double alpha) {
    double s = static_cast<double>(xs.front());
    for (std::size_t i = 1; i < xs.size(); ++i) s += alpha * (static_cast<double>(xs[i]) - s);
    return s;
}

}  // namespace

double croston_rate(const DemandSeries& series, double alpha) {
    check_weight(alpha, "alpha");
    const SizeIntervalSeries si = decompose(series);
    if (si.empty()) throw ValidationError("Croston needs an issue point in '" + series.item_id + "'");
    return smooth(si.sizes, alpha) / smooth(si.intervals, alpha);
}

PointForecast croston_forecast(const DemandSeries& series, std::size_t horizon, double alpha) {
    return {std::vector<double>(horizon, croston_rate(series, alpha))};
}

PointForecast sba_forecast(const DemandSeries& series, std::size_t horizon, double alpha) {
    return {std::vector<double>(horizon, (1.0 - alpha / 2.0) * croston_rate(series, alpha))};
}

TsbState tsb_state(const DemandSeries& series, double alpha, double beta) {
    check_weight(alpha, "alpha");
    check_weight(beta, "beta");
    if (series.values.empty()) throw ValidationError("TSB needs a nonempty series");
    const auto& y = series.values;
    const auto issues = std::count_if(y.begin(), y.end(), [](Count v) { return v > 0; });
    const auto first = std::find_if(y.begin(), y.end(), [](Count v) { return v > 0; });
    TsbState st{static_cast<double>(issues) / static_cast<double>(y.size()),
                first == y.end() ? 0.0 : static_cast<double>(*first)};
    for (Count v : y) {
        const bool demand = v > 0;
        st.probability += beta * ((demand ? 1.0 : 0.0) - st.probability);
        if (demand) st.size += alpha * (static_cast<double>(v) - st.size);
    }
    return st;
}

PointForecast tsb_forecast(const DemandSeries& series, std::size_t horizon, double alpha, double beta) {
    return {std::vector<double>(horizon, tsb_state(series, alpha, beta).forecast())};
}

PointForecast zero_forecast(std::size_t horizon) { return {std::vector<double>(horizon, 0.0)}; }

}  // namespace renewcast
