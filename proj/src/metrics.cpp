#include "renewcast/metrics.hpp"

#include <cmath>
#include <numeric>

#include "renewcast/errors.hpp"

namespace renewcast {
namespace {

std::size_t check_shapes(const Matrix& a, const Matrix& f) {
    if (a.size() != f.size()) throw ValidationError("actuals and forecasts differ in item count");
    std::size_t cells = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != f[i].size()) {
            throw ValidationError("actuals and forecasts differ in horizon for item " + std::to_string(i));
        }
        cells += a[i].size();
    }
    if (cells == 0) throw ValidationError("no cells to evaluate");
    return cells;
}

/// Mean over all cells of fn(y, f).
template <class Fn>
double cell_mean(const Matrix& a, const Matrix& f, Fn fn) {
    const std::size_t cells = check_shapes(a, f);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t n = 0; n < a[i].size(); ++n) sum += fn(a[i][n], f[i][n]);
    }
    return sum / static_cast<double>(cells);
}

}  // namespace

double quantile_loss(const Matrix& actuals, const Matrix& quantiles, double rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
    return cell_mean(actuals, quantiles, [rho](double y, double q) {
        return y - q > 0.0 ? 2.0 * rho * (y - q) : 2.0 * (1.0 - rho) * (q - y);
    });
}

SkippingMean mape(const Matrix& actuals, const Matrix& forecasts) {
    check_shapes(actuals, forecasts);
    SkippingMean out;
    double total = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < actuals.size(); ++i) {
        double sum = 0.0;
        std::size_t positive = 0;
        for (std::size_t n = 0; n < actuals[i].size(); ++n) {
            const double y = actuals[i][n];
            if (y > 0.0) {
                sum += std::abs(y - forecasts[i][n]) / y;
                ++positive;
            }
        }
        if (positive == 0) {
            ++out.skipped;
            continue;
        }
        total += sum / static_cast<double>(positive);
        ++used;
    }
    if (used == 0) throw ValidationError("MAPE undefined: no item has a positive actual");
    out.value = total / static_cast<double>(used);
    return out;
}

double smape(const Matrix& actuals, const Matrix& forecasts, SmapeZeroCells zero_cells) {
    const double undefined = zero_cells == SmapeZeroCells::zero ? 0.0 : 1.0;
    return 2.0 * cell_mean(actuals, forecasts, [undefined](double y, double f) {
               const double denom = std::abs(y) + std::abs(f);
               return denom == 0.0 ? undefined : std::abs(y - f) / denom;
           });
}

double rmse(const Matrix& actuals, const Matrix& forecasts) {
    return std::sqrt(cell_mean(actuals, forecasts, [](double y, double f) { return (y - f) * (y - f); }));
}

SkippingMean rmsse(const Matrix& actuals, const Matrix& forecasts, const Matrix& in_sample,
                   RmsseVariant variant) {
    check_shapes(actuals, forecasts);
    if (in_sample.size() != actuals.size()) throw ValidationError("in-sample history count differs");
    SkippingMean out;
    double total = 0.0;
    std::size_t used = 0;
    std::size_t cells = 0;
    for (std::size_t i = 0; i < actuals.size(); ++i) {
        const auto& h = in_sample[i];
        if (h.size() < 2) {
            ++out.skipped;
            continue;
        }
        double scale = 0.0;
        for (std::size_t n = 1; n < h.size(); ++n) {
            const double d = h[n] - h[n - 1];
            scale += variant == RmsseVariant::printed ? std::abs(d) : d * d;
        }
        scale /= static_cast<double>(variant == RmsseVariant::printed ? h.size() : h.size() - 1);
        if (scale == 0.0) {
            ++out.skipped;
            continue;
        }
        double sq = 0.0;
        for (std::size_t n = 0; n < actuals[i].size(); ++n) {
            const double e = actuals[i][n] - forecasts[i][n];
            sq += e * e;
        }
        if (variant == RmsseVariant::printed) {
            total += sq / scale;
            cells += actuals[i].size();
        } else {
            total += std::sqrt(sq / static_cast<double>(actuals[i].size()) / scale);
        }
        ++used;
    }
    if (used == 0) throw ValidationError("RMSSE undefined: every item has a zero in-sample scale");
    out.value = variant == RmsseVariant::printed ? total / static_cast<double>(cells)
                                                 : total / static_cast<double>(used);
    return out;
}

MetricsReport evaluate(const Matrix& actuals, const Matrix& point, const Matrix& in_sample,
                       const Matrix* p50, const Matrix* p90, RmsseVariant variant,
                       SmapeZeroCells zero_cells) {
    MetricsReport r;
    r.items = actuals.size();
    if (p50) r.p50_loss = quantile_loss(actuals, *p50, 0.5);
    if (p90) r.p90_loss = quantile_loss(actuals, *p90, 0.9);
    try {
        const auto m = mape(actuals, point);
        r.mape = m.value;
        r.mape_skipped = m.skipped;
    } catch (const ValidationError&) {
        r.mape_skipped = actuals.size();
    }
    r.smape = smape(actuals, point, zero_cells);
    r.rmse = rmse(actuals, point);
    try {
        const auto s = rmsse(actuals, point, in_sample, variant);
        r.rmsse = s.value;
        r.rmsse_skipped = s.skipped;
    } catch (const ValidationError&) {
        r.rmsse_skipped = actuals.size();
    }
    return r;
}

std::string to_string(SbcClass c) {
    switch (c) {
        case SbcClass::smooth: return "smooth";
        case SbcClass::erratic: return "erratic";
        case SbcClass::intermittent: return "intermittent";
        case SbcClass::lumpy: return "lumpy";
    }
    return "unknown";
}

SbcStats sbc_stats(const DemandSeries& series) {
    const SizeIntervalSeries si = decompose(series);
    if (si.empty()) throw ValidationError("SBC needs an issue point in '" + series.item_id + "'");
    const auto n = static_cast<double>(si.sizes.size());
    SbcStats s;
    s.mean_interval = static_cast<double>(std::accumulate(si.intervals.begin(), si.intervals.end(), Count{0})) / n;
    if (si.sizes.size() > 1) {
        const double m = static_cast<double>(std::accumulate(si.sizes.begin(), si.sizes.end(), Count{0})) / n;
        double ss = 0.0;
        for (Count v : si.sizes) ss += (static_cast<double>(v) - m) * (static_cast<double>(v) - m);
        s.size_cv2 = ss / (n - 1.0) / (m * m);
    }
    return s;
}

SbcClass sbc_classify(const SbcStats& stats, const SbcThresholds& t) {
    const bool long_gaps = stats.mean_interval >= t.interval;
    const bool variable = stats.size_cv2 >= t.cv2;
    if (long_gaps) return variable ? SbcClass::lumpy : SbcClass::intermittent;
    return variable ? SbcClass::erratic : SbcClass::smooth;
}

SbcClass sbc_classify(const DemandSeries& series, const SbcThresholds& t) {
    return sbc_classify(sbc_stats(series), t);
}

}  // namespace renewcast
