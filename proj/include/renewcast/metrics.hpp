#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "renewcast/series.hpp"

namespace renewcast {

/// Items x horizon periods.
using Matrix = std::vector<std::vector<double>>;

/// Mean over all cells of the two-sided weighted loss
/// 2 rho (y - q) if y > q, else 2 (1 - rho) (q - y).
double quantile_loss(const Matrix& actuals, const Matrix& quantiles, double rho);

struct SkippingMean {
    double value = 0.0;
    std::size_t skipped = 0;  ///< items excluded from the average
};

/// Per-item mean of |y - f| / y over cells with y > 0, averaged over items.
/// Items without a positive actual are skipped; throws ValidationError if
/// every item is skipped.
SkippingMean mape(const Matrix& actuals, const Matrix& forecasts);

/// Score of a cell whose actual and forecast are both zero.
enum class SmapeZeroCells {
    zero,  ///< a correct prediction, contributes 0
    max,   ///< contributes the maximum 2, as an undefined ratio counted as 1
};

/// 2/(LM) sum |y - f| / (|y| + |f|).
double smape(const Matrix& actuals, const Matrix& forecasts,
             SmapeZeroCells zero_cells = SmapeZeroCells::zero);

double rmse(const Matrix& actuals, const Matrix& forecasts);

enum class RmsseVariant {
    /// Squared errors over the mean absolute in-sample difference (sum of
    /// L' - 1 differences divided by L'), averaged, without a square root.
    printed,
    /// M5 definition: squared differences divided by L' - 1, outer root per item.
    m5,
};

/// Items whose in-sample scale is zero (or shorter than 2) are skipped.
/// Throws ValidationError if every item is skipped.
SkippingMean rmsse(const Matrix& actuals, const Matrix& forecasts, const Matrix& in_sample,
                   RmsseVariant variant = RmsseVariant::printed);

struct MetricsReport {
    std::optional<double> p50_loss;
    std::optional<double> p90_loss;
    std::optional<double> mape;
    std::optional<double> smape;
    std::optional<double> rmse;
    std::optional<double> rmsse;
    std::size_t mape_skipped = 0;
    std::size_t rmsse_skipped = 0;
    std::size_t items = 0;
};

/// Point-forecast metrics always; quantile losses when the P50/P90 matrices
/// are given. Undefined metrics stay empty.
MetricsReport evaluate(const Matrix& actuals, const Matrix& point, const Matrix& in_sample,
                       const Matrix* p50 = nullptr, const Matrix* p90 = nullptr,
                       RmsseVariant variant = RmsseVariant::printed,
                       SmapeZeroCells zero_cells = SmapeZeroCells::zero);

enum class SbcClass { smooth, erratic, intermittent, lumpy };
std::string to_string(SbcClass c);

struct SbcThresholds {
    double interval = 1.32;
    double cv2 = 0.49;
};

struct SbcStats {
    double mean_interval = 0.0;  ///< p
    double size_cv2 = 0.0;       ///< sample variance / mean^2 of the sizes
};

/// Throws ValidationError without issue points. One issue point gives CV2 = 0.
SbcStats sbc_stats(const DemandSeries& series);
SbcClass sbc_classify(const SbcStats& stats, const SbcThresholds& thresholds = {});
SbcClass sbc_classify(const DemandSeries& series, const SbcThresholds& thresholds = {});

}  // namespace renewcast
