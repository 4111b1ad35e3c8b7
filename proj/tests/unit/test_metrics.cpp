#include <gtest/gtest.h>

#include <cmath>

#include "renewcast/errors.hpp"
#include "renewcast/metrics.hpp"

using namespace renewcast;

namespace {
const Matrix kActual{{0, 2, 4}};
const Matrix kFlat{{1, 1, 1}};
const Matrix kHistory{{1, 3, 0, 2}};
}  // namespace

TEST(QuantileLoss, HandComputed) {
    EXPECT_NEAR(quantile_loss(kActual, kFlat, 0.9), (0.2 + 1.8 + 5.4) / 3.0, 1e-14);
    EXPECT_NEAR(quantile_loss(kActual, kFlat, 0.5), (1.0 + 1.0 + 3.0) / 3.0, 1e-14);
    EXPECT_EQ(quantile_loss(kActual, kActual, 0.9), 0.0);
}

TEST(QuantileLoss, ShapeMismatch) {
    EXPECT_THROW(quantile_loss(kActual, Matrix{{1, 1}}, 0.5), ValidationError);
    EXPECT_THROW(quantile_loss(kActual, Matrix{}, 0.5), ValidationError);
}

TEST(Mape, SkipsZeroActuals) {
    const SkippingMean m = mape(Matrix{{0, 2, 4}, {0, 0, 0}}, Matrix{{1, 1, 1}, {5, 5, 5}});
    EXPECT_NEAR(m.value, 0.625, 1e-14);
    EXPECT_EQ(m.skipped, 1u);
    EXPECT_THROW(mape(Matrix{{0, 0}}, Matrix{{1, 1}}), ValidationError);
}

TEST(Smape, ZeroCellConventions) {
    EXPECT_NEAR(smape(kActual, kFlat), 2.0 / 3.0 * (1.0 + 1.0 / 3.0 + 3.0 / 5.0), 1e-14);
    const Matrix a{{0, 2}}, f{{0, 2}};
    EXPECT_EQ(smape(a, f, SmapeZeroCells::zero), 0.0);
    EXPECT_DOUBLE_EQ(smape(a, f, SmapeZeroCells::max), 1.0);
    EXPECT_DOUBLE_EQ(smape(Matrix{{3}}, Matrix{{0}}), 2.0);
}

TEST(Rmse, HandComputed) { EXPECT_NEAR(rmse(kActual, kFlat), std::sqrt(11.0 / 3.0), 1e-14); }

TEST(Rmsse, PrintedVariant) {
    // In-sample |diffs| 2 + 3 + 2 over four periods.
    const SkippingMean r = rmsse(kActual, kFlat, kHistory, RmsseVariant::printed);
    EXPECT_NEAR(r.value, (11.0 / 3.0) / 1.75, 1e-14);
    EXPECT_EQ(r.skipped, 0u);
}

TEST(Rmsse, M5Variant) {
    const SkippingMean r = rmsse(kActual, kFlat, kHistory, RmsseVariant::m5);
    EXPECT_NEAR(r.value, std::sqrt((11.0 / 3.0) / (17.0 / 3.0)), 1e-14);
}

TEST(Rmsse, FlatHistorySkipped) {
    const SkippingMean r = rmsse(Matrix{{1}, {2}}, Matrix{{0}, {0}}, Matrix{{5, 5, 5}, {0, 2}});
    EXPECT_EQ(r.skipped, 1u);
    EXPECT_NEAR(r.value, 4.0 / 1.0, 1e-14);
    EXPECT_THROW(rmsse(Matrix{{1}}, Matrix{{0}}, Matrix{{5, 5}}), ValidationError);
}

TEST(Evaluate, OptionalMetrics) {
    const MetricsReport r = evaluate(Matrix{{0, 0}}, Matrix{{0, 0}}, Matrix{{1, 1}});
    EXPECT_FALSE(r.mape);
    EXPECT_FALSE(r.rmsse);
    EXPECT_FALSE(r.p50_loss);
    EXPECT_EQ(r.mape_skipped, 1u);
    EXPECT_EQ(*r.rmse, 0.0);
    const Matrix p90{{1, 1, 1}};
    const MetricsReport full = evaluate(kActual, kFlat, kHistory, &kFlat, &p90);
    EXPECT_NEAR(*full.p90_loss, 7.4 / 3.0, 1e-14);
    EXPECT_NEAR(*full.p50_loss, 5.0 / 3.0, 1e-14);
    EXPECT_EQ(full.items, 1u);
}

TEST(Sbc, StatsAndClasses) {
    // Intervals 2, 3; sizes 3, 2.
    const SbcStats s = sbc_stats(DemandSeries{"x", 0, {0, 3, 0, 0, 2}});
    EXPECT_DOUBLE_EQ(s.mean_interval, 2.5);
    EXPECT_NEAR(s.size_cv2, 0.5 / 6.25, 1e-15);
    EXPECT_EQ(sbc_classify(s), SbcClass::intermittent);
    EXPECT_EQ(sbc_classify({1.0, 0.1}), SbcClass::smooth);
    EXPECT_EQ(sbc_classify({1.0, 0.8}), SbcClass::erratic);
    EXPECT_EQ(sbc_classify({2.0, 0.8}), SbcClass::lumpy);
    EXPECT_EQ(sbc_classify({1.32, 0.49}), SbcClass::lumpy);
    EXPECT_EQ(sbc_stats(DemandSeries{"x", 0, {0, 7}}).size_cv2, 0.0);
    EXPECT_THROW(sbc_stats(DemandSeries{"x", 0, {0, 0}}), ValidationError);
    EXPECT_EQ(to_string(SbcClass::lumpy), "lumpy");
}
