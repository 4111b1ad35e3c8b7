#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "renewcast/distributions.hpp"
#include "renewcast/errors.hpp"

using namespace renewcast;

namespace {

// Shifted NB hazard h(1..20) for mu = 5, nu = 4 (50-digit mpmath, exact summation).
constexpr double kNb54Hazard[20] = {
    0.15749013123685915, 0.18692971688042643, 0.20116772887433002, 0.20985603626868134,
    0.21579362406707356, 0.22013962721010113, 0.22347231755243343, 0.22611607587406558,
    0.22826832134565299, 0.23005667983315409, 0.23156760010861359, 0.23286186281216233,
    0.23398352554301122, 0.23496534779929724, 0.23583222029565147, 0.23660340965516535,
    0.23729407205684369, 0.23791630050484555, 0.23847986587509609, 0.23899275176421228};

double truncation_point(const DistributionSpec& s) { return mean(s) + 50.0 * std::sqrt(variance(s)); }

std::vector<DistributionSpec> count_specs() {
    return {DistributionSpec::shifted_poisson(1.0),     DistributionSpec::shifted_poisson(2.5),
            DistributionSpec::shifted_poisson(30.0),    DistributionSpec::shifted_geometric(1.0),
            DistributionSpec::shifted_geometric(2.0),   DistributionSpec::shifted_geometric(12.0),
            DistributionSpec::shifted_negbin(1.0, 2.0), DistributionSpec::shifted_negbin(3.0, 2.0),
            DistributionSpec::shifted_negbin(5.0, 4.0), DistributionSpec::shifted_negbin(3.0, 6.0),
            DistributionSpec::shifted_negbin(20.0, 1.05), DistributionSpec::shifted_negbin(8.0, 40.0)};
}

}  // namespace

TEST(Pmf, ClosedFormValues) {
    EXPECT_DOUBLE_EQ(pmf(DistributionSpec::shifted_geometric(2.0), 1), 0.5);
    EXPECT_DOUBLE_EQ(pmf(DistributionSpec::shifted_geometric(1.0), 1), 1.0);
    EXPECT_DOUBLE_EQ(pmf(DistributionSpec::shifted_geometric(1.0), 2), 0.0);
    EXPECT_NEAR(pmf(DistributionSpec::shifted_negbin(3.0, 3.0), 2), 2.0 / 9.0, 1e-15);
    EXPECT_NEAR(pmf(DistributionSpec::shifted_poisson(3.0), 3), std::exp(-2.0) * 2.0, 1e-15);
}

TEST(Pmf, DomainErrors) {
    EXPECT_THROW(pmf(DistributionSpec::shifted_geometric(2.0), 0), DomainError);
    EXPECT_THROW(pmf(DistributionSpec::exponential(2.0), 1), DomainError);
    EXPECT_THROW(DistributionSpec::shifted_negbin(3.0, 1.0), DomainError);
    EXPECT_THROW(DistributionSpec::shifted_poisson(0.5), DomainError);
    EXPECT_THROW(DistributionSpec::exponential(0.0), DomainError);
}

TEST(Pmf, NormalizesAndMatchesMean) {
    for (const auto& s : count_specs()) {
        const auto kmax = static_cast<Count>(std::ceil(truncation_point(s)));
        double total = 0.0, first_moment = 0.0;
        for (Count k = 1; k <= kmax; ++k) {
            const double p = pmf(s, k);
            ASSERT_GE(p, 0.0);
            total += p;
            first_moment += static_cast<double>(k) * p;
        }
        EXPECT_GT(total, 1.0 - 1e-9) << describe(s);
        EXPECT_NEAR(first_moment, mean(s), 1e-6 * s.mu) << describe(s);
    }
}

TEST(Pmf, NegbinWithNuEqualMuIsGeometric) {
    for (double mu : {2.0, 3.5, 10.0}) {
        const auto nb = DistributionSpec::shifted_negbin(mu, mu);
        const auto g = DistributionSpec::shifted_geometric(mu);
        for (Count k = 1; k <= 100; ++k) EXPECT_NEAR(pmf(nb, k), pmf(g, k), 1e-12);
    }
}

TEST(Cdf, ConventionsAndOracle) {
    for (const auto& s : count_specs()) EXPECT_EQ(cdf(s, 0), 0.0);
    EXPECT_DOUBLE_EQ(cdf(DistributionSpec::shifted_geometric(2.0), 2), 0.75);
    EXPECT_NEAR(cdf(DistributionSpec::shifted_negbin(3.0, 2.0), 5), 57.0 / 64.0, 1e-14);
}

TEST(Cdf, MonotoneAndBounded) {
    for (const auto& s : count_specs()) {
        double prev = 0.0;
        for (Count k = 1; k <= 200; ++k) {
            const double f = cdf(s, k);
            ASSERT_GE(f, prev);
            ASSERT_LE(f, 1.0);
            EXPECT_NEAR(f + survival(s, k), 1.0, 1e-12);
            prev = f;
        }
    }
}

TEST(Cdf, IncompleteBetaOracle) {
    struct Row {
        double mu, nu;
        Count k;
        double expected;
    };
    // F(k) = I_{1/nu}(r, k), mpmath betainc at 50 digits.
    const Row rows[] = {
        {1.5, 1.2, 1, 0.6339381452606089221},    {1.5, 2.0, 3, 0.95017473721942323591},
        {2.0, 1.5, 2, 0.74074074074074074074},   {2.0, 4.0, 6, 0.9595004219495624248},
        {3.0, 2.0, 5, 0.890625},                 {3.0, 6.0, 1, 0.4883593419305869251},
        {3.0, 6.0, 12, 0.97211767349549894607},  {4.0, 3.0, 4, 0.67001142350401014647},
        {5.0, 4.0, 10, 0.90557869775094716093},  {5.0, 1.1, 5, 0.62898485072571900826},
        {7.5, 2.5, 7, 0.566465464652160737},     {10.0, 2.0, 3, 0.03271484375},
        {10.0, 2.0, 15, 0.89498019218444824219}, {10.0, 9.0, 30, 0.96288756207621148085},
        {12.0, 1.3, 12, 0.57995252412368554262}, {20.0, 5.0, 20, 0.58136009342186740569},
        {25.0, 3.0, 40, 0.95248972069340865073}, {40.0, 1.5, 35, 0.28773176633146232422},
        {60.0, 10.0, 100, 0.93645540619832099795}, {100.0, 2.0, 90, 0.25583980908616701724},
    };
    for (const auto& r : rows) {
        EXPECT_NEAR(cdf(DistributionSpec::shifted_negbin(r.mu, r.nu), r.k), r.expected, 1e-9)
            << r.mu << " " << r.nu << " " << r.k;
    }
}

TEST(Survival, KeepsRelativePrecisionInTheTail) {
    const auto s = DistributionSpec::shifted_poisson(3.0);
    // P(Y > 40) = P(Po(2) > 39), dominated by its first term.
    const double first = pmf(s, 41);
    EXPECT_GT(survival(s, 40), first);
    EXPECT_LT(survival(s, 40), first * 1.1);
}

TEST(Hazard, GeometricIsConstant) {
    const auto g = DistributionSpec::shifted_geometric(4.0);
    for (Count k = 1; k <= 50; ++k) EXPECT_NEAR(hazard(g, k).value, 0.25, 1e-12);
}

TEST(Hazard, FirstStepIsPmf) {
    for (const auto& s : count_specs()) EXPECT_DOUBLE_EQ(hazard(s, 1).value, pmf(s, 1));
}

TEST(Hazard, NegbinOracleTable) {
    const auto s = DistributionSpec::shifted_negbin(5.0, 4.0);
    for (Count k = 1; k <= 20; ++k) EXPECT_NEAR(hazard(s, k).value, kNb54Hazard[k - 1], 1e-13) << k;
}

TEST(Hazard, NegbinDirectionFollowsShape) {
    // r > 1 increasing, r = 1 constant, r < 1 decreasing.
    const auto inc = DistributionSpec::shifted_negbin(5.0, 4.0);   // r = 4/3
    const auto flat = DistributionSpec::shifted_negbin(3.0, 3.0);  // r = 1
    const auto dec = DistributionSpec::shifted_negbin(3.0, 6.0);   // r = 0.4
    for (Count k = 1; k < 20; ++k) {
        EXPECT_LT(hazard(inc, k).value, hazard(inc, k + 1).value);
        EXPECT_NEAR(hazard(flat, k).value, hazard(flat, k + 1).value, 1e-12);
        EXPECT_GT(hazard(dec, k).value, hazard(dec, k + 1).value);
    }
}

TEST(Hazard, SaturatesBeyondTheFloor) {
    const auto s = DistributionSpec::shifted_poisson(2.0);
    const Hazard h = hazard(s, 400);
    EXPECT_TRUE(h.saturated);
    EXPECT_EQ(h.value, 1.0);
    EXPECT_FALSE(hazard(s, 3).saturated);
}

TEST(Sample, DegenerateAndMoments) {
    Rng rng(1);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(sample(DistributionSpec::shifted_geometric(1.0), rng), 1);

    const int n = 100'000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(sample(DistributionSpec::shifted_geometric(3.0), rng));
    EXPECT_GE(sum / n, 2.97);
    EXPECT_LE(sum / n, 3.03);

    std::vector<double> xs(n);
    double m = 0.0;
    for (auto& x : xs) {
        x = static_cast<double>(sample(DistributionSpec::shifted_negbin(4.0, 3.0), rng));
        m += x;
    }
    m /= n;
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    v /= n - 1;
    EXPECT_GE(v / (m - 1.0), 2.8);
    EXPECT_LE(v / (m - 1.0), 3.2);
}

TEST(Sample, DeterministicPerSeed) {
    Rng a(42), b(42);
    const auto s = DistributionSpec::shifted_negbin(6.0, 2.5);
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample(s, a), sample(s, b));
}

TEST(Sample, ResidualMatchesConditionalLaw) {
    const auto s = DistributionSpec::shifted_negbin(5.0, 4.0);
    const Count elapsed = 6;
    Rng rng(5);
    const int n = 200'000;
    std::vector<int> counts(12, 0);
    for (int i = 0; i < n; ++i) {
        const Count q = sample_residual(s, elapsed, rng);
        ASSERT_GT(q, elapsed);
        if (q - elapsed <= 12) ++counts[static_cast<std::size_t>(q - elapsed - 1)];
    }
    const double surv = survival(s, elapsed);
    for (Count j = 1; j <= 12; ++j) {
        const double p = pmf(s, elapsed + j) / surv;
        const double se = std::sqrt(p * (1 - p) / n);
        EXPECT_NEAR(counts[static_cast<std::size_t>(j - 1)] / double(n), p, 4 * se) << j;
    }
}

TEST(Sample, ExponentialMean) {
    Rng rng(9);
    double sum = 0.0;
    const int n = 100'000;
    for (int i = 0; i < n; ++i) sum += sample_continuous(DistributionSpec::exponential(2.0), rng);
    EXPECT_NEAR(sum / n, 2.0, 4 * 2.0 / std::sqrt(n));
}

TEST(FitMle, ClosedForms) {
    EXPECT_DOUBLE_EQ(fit_mle(DistKind::shifted_geometric, std::vector<double>{2, 4, 6}).spec.mu, 4.0);
    EXPECT_DOUBLE_EQ(fit_mle(DistKind::shifted_poisson, std::vector<double>{1, 1, 4}).spec.mu, 2.0);
    EXPECT_DOUBLE_EQ(fit_mle(DistKind::exponential, std::vector<double>{0.5, 1.5}).spec.mu, 1.0);
}

TEST(FitMle, NegbinAllOnesIsDegenerate) {
    const MleFit f = fit_mle(DistKind::shifted_negbin, std::vector<double>{1, 1, 1, 1});
    EXPECT_TRUE(f.degenerate);
    EXPECT_EQ(f.spec.mu, 1.0);
    EXPECT_EQ(f.spec.nu, kNbDispersionLower);
}

TEST(FitMle, NegbinRecoversParameters) {
    Rng rng(2024);
    const auto truth = DistributionSpec::shifted_negbin(4.0, 3.0);
    std::vector<double> data(10'000);
    for (auto& x : data) x = static_cast<double>(sample(truth, rng));
    const MleFit f = fit_mle(DistKind::shifted_negbin, data);
    EXPECT_FALSE(f.degenerate);
    EXPECT_GE(f.spec.mu, 3.9);
    EXPECT_LE(f.spec.mu, 4.1);
    EXPECT_GE(f.spec.nu, 2.7);
    EXPECT_LE(f.spec.nu, 3.3);
}

TEST(FitMle, NegbinIsALocalMaximum) {
    Rng rng(7);
    std::vector<double> data(2000);
    for (auto& x : data) x = static_cast<double>(sample(DistributionSpec::shifted_negbin(6.0, 2.0), rng));
    const auto best = fit_mle(DistKind::shifted_negbin, data).spec;
    const double ll = log_likelihood(best, data);
    for (double f : {0.97, 1.03}) {
        EXPECT_GE(ll, log_likelihood(DistributionSpec::shifted_negbin(best.mu * f, best.nu), data));
        EXPECT_GE(ll, log_likelihood(DistributionSpec::shifted_negbin(best.mu, 1.0 + (best.nu - 1.0) * f), data));
    }
}

TEST(FitMle, RejectsBadData) {
    EXPECT_THROW(fit_mle(DistKind::shifted_poisson, std::vector<double>{}), ValidationError);
    EXPECT_THROW(fit_mle(DistKind::shifted_poisson, std::vector<double>{0, 2}), ValidationError);
    EXPECT_THROW(fit_mle(DistKind::shifted_poisson, std::vector<double>{1.5}), ValidationError);
}
