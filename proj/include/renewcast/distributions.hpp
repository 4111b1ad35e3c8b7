#pragma once

#include <span>
#include <string>

#include "renewcast/rng.hpp"
#include "renewcast/series.hpp"

namespace renewcast {

enum class DistKind { shifted_poisson, shifted_geometric, shifted_negbin, exponential };

std::string to_string(DistKind kind);
DistKind dist_kind_from_string(const std::string& name);

/// Mean-parameterized distribution. Count kinds live on {1, 2, ...} and take
/// mu >= 1, where mu == 1 is the point mass at 1. The negative binomial uses
/// the mean-dispersion convention: nu > 1 is the variance-to-mean ratio of
/// Y - 1, so r = (mu - 1)/(nu - 1) and the success odds pi = 1 - 1/nu.
/// The exponential kind takes mu > 0.
struct DistributionSpec {
    DistKind kind = DistKind::shifted_geometric;
    double mu = 1.0;
    double nu = 0.0;  ///< only meaningful for shifted_negbin

    static DistributionSpec shifted_poisson(double mu);
    static DistributionSpec shifted_geometric(double mu);
    static DistributionSpec shifted_negbin(double mu, double nu);
    static DistributionSpec exponential(double mu);

    void validate() const;
    bool is_count() const noexcept { return kind != DistKind::exponential; }
    bool is_point_mass() const noexcept { return is_count() && mu == 1.0; }

    friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;
};

std::string describe(const DistributionSpec& spec);

double mean(const DistributionSpec& spec);
double variance(const DistributionSpec& spec);

/// Count kinds only; k >= 1.
double log_pmf(const DistributionSpec& spec, Count k);
double pmf(const DistributionSpec& spec, Count k);

/// Exponential kind only; x >= 0.
double log_pdf(const DistributionSpec& spec, double x);
double pdf(const DistributionSpec& spec, double x);

/// P(Y <= k) for count kinds, with F(0) = 0. For the exponential kind this
/// is P(X <= k).
double cdf(const DistributionSpec& spec, Count k);
/// P(X <= x) for the exponential kind.
double continuous_cdf(const DistributionSpec& spec, double x);

/// 1 - F(k), summed from the upper tail once F(k) passes one half so that
/// small survival probabilities keep their relative precision.
double survival(const DistributionSpec& spec, Count k);

inline constexpr double kSurvivalFloor = 1e-300;

struct Hazard {
    double value = 0.0;
    bool saturated = false;  ///< survival fell below the floor; value forced to 1
};

/// h(k) = P(Y = k) / (1 - F(k - 1)), k >= 1.
Hazard hazard(const DistributionSpec& spec, Count k, double floor = kSurvivalFloor);

inline constexpr Count kSampleCap = 1'000'000;

/// Draw by cdf inversion (count kinds) or inverse transform (exponential).
/// Throws ModelError when inversion walks past kSampleCap.
Count sample(const DistributionSpec& spec, Rng& rng);
double sample_continuous(const DistributionSpec& spec, Rng& rng);

/// Draw Y conditional on Y > elapsed by renormalized inversion over the
/// residual support. A residual mass below kSurvivalFloor returns elapsed + 1.
Count sample_residual(const DistributionSpec& spec, Count elapsed, Rng& rng);

struct MleFit {
    DistributionSpec spec;
    /// All observations equal 1 under the NB kind: nu is clipped to the
    /// lower search bound.
    bool degenerate = false;
};

inline constexpr double kNbDispersionLower = 1.0 + 1e-6;
inline constexpr double kNbDispersionUpper = 1e4;

/// Maximum-likelihood fit. Count kinds require integer data >= 1.
MleFit fit_mle(DistKind kind, std::span<const double> data);

/// Sum of log pmf (count kinds) or log pdf (exponential) over `data`.
double log_likelihood(const DistributionSpec& spec, std::span<const double> data);

}  // namespace renewcast
