#include "renewcast/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/minima.hpp>

#include "renewcast/errors.hpp"

namespace renewcast {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr Count kTailIterationCap = 50'000'000;

double log_gamma(double x) {
    // boost instead of std::lgamma: the latter writes the global signgam and
    // is called from OpenMP regions.
    return boost::math::lgamma(x);
}

/// log Gamma(r + n) - log Gamma(r) for n >= 0.
double log_rising(double r, Count n) {
    if (n <= 0) return 0.0;
    if (n <= 64) {
        double acc = 0.0;
        for (Count j = 0; j < n; ++j) acc += std::log(r + static_cast<double>(j));
        return acc;
    }
    return log_gamma(r + static_cast<double>(n)) - log_gamma(r);
}

void require_count(const DistributionSpec& spec, const char* what) {
    if (!spec.is_count()) {
        throw DomainError(std::string(what) + " needs a count distribution, got " +
                          describe(spec));
    }
}

/// Walks pmf values p(k), p(k+1), ... by the recurrence ratio p(k+1)/p(k).
/// The walk runs in log space while p(k) underflows and switches to linear
/// space once values are representable.
class PmfWalker {
public:
    PmfWalker(const DistributionSpec& spec, Count start) : spec_(spec), k_(start) {
        lambda_ = spec.mu - 1.0;
        if (spec.kind == DistKind::shifted_negbin) {
            kappa_ = spec.nu - 1.0;
            r_ = lambda_ / kappa_;
            pi_ = kappa_ / spec.nu;
        } else if (spec.kind == DistKind::shifted_geometric) {
            pi_ = 1.0 - 1.0 / spec.mu;
        }
        log_p_ = log_pmf(spec, start);
        linear_ = log_p_ > kLinearThreshold;
        p_ = linear_ ? std::exp(log_p_) : 0.0;
    }

    Count k() const noexcept { return k_; }
    double p() const noexcept { return p_; }

    /// p(k+1)/p(k) at the current k.
    double ratio() const noexcept {
        const auto k = static_cast<double>(k_);
        switch (spec_.kind) {
            case DistKind::shifted_poisson: return lambda_ / k;
            case DistKind::shifted_geometric: return pi_;
            case DistKind::shifted_negbin: return (k - 1.0 + r_) / k * pi_;
            case DistKind::exponential: break;
        }
        return 0.0;
    }

    /// Upper bound on p(j+1)/p(j) for every j >= k, or >= 1 if the pmf may
    /// still rise.
    double tail_ratio_bound() const noexcept {
        const double rho = ratio();
        if (spec_.kind == DistKind::shifted_negbin && r_ < 1.0) return pi_;
        return rho;
    }

    void advance() {
        const double rho = ratio();
        if (linear_) {
            p_ *= rho;
        } else {
            log_p_ += std::log(rho);
            if (log_p_ > kLinearThreshold) {
                linear_ = true;
                p_ = std::exp(log_p_);
            }
        }
        ++k_;
    }

    /// True once the pmf is past its mode and has underflowed in linear space.
    bool exhausted() const noexcept { return linear_ && p_ == 0.0 && ratio() < 1.0; }

private:
    static constexpr double kLinearThreshold = -700.0;

    DistributionSpec spec_;
    Count k_;
    double lambda_ = 0.0;
    double kappa_ = 0.0;
    double r_ = 0.0;
    double pi_ = 0.0;
    double log_p_ = 0.0;
    double p_ = 0.0;
    bool linear_ = true;
};

/// Sum of p(j) for j > k, accurate in relative terms.
double upper_tail(const DistributionSpec& spec, Count k) {
    PmfWalker walk(spec, k + 1);
    double acc = 0.0;
    for (Count n = 0; n < kTailIterationCap; ++n) {
        const double p = walk.p();
        acc += p;
        const double rho = walk.tail_ratio_bound();
        if (rho < 1.0 && p * rho / (1.0 - rho) <= acc * 1e-17) break;
        if (walk.exhausted()) break;
        walk.advance();
    }
    return acc;
}

}  // namespace

std::string to_string(DistKind kind) {
    switch (kind) {
        case DistKind::shifted_poisson: return "shifted_poisson";
        case DistKind::shifted_geometric: return "shifted_geometric";
        case DistKind::shifted_negbin: return "shifted_negbin";
        case DistKind::exponential: return "exponential";
    }
    return "unknown";
}

DistKind dist_kind_from_string(const std::string& name) {
    if (name == "shifted_poisson") return DistKind::shifted_poisson;
    if (name == "shifted_geometric") return DistKind::shifted_geometric;
    if (name == "shifted_negbin") return DistKind::shifted_negbin;
    if (name == "exponential") return DistKind::exponential;
    throw ValidationError("unknown distribution kind '" + name + "'");
}

DistributionSpec DistributionSpec::shifted_poisson(double mu) {
    DistributionSpec s{DistKind::shifted_poisson, mu, 0.0};
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::shifted_geometric(double mu) {
    DistributionSpec s{DistKind::shifted_geometric, mu, 0.0};
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::shifted_negbin(double mu, double nu) {
    DistributionSpec s{DistKind::shifted_negbin, mu, nu};
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::exponential(double mu) {
    DistributionSpec s{DistKind::exponential, mu, 0.0};
    s.validate();
    return s;
}

void DistributionSpec::validate() const {
    if (!std::isfinite(mu)) throw DomainError("non-finite mean in " + describe(*this));
    if (kind == DistKind::exponential) {
        if (!(mu > 0.0)) throw DomainError("exponential mean must be > 0");
        return;
    }
    if (!(mu >= 1.0)) throw DomainError("shifted count mean must be >= 1 in " + describe(*this));
    if (kind == DistKind::shifted_negbin && !(nu > 1.0 && std::isfinite(nu))) {
        throw DomainError("negative binomial dispersion must be > 1 in " + describe(*this));
    }
}

std::string describe(const DistributionSpec& spec) {
    std::ostringstream os;
    os.precision(17);
    os << to_string(spec.kind) << "(mu=" << spec.mu;
    if (spec.kind == DistKind::shifted_negbin) os << ", nu=" << spec.nu;
    os << ")";
    return os.str();
}

double mean(const DistributionSpec& spec) { return spec.mu; }

double variance(const DistributionSpec& spec) {
    switch (spec.kind) {
        case DistKind::shifted_poisson: return spec.mu - 1.0;
        case DistKind::shifted_geometric: return spec.mu * (spec.mu - 1.0);
        case DistKind::shifted_negbin: return spec.nu * (spec.mu - 1.0);
        case DistKind::exponential: return spec.mu * spec.mu;
    }
    return 0.0;
}

double log_pmf(const DistributionSpec& spec, Count k) {
    require_count(spec, "log_pmf");
    if (k < 1) throw DomainError("pmf argument must be >= 1");
    if (spec.is_point_mass()) return k == 1 ? 0.0 : kNegInf;
    const auto km1 = static_cast<double>(k - 1);
    switch (spec.kind) {
        case DistKind::shifted_poisson: {
            const double lambda = spec.mu - 1.0;
            return km1 * std::log(lambda) - lambda - log_gamma(static_cast<double>(k));
        }
        case DistKind::shifted_geometric: {
            const double p = 1.0 / spec.mu;
            return std::log(p) + km1 * std::log1p(-p);
        }
        case DistKind::shifted_negbin: {
            const double kappa = spec.nu - 1.0;
            const double r = (spec.mu - 1.0) / kappa;
            const double log_nu = std::log1p(kappa);
            double out = -r * log_nu;
            if (k > 1) {
                out += log_rising(r, k - 1) - log_gamma(static_cast<double>(k)) +
                       km1 * (std::log(kappa) - log_nu);
            }
            return out;
        }
        case DistKind::exponential: break;
    }
    return kNegInf;
}

double pmf(const DistributionSpec& spec, Count k) {
    if (spec.kind == DistKind::shifted_geometric && k >= 1) {
        const double p = 1.0 / spec.mu;
        return p * std::pow(1.0 - p, static_cast<double>(k - 1));
    }
    return std::exp(log_pmf(spec, k));
}

double log_pdf(const DistributionSpec& spec, double x) {
    if (spec.kind != DistKind::exponential) throw DomainError("pdf needs the exponential kind");
    if (x < 0.0) return kNegInf;
    return -std::log(spec.mu) - x / spec.mu;
}

double pdf(const DistributionSpec& spec, double x) { return std::exp(log_pdf(spec, x)); }

double continuous_cdf(const DistributionSpec& spec, double x) {
    if (spec.kind != DistKind::exponential) throw DomainError("continuous_cdf needs the exponential kind");
    if (x <= 0.0) return 0.0;
    return -std::expm1(-x / spec.mu);
}

double cdf(const DistributionSpec& spec, Count k) {
    if (k < 0) throw DomainError("cdf argument must be >= 0");
    if (spec.kind == DistKind::exponential) return continuous_cdf(spec, static_cast<double>(k));
    if (k == 0) return 0.0;
    if (spec.is_point_mass()) return 1.0;
    if (spec.kind == DistKind::shifted_geometric) {
        return -std::expm1(static_cast<double>(k) * std::log1p(-1.0 / spec.mu));
    }
    PmfWalker walk(spec, 1);
    double acc = walk.p();
    while (walk.k() < k) {
        walk.advance();
        acc += walk.p();
    }
    return std::min(acc, 1.0);
}

double survival(const DistributionSpec& spec, Count k) {
    if (k < 0) throw DomainError("survival argument must be >= 0");
    if (spec.kind == DistKind::exponential) {
        return std::exp(-static_cast<double>(k) / spec.mu);
    }
    if (k == 0) return 1.0;
    if (spec.is_point_mass()) return 0.0;
    if (spec.kind == DistKind::shifted_geometric) {
        return std::pow(1.0 - 1.0 / spec.mu, static_cast<double>(k));
    }
    if (static_cast<double>(k) < spec.mu) {
        const double f = cdf(spec, k);
        if (f <= 0.5) return 1.0 - f;
    }
    return upper_tail(spec, k);
}

Hazard hazard(const DistributionSpec& spec, Count k, double floor) {
    require_count(spec, "hazard");
    if (k < 1) throw DomainError("hazard argument must be >= 1");
    if (k == 1) return {pmf(spec, 1), false};
    const double s = survival(spec, k - 1);
    if (!(s > floor)) return {1.0, true};
    if (spec.kind == DistKind::shifted_geometric) return {1.0 / spec.mu, false};
    return {std::min(1.0, pmf(spec, k) / s), false};
}

namespace {

Count invert_from(const DistributionSpec& spec, Count start, double target) {
    PmfWalker walk(spec, start);
    double acc = 0.0;
    while (true) {
        acc += walk.p();
        if (target < acc || walk.exhausted()) return walk.k();
        if (walk.k() >= kSampleCap) {
            throw ModelError("cdf inversion exceeded the sample cap for " + describe(spec));
        }
        walk.advance();
    }
}

}  // namespace

Count sample(const DistributionSpec& spec, Rng& rng) {
    require_count(spec, "sample");
    if (spec.is_point_mass()) return 1;
    const double u = rng.uniform();
    if (spec.kind == DistKind::shifted_geometric) {
        const double k = std::floor(std::log1p(-u) / std::log1p(-1.0 / spec.mu));
        if (!(k < static_cast<double>(kSampleCap))) {
            throw ModelError("cdf inversion exceeded the sample cap for " + describe(spec));
        }
        return 1 + static_cast<Count>(k);
    }
    return invert_from(spec, 1, u);
}

double sample_continuous(const DistributionSpec& spec, Rng& rng) {
    if (spec.kind != DistKind::exponential) throw DomainError("sample_continuous needs the exponential kind");
    return rng.exponential(spec.mu);
}

Count sample_residual(const DistributionSpec& spec, Count elapsed, Rng& rng) {
    require_count(spec, "sample_residual");
    if (elapsed < 0) throw DomainError("elapsed time must be >= 0");
    if (elapsed == 0) return sample(spec, rng);
    if (spec.kind == DistKind::shifted_geometric) return elapsed + sample(spec, rng);
    const double s = survival(spec, elapsed);
    if (!(s > kSurvivalFloor)) return elapsed + 1;
    return invert_from(spec, elapsed + 1, rng.uniform() * s);
}

double log_likelihood(const DistributionSpec& spec, std::span<const double> data) {
    double acc = 0.0;
    if (spec.kind == DistKind::exponential) {
        for (double x : data) acc += log_pdf(spec, x);
        return acc;
    }
    for (double x : data) acc += log_pmf(spec, static_cast<Count>(x));
    return acc;
}

MleFit fit_mle(DistKind kind, std::span<const double> data) {
    if (data.empty()) throw ValidationError("fit_mle needs at least one observation");
    double sum = 0.0;
    for (double x : data) {
        if (!std::isfinite(x)) throw ValidationError("non-finite observation");
        if (kind == DistKind::exponential) {
            if (x <= 0.0) throw ValidationError("exponential data must be > 0");
        } else if (x < 1.0 || x != std::floor(x)) {
            throw ValidationError("count data must be integers >= 1");
        }
        sum += x;
    }
    const double m = sum / static_cast<double>(data.size());
    switch (kind) {
        case DistKind::shifted_poisson: return {DistributionSpec::shifted_poisson(m), false};
        case DistKind::shifted_geometric: return {DistributionSpec::shifted_geometric(m), false};
        case DistKind::exponential: return {DistributionSpec::exponential(m), false};
        case DistKind::shifted_negbin: break;
    }

    if (m == 1.0) {
        return {DistributionSpec::shifted_negbin(1.0, kNbDispersionLower), true};
    }

    // Profile likelihood in nu with mu fixed at the sample mean, searched on
    // log(nu - 1). Repeated values are collapsed into a histogram first.
    std::map<Count, double> histogram;
    for (double x : data) histogram[static_cast<Count>(x)] += 1.0;
    auto neg_profile = [&](double log_kappa) {
        const DistributionSpec s{DistKind::shifted_negbin, m, 1.0 + std::exp(log_kappa)};
        double ll = 0.0;
        for (const auto& [k, n] : histogram) ll += n * log_pmf(s, k);
        return -ll;
    };
    const double lo = std::log(kNbDispersionLower - 1.0);
    const double hi = std::log(kNbDispersionUpper - 1.0);
    // 27 bits ~ relative tolerance 1.5e-8 on the search coordinate.
    auto [best_t, best_f] = boost::math::tools::brent_find_minima(neg_profile, lo, hi, 27);
    for (double edge : {lo, hi}) {
        const double f = neg_profile(edge);
        if (f < best_f) {
            best_f = f;
            best_t = edge;
        }
    }
    const double nu = std::clamp(1.0 + std::exp(best_t), kNbDispersionLower, kNbDispersionUpper);
    return {DistributionSpec::shifted_negbin(m, nu), false};
}

}  // namespace renewcast
