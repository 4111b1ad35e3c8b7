#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "renewcast/distributions.hpp"
#include "renewcast/modulators.hpp"
#include "renewcast/neural.hpp"
#include "renewcast/rng.hpp"
#include "renewcast/series.hpp"

namespace renewcast {

enum class IntervalFamily { geometric, negbin, exponential };
enum class SizeFamily { poisson, negbin };

struct StaticModulation {};
struct EwmaModulation {
    EwmaConfig cfg;
};
/// Mean-reverting modulation; the long-run levels are fitted from data.
struct ArModulation {
    double phi = 0.1;
    double beta = 0.8;
};
struct RnnModulation {
    int hidden = 20;
    int layers = 1;
    std::uint64_t init_seed = 0;
    TrainConfig train;
};

using Modulation = std::variant<StaticModulation, EwmaModulation, ArModulation, RnnModulation>;

/// Parameters estimated by fit().
struct FittedParams {
    /// Static: the interval and size laws. EWMA/AR: kind and dispersion
    /// templates whose mean is supplied by the modulator. RNN: unused.
    DistributionSpec interval;
    DistributionSpec size;
    double interval_level = 0.0;  ///< pooled interval mean (AR long-run level)
    double size_level = 0.0;      ///< pooled size mean (AR long-run level)
    std::optional<RnnParams> rnn;
    std::vector<double> loss_trace;
    bool degenerate_interval = false;
    bool degenerate_size = false;
};

/// One row of the model lattice: interarrival family x size family x
/// modulation, plus fitted parameters once fit() has run.
struct ModelSpec {
    IntervalFamily interval_family = IntervalFamily::geometric;
    SizeFamily size_family = SizeFamily::poisson;
    Modulation modulation = StaticModulation{};
    /// Adds log(1 - F(tail_gap)) for the censored final interval when scoring.
    bool censor_tail = false;
    std::optional<FittedParams> fitted;

    bool is_continuous() const noexcept { return interval_family == IntervalFamily::exponential; }
    bool is_rnn() const noexcept { return std::holds_alternative<RnnModulation>(modulation); }
    /// Minimum issue points per series needed to fit.
    std::size_t min_issue_points() const noexcept;
    HeadKinds head_kinds() const;

    /// Display name, e.g. "Static NB-NB" or "RNN E-Po".
    std::string name() const;
    /// Identifier accepted by parse(), e.g. "static-nb-nb", "ewma-g-po",
    /// "ar-nb-nb", "rnn-nb-nb", "static-e-po".
    std::string id() const;
    static ModelSpec parse(const std::string& id);
};

/// Conditional interval and size laws given the issue points observed so far.
class ModelState {
public:
    explicit ModelState(const ModelSpec& model);

    /// False until enough history exists to define the laws (one issue
    /// point for EWMA and RNN modulation).
    bool ready() const noexcept;
    DistributionSpec interval_law() const;
    DistributionSpec size_law() const;
    void observe(double interval, double size);
    int observed() const noexcept { return observed_; }
    /// Defines laws before any observation, for simulation from an empty
    /// history: EWMA starts at the pooled means, RNN at the zero state.
    void prime();

private:
    const ModelSpec* model_;
    const FittedParams* fitted_;
    ModulatorState interval_state_;
    ModulatorState size_state_;
    RnnState rnn_state_;
    HeadOutput heads_;
    int observed_ = 0;
    bool primed_ = false;
};

/// Modulated means are floored here so a collapsed EWMA keeps a valid law.
inline constexpr double kModulatedMeanFloor = 1.0 + 1e-9;

/// Fits on the pooled issue points of every series. Throws ValidationError
/// naming the first item with too few issue points.
ModelSpec fit(const ModelSpec& spec_template, std::span<const DemandSeries> dataset);
ModelSpec fit(const ModelSpec& spec_template, const DemandSeries& series);
/// Same, on already decomposed series (item names unavailable).
ModelSpec fit(const ModelSpec& spec_template, std::span<const SizeIntervalSeries> dataset);

/// Sum of log pmf of each (Q_i, M_i) whose conditional laws are defined.
double log_likelihood(const ModelSpec& model, const SizeIntervalSeries& series);
double log_likelihood(const ModelSpec& model, const DemandSeries& series);

struct OneStepMean {
    double value = 0.0;
    bool saturated = false;
};

/// E[Y_{n+1} | history] = h(tau + 1) * E[M], tau = periods since the last
/// issue point.
OneStepMean one_step_mean(const ModelSpec& model, const DemandSeries& history);

/// S sampled demand trajectories over L periods plus per-period summaries.
struct ForecastResult {
    std::size_t n_paths = 0;
    std::size_t horizon = 0;
    std::vector<Count> paths;  ///< row-major n_paths x horizon
    std::vector<double> mean_per_period;
    std::map<double, std::vector<double>> quantiles;

    Count at(std::size_t path, std::size_t period) const { return paths[path * horizon + period]; }
    const std::vector<double>& quantile(double rho) const;
};

inline const std::vector<double> kDefaultQuantileLevels{0.01, 0.1, 0.5, 0.9, 0.99};

/// Empirical quantile with linear interpolation between order statistics.
double empirical_quantile(std::vector<double> values, double rho);

/// Adds per-period means and quantiles computed from `result.paths`.
void summarize_paths(ForecastResult& result, std::span<const double> quantile_levels);

/// Parametric bootstrap. Path p uses the random stream (seed, p), so the
/// result does not depend on the execution mode or thread count.
ForecastResult sample_paths(const ModelSpec& model, const DemandSeries& history, std::size_t horizon,
                            std::size_t n_paths, std::uint64_t seed,
                            std::span<const double> quantile_levels = kDefaultQuantileLevels,
                            Execution exec = Execution::parallel);

/// Simulation of a size process driven by its own modulated mean:
/// M_i - 1 ~ Poisson(mean_{i-1} - 1), then the EWMA or AR update.
struct ConvergenceProbeConfig {
    enum class Modulation { ewma, stationary_ar };
    Modulation modulation = Modulation::ewma;
    double beta = 0.1;  ///< EWMA weight on the new observation
    StationaryArConfig ar{0.1, 0.8, 10.0};
    double start_mean = 10.0;
    long steps = 50'000;
    int trajectories = 100;
    double threshold = 1.05;
    std::uint64_t seed = 0;
};

struct ConvergenceProbeResult {
    double fraction_below = 0.0;
    std::vector<double> final_means;
};

ConvergenceProbeResult convergence_probe(const ConvergenceProbeConfig& cfg,
                                         Execution exec = Execution::parallel);

std::string to_string(IntervalFamily f);
std::string to_string(SizeFamily f);

/// Structured-text (JSON) model document. RNN weights go to a checkpoint
/// file next to `path`, referenced by name from the document.
void save_model(const ModelSpec& model, const std::string& path);
ModelSpec load_model(const std::string& path);

}  // namespace renewcast
