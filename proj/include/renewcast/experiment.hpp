#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "renewcast/baselines.hpp"
#include "renewcast/io.hpp"
#include "renewcast/metrics.hpp"
#include "renewcast/models.hpp"
#include "renewcast/synthgen.hpp"

namespace renewcast {

enum class FitScope {
    global,  ///< one parameter set pooled across items
    local,   ///< a separate fit per item
};

struct ExperimentConfig {
    /// Dataset: a long-format CSV path, or a generator regenerated per
    /// repetition (repetition 0 uses the generator seed unchanged).
    std::optional<std::string> data_path;
    PeriodLayout layout = PeriodLayout::long_format;
    std::optional<GeneratorSpec> generator;

    std::size_t holdout = 6;
    /// Baselines "croston", "sba", "tsb", "zeros", or any model id.
    std::vector<std::string> models{"croston", "sba", "tsb", "static-g-po", "static-nb-nb", "rnn-nb-nb"};
    std::vector<std::string> metrics{"p50", "p90", "mape", "smape", "rmse", "rmsse"};
    RmsseVariant rmsse_variant = RmsseVariant::printed;
    SmapeZeroCells smape_zero_cells = SmapeZeroCells::zero;

    double alpha = 0.1;          ///< Croston, SBA, TSB and EWMA smoothing
    double tsb_beta = 0.1;
    double ar_phi = 0.1;
    double ar_beta = 0.8;
    int rnn_hidden = 20;
    int rnn_layers = 1;
    TrainConfig train;
    FitScope fit_scope = FitScope::global;
    bool censor_tail = false;

    std::size_t n_paths = 250;
    std::vector<double> quantile_levels{0.1, 0.5, 0.9};
    int repetitions = 3;
    std::uint64_t seed = 0;
    std::string output_dir = "results";

    void validate() const;
    nlohmann::json to_json() const;
    /// Unknown keys are rejected.
    static ExperimentConfig from_json(const nlohmann::json& j);
};

/// 64-bit FNV-1a of the canonical config document, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

struct MetricSummary {
    std::vector<std::optional<double>> values;  ///< one per repetition
    std::optional<double> mean;
    std::optional<double> std;  ///< sample standard deviation; 0 for one value
};

/// Forecasts of one model on one repetition, kept for the quantile CSV.
struct ItemForecast {
    std::string item_id;
    std::vector<double> actual;
    std::vector<double> point;
    std::map<double, std::vector<double>> quantiles;
};

struct ModelResult {
    std::string id;
    std::string name;
    std::optional<std::string> error;  ///< failure message; the run continues
    std::vector<MetricsReport> reports;  ///< one per completed repetition
    std::map<std::string, MetricSummary> summary;
    std::vector<std::vector<ItemForecast>> forecasts;  ///< [repetition][item]
};

struct ExperimentResults {
    ExperimentConfig config;
    std::string config_hash;
    std::vector<std::string> dropped_items;  ///< no issue point in the training slice
    std::size_t evaluated_items = 0;
    std::vector<ModelResult> models;

    const ModelResult& model(const std::string& id) const;
};

/// Display name of a baseline or model id.
std::string model_display_name(const std::string& id);

/// Runs every repetition. A dataset passed here takes the place of the
/// configured source.
ExperimentResults run_experiment(const ExperimentConfig& config,
                                 const std::vector<DemandSeries>* dataset = nullptr,
                                 Execution exec = Execution::parallel);

nlohmann::json results_to_json(const ExperimentResults& results);
/// model_id,repetition,item_id,horizon_step,actual,point,q<level>...
void write_quantile_csv(std::ostream& out, const ExperimentResults& results);
/// results.json and quantiles.csv under config.output_dir.
void write_results(const ExperimentResults& results);
/// Fixed-width table of metric means and standard deviations.
std::string format_results_table(const ExperimentResults& results);

}  // namespace renewcast
