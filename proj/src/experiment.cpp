#include "renewcast/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "parallel.hpp"
#include "renewcast/errors.hpp"

namespace renewcast {
namespace {

using nlohmann::json;

const std::vector<std::string> kBaselines{"croston", "sba", "tsb", "zeros"};
const std::vector<std::string> kMetricNames{"p50", "p90", "mape", "smape", "rmse", "rmsse"};

bool is_baseline(const std::string& id) {
    return std::find(kBaselines.begin(), kBaselines.end(), id) != kBaselines.end();
}

std::optional<double> metric_value(const MetricsReport& r, const std::string& name) {
    if (name == "p50") return r.p50_loss;
    if (name == "p90") return r.p90_loss;
    if (name == "mape") return r.mape;
    if (name == "smape") return r.smape;
    if (name == "rmse") return r.rmse;
    return r.rmsse;
}

std::string metric_title(const std::string& name) {
    if (name == "p50") return "P50 Loss";
    if (name == "p90") return "P90 Loss";
    if (name == "mape") return "MAPE";
    if (name == "smape") return "sMAPE";
    if (name == "rmse") return "RMSE";
    return "RMSSE";
}

std::uint64_t repetition_seed(std::uint64_t seed, int rep) {
    return rep == 0 ? seed : mix64(seed + static_cast<std::uint64_t>(rep));
}

json generator_to_json(const GeneratorSpec& g) {
    return json{{"kind", to_string(g.kind)},
                {"n_series", g.n_series},
                {"n_periods", g.n_periods},
                {"seed", g.seed},
                {"period", g.period},
                {"size_mean", g.size_mean},
                {"alt_periods", g.alt_periods},
                {"constant_size", g.constant_size},
                {"phase_jitter", g.phase_jitter},
                {"mu_q", g.mu_q},
                {"mu_m", g.mu_m}};
}

template <class T>
void read_key(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

GeneratorSpec generator_from_json(const json& j) {
    reject_unknown(j, {"kind", "n_series", "n_periods", "seed", "period", "size_mean", "alt_periods",
                       "constant_size", "phase_jitter", "mu_q", "mu_m"},
                   "generator");
    GeneratorSpec g;
    if (j.contains("kind")) g.kind = generator_kind_from_string(j.at("kind").get<std::string>());
    read_key(j, "n_series", g.n_series);
    read_key(j, "n_periods", g.n_periods);
    read_key(j, "seed", g.seed);
    read_key(j, "period", g.period);
    read_key(j, "size_mean", g.size_mean);
    read_key(j, "alt_periods", g.alt_periods);
    read_key(j, "constant_size", g.constant_size);
    read_key(j, "phase_jitter", g.phase_jitter);
    read_key(j, "mu_q", g.mu_q);
    read_key(j, "mu_m", g.mu_m);
    return g;
}

/// Model template carrying the experiment's hyperparameters.
ModelSpec configured_model(const ExperimentConfig& cfg, const std::string& id, std::uint64_t seed) {
    ModelSpec spec = ModelSpec::parse(id);
    spec.censor_tail = cfg.censor_tail;
    if (auto* e = std::get_if<EwmaModulation>(&spec.modulation)) e->cfg = EwmaConfig::make(cfg.alpha);
    if (auto* a = std::get_if<ArModulation>(&spec.modulation)) *a = ArModulation{cfg.ar_phi, cfg.ar_beta};
    if (auto* r = std::get_if<RnnModulation>(&spec.modulation)) {
        r->hidden = cfg.rnn_hidden;
        r->layers = cfg.rnn_layers;
        r->init_seed = seed;
        r->train = cfg.train;
        r->train.seed = mix64(seed);
    }
    return spec;
}

struct Split {
    std::vector<DemandSeries> train;
    std::vector<std::string> dropped;
    Matrix actual;
    Matrix in_sample;
};

Split split_dataset(const std::vector<DemandSeries>& data, std::size_t holdout) {
    Split s;
    for (const auto& series : data) {
        series.validate();
        if (holdout >= series.size()) {
            throw ConfigError("holdout length " + std::to_string(holdout) + " must be shorter than item '" +
                              series.item_id + "' (length " + std::to_string(series.size()) + ")");
        }
    }
    for (const auto& series : data) {
        DemandSeries train = head(series, series.size() - holdout);
        const bool has_issue = std::any_of(train.values.begin(), train.values.end(), [](Count v) { return v > 0; });
        if (!has_issue) {
            s.dropped.push_back(series.item_id);
            continue;
        }
        const DemandSeries test = tail(series, holdout);
        s.actual.emplace_back(test.values.begin(), test.values.end());
        s.in_sample.emplace_back(train.values.begin(), train.values.end());
        s.train.push_back(std::move(train));
    }
    if (s.train.empty()) throw ValidationError("no item has an issue point in its training slice");
    return s;
}

std::vector<ItemForecast> forecast_model(const ExperimentConfig& cfg, const std::string& id, const Split& split,
                                         std::uint64_t seed, Execution exec) {
    const std::size_t n = split.train.size();
    const std::size_t horizon = cfg.holdout;
    std::vector<ItemForecast> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].item_id = split.train[i].item_id;
        out[i].actual = split.actual[i];
    }
    if (is_baseline(id)) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto& s = split.train[i];
            PointForecast f = id == "croston" ? croston_forecast(s, horizon, cfg.alpha)
                              : id == "sba"   ? sba_forecast(s, horizon, cfg.alpha)
                              : id == "tsb"   ? tsb_forecast(s, horizon, cfg.alpha, cfg.tsb_beta)
                                              : zero_forecast(horizon);
            out[i].point = std::move(f.per_period);
        }
        return out;
    }

    std::set<double> level_set(cfg.quantile_levels.begin(), cfg.quantile_levels.end());
    level_set.insert({0.5, 0.9});
    const std::vector<double> levels(level_set.begin(), level_set.end());
    const ModelSpec spec = configured_model(cfg, id, seed);

    std::optional<ModelSpec> global;
    if (cfg.fit_scope == FitScope::global) {
        std::vector<DemandSeries> usable;
        for (const auto& s : split.train) {
            if (decompose(s).issue_points() >= spec.min_issue_points()) usable.push_back(s);
        }
        if (usable.empty()) {
            throw ValidationError(spec.name() + ": no item has " + std::to_string(spec.min_issue_points()) +
                                  " issue points in its training slice");
        }
        global = fit(spec, usable);
    }
    detail::parallel_for(n, exec, [&](std::size_t i) {
        const ModelSpec local = global ? ModelSpec{} : fit(spec, split.train[i]);
        const ModelSpec& model = global ? *global : local;
        const ForecastResult r = sample_paths(model, split.train[i], horizon, cfg.n_paths, mix64(seed + i + 1),
                                              levels, Execution::serial);
        out[i].point = r.mean_per_period;
        out[i].quantiles = r.quantiles;
    });
    return out;
}

MetricsReport score(const std::vector<ItemForecast>& f, const Split& split, const ExperimentConfig& cfg) {
    Matrix point, p50, p90;
    const bool probabilistic = !f.empty() && !f.front().quantiles.empty();
    for (const auto& item : f) {
        point.push_back(item.point);
        if (probabilistic) {
            p50.push_back(item.quantiles.at(0.5));
            p90.push_back(item.quantiles.at(0.9));
        }
    }
    return evaluate(split.actual, point, split.in_sample, probabilistic ? &p50 : nullptr,
                    probabilistic ? &p90 : nullptr, cfg.rmsse_variant, cfg.smape_zero_cells);
}

std::string fmt(double v, const char* spec = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (holdout < 1) throw ConfigError("holdout must be >= 1");
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (n_paths < 1) throw ConfigError("n_paths must be >= 1");
    if (models.empty()) throw ConfigError("no models configured");
    if (data_path && generator) throw ConfigError("set either a data path or a generator, not both");
    for (const auto& id : models) {
        if (is_baseline(id)) continue;
        if (ModelSpec::parse(id).is_continuous()) {
            throw ConfigError("model '" + id + "' is continuous-time; experiments run on period data");
        }
    }
    for (const auto& m : metrics) {
        if (std::find(kMetricNames.begin(), kMetricNames.end(), m) == kMetricNames.end()) {
            throw ConfigError("unknown metric '" + m + "'");
        }
    }
    for (double q : quantile_levels) {
        if (!(q > 0.0 && q < 1.0)) throw ConfigError("quantile levels must lie in (0, 1)");
    }
    EwmaConfig::make(alpha);
    if (!(tsb_beta >= 0.0 && tsb_beta <= 1.0)) throw ConfigError("tsb_beta must lie in [0, 1]");
    StationaryArConfig::make(ar_phi, ar_beta, 1.0);
    if (rnn_hidden < 1 || rnn_layers < 1) throw ConfigError("RNN width and depth must be >= 1");
    train.validate();
    if (generator) generator->validate();
}

json ExperimentConfig::to_json() const {
    json j{{"holdout", holdout},
           {"models", models},
           {"metrics", metrics},
           {"rmsse_variant", rmsse_variant == RmsseVariant::printed ? "printed" : "m5"},
           {"smape_zero_cells", smape_zero_cells == SmapeZeroCells::zero ? "zero" : "max"},
           {"alpha", alpha},
           {"tsb_beta", tsb_beta},
           {"ar_phi", ar_phi},
           {"ar_beta", ar_beta},
           {"rnn_hidden", rnn_hidden},
           {"rnn_layers", rnn_layers},
           {"learning_rate", train.learning_rate},
           {"weight_decay", train.weight_decay},
           {"epochs", train.epochs},
           {"batch_size", train.batch_size},
           {"fit_scope", fit_scope == FitScope::global ? "global" : "local"},
           {"censor_tail", censor_tail},
           {"n_paths", n_paths},
           {"quantile_levels", quantile_levels},
           {"repetitions", repetitions},
           {"seed", seed},
           {"output_dir", output_dir}};
    j["data_path"] = data_path ? json(*data_path) : json(nullptr);
    j["layout"] = layout == PeriodLayout::long_format ? "long" : "wide";
    j["generator"] = generator ? generator_to_json(*generator) : json(nullptr);
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
    reject_unknown(j, {"holdout", "models", "metrics", "rmsse_variant", "smape_zero_cells", "alpha", "tsb_beta", "ar_phi", "ar_beta",
                       "rnn_hidden", "rnn_layers", "learning_rate", "weight_decay", "epochs", "batch_size",
                       "fit_scope", "censor_tail", "n_paths", "quantile_levels", "repetitions", "seed",
                       "output_dir", "data_path", "layout", "generator"},
                   "experiment config");
    ExperimentConfig c;
    try {
        read_key(j, "holdout", c.holdout);
        read_key(j, "models", c.models);
        read_key(j, "metrics", c.metrics);
        if (j.contains("rmsse_variant")) {
            const auto v = j.at("rmsse_variant").get<std::string>();
            if (v != "printed" && v != "m5") throw ConfigError("rmsse_variant must be 'printed' or 'm5'");
            c.rmsse_variant = v == "m5" ? RmsseVariant::m5 : RmsseVariant::printed;
        }
        if (j.contains("smape_zero_cells")) {
            const auto v = j.at("smape_zero_cells").get<std::string>();
            if (v != "zero" && v != "max") throw ConfigError("smape_zero_cells must be 'zero' or 'max'");
            c.smape_zero_cells = v == "max" ? SmapeZeroCells::max : SmapeZeroCells::zero;
        }
        read_key(j, "alpha", c.alpha);
        read_key(j, "tsb_beta", c.tsb_beta);
        read_key(j, "ar_phi", c.ar_phi);
        read_key(j, "ar_beta", c.ar_beta);
        read_key(j, "rnn_hidden", c.rnn_hidden);
        read_key(j, "rnn_layers", c.rnn_layers);
        read_key(j, "learning_rate", c.train.learning_rate);
        read_key(j, "weight_decay", c.train.weight_decay);
        read_key(j, "epochs", c.train.epochs);
        read_key(j, "batch_size", c.train.batch_size);
        if (j.contains("fit_scope")) {
            const auto v = j.at("fit_scope").get<std::string>();
            if (v != "global" && v != "local") throw ConfigError("fit_scope must be 'global' or 'local'");
            c.fit_scope = v == "local" ? FitScope::local : FitScope::global;
        }
        read_key(j, "censor_tail", c.censor_tail);
        read_key(j, "n_paths", c.n_paths);
        read_key(j, "quantile_levels", c.quantile_levels);
        read_key(j, "repetitions", c.repetitions);
        read_key(j, "seed", c.seed);
        read_key(j, "output_dir", c.output_dir);
        if (j.contains("data_path") && !j.at("data_path").is_null()) c.data_path = j.at("data_path").get<std::string>();
        if (j.contains("layout")) {
            const auto v = j.at("layout").get<std::string>();
            if (v != "long" && v != "wide") throw ConfigError("layout must be 'long' or 'wide'");
            c.layout = v == "wide" ? PeriodLayout::wide : PeriodLayout::long_format;
        }
        if (j.contains("generator") && !j.at("generator").is_null()) {
            c.generator = generator_from_json(j.at("generator"));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed experiment config: ") + e.what());
    }
    return c;
}

std::string config_hash(const ExperimentConfig& config) {
    json j = config.to_json();
    j.erase("output_dir");
    const std::string text = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string model_display_name(const std::string& id) {
    if (id == "croston") return "Croston";
    if (id == "sba") return "SBA";
    if (id == "tsb") return "TSB";
    if (id == "zeros") return "All Zeros";
    return ModelSpec::parse(id).name();
}

const ModelResult& ExperimentResults::model(const std::string& id) const {
    for (const auto& m : models) {
        if (m.id == id) return m;
    }
    throw ValidationError("no results for model '" + id + "'");
}

ExperimentResults run_experiment(const ExperimentConfig& config, const std::vector<DemandSeries>* dataset,
                                 Execution exec) {
    config.validate();
    ExperimentResults results;
    results.config = config;
    results.config_hash = config_hash(config);
    for (const auto& id : config.models) {
        ModelResult m;
        m.id = id;
        m.name = model_display_name(id);
        results.models.push_back(std::move(m));
    }

    std::vector<DemandSeries> loaded;
    if (!dataset && config.data_path) {
        DemandDataset d = read_demand_csv(*config.data_path, config.layout);
        d.require_clean();
        loaded = std::move(d.series);
    } else if (!dataset && !config.generator) {
        throw ConfigError("no dataset: set a data path or a generator");
    }

    for (int rep = 0; rep < config.repetitions; ++rep) {
        const std::uint64_t rep_seed = repetition_seed(config.seed, rep);
        const std::vector<DemandSeries>* data = dataset ? dataset : &loaded;
        std::vector<DemandSeries> generated;
        if (!dataset && config.generator) {
            GeneratorSpec g = *config.generator;
            g.seed = repetition_seed(g.seed, rep);
            generated = generate(g, exec);
            data = &generated;
        }
        const Split split = split_dataset(*data, config.holdout);
        if (rep == 0) {
            results.dropped_items = split.dropped;
            results.evaluated_items = split.train.size();
        }
        for (std::size_t mi = 0; mi < results.models.size(); ++mi) {
            ModelResult& m = results.models[mi];
            if (m.error) continue;
            try {
                auto f = forecast_model(config, m.id, split, mix64(rep_seed ^ mix64(mi + 1)), exec);
                m.reports.push_back(score(f, split, config));
                m.forecasts.push_back(std::move(f));
            } catch (const std::exception& e) {
                m.error = e.what();
            }
        }
    }

    for (auto& m : results.models) {
        for (const auto& name : config.metrics) {
            MetricSummary s;
            std::vector<double> present;
            for (const auto& r : m.reports) {
                s.values.push_back(metric_value(r, name));
                if (s.values.back()) present.push_back(*s.values.back());
            }
            if (!present.empty()) {
                double mean = 0.0;
                for (double v : present) mean += v;
                mean /= static_cast<double>(present.size());
                double ss = 0.0;
                for (double v : present) ss += (v - mean) * (v - mean);
                s.mean = mean;
                s.std = present.size() > 1 ? std::sqrt(ss / static_cast<double>(present.size() - 1)) : 0.0;
            }
            m.summary[name] = std::move(s);
        }
    }
    return results;
}

json results_to_json(const ExperimentResults& results) {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json models = json::array();
    for (const auto& m : results.models) {
        json metrics = json::object();
        for (const auto& [name, s] : m.summary) {
            json values = json::array();
            for (const auto& v : s.values) values.push_back(opt(v));
            metrics[name] = json{{"mean", opt(s.mean)}, {"std", opt(s.std)}, {"values", values}};
        }
        json skipped{{"mape", json::array()}, {"rmsse", json::array()}};
        for (const auto& r : m.reports) {
            skipped["mape"].push_back(r.mape_skipped);
            skipped["rmsse"].push_back(r.rmsse_skipped);
        }
        models.push_back(json{{"id", m.id},
                              {"name", m.name},
                              {"status", m.error ? "error" : "ok"},
                              {"error", m.error ? json(*m.error) : json(nullptr)},
                              {"repetitions_completed", m.reports.size()},
                              {"metrics", metrics},
                              {"skipped_items", skipped}});
    }
    return json{{"format", "renewcast-results"},
                {"version", 1},
                {"config", results.config.to_json()},
                {"config_hash", results.config_hash},
                {"dropped_items", results.dropped_items},
                {"evaluated_items", results.evaluated_items},
                {"models", models}};
}

void write_quantile_csv(std::ostream& out, const ExperimentResults& results) {
    std::set<double> levels;
    for (const auto& m : results.models) {
        for (const auto& rep : m.forecasts) {
            for (const auto& item : rep) {
                for (const auto& [rho, v] : item.quantiles) levels.insert(rho);
            }
        }
    }
    out << "model_id,repetition,item_id,horizon_step,actual,point";
    for (double rho : levels) out << ",q" << fmt(rho);
    out << '\n';
    for (const auto& m : results.models) {
        for (std::size_t rep = 0; rep < m.forecasts.size(); ++rep) {
            for (const auto& item : m.forecasts[rep]) {
                for (std::size_t t = 0; t < item.point.size(); ++t) {
                    out << m.id << ',' << rep << ',' << item.item_id << ',' << t + 1 << ','
                        << fmt(item.actual[t], "%.17g") << ',' << fmt(item.point[t], "%.17g");
                    for (double rho : levels) {
                        auto it = item.quantiles.find(rho);
                        out << ',';
                        if (it != item.quantiles.end()) out << fmt(it->second[t], "%.17g");
                    }
                    out << '\n';
                }
            }
        }
    }
}

void write_results(const ExperimentResults& results) {
    const std::filesystem::path dir(results.config.output_dir);
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "results.json");
        if (!out) throw Error("cannot write " + (dir / "results.json").string());
        out << results_to_json(results).dump(2) << '\n';
    }
    std::ofstream csv(dir / "quantiles.csv");
    if (!csv) throw Error("cannot write " + (dir / "quantiles.csv").string());
    write_quantile_csv(csv, results);
}

std::string format_results_table(const ExperimentResults& results) {
    std::ostringstream os;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-16s", "Model");
    os << buf;
    for (const auto& name : results.config.metrics) {
        std::snprintf(buf, sizeof buf, " %18s", metric_title(name).c_str());
        os << buf;
    }
    os << '\n';
    for (const auto& m : results.models) {
        std::snprintf(buf, sizeof buf, "%-16s", m.name.c_str());
        os << buf;
        if (m.error) {
            os << " failed: " << *m.error << '\n';
            continue;
        }
        for (const auto& name : results.config.metrics) {
            const auto& s = m.summary.at(name);
            if (s.mean) {
                std::snprintf(buf, sizeof buf, " %9.3f +- %5.3f", *s.mean, *s.std);
            } else {
                std::snprintf(buf, sizeof buf, " %18s", "N/A");
            }
            os << buf;
        }
        os << '\n';
    }
    if (!results.dropped_items.empty()) {
        os << results.dropped_items.size() << " item(s) without training demand were dropped\n";
    }
    return os.str();
}

}  // namespace renewcast
