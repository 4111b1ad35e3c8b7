// Command-line front end: data generation, summaries, fitting, forecasting,
// evaluation and end-to-end experiments.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "renewcast/errors.hpp"
#include "renewcast/experiment.hpp"
#include "renewcast/io.hpp"
#include "renewcast/pointprocess.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace renewcast;

namespace {

std::string default_output_dir() {
    const char* env = std::getenv("RENEWCAST_OUTPUT_DIR");
    return env && *env ? env : "results";
}

PeriodLayout parse_layout(const std::string& s) {
    if (s == "long") return PeriodLayout::long_format;
    if (s == "wide") return PeriodLayout::wide;
    throw ConfigError("format must be 'long' or 'wide'");
}

std::vector<DemandSeries> load_periods(const std::string& path, const std::string& format) {
    DemandDataset d = read_demand_csv(path, parse_layout(format));
    if (!d.diagnostics.empty()) std::cerr << format_diagnostics(d.diagnostics);
    d.require_clean();
    return std::move(d.series);
}

std::vector<EventSeries> load_events(const std::string& path, const EventTimeOptions& opts) {
    EventDataset d = read_events_csv(path, opts);
    if (!d.diagnostics.empty()) std::cerr << format_diagnostics(d.diagnostics);
    d.require_clean();
    return std::move(d.series);
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

struct ModelFlags {
    std::string id = "static-nb-nb";
    double alpha = 0.1;
    double phi = 0.1;
    double beta = 0.8;
    int hidden = 20;
    int layers = 1;
    int epochs = 100;
    double lr = 0.1;
    double wd = 0.01;
    int batch = 0;
    std::uint64_t seed = 0;
    bool censor = false;

    void attach(CLI::App* app) {
        app->add_option("-m,--model", id, "Model id, e.g. static-nb-nb, ewma-g-po, ar-nb-nb, rnn-nb-nb, static-e-po")
            ->capture_default_str();
        app->add_option("--alpha", alpha, "EWMA smoothing weight")->capture_default_str();
        app->add_option("--phi", phi, "AR weight on the observation")->capture_default_str();
        app->add_option("--beta", beta, "AR weight on the previous mean")->capture_default_str();
        app->add_option("--hidden", hidden, "LSTM width")->capture_default_str();
        app->add_option("--layers", layers, "LSTM depth")->capture_default_str();
        app->add_option("--epochs", epochs, "Training epochs")->capture_default_str();
        app->add_option("--lr", lr, "Adam learning rate")->capture_default_str();
        app->add_option("--weight-decay", wd, "Decoupled weight decay")->capture_default_str();
        app->add_option("--batch-size", batch, "Minibatch size, 0 for full batch")->capture_default_str();
        app->add_option("--seed", seed, "Initialization and shuffling seed")->capture_default_str();
        app->add_flag("--censor-tail", censor, "Score the open final interval");
    }

    ModelSpec make() const {
        ModelSpec spec = ModelSpec::parse(id);
        spec.censor_tail = censor;
        if (auto* e = std::get_if<EwmaModulation>(&spec.modulation)) e->cfg = EwmaConfig::make(alpha);
        if (auto* a = std::get_if<ArModulation>(&spec.modulation)) *a = ArModulation{phi, beta};
        if (auto* r = std::get_if<RnnModulation>(&spec.modulation)) {
            r->hidden = hidden;
            r->layers = layers;
            r->init_seed = seed;
            r->train.epochs = epochs;
            r->train.learning_rate = lr;
            r->train.weight_decay = wd;
            r->train.batch_size = batch;
            r->train.seed = seed;
        }
        return spec;
    }
};

void print_summary(const DatasetSummary& s, bool as_json) {
    if (as_json) {
        json j{{"items", s.items},
               {"zero_items", s.zero_items},
               {"min_length", s.min_length},
               {"max_length", s.max_length},
               {"mean_size", s.mean_size},
               {"size_cv2", s.size_cv2},
               {"mean_interval", s.mean_interval},
               {"interval_cv2", s.interval_cv2},
               {"issue_points", s.issue_points},
               {"mean_issue_points", s.mean_issue_points},
               {"sbc", s.sbc_counts}};
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::cout << "Number of time series          " << s.items << '\n'
              << "Items without demand           " << s.zero_items << '\n'
              << "Series length                  " << s.min_length
              << (s.min_length == s.max_length ? "" : ".." + std::to_string(s.max_length)) << '\n'
              << "Demand size mean               " << fmt(s.mean_size) << '\n'
              << "Demand size CV2                " << fmt(s.size_cv2) << '\n'
              << "Mean interdemand time p        " << fmt(s.mean_interval) << '\n'
              << "CV2 of interdemand time        " << fmt(s.interval_cv2) << '\n'
              << "Total issue points             " << s.issue_points << '\n'
              << "Mean issue points per item     " << fmt(s.mean_issue_points) << '\n';
    for (const auto& [cls, n] : s.sbc_counts) {
        std::cout << "SBC " << cls << std::string(27 - cls.size(), ' ') << n << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Intermittent demand forecasting with renewal processes"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "renewcast 1.0.0");

    // generate
    auto* gen = app.add_subcommand("generate", "Write a synthetic dataset as long-format CSV plus metadata");
    GeneratorSpec gspec;
    std::string gen_kind = "periodic", gen_out, gen_model;
    gen->add_option("--kind", gen_kind, "random, periodic, alternating or from_model")->capture_default_str();
    gen->add_option("--n-series", gspec.n_series)->capture_default_str();
    gen->add_option("--n-periods", gspec.n_periods)->capture_default_str();
    gen->add_option("--seed", gspec.seed)->capture_default_str();
    gen->add_option("--period", gspec.period, "Periodic interdemand time")->capture_default_str();
    gen->add_option("--size-mean", gspec.size_mean, "Periodic size mean")->capture_default_str();
    gen->add_option("--alt", gspec.alt_periods, "Alternating interdemand times")->expected(2);
    gen->add_option("--constant-size", gspec.constant_size, "Alternating size")->capture_default_str();
    gen->add_flag("--phase-jitter", gspec.phase_jitter, "Random alternating phase per series");
    gen->add_option("--mu-q", gspec.mu_q, "Random interval mean")->capture_default_str();
    gen->add_option("--mu-m", gspec.mu_m, "Random size mean")->capture_default_str();
    gen->add_option("--model", gen_model, "Fitted model document for from_model");
    gen->add_option("-o,--out", gen_out, "Output CSV (default <output dir>/generated.csv)");

    // summarize
    auto* sum = app.add_subcommand("summarize", "Dataset statistics and SBC class counts");
    std::string sum_data, sum_format = "long";
    bool sum_json = false;
    sum->add_option("-d,--data", sum_data, "Period demand CSV")->required();
    sum->add_option("--format", sum_format, "long or wide")->capture_default_str()->check(CLI::IsMember({"long", "wide"}));
    sum->add_flag("--json", sum_json, "Print JSON");

    // fit
    auto* fitc = app.add_subcommand("fit", "Fit a model and save it as JSON");
    ModelFlags fit_flags;
    fit_flags.attach(fitc);
    std::string fit_data, fit_events, fit_format = "long", fit_out;
    fitc->add_option("-d,--data", fit_data, "Period demand CSV");
    fitc->add_option("--events", fit_events, "Event CSV (continuous-time models)");
    fitc->add_option("--format", fit_format, "long or wide")->capture_default_str()->check(CLI::IsMember({"long", "wide"}));
    fitc->add_option("-o,--out", fit_out, "Model document (default <output dir>/model.json)");

    // forecast
    auto* fc = app.add_subcommand("forecast", "Sample forecast paths from a fitted model");
    std::string fc_model, fc_data, fc_events, fc_format = "long", fc_out;
    std::size_t fc_horizon = 6, fc_paths = 250;
    std::uint64_t fc_seed = 0;
    std::vector<double> fc_levels{0.1, 0.5, 0.9};
    fc->add_option("--model", fc_model, "Fitted model document")->required();
    fc->add_option("-d,--data", fc_data, "History as period demand CSV");
    fc->add_option("--events", fc_events, "History as event CSV (continuous-time models)");
    fc->add_option("--format", fc_format, "long or wide")->capture_default_str()->check(CLI::IsMember({"long", "wide"}));
    fc->add_option("-L,--horizon", fc_horizon)->capture_default_str();
    fc->add_option("-S,--paths", fc_paths)->capture_default_str();
    fc->add_option("--seed", fc_seed)->capture_default_str();
    fc->add_option("--quantiles", fc_levels, "Quantile levels")->delimiter(',');
    fc->add_option("-o,--out", fc_out, "Forecast CSV (default <output dir>/forecast.csv)");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Score a forecast CSV against the final periods of a dataset");
    std::string ev_data, ev_forecast, ev_format = "long", ev_rmsse = "printed";
    ev->add_option("-d,--data", ev_data, "Full period demand CSV")->required();
    ev->add_option("-f,--forecast", ev_forecast, "Output of the forecast subcommand")->required();
    ev->add_option("--format", ev_format, "long or wide")->capture_default_str()->check(CLI::IsMember({"long", "wide"}));
    ev->add_option("--rmsse", ev_rmsse, "printed or m5")->capture_default_str()->check(CLI::IsMember({"printed", "m5"}));
    std::string ev_smape = "zero";
    ev->add_option("--smape-zero-cells", ev_smape, "Score of 0/0 sMAPE cells: zero or max")->capture_default_str()->check(CLI::IsMember({"zero", "max"}));

    // run
    auto* run = app.add_subcommand("run", "End-to-end experiment; a config file overrides flags");
    std::string run_config, run_data, run_gen, run_models, run_metrics, run_out, run_scope, run_rmsse;
    std::size_t run_holdout = 6, run_paths = 250;
    int run_reps = 3, run_hidden = 20, run_epochs = 100, run_nseries = 100, run_nperiods = 1680;
    std::uint64_t run_seed = 0;
    double run_lr = 0.1, run_alpha = 0.1, run_tsb_beta = 0.1;
    bool run_censor = false, run_quiet = false;
    run->add_option("-c,--config", run_config, "JSON experiment config");
    auto* o_data = run->add_option("-d,--data", run_data, "Period demand CSV");
    auto* o_gen = run->add_option("--generator", run_gen, "Generate data: random, periodic or alternating");
    auto* o_nseries = run->add_option("--n-series", run_nseries, "Generated series")->capture_default_str();
    auto* o_nperiods = run->add_option("--n-periods", run_nperiods, "Generated length")->capture_default_str();
    auto* o_holdout = run->add_option("-L,--holdout", run_holdout)->capture_default_str();
    auto* o_models = run->add_option("--models", run_models, "Comma-separated model and baseline ids");
    auto* o_metrics = run->add_option("--metrics", run_metrics, "Comma-separated metrics");
    auto* o_reps = run->add_option("--repetitions", run_reps)->capture_default_str();
    auto* o_seed = run->add_option("--seed", run_seed)->capture_default_str();
    auto* o_paths = run->add_option("-S,--paths", run_paths)->capture_default_str();
    auto* o_hidden = run->add_option("--hidden", run_hidden)->capture_default_str();
    auto* o_epochs = run->add_option("--epochs", run_epochs)->capture_default_str();
    auto* o_lr = run->add_option("--lr", run_lr)->capture_default_str();
    auto* o_alpha = run->add_option("--alpha", run_alpha)->capture_default_str();
    auto* o_tsb = run->add_option("--tsb-beta", run_tsb_beta)->capture_default_str();
    auto* o_scope = run->add_option("--fit-scope", run_scope, "global or local")->check(CLI::IsMember({"global", "local"}));
    auto* o_rmsse = run->add_option("--rmsse", run_rmsse, "printed or m5")->check(CLI::IsMember({"printed", "m5"}));
    std::string run_smape;
    auto* o_smape = run->add_option("--smape-zero-cells", run_smape, "Score of 0/0 sMAPE cells: zero or max")->check(CLI::IsMember({"zero", "max"}));
    auto* o_censor = run->add_flag("--censor-tail", run_censor);
    auto* o_out = run->add_option("-o,--out-dir", run_out, "Output directory");
    run->add_flag("-q,--quiet", run_quiet, "Do not print the results table");

    // sbc
    auto* sbc = app.add_subcommand("sbc", "Syntetos-Boylan class of every item");
    std::string sbc_data, sbc_format = "long";
    SbcThresholds sbc_t;
    sbc->add_option("-d,--data", sbc_data, "Period demand CSV")->required();
    sbc->add_option("--format", sbc_format, "long or wide")->capture_default_str()->check(CLI::IsMember({"long", "wide"}));
    sbc->add_option("--p-threshold", sbc_t.interval)->capture_default_str();
    sbc->add_option("--cv2-threshold", sbc_t.cv2)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    const fs::path out_dir = default_output_dir();
    try {
        if (*gen) {
            gspec.kind = generator_kind_from_string(gen_kind);
            if (gspec.kind == GeneratorKind::from_model) {
                if (gen_model.empty()) throw ConfigError("--model is required for from_model");
                gspec.model = load_model(gen_model);
            }
            const fs::path path = gen_out.empty() ? out_dir / "generated.csv" : fs::path(gen_out);
            const auto data = generate(gspec);
            {
                auto out = open_out(path);
                write_demand_csv(out, data);
            }
            json meta{{"generator", to_string(gspec.kind)},
                      {"n_series", gspec.n_series},
                      {"n_periods", gspec.n_periods},
                      {"seed", gspec.seed}};
            switch (gspec.kind) {
                case GeneratorKind::periodic:
                    meta["period"] = gspec.period;
                    meta["size_mean"] = gspec.size_mean;
                    break;
                case GeneratorKind::alternating:
                    meta["alt_periods"] = gspec.alt_periods;
                    meta["constant_size"] = gspec.constant_size;
                    meta["phase_jitter"] = gspec.phase_jitter;
                    break;
                case GeneratorKind::random:
                    meta["mu_q"] = gspec.mu_q;
                    meta["mu_m"] = gspec.mu_m;
                    break;
                case GeneratorKind::from_model:
                    meta["model"] = gspec.model->id();
                    meta["model_file"] = gen_model;
                    break;
            }
            auto out = open_out(path.string() + ".meta.json");
            out << meta.dump(2) << '\n';
            std::cout << "wrote " << data.size() << " series to " << path.string() << '\n';
        } else if (*sum) {
            print_summary(summarize(load_periods(sum_data, sum_format)), sum_json);
        } else if (*fitc) {
            const ModelSpec spec = fit_flags.make();
            ModelSpec fitted;
            if (spec.is_continuous()) {
                if (fit_events.empty()) throw ConfigError("continuous-time models need --events");
                fitted = fit_ct(spec, load_events(fit_events, {}));
            } else {
                if (fit_data.empty()) throw ConfigError("--data is required");
                fitted = fit(spec, load_periods(fit_data, fit_format));
            }
            const fs::path path = fit_out.empty() ? out_dir / "model.json" : fs::path(fit_out);
            if (path.has_parent_path()) fs::create_directories(path.parent_path());
            save_model(fitted, path.string());
            std::cout << "fitted " << fitted.name() << " -> " << path.string() << '\n';
            const auto& f = *fitted.fitted;
            if (!spec.is_rnn()) {
                std::cout << "  interval: " << describe(f.interval) << "\n  size:     " << describe(f.size) << '\n';
            } else if (!f.loss_trace.empty()) {
                std::cout << "  final training NLL: " << fmt(f.loss_trace.back()) << '\n';
            }
        } else if (*fc) {
            const ModelSpec model = load_model(fc_model);
            const fs::path path = fc_out.empty() ? out_dir / "forecast.csv" : fs::path(fc_out);
            auto out = open_out(path);
            out << "item_id,horizon_step,mean";
            for (double q : fc_levels) out << ",q" << fmt(q);
            out << '\n';
            if (model.is_continuous()) {
                if (fc_events.empty()) throw ConfigError("continuous-time models need --events");
                for (const auto& events : load_events(fc_events, {})) {
                    const double last = events.timestamps.empty() ? 0.0 : events.timestamps.back();
                    const auto paths = sample_events(model, events, events.span - last,
                                                     static_cast<double>(fc_horizon), fc_paths, fc_seed);
                    ForecastResult r;
                    r.n_paths = paths.size();
                    r.horizon = fc_horizon;
                    for (const auto& p : paths) {
                        const auto agg = aggregate_events(p, 1.0);
                        r.paths.insert(r.paths.end(), agg.values.begin(), agg.values.end());
                    }
                    summarize_paths(r, fc_levels);
                    for (std::size_t t = 0; t < fc_horizon; ++t) {
                        out << events.item_id << ',' << t + 1 << ',' << fmt(r.mean_per_period[t]);
                        for (double q : fc_levels) out << ',' << fmt(r.quantile(q)[t]);
                        out << '\n';
                    }
                }
            } else {
                if (fc_data.empty()) throw ConfigError("--data is required");
                const auto data = load_periods(fc_data, fc_format);
                for (std::size_t i = 0; i < data.size(); ++i) {
                    const auto& s = data[i];
                    const auto r = sample_paths(model, s, fc_horizon, fc_paths, mix64(fc_seed + i + 1), fc_levels);
                    for (std::size_t t = 0; t < fc_horizon; ++t) {
                        out << s.item_id << ',' << t + 1 << ',' << fmt(r.mean_per_period[t]);
                        for (double q : fc_levels) out << ',' << fmt(r.quantile(q)[t]);
                        out << '\n';
                    }
                }
            }
            std::cout << "wrote " << path.string() << '\n';
        } else if (*ev) {
            const auto data = load_periods(ev_data, ev_format);
            std::ifstream in(ev_forecast);
            if (!in) throw ValidationError("cannot open " + ev_forecast);
            std::string line;
            std::getline(in, line);
            std::vector<std::string> header;
            {
                std::stringstream ss(line);
                for (std::string f; std::getline(ss, f, ',');) header.push_back(f);
            }
            if (header.size() < 3 || header[0] != "item_id" || header[2] != "mean") {
                throw ValidationError(ev_forecast + ": expected a forecast CSV with item_id,horizon_step,mean");
            }
            std::map<std::string, std::map<std::size_t, std::vector<double>>> rows;
            std::size_t lineno = 1;
            while (std::getline(in, line)) {
                ++lineno;
                if (line.empty()) continue;
                std::stringstream ss(line);
                std::vector<std::string> f;
                for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
                if (f.size() != header.size()) {
                    throw ValidationError(ev_forecast + " line " + std::to_string(lineno) + ": wrong field count");
                }
                std::vector<double> v;
                for (std::size_t c = 2; c < f.size(); ++c) v.push_back(std::stod(f[c]));
                rows[f[0]][std::stoul(f[1])] = v;
            }
            Matrix actual, point, in_sample, p50, p90;
            const auto col = [&](const std::string& name) -> std::optional<std::size_t> {
                for (std::size_t c = 3; c < header.size(); ++c) {
                    if (header[c] == name) return c - 2;
                }
                return std::nullopt;
            };
            const auto c50 = col("q0.5"), c90 = col("q0.9");
            for (const auto& s : data) {
                auto it = rows.find(s.item_id);
                if (it == rows.end()) continue;
                const std::size_t L = it->second.size();
                if (L >= s.size()) throw ValidationError("forecast horizon covers all of item '" + s.item_id + "'");
                const auto test = tail(s, L), train = head(s, s.size() - L);
                actual.emplace_back(test.values.begin(), test.values.end());
                in_sample.emplace_back(train.values.begin(), train.values.end());
                std::vector<double> pt, a50, a90;
                for (const auto& [step, v] : it->second) {
                    pt.push_back(v[0]);
                    if (c50) a50.push_back(v[*c50]);
                    if (c90) a90.push_back(v[*c90]);
                }
                point.push_back(pt);
                p50.push_back(a50);
                p90.push_back(a90);
            }
            if (actual.empty()) throw ValidationError("no forecast item matches the dataset");
            const auto r = evaluate(actual, point, in_sample, c50 ? &p50 : nullptr, c90 ? &p90 : nullptr,
                                    ev_rmsse == "m5" ? RmsseVariant::m5 : RmsseVariant::printed,
                                    ev_smape == "max" ? SmapeZeroCells::max : SmapeZeroCells::zero);
            auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
            json j{{"items", r.items},         {"p50_loss", opt(r.p50_loss)}, {"p90_loss", opt(r.p90_loss)},
                   {"mape", opt(r.mape)},      {"smape", opt(r.smape)},       {"rmse", opt(r.rmse)},
                   {"rmsse", opt(r.rmsse)},    {"mape_skipped", r.mape_skipped},
                   {"rmsse_skipped", r.rmsse_skipped}};
            std::cout << j.dump(2) << '\n';
        } else if (*run) {
            json j = ExperimentConfig{}.to_json();
            j["output_dir"] = out_dir.string();
            auto split_list = [](const std::string& s) {
                std::vector<std::string> out;
                std::stringstream ss(s);
                for (std::string x; std::getline(ss, x, ',');) {
                    if (!x.empty()) out.push_back(x);
                }
                return out;
            };
            if (o_data->count()) j["data_path"] = run_data;
            if (o_gen->count()) {
                json g{{"kind", run_gen}};
                if (o_nseries->count()) g["n_series"] = run_nseries;
                if (o_nperiods->count()) g["n_periods"] = run_nperiods;
                g["seed"] = run_seed;
                j["generator"] = g;
            }
            if (o_holdout->count()) j["holdout"] = run_holdout;
            if (o_models->count()) j["models"] = split_list(run_models);
            if (o_metrics->count()) j["metrics"] = split_list(run_metrics);
            if (o_reps->count()) j["repetitions"] = run_reps;
            if (o_seed->count()) j["seed"] = run_seed;
            if (o_paths->count()) j["n_paths"] = run_paths;
            if (o_hidden->count()) j["rnn_hidden"] = run_hidden;
            if (o_epochs->count()) j["epochs"] = run_epochs;
            if (o_lr->count()) j["learning_rate"] = run_lr;
            if (o_alpha->count()) j["alpha"] = run_alpha;
            if (o_tsb->count()) j["tsb_beta"] = run_tsb_beta;
            if (o_scope->count()) j["fit_scope"] = run_scope;
            if (o_rmsse->count()) j["rmsse_variant"] = run_rmsse;
            if (o_smape->count()) j["smape_zero_cells"] = run_smape;
            if (o_censor->count()) j["censor_tail"] = run_censor;
            if (o_out->count()) j["output_dir"] = run_out;
            if (!run_config.empty()) {
                std::ifstream in(run_config);
                if (!in) throw ConfigError("cannot open config " + run_config);
                json file;
                try {
                    file = json::parse(in);
                } catch (const json::exception& e) {
                    throw ConfigError("config " + run_config + " is not valid JSON: " + e.what());
                }
                if (!file.is_object()) throw ConfigError("config must be a JSON object");
                if (file.contains("data_path") && !file["data_path"].is_null()) j["generator"] = nullptr;
                if (file.contains("generator") && !file["generator"].is_null()) j["data_path"] = nullptr;
                j.update(file);
            }
            const ExperimentConfig cfg = ExperimentConfig::from_json(j);
            const ExperimentResults results = run_experiment(cfg);
            write_results(results);
            if (!run_quiet) std::cout << format_results_table(results);
            std::cout << "results in " << cfg.output_dir << " (config " << results.config_hash << ")\n";
        } else if (*sbc) {
            std::cout << "item_id,p,cv2,class\n";
            for (const auto& s : load_periods(sbc_data, sbc_format)) {
                std::cout << s.item_id << ',';
                try {
                    const SbcStats st = sbc_stats(s);
                    std::cout << fmt(st.mean_interval) << ',' << fmt(st.size_cv2) << ','
                              << to_string(sbc_classify(st, sbc_t)) << '\n';
                } catch (const ValidationError&) {
                    std::cout << ",,no_demand\n";
                }
            }
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ModelError& e) {
        std::cerr << "model error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
