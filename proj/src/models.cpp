#include "renewcast/models.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>

#include <boost/math/tools/minima.hpp>
#include <nlohmann/json.hpp>

#include "parallel.hpp"
#include "renewcast/errors.hpp"
#include "model_internal.hpp"

namespace renewcast {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

DistKind interval_kind(IntervalFamily f) {
    switch (f) {
        case IntervalFamily::geometric: return DistKind::shifted_geometric;
        case IntervalFamily::negbin: return DistKind::shifted_negbin;
        case IntervalFamily::exponential: return DistKind::exponential;
    }
    return DistKind::shifted_geometric;
}

DistKind size_kind(SizeFamily f) {
    return f == SizeFamily::poisson ? DistKind::shifted_poisson : DistKind::shifted_negbin;
}

/// A law of `kind` with the given conditional mean and dispersion template.
DistributionSpec modulated_law(DistKind kind, double mean, double nu) {
    if (kind == DistKind::exponential) return DistributionSpec{kind, std::max(mean, 1e-12), 0.0};
    return DistributionSpec{kind, std::max(mean, kModulatedMeanFloor),
                            kind == DistKind::shifted_negbin ? nu : 0.0};
}

double log_density(const DistributionSpec& law, double x) {
    if (law.kind == DistKind::exponential) return log_pdf(law, x);
    return log_pmf(law, static_cast<Count>(x));
}

double inverse_softplus(double y) {
    y = std::max(y, 1e-3);
    return y > 30.0 ? y : std::log(std::expm1(y));
}

/// Maximizes sum_i log NB(k_i; mean_i, nu) over nu on the standard bounds.
double fit_dispersion(const std::vector<std::pair<double, double>>& terms) {
    auto neg = [&](double log_kappa) {
        const double nu = 1.0 + std::exp(log_kappa);
        double ll = 0.0;
        for (const auto& [mean, k] : terms) {
            ll += log_pmf(DistributionSpec{DistKind::shifted_negbin, mean, nu}, static_cast<Count>(k));
        }
        return -ll;
    };
    const double lo = std::log(kNbDispersionLower - 1.0);
    const double hi = std::log(kNbDispersionUpper - 1.0);
    auto [best_t, best_f] = boost::math::tools::brent_find_minima(neg, lo, hi, 27);
    for (double edge : {lo, hi}) {
        const double f = neg(edge);
        if (f < best_f) {
            best_f = f;
            best_t = edge;
        }
    }
    return std::clamp(1.0 + std::exp(best_t), kNbDispersionLower, kNbDispersionUpper);
}

double pooled_mean(std::span<const IssueSequence> data, bool intervals) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : data) {
        const auto& v = intervals ? s.intervals : s.sizes;
        sum += std::accumulate(v.begin(), v.end(), 0.0);
        n += v.size();
    }
    return n ? sum / static_cast<double>(n) : 1.0;
}

}  // namespace

std::string to_string(IntervalFamily f) {
    switch (f) {
        case IntervalFamily::geometric: return "geometric";
        case IntervalFamily::negbin: return "negbin";
        case IntervalFamily::exponential: return "exponential";
    }
    return "unknown";
}

std::string to_string(SizeFamily f) { return f == SizeFamily::poisson ? "poisson" : "negbin"; }

std::size_t ModelSpec::min_issue_points() const noexcept {
    if (is_rnn()) return is_continuous() ? 3 : 2;
    return is_continuous() ? 2 : 1;
}

HeadKinds ModelSpec::head_kinds() const {
    HeadKinds h;
    switch (interval_family) {
        case IntervalFamily::geometric: h.interval = IntervalHead::geometric; break;
        case IntervalFamily::negbin: h.interval = IntervalHead::negbin; break;
        case IntervalFamily::exponential: h.interval = IntervalHead::exponential; break;
    }
    h.size = size_family == SizeFamily::poisson ? SizeHead::poisson : SizeHead::negbin;
    return h;
}

std::string ModelSpec::name() const {
    const std::string mod = std::visit(overloaded{[](const StaticModulation&) { return "Static"; },
                                                  [](const EwmaModulation&) { return "EWMA"; },
                                                  [](const ArModulation&) { return "AR"; },
                                                  [](const RnnModulation&) { return "RNN"; }},
                                       modulation);
    const char* q = interval_family == IntervalFamily::geometric ? "G"
                    : interval_family == IntervalFamily::negbin  ? "NB"
                                                                 : "E";
    const char* m = size_family == SizeFamily::poisson ? "Po" : "NB";
    return mod + " " + q + "-" + m;
}

std::string ModelSpec::id() const {
    const std::string mod = std::visit(overloaded{[](const StaticModulation&) { return "static"; },
                                                  [](const EwmaModulation&) { return "ewma"; },
                                                  [](const ArModulation&) { return "ar"; },
                                                  [](const RnnModulation&) { return "rnn"; }},
                                       modulation);
    const char* q = interval_family == IntervalFamily::geometric ? "g"
                    : interval_family == IntervalFamily::negbin  ? "nb"
                                                                 : "e";
    const char* m = size_family == SizeFamily::poisson ? "po" : "nb";
    return mod + "-" + q + "-" + m;
}

ModelSpec ModelSpec::parse(const std::string& id) {
    const auto first = id.find('-');
    const auto second = first == std::string::npos ? std::string::npos : id.find('-', first + 1);
    if (second == std::string::npos) throw ConfigError("unknown model id '" + id + "'");
    const std::string mod = id.substr(0, first);
    const std::string q = id.substr(first + 1, second - first - 1);
    const std::string m = id.substr(second + 1);

    ModelSpec spec;
    if (q == "g") spec.interval_family = IntervalFamily::geometric;
    else if (q == "nb") spec.interval_family = IntervalFamily::negbin;
    else if (q == "e") spec.interval_family = IntervalFamily::exponential;
    else throw ConfigError("unknown interval family in model id '" + id + "'");

    if (m == "po") spec.size_family = SizeFamily::poisson;
    else if (m == "nb") spec.size_family = SizeFamily::negbin;
    else throw ConfigError("unknown size family in model id '" + id + "'");

    if (mod == "static") spec.modulation = StaticModulation{};
    else if (mod == "ewma") spec.modulation = EwmaModulation{};
    else if (mod == "ar") spec.modulation = ArModulation{};
    else if (mod == "rnn") spec.modulation = RnnModulation{};
    else throw ConfigError("unknown modulation in model id '" + id + "'");

    if (spec.is_continuous() && (mod == "ewma" || mod == "ar")) {
        throw ConfigError("continuous-time models support static and rnn modulation only");
    }
    return spec;
}

ModelState::ModelState(const ModelSpec& model) : model_(&model) {
    if (!model.fitted) throw ModelError("model " + model.name() + " is not fitted");
    fitted_ = &*model.fitted;
    if (std::holds_alternative<ArModulation>(model.modulation)) {
        interval_state_ = ModulatorState::at_level(fitted_->interval_level);
        size_state_ = ModulatorState::at_level(fitted_->size_level);
    }
    if (model.is_rnn()) {
        if (!fitted_->rnn) throw ModelError("RNN model has no trained weights");
        rnn_state_ = RnnState::zeros(*fitted_->rnn);
    }
}

bool ModelState::ready() const noexcept {
    if (std::holds_alternative<EwmaModulation>(model_->modulation) || model_->is_rnn()) {
        return observed_ > 0 || primed_;
    }
    return true;
}

DistributionSpec ModelState::interval_law() const {
    if (!ready()) throw ModelError(model_->name() + " needs an observed issue point before forecasting");
    const DistKind kind = interval_kind(model_->interval_family);
    return std::visit(
        overloaded{[&](const StaticModulation&) { return fitted_->interval; },
                   [&](const EwmaModulation&) {
                       return modulated_law(kind, interval_state_.current_mean, fitted_->interval.nu);
                   },
                   [&](const ArModulation&) {
                       return modulated_law(kind, interval_state_.current_mean, fitted_->interval.nu);
                   },
                   [&](const RnnModulation&) {
                       return modulated_law(kind, heads_.interval_mean, heads_.interval_nu);
                   }},
        model_->modulation);
}

DistributionSpec ModelState::size_law() const {
    if (!ready()) throw ModelError(model_->name() + " needs an observed issue point before forecasting");
    const DistKind kind = size_kind(model_->size_family);
    return std::visit(
        overloaded{[&](const StaticModulation&) { return fitted_->size; },
                   [&](const EwmaModulation&) {
                       return modulated_law(kind, size_state_.current_mean, fitted_->size.nu);
                   },
                   [&](const ArModulation&) {
                       return modulated_law(kind, size_state_.current_mean, fitted_->size.nu);
                   },
                   [&](const RnnModulation&) {
                       return modulated_law(kind, heads_.size_mean, heads_.size_nu);
                   }},
        model_->modulation);
}

void ModelState::observe(double interval, double size) {
    std::visit(overloaded{[](const StaticModulation&) {},
                          [&](const EwmaModulation& m) {
                              interval_state_ = ewma_step(m.cfg, interval_state_, interval);
                              size_state_ = ewma_step(m.cfg, size_state_, size);
                          },
                          [&](const ArModulation& m) {
                              interval_state_ = stationary_ar_step(
                                  {m.phi, m.beta, fitted_->interval_level}, interval_state_, interval);
                              size_state_ = stationary_ar_step({m.phi, m.beta, fitted_->size_level},
                                                               size_state_, size);
                          },
                          [&](const RnnModulation&) {
                              const auto input = rnn_input(interval, size);
                              rnn_state_ = lstm_step(*fitted_->rnn, rnn_state_, input);
                              heads_ = evaluate_heads(*fitted_->rnn, model_->head_kinds(), rnn_state_.top());
                          }},
               model_->modulation);
    ++observed_;
}

void ModelState::prime() {
    if (ready()) return;
    if (model_->is_rnn()) {
        heads_ = evaluate_heads(*fitted_->rnn, model_->head_kinds(), rnn_state_.top());
    } else {
        interval_state_ = ModulatorState::at_level(fitted_->interval_level);
        size_state_ = ModulatorState::at_level(fitted_->size_level);
    }
    primed_ = true;
}

namespace detail {

ModelSpec fit_sequences(const ModelSpec& spec_template, std::span<const IssueSequence> data,
                        std::span<const std::string> names) {
    ModelSpec model = spec_template;
    model.fitted.reset();
    if (data.empty()) throw ValidationError("cannot fit " + model.name() + " on an empty dataset");
    const std::size_t need = model.min_issue_points();
    for (std::size_t s = 0; s < data.size(); ++s) {
        if (data[s].size() < need) {
            const std::string who = s < names.size() ? "item '" + names[s] + "'" : "series #" + std::to_string(s);
            throw ValidationError(who + " has " + std::to_string(data[s].size()) + " issue points; " +
                                  model.name() + " needs at least " + std::to_string(need));
        }
    }

    const DistKind qkind = interval_kind(model.interval_family);
    const DistKind mkind = size_kind(model.size_family);
    FittedParams fitted;
    fitted.interval = DistributionSpec{qkind, 1.0, 0.0};
    fitted.size = DistributionSpec{mkind, 1.0, 0.0};

    std::vector<double> all_q, all_m;
    for (const auto& s : data) {
        all_q.insert(all_q.end(), s.intervals.begin(), s.intervals.end());
        all_m.insert(all_m.end(), s.sizes.begin(), s.sizes.end());
    }

    fitted.interval_level = pooled_mean(data, true);
    fitted.size_level = pooled_mean(data, false);

    if (std::holds_alternative<StaticModulation>(model.modulation)) {
        const MleFit fq = fit_mle(qkind, all_q);
        const MleFit fm = fit_mle(mkind, all_m);
        fitted.interval = fq.spec;
        fitted.size = fm.spec;
        fitted.degenerate_interval = fq.degenerate;
        fitted.degenerate_size = fm.degenerate;
    } else if (model.is_rnn()) {
        auto& rnn = std::get<RnnModulation>(model.modulation);
        RnnParams params = RnnParams::initialize(rnn.hidden, rnn.layers, rnn.init_seed);
        const double mq = pooled_mean(data, true);
        const double mm = pooled_mean(data, false);
        params.interval_w0() = inverse_softplus(model.is_continuous() ? mq : mq - 1.0);
        params.size_w0() = inverse_softplus(mm - 1.0);
        TrainResult trained = train_global(std::move(params), data, model.head_kinds(), rnn.train);
        fitted.rnn = std::move(trained.params);
        fitted.loss_trace = std::move(trained.loss_trace);
    } else {
        // EWMA or AR: the modulator fixes the conditional mean, only the NB
        // dispersions are estimated, from the one-step conditional terms.
        const bool is_ar = std::holds_alternative<ArModulation>(model.modulation);
        if (is_ar) {
            const auto& ar = std::get<ArModulation>(model.modulation);
            StationaryArConfig::make(ar.phi, ar.beta, 1.0);
        } else {
            std::get<EwmaModulation>(model.modulation).cfg.validate();
        }
        std::vector<std::pair<double, double>> q_terms, m_terms;
        for (const auto& s : data) {
            ModulatorState qs, ms;
            if (is_ar) {
                qs = ModulatorState::at_level(fitted.interval_level);
                ms = ModulatorState::at_level(fitted.size_level);
            }
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (is_ar || i > 0) {
                    q_terms.emplace_back(std::max(qs.current_mean, kModulatedMeanFloor), s.intervals[i]);
                    m_terms.emplace_back(std::max(ms.current_mean, kModulatedMeanFloor), s.sizes[i]);
                }
                if (is_ar) {
                    const auto& ar = std::get<ArModulation>(model.modulation);
                    qs = stationary_ar_step({ar.phi, ar.beta, fitted.interval_level}, qs, s.intervals[i]);
                    ms = stationary_ar_step({ar.phi, ar.beta, fitted.size_level}, ms, s.sizes[i]);
                } else {
                    const auto& cfg = std::get<EwmaModulation>(model.modulation).cfg;
                    qs = ewma_step(cfg, qs, s.intervals[i]);
                    ms = ewma_step(cfg, ms, s.sizes[i]);
                }
            }
        }
        auto dispersion = [](const std::vector<std::pair<double, double>>& terms,
                             const std::vector<double>& pooled) {
            if (!terms.empty()) return fit_dispersion(terms);
            return fit_mle(DistKind::shifted_negbin, pooled).spec.nu;
        };
        if (qkind == DistKind::shifted_negbin) fitted.interval.nu = dispersion(q_terms, all_q);
        if (mkind == DistKind::shifted_negbin) fitted.size.nu = dispersion(m_terms, all_m);
    }
    model.fitted = std::move(fitted);
    return model;
}

double sequence_log_likelihood(const ModelSpec& model, const IssueSequence& seq,
                               std::optional<double> censored_gap) {
    ModelState state(model);
    double ll = 0.0;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (state.ready()) {
            ll += log_density(state.interval_law(), seq.intervals[i]) +
                  log_density(state.size_law(), seq.sizes[i]);
        }
        state.observe(seq.intervals[i], seq.sizes[i]);
    }
    if (censored_gap && state.ready()) {
        const DistributionSpec law = state.interval_law();
        const double s = law.kind == DistKind::exponential
                             ? std::exp(-*censored_gap / law.mu)
                             : survival(law, static_cast<Count>(*censored_gap));
        ll += std::log(s);
    }
    return ll;
}

}  // namespace detail

ModelSpec fit(const ModelSpec& spec_template, std::span<const DemandSeries> dataset) {
    std::vector<IssueSequence> seqs;
    std::vector<std::string> names;
    seqs.reserve(dataset.size());
    for (const auto& s : dataset) {
        seqs.push_back(to_sequence(decompose(s)));
        names.push_back(s.item_id);
    }
    return detail::fit_sequences(spec_template, seqs, names);
}

ModelSpec fit(const ModelSpec& spec_template, const DemandSeries& series) {
    return fit(spec_template, std::span<const DemandSeries>(&series, 1));
}

ModelSpec fit(const ModelSpec& spec_template, std::span<const SizeIntervalSeries> dataset) {
    std::vector<IssueSequence> seqs;
    for (const auto& s : dataset) seqs.push_back(to_sequence(s));
    return detail::fit_sequences(spec_template, seqs, {});
}

double log_likelihood(const ModelSpec& model, const SizeIntervalSeries& series) {
    if (model.is_continuous()) throw ModelError("use the point-process likelihood for continuous models");
    std::optional<double> gap;
    if (model.censor_tail) gap = static_cast<double>(series.tail_gap);
    return detail::sequence_log_likelihood(model, to_sequence(series), gap);
}

double log_likelihood(const ModelSpec& model, const DemandSeries& series) {
    return log_likelihood(model, decompose(series));
}

namespace {

ModelState warm_state(const ModelSpec& model, const SizeIntervalSeries& si) {
    ModelState state(model);
    for (std::size_t i = 0; i < si.sizes.size(); ++i) {
        state.observe(static_cast<double>(si.intervals[i]), static_cast<double>(si.sizes[i]));
    }
    return state;
}

}  // namespace

OneStepMean one_step_mean(const ModelSpec& model, const DemandSeries& history) {
    if (model.is_continuous()) throw ModelError("one_step_mean applies to discrete-time models");
    const SizeIntervalSeries si = decompose(history);
    if (si.empty()) throw ValidationError("one_step_mean needs at least one issue point in the history");
    const ModelState state = warm_state(model, si);
    const Hazard h = hazard(state.interval_law(), si.tail_gap + 1);
    return {h.value * mean(state.size_law()), h.saturated};
}

const std::vector<double>& ForecastResult::quantile(double rho) const {
    auto it = quantiles.find(rho);
    if (it == quantiles.end()) throw ValidationError("quantile level not computed");
    return it->second;
}

double empirical_quantile(std::vector<double> values, double rho) {
    if (values.empty()) throw ValidationError("quantile of an empty sample");
    if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = rho * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

void summarize_paths(ForecastResult& result, std::span<const double> quantile_levels) {
    const std::size_t s = result.n_paths;
    const std::size_t l = result.horizon;
    result.mean_per_period.assign(l, 0.0);
    result.quantiles.clear();
    for (double rho : quantile_levels) result.quantiles[rho].assign(l, 0.0);
    if (s == 0) return;
    std::vector<double> column(s);
    for (std::size_t t = 0; t < l; ++t) {
        double sum = 0.0;
        for (std::size_t p = 0; p < s; ++p) {
            column[p] = static_cast<double>(result.paths[p * l + t]);
            sum += column[p];
        }
        result.mean_per_period[t] = sum / static_cast<double>(s);
        std::sort(column.begin(), column.end());
        for (double rho : quantile_levels) result.quantiles[rho][t] = empirical_quantile(column, rho);
    }
}

namespace detail {

void simulate_path(const ModelState& start, Count elapsed, std::span<Count> out, Rng& rng) {
    ModelState state = start;
    const auto horizon = static_cast<Count>(out.size());
    Count tau = elapsed;
    Count t = 0;
    while (true) {
        const Count q = sample_residual(state.interval_law(), tau, rng);
        const Count ahead = q - tau;
        if (t + ahead > horizon) break;
        const Count m = sample(state.size_law(), rng);
        out[static_cast<std::size_t>(t + ahead - 1)] = m;
        t += ahead;
        tau = 0;
        state.observe(static_cast<double>(q), static_cast<double>(m));
    }
}

}  // namespace detail

ForecastResult sample_paths(const ModelSpec& model, const DemandSeries& history, std::size_t horizon,
                            std::size_t n_paths, std::uint64_t seed,
                            std::span<const double> quantile_levels, Execution exec) {
    if (model.is_continuous()) throw ModelError("sample_paths applies to discrete-time models");
    if (!model.fitted) throw ModelError("model " + model.name() + " is not fitted");
    ForecastResult result;
    result.horizon = horizon;
    result.n_paths = horizon == 0 ? 0 : n_paths;
    if (horizon == 0 || n_paths == 0) {
        summarize_paths(result, quantile_levels);
        return result;
    }
    const SizeIntervalSeries si = decompose(history);
    const ModelState start = warm_state(model, si);
    if (!start.ready()) throw ModelError(model.name() + " needs an issue point in the history to forecast");
    result.paths.assign(n_paths * horizon, 0);
    detail::parallel_for(n_paths, exec, [&](std::size_t p) {
        Rng rng = Rng::stream(seed, p);
        detail::simulate_path(start, si.tail_gap,
                              std::span<Count>(result.paths).subspan(p * horizon, horizon), rng);
    });
    summarize_paths(result, quantile_levels);
    return result;
}

ConvergenceProbeResult convergence_probe(const ConvergenceProbeConfig& cfg, Execution exec) {
    if (cfg.trajectories < 1) throw ConfigError("probe needs at least one trajectory");
    if (cfg.steps < 0) throw ConfigError("probe step count must be >= 0");
    if (!(cfg.start_mean >= 1.0)) throw ConfigError("probe start mean must be >= 1");
    if (cfg.modulation == ConvergenceProbeConfig::Modulation::ewma) {
        EwmaConfig::make(cfg.beta);
    } else {
        cfg.ar.validate();
    }
    ConvergenceProbeResult result;
    result.final_means.assign(static_cast<std::size_t>(cfg.trajectories), cfg.start_mean);
    detail::parallel_for(result.final_means.size(), exec, [&](std::size_t j) {
        Rng rng = Rng::stream(cfg.seed, j);
        ModulatorState state{cfg.start_mean, 1};
        for (long i = 0; i < cfg.steps; ++i) {
            const DistributionSpec law{DistKind::shifted_poisson, std::max(state.current_mean, 1.0), 0.0};
            const double m = static_cast<double>(sample(law, rng));
            if (cfg.modulation == ConvergenceProbeConfig::Modulation::ewma) {
                state = ewma_step(EwmaConfig{cfg.beta}, state, m);
            } else {
                state = stationary_ar_step(cfg.ar, state, m);
            }
        }
        result.final_means[j] = state.current_mean;
    });
    const auto below = std::count_if(result.final_means.begin(), result.final_means.end(),
                                     [&](double m) { return m < cfg.threshold; });
    result.fraction_below = static_cast<double>(below) / static_cast<double>(cfg.trajectories);
    return result;
}

namespace {

using nlohmann::json;

json spec_to_json(const DistributionSpec& s) {
    return json{{"kind", to_string(s.kind)}, {"mu", s.mu}, {"nu", s.nu}};
}

DistributionSpec spec_from_json(const json& j) {
    return DistributionSpec{dist_kind_from_string(j.at("kind").get<std::string>()), j.at("mu").get<double>(),
                            j.at("nu").get<double>()};
}

json train_to_json(const TrainConfig& t) {
    return json{{"learning_rate", t.learning_rate}, {"weight_decay", t.weight_decay},
                {"epochs", t.epochs},               {"adam_beta1", t.adam_beta1},
                {"adam_beta2", t.adam_beta2},       {"adam_epsilon", t.adam_epsilon},
                {"seed", t.seed},                   {"batch_size", t.batch_size}};
}

TrainConfig train_from_json(const json& j) {
    TrainConfig t;
    t.learning_rate = j.at("learning_rate").get<double>();
    t.weight_decay = j.at("weight_decay").get<double>();
    t.epochs = j.at("epochs").get<int>();
    t.adam_beta1 = j.at("adam_beta1").get<double>();
    t.adam_beta2 = j.at("adam_beta2").get<double>();
    t.adam_epsilon = j.at("adam_epsilon").get<double>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.batch_size = j.at("batch_size").get<int>();
    return t;
}

}  // namespace

void save_model(const ModelSpec& model, const std::string& path) {
    json doc;
    doc["format"] = "renewcast-model";
    doc["version"] = 1;
    doc["id"] = model.id();
    doc["name"] = model.name();
    doc["censor_tail"] = model.censor_tail;
    doc["modulation"] = std::visit(
        overloaded{[](const StaticModulation&) { return json{{"kind", "static"}}; },
                   [](const EwmaModulation& m) { return json{{"kind", "ewma"}, {"alpha", m.cfg.alpha}}; },
                   [](const ArModulation& m) {
                       return json{{"kind", "ar"}, {"phi", m.phi}, {"beta", m.beta}};
                   },
                   [](const RnnModulation& m) {
                       return json{{"kind", "rnn"},
                                   {"hidden", m.hidden},
                                   {"layers", m.layers},
                                   {"init_seed", m.init_seed},
                                   {"train", train_to_json(m.train)}};
                   }},
        model.modulation);
    if (model.fitted) {
        const auto& f = *model.fitted;
        json fitted{{"interval", spec_to_json(f.interval)},
                    {"size", spec_to_json(f.size)},
                    {"interval_level", f.interval_level},
                    {"size_level", f.size_level},
                    {"degenerate_interval", f.degenerate_interval},
                    {"degenerate_size", f.degenerate_size},
                    {"loss_trace", f.loss_trace}};
        if (f.rnn) {
            const std::filesystem::path p(path);
            const std::string ckpt = p.filename().string() + ".rnn";
            save_checkpoint(*f.rnn, (p.parent_path() / ckpt).string());
            fitted["rnn_checkpoint"] = ckpt;
        }
        doc["fitted"] = fitted;
    } else {
        doc["fitted"] = nullptr;
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << doc.dump(2) << "\n";
}

ModelSpec load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open model file " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("model file " + path + " is not valid JSON: " + e.what());
    }
    try {
        if (doc.at("format") != "renewcast-model") throw ValidationError("not a model document: " + path);
        ModelSpec model = ModelSpec::parse(doc.at("id").get<std::string>());
        model.censor_tail = doc.value("censor_tail", false);
        const json& mod = doc.at("modulation");
        const std::string kind = mod.at("kind").get<std::string>();
        if (kind == "ewma") {
            model.modulation = EwmaModulation{EwmaConfig::make(mod.at("alpha").get<double>())};
        } else if (kind == "ar") {
            model.modulation = ArModulation{mod.at("phi").get<double>(), mod.at("beta").get<double>()};
        } else if (kind == "rnn") {
            model.modulation = RnnModulation{mod.at("hidden").get<int>(), mod.at("layers").get<int>(),
                                             mod.at("init_seed").get<std::uint64_t>(),
                                             train_from_json(mod.at("train"))};
        }
        const json& f = doc.at("fitted");
        if (!f.is_null()) {
            FittedParams fitted;
            fitted.interval = spec_from_json(f.at("interval"));
            fitted.size = spec_from_json(f.at("size"));
            fitted.interval_level = f.at("interval_level").get<double>();
            fitted.size_level = f.at("size_level").get<double>();
            fitted.degenerate_interval = f.at("degenerate_interval").get<bool>();
            fitted.degenerate_size = f.at("degenerate_size").get<bool>();
            fitted.loss_trace = f.at("loss_trace").get<std::vector<double>>();
            if (f.contains("rnn_checkpoint")) {
                const auto ckpt = std::filesystem::path(path).parent_path() /
                                  f.at("rnn_checkpoint").get<std::string>();
                fitted.rnn = load_checkpoint(ckpt.string());
            }
            model.fitted = std::move(fitted);
        }
        return model;
    } catch (const json::exception& e) {
        throw ValidationError("malformed model file " + path + ": " + e.what());
    }
}

}  // namespace renewcast
