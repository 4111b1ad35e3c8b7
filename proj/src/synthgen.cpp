#include "renewcast/synthgen.hpp"

#include "model_internal.hpp"
#include "parallel.hpp"
#include "renewcast/errors.hpp"

namespace renewcast {

std::string to_string(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::random: return "random";
        case GeneratorKind::periodic: return "periodic";
        case GeneratorKind::alternating: return "alternating";
        case GeneratorKind::from_model: return "from_model";
    }
    return "unknown";
}

GeneratorKind generator_kind_from_string(const std::string& name) {
    for (auto k : {GeneratorKind::random, GeneratorKind::periodic, GeneratorKind::alternating,
                   GeneratorKind::from_model}) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("unknown generator kind '" + name + "'");
}

void GeneratorSpec::validate() const {
    if (n_series < 1) throw ConfigError("n_series must be >= 1");
    if (n_periods < 1) throw ConfigError("n_periods must be >= 1");
    switch (kind) {
        case GeneratorKind::periodic:
            if (period < 1) throw ConfigError("period must be >= 1");
            if (!(size_mean >= 1.0)) throw ConfigError("size_mean must be >= 1");
            break;
        case GeneratorKind::alternating:
            if (alt_periods[0] < 1 || alt_periods[1] < 1) throw ConfigError("alternating periods must be >= 1");
            if (constant_size < 1) throw ConfigError("constant size must be >= 1");
            break;
        case GeneratorKind::random:
            if (!(mu_q >= 1.0) || !(mu_m >= 1.0)) throw ConfigError("random means must be >= 1");
            break;
        case GeneratorKind::from_model:
            if (!model || !model->fitted) throw ConfigError("from_model needs a fitted model");
            if (model->is_continuous()) throw ConfigError("from_model needs a discrete-time model");
            break;
    }
}

DemandSeries simulate_series(const ModelSpec& model, std::size_t n_periods, Rng& rng) {
    ModelState state(model);
    state.prime();
    DemandSeries out;
    out.values.assign(n_periods, 0);
    detail::simulate_path(state, 0, out.values, rng);
    return out;
}

std::vector<DemandSeries> generate(const GeneratorSpec& spec, Execution exec) {
    spec.validate();
    const auto n = static_cast<std::size_t>(spec.n_periods);
    ModelSpec random_model;
    if (spec.kind == GeneratorKind::random) {
        random_model.fitted = FittedParams{};
        random_model.fitted->interval = DistributionSpec::shifted_geometric(spec.mu_q);
        random_model.fitted->size = DistributionSpec::shifted_poisson(spec.mu_m);
    }
    std::vector<DemandSeries> out(static_cast<std::size_t>(spec.n_series));
    detail::parallel_for(out.size(), exec, [&](std::size_t i) {
        Rng rng = Rng::stream(spec.seed, i);
        DemandSeries s;
        switch (spec.kind) {
            case GeneratorKind::periodic: {
                s.values.assign(n, 0);
                const auto size_law = DistributionSpec::shifted_poisson(spec.size_mean);
                for (std::size_t t = static_cast<std::size_t>(spec.period) - 1; t < n;
                     t += static_cast<std::size_t>(spec.period)) {
                    s.values[t] = sample(size_law, rng);
                }
                break;
            }
            case GeneratorKind::alternating: {
                s.values.assign(n, 0);
                std::size_t phase = spec.phase_jitter ? static_cast<std::size_t>(rng.next() % 2) : 0;
                std::size_t t = static_cast<std::size_t>(spec.alt_periods[phase]) - 1;
                while (t < n) {
                    s.values[t] = spec.constant_size;
                    phase ^= 1;
                    t += static_cast<std::size_t>(spec.alt_periods[phase]);
                }
                break;
            }
            case GeneratorKind::random: s = simulate_series(random_model, n, rng); break;
            case GeneratorKind::from_model: s = simulate_series(*spec.model, n, rng); break;
        }
        s.item_id = to_string(spec.kind) + "_" + std::to_string(i);
        out[i] = std::move(s);
    });
    return out;
}

}  // namespace renewcast
