#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "renewcast/models.hpp"
#include "renewcast/series.hpp"

namespace renewcast {

enum class GeneratorKind { random, periodic, alternating, from_model };
std::string to_string(GeneratorKind kind);
GeneratorKind generator_kind_from_string(const std::string& name);

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::periodic;
    int n_series = 100;
    int n_periods = 1680;
    std::uint64_t seed = 0;

    // periodic: an issue point every `period` steps starting at index
    // period - 1, sizes shifted Poisson with mean size_mean.
    int period = 20;
    double size_mean = 5.0;
    // alternating: intervals cycle through alt_periods with constant sizes.
    std::array<int, 2> alt_periods{4, 16};
    Count constant_size = 10;
    /// Starts each alternating series at a random position of the cycle.
    bool phase_jitter = false;
    // random: Static G-Po with these means.
    double mu_q = 3.0;
    double mu_m = 5.0;
    // from_model: any fitted discrete-time model.
    std::optional<ModelSpec> model;

    void validate() const;
};

/// Series i uses random stream (seed, i); output is independent of the
/// execution mode. Item ids are "<kind>_<index>".
std::vector<DemandSeries> generate(const GeneratorSpec& spec, Execution exec = Execution::parallel);

/// Forward simulation of a fitted model from an empty history.
DemandSeries simulate_series(const ModelSpec& model, std::size_t n_periods, Rng& rng);

}  // namespace renewcast
