#include "renewcast/modulators.hpp"

#include <cmath>
#include <string>

#include "renewcast/errors.hpp"

namespace renewcast {

EwmaConfig EwmaConfig::make(double alpha) {
    EwmaConfig cfg{alpha};
    cfg.validate();
    return cfg;
}

void EwmaConfig::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ConfigError("EWMA alpha must lie in (0, 1], got " + std::to_string(alpha));
    }
}

StationaryArConfig StationaryArConfig::make(double phi, double beta, double mu_level) {
    StationaryArConfig cfg{phi, beta, mu_level};
    cfg.validate();
    return cfg;
}

void StationaryArConfig::validate() const {
    if (!(phi >= 0.0) || !(beta >= 0.0)) throw ConfigError("AR phi and beta must be >= 0");
    if (!(phi + beta < 1.0)) throw ConfigError("AR modulator needs phi + beta < 1");
    if (!(mu_level >= 1.0) || !std::isfinite(mu_level)) throw ConfigError("AR level must be >= 1");
}

ModulatorState ewma_step(const EwmaConfig& cfg, const ModulatorState& state, double observation) {
    if (state.history_count == 0) return {observation, 1};
    return {cfg.alpha * observation + (1.0 - cfg.alpha) * state.current_mean,
            state.history_count + 1};
}

ModulatorState stationary_ar_step(const StationaryArConfig& cfg, const ModulatorState& state,
                                  double observation) {
    const double next = (1.0 - cfg.phi - cfg.beta) * cfg.mu_level + cfg.beta * state.current_mean +
                        cfg.phi * observation;
    return {next, state.history_count + 1};
}

}  // namespace renewcast
