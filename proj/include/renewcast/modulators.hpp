#pragma once

namespace renewcast {

/// Smoothing weight of an EWMA modulator, 0 < alpha <= 1.
struct EwmaConfig {
    double alpha = 0.1;

    static EwmaConfig make(double alpha);
    void validate() const;
};

/// Mean-reverting recursion
///   mean' = (1 - phi - beta) * mu_level + beta * mean + phi * observation
/// with phi, beta >= 0, phi + beta < 1 and mu_level >= 1.
struct StationaryArConfig {
    double phi = 0.1;
    double beta = 0.8;
    double mu_level = 1.0;

    static StationaryArConfig make(double phi, double beta, double mu_level);
    void validate() const;
};

/// Conditional mean carried between issue points.
struct ModulatorState {
    double current_mean = 1.0;
    int history_count = 0;

    /// State of an AR modulator before any observation: its long-run level.
    static ModulatorState at_level(double level) { return {level, 0}; }
};

/// The first observation initializes the mean; later ones are blended in
/// with weight alpha.
ModulatorState ewma_step(const EwmaConfig& cfg, const ModulatorState& state, double observation);

ModulatorState stationary_ar_step(const StationaryArConfig& cfg, const ModulatorState& state,
                                  double observation);

}  // namespace renewcast
