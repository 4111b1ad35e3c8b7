#pragma once

#include <optional>
#include <span>
#include <string>

#include "renewcast/models.hpp"

namespace renewcast::detail {

/// Shared fitting core for discrete and continuous models.
ModelSpec fit_sequences(const ModelSpec& spec_template, std::span<const IssueSequence> data,
                        std::span<const std::string> names);

/// Conditional log-likelihood of one sequence; `censored_gap` adds the
/// survival term of an open final interval.
double sequence_log_likelihood(const ModelSpec& model, const IssueSequence& seq,
                               std::optional<double> censored_gap);

/// One demand path over out.size() periods starting `elapsed` periods after
/// the last issue point. `out` must be zero-filled.
void simulate_path(const ModelState& start, Count elapsed, std::span<Count> out, Rng& rng);

}  // namespace renewcast::detail
