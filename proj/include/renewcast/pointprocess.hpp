#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "renewcast/models.hpp"

namespace renewcast {

/// Marked events of one item in continuous time, measured in review periods.
struct EventSeries {
    std::string item_id;
    std::vector<double> timestamps;  ///< strictly increasing, in [0, span)
    std::vector<Count> marks;        ///< order sizes, >= 1
    double span = 0.0;               ///< observation window length

    std::size_t size() const noexcept { return timestamps.size(); }
    void validate() const;
    friend bool operator==(const EventSeries&, const EventSeries&) = default;
};

/// Builds a valid series from unordered records: sorts by time and merges
/// events sharing a timestamp by summing their marks.
EventSeries make_event_series(std::string item_id, std::vector<std::pair<double, Count>> records,
                              double span);

/// Gaps measured from the window origin, paired with the marks.
IssueSequence to_sequence(const EventSeries& events);

/// Fits a continuous-time model (exponential interval family). Static needs
/// two events per series, RNN three.
ModelSpec fit_ct(const ModelSpec& spec_template, std::span<const EventSeries> dataset);
ModelSpec fit_ct(const ModelSpec& spec_template, const EventSeries& events);

/// Sum of log pdf of the gaps plus log pmf of the marks.
double log_likelihood_ct(const ModelSpec& model, const EventSeries& events);

/// Forward simulation over [0, horizon), with t = 0 placed `elapsed` time
/// units after the last observed event. Path p uses stream (seed, p).
std::vector<EventSeries> sample_events(const ModelSpec& model, const EventSeries& history, double elapsed,
                                       double horizon, std::size_t n_paths, std::uint64_t seed,
                                       Execution exec = Execution::parallel);

/// Period n receives the marks with timestamps in [n * period_length,
/// (n + 1) * period_length); ceil(span / period_length) periods in total.
DemandSeries aggregate_events(const EventSeries& events, double period_length);

}  // namespace renewcast
