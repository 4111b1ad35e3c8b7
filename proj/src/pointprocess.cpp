#include "renewcast/pointprocess.hpp"

#include <algorithm>
#include <cmath>

#include "model_internal.hpp"
#include "parallel.hpp"
#include "renewcast/errors.hpp"

namespace renewcast {

void EventSeries::validate() const {
    if (timestamps.size() != marks.size()) {
        throw ValidationError("events of '" + item_id + "': timestamp and mark counts differ");
    }
    if (!(span >= 0.0) || !std::isfinite(span)) {
        throw ValidationError("events of '" + item_id + "': span must be finite and >= 0");
    }
    for (std::size_t j = 0; j < timestamps.size(); ++j) {
        const double t = timestamps[j];
        if (!std::isfinite(t) || t < 0.0 || t >= span) {
            throw ValidationError("events of '" + item_id + "': timestamp " + std::to_string(t) +
                                  " outside [0, span)");
        }
        if (j > 0 && !(t > timestamps[j - 1])) {
            throw ValidationError("events of '" + item_id + "': timestamps not strictly increasing");
        }
        if (marks[j] < 1) throw ValidationError("events of '" + item_id + "': marks must be >= 1");
    }
}

EventSeries make_event_series(std::string item_id, std::vector<std::pair<double, Count>> records,
                              double span) {
    std::stable_sort(records.begin(), records.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    EventSeries out;
    out.item_id = std::move(item_id);
    out.span = span;
    for (const auto& [t, m] : records) {
        if (!out.timestamps.empty() && out.timestamps.back() == t) {
            out.marks.back() += m;
        } else {
            out.timestamps.push_back(t);
            out.marks.push_back(m);
        }
    }
    out.validate();
    return out;
}

IssueSequence to_sequence(const EventSeries& events) {
    IssueSequence seq;
    double last = 0.0;
    for (std::size_t j = 0; j < events.size(); ++j) {
        seq.intervals.push_back(events.timestamps[j] - last);
        seq.sizes.push_back(static_cast<double>(events.marks[j]));
        last = events.timestamps[j];
    }
    return seq;
}

ModelSpec fit_ct(const ModelSpec& spec_template, std::span<const EventSeries> dataset) {
    if (!spec_template.is_continuous()) throw ConfigError("fit_ct needs an exponential interval family");
    std::vector<IssueSequence> seqs;
    std::vector<std::string> names;
    for (const auto& e : dataset) {
        e.validate();
        seqs.push_back(to_sequence(e));
        names.push_back(e.item_id);
    }
    return detail::fit_sequences(spec_template, seqs, names);
}

ModelSpec fit_ct(const ModelSpec& spec_template, const EventSeries& events) {
    return fit_ct(spec_template, std::span<const EventSeries>(&events, 1));
}

double log_likelihood_ct(const ModelSpec& model, const EventSeries& events) {
    if (!model.is_continuous()) throw ModelError("log_likelihood_ct needs a continuous-time model");
    std::optional<double> gap;
    if (model.censor_tail) {
        gap = events.span - (events.timestamps.empty() ? 0.0 : events.timestamps.back());
    }
    return detail::sequence_log_likelihood(model, to_sequence(events), gap);
}

std::vector<EventSeries> sample_events(const ModelSpec& model, const EventSeries& history, double elapsed,
                                       double horizon, std::size_t n_paths, std::uint64_t seed,
                                       Execution exec) {
    if (!model.is_continuous()) throw ModelError("sample_events needs a continuous-time model");
    if (!model.fitted) throw ModelError("model " + model.name() + " is not fitted");
    if (!(elapsed >= 0.0) || !(horizon >= 0.0)) throw DomainError("elapsed and horizon must be >= 0");
    ModelState start(model);
    const IssueSequence seq = to_sequence(history);
    for (std::size_t i = 0; i < seq.size(); ++i) start.observe(seq.intervals[i], seq.sizes[i]);
    if (!start.ready()) throw ModelError(model.name() + " needs an observed event to forecast");

    std::vector<EventSeries> paths(n_paths);
    detail::parallel_for(n_paths, exec, [&](std::size_t p) {
        Rng rng = Rng::stream(seed, p);
        ModelState state = start;
        EventSeries& out = paths[p];
        out.item_id = history.item_id;
        out.span = horizon;
        // The exponential law is memoryless: the residual of the open gap is
        // a fresh draw, while the recurrent model sees the full gap.
        double since_last = elapsed;
        double t = 0.0;
        while (true) {
            const double draw = sample_continuous(state.interval_law(), rng);
            if (t + draw >= horizon) break;
            if (draw <= 0.0 && !out.timestamps.empty()) continue;
            const Count m = sample(state.size_law(), rng);
            t += draw;
            out.timestamps.push_back(t);
            out.marks.push_back(m);
            state.observe(since_last + draw, static_cast<double>(m));
            since_last = 0.0;
        }
    });
    return paths;
}

DemandSeries aggregate_events(const EventSeries& events, double period_length) {
    if (!(period_length > 0.0) || !std::isfinite(period_length)) {
        throw DomainError("period length must be > 0");
    }
    DemandSeries out;
    out.item_id = events.item_id;
    const auto n = static_cast<std::size_t>(std::ceil(events.span / period_length));
    out.values.assign(n, 0);
    for (std::size_t j = 0; j < events.size(); ++j) {
        auto idx = static_cast<std::size_t>(std::floor(events.timestamps[j] / period_length));
        if (idx >= n) {
            if (n == 0) out.values.assign(1, 0);
            idx = out.values.size() - 1;
        }
        out.values[idx] += events.marks[j];
    }
    return out;
}

}  // namespace renewcast
