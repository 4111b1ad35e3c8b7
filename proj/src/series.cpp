#include "renewcast/series.hpp"

#include <numeric>

#include "renewcast/errors.hpp"

namespace renewcast {

void DemandSeries::validate(Count cap) const {
    if (values.empty()) {
        throw ValidationError("series '" + item_id + "' is empty");
    }
    for (std::size_t n = 0; n < values.size(); ++n) {
        if (values[n] < 0) {
            throw ValidationError("series '" + item_id + "' has negative demand at period " +
                                  std::to_string(start_period + static_cast<std::int64_t>(n)));
        }
        if (values[n] > cap) {
            throw ValidationError("series '" + item_id + "' exceeds demand cap at period " +
                                  std::to_string(start_period + static_cast<std::int64_t>(n)));
        }
    }
}

void SizeIntervalSeries::validate() const {
    if (intervals.size() != sizes.size()) {
        throw ValidationError("interval and size lists differ in length");
    }
    for (Count q : intervals) {
        if (q < 1) throw ValidationError("interdemand time below 1");
    }
    for (Count m : sizes) {
        if (m < 1) throw ValidationError("demand size below 1");
    }
    if (tail_gap < 0) throw ValidationError("negative tail gap");
    const Count covered = std::accumulate(intervals.begin(), intervals.end(), Count{0});
    if (covered + tail_gap != origin_length) {
        throw ValidationError("intervals plus tail gap do not cover the origin length");
    }
}

SizeIntervalSeries decompose(std::span<const Count> values) {
    SizeIntervalSeries si;
    si.origin_length = static_cast<Count>(values.size());
    Count last_issue = 0;  // sigma(0) = 0, periods are 1-based here
    for (std::size_t n = 0; n < values.size(); ++n) {
        if (values[n] > 0) {
            const Count period = static_cast<Count>(n) + 1;
            si.intervals.push_back(period - last_issue);
            si.sizes.push_back(values[n]);
            last_issue = period;
        }
    }
    si.tail_gap = si.origin_length - last_issue;
    return si;
}

SizeIntervalSeries decompose(const DemandSeries& series) {
    return decompose(std::span<const Count>(series.values));
}

DemandSeries recompose(const SizeIntervalSeries& si, std::string item_id,
                       std::int64_t start_period) {
    si.validate();
    DemandSeries out;
    out.item_id = std::move(item_id);
    out.start_period = start_period;
    out.values.assign(static_cast<std::size_t>(si.origin_length), 0);
    Count position = 0;
    for (std::size_t i = 0; i < si.sizes.size(); ++i) {
        position += si.intervals[i];
        out.values[static_cast<std::size_t>(position - 1)] = si.sizes[i];
    }
    return out;
}

DemandSeries head(const DemandSeries& series, std::size_t length) {
    if (length > series.size()) throw ValidationError("head longer than series");
    DemandSeries out{series.item_id, series.start_period, {}};
    out.values.assign(series.values.begin(),
                      series.values.begin() + static_cast<std::ptrdiff_t>(length));
    return out;
}

DemandSeries tail(const DemandSeries& series, std::size_t length) {
    if (length > series.size()) throw ValidationError("tail longer than series");
    const std::size_t offset = series.size() - length;
    DemandSeries out{series.item_id,
                     series.start_period + static_cast<std::int64_t>(offset), {}};
    out.values.assign(series.values.begin() + static_cast<std::ptrdiff_t>(offset),
                      series.values.end());
    return out;
}

}  // namespace renewcast
