#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace renewcast {

using Count = std::int64_t;

inline constexpr Count kDefaultDemandCap = 1'000'000'000;

/// Nonnegative integer demand per review period for one item.
struct DemandSeries {
    std::string item_id;
    std::int64_t start_period = 0;
    std::vector<Count> values;

    /// Throws ValidationError on an empty series, a negative value, or a
    /// value above `cap`.
    void validate(Count cap = kDefaultDemandCap) const;

    std::size_t size() const noexcept { return values.size(); }

    friend bool operator==(const DemandSeries&, const DemandSeries&) = default;
};

/// Issue-point form of a demand series: interdemand times Q_i, demand sizes
/// M_i and the run of zeros after the last issue point.
///
/// Invariants: intervals.size() == sizes.size(), every entry >= 1 and
/// sum(intervals) + tail_gap == origin_length.
struct SizeIntervalSeries {
    std::vector<Count> intervals;
    std::vector<Count> sizes;
    Count tail_gap = 0;
    Count origin_length = 0;

    void validate() const;

    std::size_t issue_points() const noexcept { return sizes.size(); }
    bool empty() const noexcept { return sizes.empty(); }

    friend bool operator==(const SizeIntervalSeries&, const SizeIntervalSeries&) = default;
};

/// Maps a demand series onto its issue points. An all-zero series yields
/// empty interval/size lists with tail_gap equal to the series length.
SizeIntervalSeries decompose(const DemandSeries& series);
SizeIntervalSeries decompose(std::span<const Count> values);

/// Exact inverse of decompose. Throws ValidationError if `si` is invalid.
DemandSeries recompose(const SizeIntervalSeries& si, std::string item_id = {},
                       std::int64_t start_period = 0);

/// First `length` periods of a series (training slice of a holdout split).
DemandSeries head(const DemandSeries& series, std::size_t length);
/// Last `length` periods of a series.
DemandSeries tail(const DemandSeries& series, std::size_t length);

}  // namespace renewcast
