#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "renewcast/metrics.hpp"
#include "renewcast/pointprocess.hpp"
#include "renewcast/series.hpp"

namespace renewcast {

struct Diagnostic {
    std::size_t line = 0;  ///< 1-based; 0 when the problem concerns a whole item
    std::string message;
};

std::string format_diagnostics(const std::vector<Diagnostic>& diags, std::size_t limit = 20);

enum class PeriodLayout {
    long_format,  ///< item_id,period_index,demand
    wide,         ///< item_id,v0,v1,... (read-only)
};

struct DemandDataset {
    std::vector<DemandSeries> series;
    /// Rows or items that were rejected; their items are left out of `series`.
    std::vector<Diagnostic> diagnostics;

    /// Throws ValidationError listing the diagnostics, if any.
    void require_clean() const;
};

/// Reads period demand. A first line whose numeric fields do not parse is
/// taken as a header. In long format, missing periods between an item's
/// first and last index are zero; duplicates are rejected. Items appear in
/// order of first occurrence. Throws ValidationError on an empty input.
DemandDataset read_demand_csv(std::istream& in, PeriodLayout layout = PeriodLayout::long_format,
                              Count cap = kDefaultDemandCap);
DemandDataset read_demand_csv(const std::string& path, PeriodLayout layout = PeriodLayout::long_format,
                              Count cap = kDefaultDemandCap);

/// Long format with a header row.
void write_demand_csv(std::ostream& out, const std::vector<DemandSeries>& series);
void write_demand_csv(const std::string& path, const std::vector<DemandSeries>& series);

struct EventTimeOptions {
    /// Origin for ISO-8601 timestamps ("YYYY-MM-DD[ T]HH:MM[:SS]"); when
    /// empty the earliest timestamp of the file is used.
    std::string origin;
    /// Seconds per review period for ISO timestamps.
    double period_seconds = 3600.0;
    /// Observation window; by default the smallest whole number of periods
    /// covering every event.
    std::optional<double> span;
};

struct EventDataset {
    std::vector<EventSeries> series;
    std::vector<Diagnostic> diagnostics;

    void require_clean() const;
};

/// Reads item_id,timestamp,quantity rows; timestamps are reals in periods or
/// ISO datetimes. Same-time events of an item are merged.
EventDataset read_events_csv(std::istream& in, const EventTimeOptions& options = {});
EventDataset read_events_csv(const std::string& path, const EventTimeOptions& options = {});

void write_events_csv(std::ostream& out, const std::vector<EventSeries>& series);

/// Dataset statistics; size and interval moments pool every issue point of
/// every item.
struct DatasetSummary {
    std::size_t items = 0;
    std::size_t zero_items = 0;  ///< items without any issue point
    std::size_t min_length = 0;
    std::size_t max_length = 0;
    double mean_size = 0.0;
    double size_cv2 = 0.0;
    double mean_interval = 0.0;
    double interval_cv2 = 0.0;
    std::size_t issue_points = 0;
    double mean_issue_points = 0.0;  ///< per item, zero items included
    std::map<std::string, std::size_t> sbc_counts;
};

/// Throws ValidationError on an empty dataset.
DatasetSummary summarize(const std::vector<DemandSeries>& dataset, const SbcThresholds& thresholds = {});

}  // namespace renewcast
