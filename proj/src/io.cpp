#include "renewcast/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "renewcast/errors.hpp"

namespace renewcast {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return value;
}

/// Integer demand, also accepting "3.0"-style integral reals.
std::optional<Count> parse_count(std::string_view s) {
    if (auto v = parse_number<Count>(s)) return v;
    auto d = parse_number<double>(s);
    if (d && std::isfinite(*d) && *d == std::floor(*d) && std::abs(*d) < 9e18) return static_cast<Count>(*d);
    return std::nullopt;
}

std::optional<double> parse_iso(std::string_view s) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0;
    double sec = 0.0;
    const std::string str(s);
    char sep = 0;
    const int got = std::sscanf(str.c_str(), "%d-%d-%d%c%d:%d:%lf", &y, &mo, &d, &sep, &h, &mi, &sec);
    if (got < 3 || (got > 3 && got < 6) || (got > 3 && sep != 'T' && sep != ' ')) return std::nullopt;
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    const auto days = sys_days{ymd}.time_since_epoch().count();
    return static_cast<double>(days) * 86400.0 + h * 3600.0 + mi * 60.0 + sec;
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    return in;
}

struct Lines {
    std::vector<std::pair<std::size_t, std::string>> rows;  ///< (line number, text)
};

Lines read_lines(std::istream& in) {
    Lines out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (trim(line).empty()) continue;
        out.rows.emplace_back(n, line);
    }
    if (out.rows.empty()) throw ValidationError("input is empty");
    return out;
}

double moment_cv2(double sum, double sum_sq, std::size_t n) {
    if (n < 2 || sum == 0.0) return 0.0;
    const double m = sum / static_cast<double>(n);
    const double var = (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
    return std::max(var, 0.0) / (m * m);
}

}  // namespace

std::string format_diagnostics(const std::vector<Diagnostic>& diags, std::size_t limit) {
    std::ostringstream os;
    for (std::size_t i = 0; i < diags.size() && i < limit; ++i) {
        if (diags[i].line) os << "line " << diags[i].line << ": ";
        os << diags[i].message << "\n";
    }
    if (diags.size() > limit) os << "... and " << diags.size() - limit << " more\n";
    return os.str();
}

void DemandDataset::require_clean() const {
    if (!diagnostics.empty()) throw ValidationError("invalid demand data:\n" + format_diagnostics(diagnostics));
}

void EventDataset::require_clean() const {
    if (!diagnostics.empty()) throw ValidationError("invalid event data:\n" + format_diagnostics(diagnostics));
}

DemandDataset read_demand_csv(std::istream& in, PeriodLayout layout, Count cap) {
    const Lines lines = read_lines(in);
    DemandDataset out;
    std::vector<std::string> order;
    std::map<std::string, std::map<std::int64_t, Count>> cells;
    std::map<std::string, bool> bad;

    for (std::size_t r = 0; r < lines.rows.size(); ++r) {
        const auto& [lineno, text] = lines.rows[r];
        const auto f = split(text);
        const bool first = r == 0;
        auto reject = [&](const std::string& item, const std::string& msg) {
            out.diagnostics.push_back({lineno, msg});
            if (!item.empty()) bad[item] = true;
        };
        if (layout == PeriodLayout::long_format) {
            if (f.size() != 3) {
                if (!first) reject("", "expected 3 fields (item_id,period_index,demand), got " + std::to_string(f.size()));
                continue;
            }
            const auto period = parse_number<std::int64_t>(f[1]);
            const auto demand = parse_count(f[2]);
            if (first && !period && !parse_number<double>(f[2])) continue;  // header
            const std::string item(f[0]);
            if (item.empty()) {
                reject("", "empty item_id");
                continue;
            }
            if (!cells.count(item)) order.push_back(item);
            auto& row = cells[item];
            if (!period) {
                reject(item, "period_index '" + std::string(f[1]) + "' is not an integer");
            } else if (!demand) {
                reject(item, "demand '" + std::string(f[2]) + "' is not an integer");
            } else if (*demand < 0) {
                reject(item, "negative demand " + std::to_string(*demand) + " for item '" + item + "'");
            } else if (*demand > cap) {
                reject(item, "demand " + std::to_string(*demand) + " exceeds the cap " + std::to_string(cap));
            } else if (!row.emplace(*period, *demand).second) {
                reject(item, "duplicate period " + std::to_string(*period) + " for item '" + item + "'");
            }
        } else {
            if (f.size() < 2) {
                if (!first) reject("", "expected item_id followed by demand values");
                continue;
            }
            if (first && !parse_count(f[1])) continue;  // header
            const std::string item(f[0]);
            if (cells.count(item)) {
                reject(item, "item '" + item + "' appears on more than one row");
                continue;
            }
            order.push_back(item);
            auto& row = cells[item];
            for (std::size_t c = 1; c < f.size(); ++c) {
                const auto v = parse_count(f[c]);
                if (!v || *v < 0 || *v > cap) {
                    reject(item, "column " + std::to_string(c + 1) + ": invalid demand '" + std::string(f[c]) + "'");
                    break;
                }
                row.emplace(static_cast<std::int64_t>(c - 1), *v);
            }
        }
    }

    for (const auto& item : order) {
        if (bad[item]) continue;
        const auto& row = cells[item];
        if (row.empty()) continue;
        DemandSeries s;
        s.item_id = item;
        s.start_period = row.begin()->first;
        s.values.assign(static_cast<std::size_t>(row.rbegin()->first - s.start_period + 1), 0);
        for (const auto& [p, v] : row) s.values[static_cast<std::size_t>(p - s.start_period)] = v;
        out.series.push_back(std::move(s));
    }
    if (out.series.empty() && out.diagnostics.empty()) throw ValidationError("input has no data rows");
    return out;
}

DemandDataset read_demand_csv(const std::string& path, PeriodLayout layout, Count cap) {
    auto in = open_or_throw(path);
    return read_demand_csv(in, layout, cap);
}

void write_demand_csv(std::ostream& out, const std::vector<DemandSeries>& series) {
    out << "item_id,period_index,demand\n";
    for (const auto& s : series) {
        for (std::size_t t = 0; t < s.values.size(); ++t) {
            out << s.item_id << ',' << s.start_period + static_cast<std::int64_t>(t) << ',' << s.values[t] << '\n';
        }
    }
}

void write_demand_csv(const std::string& path, const std::vector<DemandSeries>& series) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    write_demand_csv(out, series);
}

EventDataset read_events_csv(std::istream& in, const EventTimeOptions& options) {
    const Lines lines = read_lines(in);
    EventDataset out;
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::pair<double, Count>>> records;
    std::map<std::string, bool> bad;
    std::vector<std::tuple<std::size_t, std::string, double, Count, bool>> parsed;  // line, item, t, q, iso

    for (std::size_t r = 0; r < lines.rows.size(); ++r) {
        const auto& [lineno, text] = lines.rows[r];
        const auto f = split(text);
        if (f.size() != 3) {
            if (r > 0) out.diagnostics.push_back({lineno, "expected 3 fields (item_id,timestamp,quantity)"});
            continue;
        }
        const auto real_t = parse_number<double>(f[1]);
        const auto iso_t = real_t ? std::nullopt : parse_iso(f[1]);
        const auto q = parse_count(f[2]);
        if (r == 0 && !real_t && !iso_t && !q) continue;  // header
        const std::string item(f[0]);
        if (!records.count(item)) order.push_back(item);
        records[item];
        if (!real_t && !iso_t) {
            out.diagnostics.push_back({lineno, "timestamp '" + std::string(f[1]) + "' is neither a number nor ISO-8601"});
            bad[item] = true;
        } else if (!q || *q < 1) {
            out.diagnostics.push_back({lineno, "quantity '" + std::string(f[2]) + "' must be an integer >= 1"});
            bad[item] = true;
        } else {
            parsed.emplace_back(lineno, item, real_t ? *real_t : *iso_t, *q, !real_t);
        }
    }

    std::optional<double> origin;
    if (!options.origin.empty()) {
        origin = parse_iso(options.origin);
        if (!origin) throw ConfigError("event origin '" + options.origin + "' is not ISO-8601");
    } else {
        for (const auto& p : parsed) {
            if (std::get<4>(p)) origin = origin ? std::min(*origin, std::get<2>(p)) : std::get<2>(p);
        }
    }
    if (!(options.period_seconds > 0.0)) throw ConfigError("period_seconds must be > 0");

    double max_t = 0.0;
    for (const auto& [lineno, item, t, q, iso] : parsed) {
        const double v = iso ? (t - *origin) / options.period_seconds : t;
        if (!(v >= 0.0) || !std::isfinite(v)) {
            out.diagnostics.push_back({lineno, "timestamp before the window origin"});
            bad[item] = true;
            continue;
        }
        records[item].emplace_back(v, q);
        max_t = std::max(max_t, v);
    }
    const double span = options.span ? *options.span : std::floor(max_t) + 1.0;
    for (const auto& item : order) {
        if (bad[item]) continue;
        try {
            out.series.push_back(make_event_series(item, records[item], span));
        } catch (const ValidationError& e) {
            out.diagnostics.push_back({0, e.what()});
        }
    }
    return out;
}

EventDataset read_events_csv(const std::string& path, const EventTimeOptions& options) {
    auto in = open_or_throw(path);
    return read_events_csv(in, options);
}

void write_events_csv(std::ostream& out, const std::vector<EventSeries>& series) {
    out << "item_id,timestamp,quantity\n";
    char buf[64];
    for (const auto& s : series) {
        for (std::size_t j = 0; j < s.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", s.timestamps[j]);
            out << s.item_id << ',' << buf << ',' << s.marks[j] << '\n';
        }
    }
}

DatasetSummary summarize(const std::vector<DemandSeries>& dataset, const SbcThresholds& thresholds) {
    if (dataset.empty()) throw ValidationError("cannot summarize an empty dataset");
    DatasetSummary s;
    s.items = dataset.size();
    s.min_length = dataset.front().size();
    for (auto c : {SbcClass::smooth, SbcClass::erratic, SbcClass::intermittent, SbcClass::lumpy}) {
        s.sbc_counts[to_string(c)] = 0;
    }
    double m_sum = 0, m_sq = 0, q_sum = 0, q_sq = 0;
    for (const auto& series : dataset) {
        s.min_length = std::min(s.min_length, series.size());
        s.max_length = std::max(s.max_length, series.size());
        const SizeIntervalSeries si = decompose(series);
        if (si.empty()) {
            ++s.zero_items;
            continue;
        }
        for (std::size_t i = 0; i < si.sizes.size(); ++i) {
            const auto m = static_cast<double>(si.sizes[i]);
            const auto q = static_cast<double>(si.intervals[i]);
            m_sum += m;
            m_sq += m * m;
            q_sum += q;
            q_sq += q * q;
        }
        s.issue_points += si.sizes.size();
        ++s.sbc_counts[to_string(sbc_classify(series, thresholds))];
    }
    if (s.issue_points > 0) {
        const auto n = static_cast<double>(s.issue_points);
        s.mean_size = m_sum / n;
        s.mean_interval = q_sum / n;
        s.size_cv2 = moment_cv2(m_sum, m_sq, s.issue_points);
        s.interval_cv2 = moment_cv2(q_sum, q_sq, s.issue_points);
    }
    s.mean_issue_points = static_cast<double>(s.issue_points) / static_cast<double>(s.items);
    return s;
}

}  // namespace renewcast
