#include "firecast/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <map>
#include <sstream>

#include "firecast/errors.hpp"
#include "firecast/log.hpp"

namespace firecast {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::optional<double> parse_double(const std::string& s) {
    double value = 0.0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return value;
}

int find_column(const std::vector<std::string>& header, const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

}  // namespace

std::optional<int> parse_date_serial(const std::string& text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    auto num = [&](size_t pos, size_t len, int& out) {
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
        return ec == std::errc() && ptr == text.data() + pos + len;
    };
    if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return std::nullopt;
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return static_cast<int>(sys_days{ymd}.time_since_epoch().count());
}

std::string format_date_serial(int serial) {
    using namespace std::chrono;
    const year_month_day ymd{sys_days{days{serial}}};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::vector<DailyEvents> parse_events(std::istream& csv, const BBox& region,
                                      const CsvColumns& columns,
                                      std::optional<double> min_confidence,
                                      ParseStats* stats) {
    std::string line;
    if (!std::getline(csv, line)) throw DataError("parse_events: empty CSV input");
    const std::vector<std::string> header = split_csv_line(line);

    const int col_lat = find_column(header, columns.latitude);
    const int col_lon = find_column(header, columns.longitude);
    const int col_date = find_column(header, columns.date);
    const int col_bright = find_column(header, columns.brightness);
    const int col_conf = find_column(header, columns.confidence);
    const std::array<std::pair<int, std::string>, 4> required = {
        std::pair{col_lat, columns.latitude}, {col_lon, columns.longitude},
        {col_date, columns.date}, {col_bright, columns.brightness}};
    for (const auto& [col, name] : required) {
        if (col < 0) {
            throw DataError("parse_events: missing required column '" + name + "'");
        }
    }
    const int max_col = std::max({col_lat, col_lon, col_date, col_bright, col_conf});

    ParseStats local;
    ParseStats& st = stats ? *stats : local;
    std::map<int, std::vector<FireEvent>> by_day;

    int64_t line_no = 1;
    while (std::getline(csv, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        ++st.rows;
        const std::vector<std::string> fields = split_csv_line(line);
        auto drop = [&](const char* why) {
            ++st.skipped_malformed;
            log::warn("parse_events: line " + std::to_string(line_no) + " skipped (" +
                      why + ")");
        };
        if (static_cast<int>(fields.size()) <= max_col) {
            drop("too few fields");
            continue;
        }
        const auto lat = parse_double(fields[static_cast<size_t>(col_lat)]);
        const auto lon = parse_double(fields[static_cast<size_t>(col_lon)]);
        const auto date = parse_date_serial(fields[static_cast<size_t>(col_date)]);
        const auto bright = parse_double(fields[static_cast<size_t>(col_bright)]);
        if (!lat || !lon || !date || !bright) {
            drop("unparseable field");
            continue;
        }
        if (*lat < -90.0 || *lat > 90.0 || *lon < -180.0 || *lon > 180.0 ||
            *bright <= 0.0) {
            drop("value out of physical range");
            continue;
        }
        FireEvent ev;
        ev.latitude = *lat;
        ev.longitude = *lon;
        ev.acq_day = *date;
        ev.brightness = *bright;
        if (col_conf >= 0) {
            ev.confidence = parse_double(fields[static_cast<size_t>(col_conf)]);
        }
        // Days stay in the covered range even when all their events fall
        // outside the region or below the confidence threshold.
        auto& bucket = by_day[ev.acq_day];
        if (!region.contains(ev.latitude, ev.longitude)) {
            ++st.dropped_out_of_region;
            continue;
        }
        if (min_confidence && ev.confidence && *ev.confidence < *min_confidence) {
            ++st.dropped_low_confidence;
            continue;
        }
        bucket.push_back(ev);
        ++st.kept;
    }
    if (by_day.empty()) {
        throw DataError("parse_events: no well-formed rows in CSV");
    }

    const int first_day = by_day.begin()->first;
    const int last_day = by_day.rbegin()->first;
    std::vector<DailyEvents> days;
    days.reserve(static_cast<size_t>(last_day - first_day + 1));
    for (int d = first_day; d <= last_day; ++d) {
        DailyEvents de;
        de.day_index = d - first_day;
        de.acq_day = d;
        if (auto it = by_day.find(d); it != by_day.end()) de.events = std::move(it->second);
        days.push_back(std::move(de));
    }
    return days;
}

std::array<SegmentIndex, 3> build_segment_index(int num_days, SplitRatios ratios,
                                                int segment_length) {
    if (segment_length < 2) {
        throw DataError("build_segment_index: segment_length must be >= 2");
    }
    if (num_days < segment_length) {
        throw DataError("build_segment_index: num_days=" + std::to_string(num_days) +
                        " cannot hold a single " + std::to_string(segment_length) +
                        "-day segment");
    }
    const int train_days = static_cast<int>(num_days * ratios.train);
    const int val_days = static_cast<int>(num_days * ratios.val);
    const int boundary1 = train_days;
    const int boundary2 = train_days + val_days;

    std::array<SegmentIndex, 3> splits;
    const std::array<std::string, 3> names = {"train", "val", "test"};
    const std::array<std::pair<int, int>, 3> ranges = {
        std::pair{0, boundary1}, {boundary1, boundary2}, {boundary2, num_days}};
    for (size_t i = 0; i < 3; ++i) {
        splits[i].split = names[i];
        splits[i].begin_day = ranges[i].first;
        splits[i].end_day = ranges[i].second;
        for (int s = ranges[i].first; s + segment_length <= ranges[i].second; ++s) {
            splits[i].segments.push_back({s, segment_length});
        }
        if (splits[i].segments.empty()) {
            log::warn("build_segment_index: split '" + names[i] + "' covering days [" +
                      std::to_string(ranges[i].first) + ", " +
                      std::to_string(ranges[i].second) + ") holds no full segment");
        }
    }
    return splits;
}

}  // namespace firecast
