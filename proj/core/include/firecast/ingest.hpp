#pragma once

#include <array>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace firecast {

// Geographic bounding box, degrees. lat in [-90, 90], lon in [-180, 180].
struct BBox {
    double lat_min = 24.0;
    double lat_max = 50.0;
    double lon_min = -125.0;
    double lon_max = -66.0;

    bool contains(double lat, double lon) const {
        return lat >= lat_min && lat <= lat_max && lon >= lon_min && lon <= lon_max;
    }
};

// One satellite fire detection.
struct FireEvent {
    double latitude = 0.0;
    double longitude = 0.0;
    int acq_day = 0;  // days since 1970-01-01
    double brightness = 0.0;  // Kelvin
    std::optional<double> confidence;
};

// All detections for one calendar day. Fire-free days are valid and appear
// with an empty event list.
struct DailyEvents {
    int day_index = 0;  // ordinal from dataset start
    int acq_day = 0;
    std::vector<FireEvent> events;
};

// Column-name mapping, configurable to tolerate schema variants.
struct CsvColumns {
    std::string latitude = "latitude";
    std::string longitude = "longitude";
    std::string date = "acq_date";
    std::string brightness = "brightness";
    std::string confidence = "confidence";  // optional; may be absent from the file
};

struct ParseStats {
    int64_t rows = 0;
    int64_t kept = 0;
    int64_t skipped_malformed = 0;
    int64_t dropped_out_of_region = 0;
    int64_t dropped_low_confidence = 0;
};

// Days since 1970-01-01 for a YYYY-MM-DD string; nullopt when malformed.
std::optional<int> parse_date_serial(const std::string& text);
std::string format_date_serial(int serial);

// Parse a FIRMS-style CSV into per-day event sets covering every calendar
// day between the first and last well-formed row, inclusive. Events outside
// `region` are dropped but their days remain in the covered range.
std::vector<DailyEvents> parse_events(std::istream& csv, const BBox& region,
                                      const CsvColumns& columns = {},
                                      std::optional<double> min_confidence = std::nullopt,
                                      ParseStats* stats = nullptr);

struct Segment {
    int start_day = 0;
    int length = 0;
};

struct SegmentIndex {
    std::string split;  // "train" | "val" | "test"
    int begin_day = 0;  // inclusive
    int end_day = 0;    // exclusive
    std::vector<Segment> segments;
};

struct SplitRatios {
    double train = 0.70;
    double val = 0.15;
    double test = 0.15;
};

// Chronological day-level split (train/val floored, remainder to test) with
// maximally overlapping stride-1 windows entirely inside each split.
std::array<SegmentIndex, 3> build_segment_index(int num_days,
                                                SplitRatios ratios = {},
                                                int segment_length = 28);

}  // namespace firecast
