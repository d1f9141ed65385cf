#include <doctest.h>

#include <set>
#include <sstream>

#include "firecast/errors.hpp"
#include "firecast/ingest.hpp"

using namespace firecast;

namespace {

const BBox kWide{-90, 90, -180, 180};

std::vector<DailyEvents> parse(const std::string& csv, const BBox& region = kWide,
                               const CsvColumns& cols = {},
                               std::optional<double> min_conf = std::nullopt,
                               ParseStats* stats = nullptr) {
    std::istringstream in(csv);
    return parse_events(in, region, cols, min_conf, stats);
}

}  // namespace

TEST_CASE("date serials") {
    CHECK(parse_date_serial("1970-01-01") == 0);
    CHECK(parse_date_serial("2015-04-30") == 16555);
    CHECK(format_date_serial(16555) == "2015-04-30");
    CHECK_FALSE(parse_date_serial("2015-13-01").has_value());
    CHECK_FALSE(parse_date_serial("2015-02-30").has_value());
    CHECK_FALSE(parse_date_serial("garbage").has_value());
    CHECK_FALSE(parse_date_serial("2015/04/30").has_value());
}

TEST_CASE("parse_events: single row identity") {
    const auto days =
        parse("latitude,longitude,acq_date,brightness\n39.0,-120.5,2015-04-30,330.1\n");
    REQUIRE(days.size() == 1);
    CHECK(days[0].day_index == 0);
    REQUIRE(days[0].events.size() == 1);
    CHECK(days[0].events[0].latitude == doctest::Approx(39.0));
    CHECK(days[0].events[0].longitude == doctest::Approx(-120.5));
    CHECK(days[0].events[0].brightness == doctest::Approx(330.1));
    CHECK_FALSE(days[0].events[0].confidence.has_value());
}

TEST_CASE("parse_events: out-of-region row keeps the day but drops the event") {
    const BBox alaska{55, 72, -170, -130};
    ParseStats stats;
    const auto days =
        parse("latitude,longitude,acq_date,brightness\n39.0,-120.5,2015-04-30,330.1\n",
              alaska, {}, std::nullopt, &stats);
    REQUIRE(days.size() == 1);
    CHECK(days[0].events.empty());
    CHECK(stats.dropped_out_of_region == 1);
}

TEST_CASE("parse_events: gap days are filled with empty sets") {
    const auto days = parse(
        "latitude,longitude,acq_date,brightness\n"
        "39.0,-120.5,2015-04-30,330.1\n"
        "40.0,-121.0,2015-05-02,310.0\n"
        "41.0,-122.0,2015-05-02,305.0\n");
    REQUIRE(days.size() == 3);
    CHECK(days[0].events.size() == 1);
    CHECK(days[1].events.empty());
    CHECK(days[2].events.size() == 2);
    CHECK(days[1].day_index == 1);
}

TEST_CASE("parse_events: malformed rows are skipped and counted") {
    ParseStats stats;
    const auto days = parse(
        "latitude,longitude,acq_date,brightness\n"
        "39.0,-120.5,2015-04-30,330.1\n"
        "oops,-120.5,2015-04-30,330.1\n"
        "39.0,-120.5,not-a-date,330.1\n"
        "39.0,-120.5,2015-04-30\n"
        "39.0,-120.5,2015-04-30,-5.0\n"
        "99.0,-120.5,2015-04-30,330.1\n",
        kWide, {}, std::nullopt, &stats);
    CHECK(days.size() == 1);
    CHECK(days[0].events.size() == 1);
    CHECK(stats.skipped_malformed == 5);
    CHECK(stats.kept == 1);
}

TEST_CASE("parse_events: hard errors") {
    std::istringstream empty("");
    CHECK_THROWS_AS(parse_events(empty, kWide), DataError);

    try {
        parse("lat,long,date,bright\n1,2,2015-01-01,300\n");
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("latitude") != std::string::npos);
    }

    // Header only, no data rows.
    CHECK_THROWS_AS(parse("latitude,longitude,acq_date,brightness\n"), DataError);
}

TEST_CASE("parse_events: configurable column names and confidence filter") {
    CsvColumns cols;
    cols.latitude = "LAT";
    cols.longitude = "LON";
    cols.date = "DATE";
    cols.brightness = "BT";
    cols.confidence = "conf";
    ParseStats stats;
    const auto days = parse(
        "LAT,LON,DATE,BT,conf\n"
        "10,-20,2020-01-01,300,80\n"
        "11,-21,2020-01-01,300,20\n",
        kWide, cols, 50.0, &stats);
    REQUIRE(days.size() == 1);
    CHECK(days[0].events.size() == 1);
    CHECK(stats.dropped_low_confidence == 1);
    CHECK(days[0].events[0].confidence == doctest::Approx(80.0));
}

TEST_CASE("build_segment_index: 3653-day chronological split") {
    const auto splits = build_segment_index(3653);
    CHECK(splits[0].begin_day == 0);
    CHECK(splits[0].end_day == 2557);
    CHECK(splits[1].begin_day == 2557);
    CHECK(splits[1].end_day == 3104);
    CHECK(splits[2].begin_day == 3104);
    CHECK(splits[2].end_day == 3653);
    CHECK(splits[0].segments.size() == 2557 - 28 + 1);
    CHECK(splits[0].segments.size() == 2530);

    // Oracle: enumerate every window and assert none crosses a boundary.
    for (const auto& split : splits) {
        for (const auto& seg : split.segments) {
            CHECK(seg.length == 28);
            CHECK(seg.start_day >= split.begin_day);
            CHECK(seg.start_day + seg.length <= split.end_day);
        }
    }
}

TEST_CASE("build_segment_index: boundary-exact and degenerate splits") {
    const SplitRatios thirds{1.0 / 3, 1.0 / 3, 1.0 / 3};
    const auto exact = build_segment_index(84, thirds, 28);
    for (const auto& split : exact) CHECK(split.segments.size() == 1);

    const auto degenerate = build_segment_index(83, thirds, 28);
    int empty_splits = 0;
    for (const auto& split : degenerate) {
        if (split.segments.empty()) ++empty_splits;
    }
    CHECK(empty_splits >= 1);

    CHECK_THROWS_AS(build_segment_index(20, thirds, 28), DataError);
}

TEST_CASE("build_segment_index: partition and leakage properties") {
    for (int num_days : {84, 100, 365, 3653}) {
        const auto splits = build_segment_index(num_days);
        std::set<int> seen;
        int total = 0;
        for (const auto& split : splits) {
            for (int d = split.begin_day; d < split.end_day; ++d) {
                CHECK(seen.insert(d).second);  // no duplicates across splits
                ++total;
            }
        }
        CHECK(total == num_days);
        CHECK(*seen.begin() == 0);
        CHECK(*seen.rbegin() == num_days - 1);

        // Segment windows from different splits never share a day.
        for (size_t a = 0; a < 3; ++a) {
            for (size_t b = a + 1; b < 3; ++b) {
                for (const auto& sa : splits[a].segments) {
                    for (const auto& sb : splits[b].segments) {
                        const bool disjoint = sa.start_day + sa.length <= sb.start_day ||
                                              sb.start_day + sb.length <= sa.start_day;
                        CHECK(disjoint);
                    }
                }
            }
        }
    }
}

TEST_CASE("build_segment_index: deterministic") {
    const auto a = build_segment_index(365);
    const auto b = build_segment_index(365);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(a[i].begin_day == b[i].begin_day);
        CHECK(a[i].end_day == b[i].end_day);
        REQUIRE(a[i].segments.size() == b[i].segments.size());
        for (size_t s = 0; s < a[i].segments.size(); ++s) {
            CHECK(a[i].segments[s].start_day == b[i].segments[s].start_day);
        }
    }
}
