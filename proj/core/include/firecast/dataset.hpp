#pragma once

#include <array>
#include <vector>

#include "firecast/errors.hpp"
#include "firecast/grid.hpp"
#include "firecast/ingest.hpp"

namespace firecast {

// Normalized day-indexed risk maps plus the chronological split indices.
// Each segment supplies one conditioning frame (its first day) and
// `horizons` forecast targets.
struct SegmentDataset {
    std::vector<GridF> frames;
    std::array<SegmentIndex, 3> splits;  // train, val, test
    int horizons = 27;
    int segment_length = 28;  // 1 + horizons
    double normalization_constant = 1.0;
    BBox bbox;

    int height() const { return frames.empty() ? 0 : frames.front().h; }
    int width() const { return frames.empty() ? 0 : frames.front().w; }
    int num_days() const { return static_cast<int>(frames.size()); }

    const SegmentIndex& train() const { return splits[0]; }
    const SegmentIndex& val() const { return splits[1]; }
    const SegmentIndex& test() const { return splits[2]; }

    const GridF& conditioning(const Segment& seg) const {
        return frames.at(static_cast<size_t>(seg.start_day));
    }
    // Target for horizon t in [0, horizons).
    const GridF& target(const Segment& seg, int t) const {
        return frames.at(static_cast<size_t>(seg.start_day) + 1 + static_cast<size_t>(t));
    }
    std::vector<GridF> targets(const Segment& seg) const {
        std::vector<GridF> out;
        out.reserve(static_cast<size_t>(horizons));
        for (int t = 0; t < horizons; ++t) out.push_back(target(seg, t));
        return out;
    }

    void validate() const {
        if (segment_length != horizons + 1) {
            throw DataError("dataset: segment_length must equal horizons + 1");
        }
        for (const auto& split : splits) {
            for (const auto& seg : split.segments) {
                if (seg.length != segment_length ||
                    seg.start_day + seg.length > num_days()) {
                    throw DataError("dataset: segment outside frame range");
                }
            }
        }
    }
};

}  // namespace firecast
