#pragma once

#include "util/toml.hpp"

#include <optional>
#include <vector>

namespace adstest {

struct Pose {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
};

struct TrackSegment {
    enum class Kind { straight, arc };
    Kind kind = Kind::straight;
    double length = 0.0;    // m, > 0
    double curvature = 0.0; // 1/m, signed, left positive; 0 for straights
};

// Closed centerline assembled from straights and arcs. Segment joins are
// tangent-continuous by construction; the constructor verifies closure.
class TrackModel {
public:
    TrackModel(std::vector<TrackSegment> segments, double lane_width, int n_sectors);

    static TrackModel stadium(double straight_len = 100.0, double radius = 30.0,
                              double lane_width = 4.0, int n_sectors = 40);
    static TrackModel from_toml(const Toml& track_table);

    double total_length() const { return total_length_; }
    double lane_width() const { return lane_width_; }
    int n_sectors() const { return n_sectors_; }
    const std::vector<TrackSegment>& segments() const { return segments_; }

    double wrap_s(double s) const;
    Pose pose_at(double s) const;
    int sector_of(double s) const;

    struct Projection {
        double s = 0.0;        // arclength of nearest centerline point
        double cte = 0.0;      // signed lateral offset, left of travel positive
        double distance = 0.0; // euclidean distance to that point
    };

    // Nearest-point projection; empty when farther than 10 lane widths.
    std::optional<Projection> try_project(double x, double y) const;
    // Throwing variant for callers that require proximity.
    Projection project(double x, double y) const;

private:
    std::vector<TrackSegment> segments_;
    std::vector<Pose> seg_start_;  // pose at the start of each segment
    std::vector<double> seg_s_;    // arclength at the start of each segment
    double lane_width_;
    int n_sectors_;
    double total_length_ = 0.0;
};

} // namespace adstest
