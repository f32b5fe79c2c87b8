#include "sim/track.hpp"

#include "util/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adstest {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

double normalize_angle(double a) {
    a = std::fmod(a, kTau);
    if (a < 0) a += kTau;
    return a; // [0, 2*pi)
}

Pose advance(const Pose& start, const TrackSegment& seg, double s_local) {
    if (seg.kind == TrackSegment::Kind::straight) {
        return {start.x + s_local * std::cos(start.heading),
                start.y + s_local * std::sin(start.heading), start.heading};
    }
    double k = seg.curvature;
    double cx = start.x - std::sin(start.heading) / k;
    double cy = start.y + std::cos(start.heading) / k;
    double heading = start.heading + k * s_local;
    return {cx + std::sin(heading) / k, cy - std::cos(heading) / k, heading};
}

} // namespace

TrackModel::TrackModel(std::vector<TrackSegment> segments, double lane_width, int n_sectors)
    : segments_(std::move(segments)), lane_width_(lane_width), n_sectors_(n_sectors) {
    if (segments_.empty()) throw InvalidArgument("track: no segments");
    if (lane_width_ <= 0) throw InvalidArgument("track: lane_width must be > 0");
    if (n_sectors_ < 1) throw InvalidArgument("track: n_sectors must be >= 1");

    Pose cursor{0.0, 0.0, 0.0};
    for (const auto& seg : segments_) {
        if (seg.length <= 0) throw InvalidArgument("track: segment length must be > 0");
        if (seg.kind == TrackSegment::Kind::arc && seg.curvature == 0.0)
            throw InvalidArgument("track: arc segment needs nonzero curvature");
        seg_start_.push_back(cursor);
        seg_s_.push_back(total_length_);
        cursor = advance(cursor, seg, seg.length);
        total_length_ += seg.length;
    }

    double dx = cursor.x, dy = cursor.y;
    double dh = normalize_angle(cursor.heading);
    if (dh > kTau / 2) dh -= kTau;
    if (std::hypot(dx, dy) > 1e-6 || std::abs(dh) > 1e-6)
        throw InvalidArgument("track: segments do not close the loop");
}

TrackModel TrackModel::stadium(double straight_len, double radius, double lane_width, int n_sectors) {
    double k = 1.0 / radius;
    double half_turn = M_PI * radius;
    std::vector<TrackSegment> segs{
        {TrackSegment::Kind::straight, straight_len, 0.0},
        {TrackSegment::Kind::arc, half_turn, k},
        {TrackSegment::Kind::straight, straight_len, 0.0},
        {TrackSegment::Kind::arc, half_turn, k},
    };
    return TrackModel(std::move(segs), lane_width, n_sectors);
}

TrackModel TrackModel::from_toml(const Toml& track_table) {
    double lane_width = track_table.get_float("lane_width", 4.0);
    int n_sectors = static_cast<int>(track_table.get_int("n_sectors", 40));
    const Toml* segs = track_table.find("segment");
    if (!segs) {
        // Parametric shorthand used by the shipped scenarios.
        double straight = track_table.get_float("straight_length", 100.0);
        double radius = track_table.get_float("radius", 30.0);
        return stadium(straight, radius, lane_width, n_sectors);
    }
    std::vector<TrackSegment> list;
    for (const Toml& s : segs->as_array()) {
        TrackSegment seg;
        std::string kind = s.get_string("kind");
        if (kind == "straight") {
            seg.kind = TrackSegment::Kind::straight;
        } else if (kind == "arc") {
            seg.kind = TrackSegment::Kind::arc;
            seg.curvature = s.get_float("curvature");
        } else {
            throw ConfigError("track segment kind must be straight|arc, got '" + kind + "'");
        }
        seg.length = s.get_float("length");
        list.push_back(seg);
    }
    return TrackModel(std::move(list), lane_width, n_sectors);
}

double TrackModel::wrap_s(double s) const {
    s = std::fmod(s, total_length_);
    if (s < 0) s += total_length_;
    return s;
}

Pose TrackModel::pose_at(double s) const {
    s = wrap_s(s);
    std::size_t i = segments_.size() - 1;
    for (std::size_t j = 1; j < segments_.size(); ++j) {
        if (s < seg_s_[j]) {
            i = j - 1;
            break;
        }
    }
    return advance(seg_start_[i], segments_[i], s - seg_s_[i]);
}

int TrackModel::sector_of(double s) const {
    int sector = static_cast<int>(std::floor(n_sectors_ * wrap_s(s) / total_length_));
    return std::min(sector, n_sectors_ - 1);
}

std::optional<TrackModel::Projection> TrackModel::try_project(double x, double y) const {
    Projection best;
    best.distance = std::numeric_limits<double>::infinity();

    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const TrackSegment& seg = segments_[i];
        const Pose& p0 = seg_start_[i];
        double s_local, cte, dist;
        if (seg.kind == TrackSegment::Kind::straight) {
            double dxv = std::cos(p0.heading), dyv = std::sin(p0.heading);
            double t = (x - p0.x) * dxv + (y - p0.y) * dyv;
            s_local = std::clamp(t, 0.0, seg.length);
            double px = p0.x + s_local * dxv, py = p0.y + s_local * dyv;
            dist = std::hypot(x - px, y - py);
            cte = -(x - px) * dyv + (y - py) * dxv; // left normal = (-sin, cos)
        } else {
            double k = seg.curvature;
            double radius = 1.0 / std::abs(k);
            double cx = p0.x - std::sin(p0.heading) / k;
            double cy = p0.y + std::cos(p0.heading) / k;
            double vx = x - cx, vy = y - cy;
            double rho = std::hypot(vx, vy);
            if (rho < 1e-12) {
                // Arc center: equidistant; snap to the segment start.
                s_local = 0.0;
            } else {
                double phi = std::atan2(vy, vx);
                // Radial direction at arclength s is heading(s) -/+ pi/2 for
                // left/right turns; invert for s.
                double theta = k > 0 ? phi + M_PI / 2 : phi - M_PI / 2;
                double delta = normalize_angle(k > 0 ? theta - p0.heading : p0.heading - theta);
                s_local = std::clamp(delta / std::abs(k), 0.0, seg.length);
            }
            Pose on_arc = advance(p0, seg, s_local);
            dist = std::hypot(x - on_arc.x, y - on_arc.y);
            double side = (k > 0) ? radius - rho : rho - radius;
            // For clamped endpoints the radial formula is still the signed
            // lateral offset in the endpoint frame only approximately; use
            // the frame-exact value.
            cte = -(x - on_arc.x) * std::sin(on_arc.heading) + (y - on_arc.y) * std::cos(on_arc.heading);
            if (s_local > 0.0 && s_local < seg.length) cte = side;
        }
        if (dist < best.distance) {
            best.distance = dist;
            best.cte = cte;
            best.s = wrap_s(seg_s_[i] + s_local);
        }
    }

    if (best.distance > 10.0 * lane_width_) return std::nullopt;
    return best;
}

TrackModel::Projection TrackModel::project(double x, double y) const {
    auto p = try_project(x, y);
    if (!p)
        throw InvalidArgument("point (" + std::to_string(x) + ", " + std::to_string(y) +
                              ") too far from track");
    return *p;
}

} // namespace adstest
