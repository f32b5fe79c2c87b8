#pragma once

#include "core/image.hpp"
#include "sim/track.hpp"
#include "util/toml.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace adstest {

struct VehicleState {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;  // rad
    double speed = 0.0;    // m/s
    double steering = 0.0; // rad
    double s = 0.0;        // arclength along centerline
    double cte = 0.0;      // signed lateral offset, left positive
};

struct ControlCommand {
    double steering_target = 0.0; // rad
    double throttle = 0.0;        // [0, 1]
};

struct SceneObject {
    enum class Kind { obstacle, signal_zone, stop_zone };
    Kind kind = Kind::obstacle;
    double s_start = 0.0;
    double s_end = 0.0;
    double lateral = 0.0;              // obstacle center offset from centerline
    std::uint8_t object_class = 3;     // cls::vehicle or cls::pedestrian, obstacles only
    long red_from_step = 0;            // signal zones only
    long red_to_step = 0;
};

enum class EventKind {
    oob,
    collision,
    collision_pedestrian,
    collision_vehicle,
    red_light,
    stop_sign,
    off_road_urban,
};

const char* event_kind_name(EventKind k);
EventKind event_kind_from_name(const std::string& name);

struct MisbehaviorEvent {
    EventKind kind = EventKind::oob;
    long step = 0;
    int sector = 0;
    double s = 0.0;
};

struct Frame {
    std::uint64_t id = 0;
    VehicleState state;
    std::vector<Image> views;
    std::vector<SemanticMask> masks;

    const Image& front() const { return views.at(0); }
    const SemanticMask& front_mask() const { return masks.at(0); }
};

struct SimParams {
    double dt = 0.1;             // s, fixed by convention
    double wheelbase = 2.5;      // m
    double steering_limit = 0.5; // rad
    double steering_slew = 2.0;  // rad/s
    double v_max = 10.0;         // m/s at throttle 1
    double speed_tau = 1.5;      // s, first-order speed response
    double vehicle_radius = 0.8; // m, collision disc
    double obstacle_half_width = 0.6;
    int cooldown_steps = 20;
    double reset_advance = 2.0;  // m past the event
    double stop_speed = 0.05;    // m/s, satisfies a stop zone
};

struct RenderParams {
    int width = 320;
    int height = 160;
    int views = 1;
    double d_near = 2.0;        // m ahead at the bottom row
    double d_far = 26.0;        // m ahead at the top row
    double view_half_width = 8.0;
    double side_view_yaw = 0.8; // rad, left/right camera rotation (urban)

    static RenderParams nominal() { return {}; }
    static RenderParams urban() {
        RenderParams p;
        p.width = 800;
        p.height = 600;
        p.views = 3;
        return p;
    }
};

// Kinematic bicycle update against a track; pure aside from the passed state.
VehicleState bicycle_step(const TrackModel& track, const SimParams& params, const VehicleState& state,
                          const ControlCommand& cmd, double dt);

// Deterministic closed-loop world: one vehicle, a closed track, static scene
// objects, top-down scanline camera with exact ground-truth masks, and
// misbehavior detection with a post-reset cooldown.
class World {
public:
    World(TrackModel track, std::vector<SceneObject> scene, SimParams sim, RenderParams render,
          Palette palette, bool urban = false);

    static World from_scenario_toml(const Toml& root);
    static World from_scenario_file(const std::string& path);

    const TrackModel& track() const { return track_; }
    const Palette& palette() const { return palette_; }
    const SimParams& sim_params() const { return sim_; }
    const RenderParams& render_params() const { return render_; }
    const std::vector<SceneObject>& scene() const { return scene_; }
    bool urban() const { return urban_; }

    VehicleState initial_state() const;
    VehicleState step(const VehicleState& state, const ControlCommand& cmd) const {
        return bicycle_step(track_, sim_, state, cmd, sim_.dt);
    }

    Frame render(const VehicleState& state, std::uint64_t frame_id) const;

    // Stateful across calls: cooldown suppression and per-zone stop tracking.
    std::vector<MisbehaviorEvent> detect_events(const VehicleState& prev, const VehicleState& state,
                                                long step);
    VehicleState reset_after_event(const VehicleState& state);
    bool in_cooldown() const { return cooldown_remaining_ > 0; }
    void reset_detector();

private:
    void render_view(const VehicleState& state, double yaw_offset, Image& img, SemanticMask& mask) const;
    std::uint8_t classify_point(double x, double y) const;

    TrackModel track_;
    std::vector<SceneObject> scene_;
    SimParams sim_;
    RenderParams render_;
    Palette palette_;
    bool urban_;

    int cooldown_remaining_ = 0;
    bool event_pending_ = false;
    struct StopProgress {
        bool inside = false;
        bool satisfied = false;
    };
    std::vector<StopProgress> stop_progress_;
};

} // namespace adstest
