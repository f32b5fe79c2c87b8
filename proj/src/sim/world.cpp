#include "sim/world.hpp"

#include "util/errors.hpp"

#include <algorithm>
#include <cmath>

namespace adstest {

const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::oob: return "oob";
        case EventKind::collision: return "collision";
        case EventKind::collision_pedestrian: return "collision_pedestrian";
        case EventKind::collision_vehicle: return "collision_vehicle";
        case EventKind::red_light: return "red_light";
        case EventKind::stop_sign: return "stop_sign";
        case EventKind::off_road_urban: return "off_road_urban";
    }
    throw InvalidArgument("bad event kind");
}

EventKind event_kind_from_name(const std::string& name) {
    for (EventKind k : {EventKind::oob, EventKind::collision, EventKind::collision_pedestrian,
                        EventKind::collision_vehicle, EventKind::red_light, EventKind::stop_sign,
                        EventKind::off_road_urban}) {
        if (name == event_kind_name(k)) return k;
    }
    throw InvalidArgument("unknown event kind '" + name + "'");
}

VehicleState bicycle_step(const TrackModel& track, const SimParams& params, const VehicleState& state,
                          const ControlCommand& cmd, double dt) {
    if (dt <= 0) throw InvalidArgument("step: dt must be > 0");
    VehicleState next = state;
    next.x = state.x + state.speed * std::cos(state.heading) * dt;
    next.y = state.y + state.speed * std::sin(state.heading) * dt;
    next.heading = state.heading + state.speed / params.wheelbase * std::tan(state.steering) * dt;

    double target = std::clamp(cmd.steering_target, -params.steering_limit, params.steering_limit);
    double max_delta = params.steering_slew * dt;
    next.steering = state.steering + std::clamp(target - state.steering, -max_delta, max_delta);

    double v_target = std::clamp(cmd.throttle, 0.0, 1.0) * params.v_max;
    next.speed = state.speed + (v_target - state.speed) * std::min(1.0, dt / params.speed_tau);

    auto proj = track.project(next.x, next.y);
    next.s = proj.s;
    next.cte = proj.cte;
    return next;
}

World::World(TrackModel track, std::vector<SceneObject> scene, SimParams sim, RenderParams render,
             Palette palette, bool urban)
    : track_(std::move(track)), scene_(std::move(scene)), sim_(sim), render_(render),
      palette_(std::move(palette)), urban_(urban) {
    for (const auto& obj : scene_) {
        if (obj.s_start >= obj.s_end) throw InvalidArgument("scene object: s_start must be < s_end");
        if (obj.s_end > track_.total_length())
            throw InvalidArgument("scene object extends past track length");
        if (obj.kind == SceneObject::Kind::obstacle && obj.object_class != cls::vehicle &&
            obj.object_class != cls::pedestrian)
            throw InvalidArgument("obstacle class must be vehicle or pedestrian");
    }
    reset_detector();
}

void World::reset_detector() {
    cooldown_remaining_ = 0;
    event_pending_ = false;
    stop_progress_.assign(scene_.size(), {});
}

VehicleState World::initial_state() const {
    Pose p = track_.pose_at(0.0);
    VehicleState s;
    s.x = p.x;
    s.y = p.y;
    s.heading = p.heading;
    return s;
}

namespace {

bool in_wrapped_interval(double s, double a, double b, double total) {
    s = std::fmod(s, total);
    if (s < 0) s += total;
    a = std::fmod(a, total);
    if (a < 0) a += total;
    b = std::fmod(b, total);
    if (b < 0) b += total;
    if (a <= b) return s >= a && s <= b;
    return s >= a || s <= b;
}

constexpr double kZoneStripeLen = 1.0; // m, painted footprint of signal/stop zones

} // namespace

std::uint8_t World::classify_point(double x, double y) const {
    auto proj = track_.try_project(x, y);
    if (!proj) return cls::background;
    bool on_road = std::abs(proj->cte) <= track_.lane_width() / 2.0;
    for (const auto& obj : scene_) {
        switch (obj.kind) {
            case SceneObject::Kind::obstacle:
                if (in_wrapped_interval(proj->s, obj.s_start, obj.s_end, track_.total_length()) &&
                    std::abs(proj->cte - obj.lateral) <= sim_.obstacle_half_width)
                    return obj.object_class;
                break;
            case SceneObject::Kind::signal_zone:
                if (on_road &&
                    in_wrapped_interval(proj->s, obj.s_start, obj.s_start + kZoneStripeLen,
                                        track_.total_length()))
                    return cls::traffic_light;
                break;
            case SceneObject::Kind::stop_zone:
                if (on_road &&
                    in_wrapped_interval(proj->s, obj.s_start, obj.s_start + kZoneStripeLen,
                                        track_.total_length()))
                    return cls::traffic_sign;
                break;
        }
    }
    return on_road ? cls::road : cls::background;
}

void World::render_view(const VehicleState& state, double yaw_offset, Image& img,
                        SemanticMask& mask) const {
    const int w = render_.width, h = render_.height;
    const double heading = state.heading + yaw_offset;
    const double fx = std::cos(heading), fy = std::sin(heading);
    const double lx = -std::sin(heading), ly = std::cos(heading);

    for (int r = 0; r < h; ++r) {
        double d = (h == 1) ? render_.d_near
                            : render_.d_far - (render_.d_far - render_.d_near) * r / (h - 1);
        double bx = state.x + d * fx;
        double by = state.y + d * fy;
        for (int c = 0; c < w; ++c) {
            double lateral =
                (w == 1) ? 0.0 : render_.view_half_width * (1.0 - 2.0 * c / (w - 1));
            std::uint8_t id = classify_point(bx + lateral * lx, by + lateral * ly);
            mask.set(c, r, id);
            img.set(c, r, palette_.color(id));
        }
    }
}

Frame World::render(const VehicleState& state, std::uint64_t frame_id) const {
    Frame frame;
    frame.id = frame_id;
    frame.state = state;
    std::vector<double> yaws;
    if (render_.views == 1) {
        yaws = {0.0};
    } else if (render_.views == 3) {
        yaws = {0.0, render_.side_view_yaw, -render_.side_view_yaw}; // front, left, right
    } else {
        throw InvalidArgument("render: views must be 1 or 3");
    }
    for (double yaw : yaws) {
        Image img(render_.width, render_.height);
        SemanticMask mask(render_.width, render_.height);
        render_view(state, yaw, img, mask);
        frame.views.push_back(std::move(img));
        frame.masks.push_back(std::move(mask));
    }
    return frame;
}

std::vector<MisbehaviorEvent> World::detect_events(const VehicleState& prev, const VehicleState& state,
                                                   long step) {
    if (cooldown_remaining_ > 0) {
        --cooldown_remaining_;
        return {};
    }
    std::vector<MisbehaviorEvent> events;
    auto emit = [&](EventKind kind) {
        events.push_back({kind, step, track_.sector_of(state.s), state.s});
    };

    if (std::abs(state.cte) > track_.lane_width() / 2.0)
        emit(urban_ ? EventKind::off_road_urban : EventKind::oob);

    const double total = track_.total_length();
    for (std::size_t i = 0; i < scene_.size(); ++i) {
        const auto& obj = scene_[i];
        switch (obj.kind) {
            case SceneObject::Kind::obstacle: {
                bool along = in_wrapped_interval(state.s, obj.s_start - sim_.vehicle_radius,
                                                 obj.s_end + sim_.vehicle_radius, total);
                bool across = std::abs(state.cte - obj.lateral) <=
                              sim_.vehicle_radius + sim_.obstacle_half_width;
                if (along && across) {
                    if (!urban_)
                        emit(EventKind::collision);
                    else
                        emit(obj.object_class == cls::pedestrian ? EventKind::collision_pedestrian
                                                                 : EventKind::collision_vehicle);
                }
                break;
            }
            case SceneObject::Kind::signal_zone: {
                bool was_in = in_wrapped_interval(prev.s, obj.s_start, obj.s_end, total);
                bool now_in = in_wrapped_interval(state.s, obj.s_start, obj.s_end, total);
                bool red = step >= obj.red_from_step && step < obj.red_to_step;
                if (!was_in && now_in && red) emit(EventKind::red_light);
                break;
            }
            case SceneObject::Kind::stop_zone: {
                bool now_in = in_wrapped_interval(state.s, obj.s_start, obj.s_end, total);
                StopProgress& progress = stop_progress_[i];
                if (now_in) {
                    progress.inside = true;
                    if (state.speed < sim_.stop_speed) progress.satisfied = true;
                } else if (progress.inside) {
                    if (!progress.satisfied) emit(EventKind::stop_sign);
                    progress = {};
                }
                break;
            }
        }
    }

    if (!events.empty()) event_pending_ = true;
    return events;
}

VehicleState World::reset_after_event(const VehicleState& state) {
    if (!event_pending_) return state; // no-op by contract
    double s = track_.wrap_s(state.s + sim_.reset_advance);
    Pose p = track_.pose_at(s);
    VehicleState next;
    next.x = p.x;
    next.y = p.y;
    next.heading = p.heading;
    next.speed = state.speed;
    next.steering = 0.0;
    next.s = s;
    next.cte = 0.0;
    cooldown_remaining_ = sim_.cooldown_steps;
    event_pending_ = false;
    return next;
}

World World::from_scenario_toml(const Toml& root) {
    bool urban = root.get_string("mode", "nominal") == "urban";
    const Toml* track_table = root.find("track");
    TrackModel track = track_table ? TrackModel::from_toml(*track_table) : TrackModel::stadium();

    std::vector<SceneObject> scene;
    if (const Toml* objects = root.find("object")) {
        for (const Toml& o : objects->as_array()) {
            SceneObject obj;
            std::string kind = o.get_string("kind");
            if (kind == "obstacle")
                obj.kind = SceneObject::Kind::obstacle;
            else if (kind == "signal_zone")
                obj.kind = SceneObject::Kind::signal_zone;
            else if (kind == "stop_zone")
                obj.kind = SceneObject::Kind::stop_zone;
            else
                throw ConfigError("object kind must be obstacle|signal_zone|stop_zone");
            obj.s_start = o.get_float("s_start");
            obj.s_end = o.get_float("s_end");
            obj.lateral = o.get_float("lateral", 0.0);
            obj.object_class = class_id_from_name(o.get_string("class", "vehicle"));
            obj.red_from_step = o.get_int("red_from", 0);
            obj.red_to_step = o.get_int("red_to", 0);
            scene.push_back(obj);
        }
    }

    SimParams sim;
    RenderParams render = urban ? RenderParams::urban() : RenderParams::nominal();
    if (const Toml* r = root.find("render")) {
        render.width = static_cast<int>(r->get_int("width", render.width));
        render.height = static_cast<int>(r->get_int("height", render.height));
        render.views = static_cast<int>(r->get_int("views", render.views));
        render.d_near = r->get_float("d_near", render.d_near);
        render.d_far = r->get_float("d_far", render.d_far);
        render.view_half_width = r->get_float("view_half_width", render.view_half_width);
    }
    return World(std::move(track), std::move(scene), sim, render, Palette::simulator_default(), urban);
}

World World::from_scenario_file(const std::string& path) {
    return from_scenario_toml(Toml::parse_file(path));
}

} // namespace adstest
