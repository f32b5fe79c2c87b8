#include "agents/agents.hpp"

#include "net/client.hpp"
#include "util/errors.hpp"

#include <algorithm>
#include <cmath>

namespace adstest {

namespace {

// Steering from the road-pixel centroid over a row band: the standard
// centroid-chase rule, steering = gain * (2*centroid/width - 1).
class CentroidSteering {
public:
    CentroidSteering(double gain, double near_frac, double far_frac, double throttle)
        : gain_(gain), near_frac_(near_frac), far_frac_(far_frac), throttle_(throttle) {}

    template <typename IsRoad>
    ControlCommand steer(int width, int height, IsRoad&& is_road) {
        int row_top = static_cast<int>(std::clamp(far_frac_, 0.0, 1.0) * (height - 1));
        int row_bottom = static_cast<int>(std::clamp(near_frac_, 0.0, 1.0) * (height - 1));
        if (row_top > row_bottom) std::swap(row_top, row_bottom);

        double sum_cols = 0.0;
        long n = 0;
        for (int r = row_top; r <= row_bottom; ++r) {
            for (int c = 0; c < width; ++c) {
                if (is_road(c, r)) {
                    sum_cols += c;
                    ++n;
                }
            }
        }
        if (n == 0) return {prev_steering_, throttle_}; // nothing believable: hold
        double centroid = sum_cols / static_cast<double>(n);
        prev_steering_ = gain_ * (2.0 * centroid / width - 1.0);
        return {prev_steering_, throttle_};
    }

private:
    double gain_;
    double near_frac_;
    double far_frac_;
    double throttle_;
    double prev_steering_ = 0.0;
};

class PurePursuitMaskAgent final : public Agent {
public:
    PurePursuitMaskAgent(const AgentSpec& spec, const Palette& palette)
        : steering_(spec.gain, spec.band_near_frac, spec.band_far_frac, spec.throttle),
          segmenter_(palette), use_gt_mask_(spec.use_gt_mask) {}

    ControlCommand act(const Frame& frame) override {
        const Image& img = frame.front();
        if (use_gt_mask_) {
            const SemanticMask& mask = frame.front_mask();
            return steering_.steer(mask.width(), mask.height(),
                                   [&](int c, int r) { return mask.at(c, r) == cls::road; });
        }
        SemanticMask seg = segmenter_.segment(img);
        return steering_.steer(seg.width(), seg.height(),
                               [&](int c, int r) { return seg.at(c, r) == cls::road; });
    }

private:
    CentroidSteering steering_;
    PaletteSegmenter segmenter_;
    bool use_gt_mask_;
};

// Finds the road by raw brightness. Works in the training domain, falls over
// once a domain darkens the road; short bright runs are rejected as noise,
// which also blinds it to the thin residual edges refinement leaves behind.
class BrightnessFragileAgent final : public Agent {
public:
    BrightnessFragileAgent(const AgentSpec& spec)
        : steering_(spec.gain, spec.band_near_frac, spec.band_far_frac, spec.throttle),
          threshold_(spec.brightness_threshold), min_run_(spec.min_run) {}

    ControlCommand act(const Frame& frame) override {
        const Image& img = frame.front();
        const int w = img.width(), h = img.height();
        bright_.assign(std::size_t(w) * h, 0);
        for (int r = 0; r < h; ++r) {
            int run_start = -1;
            for (int c = 0; c <= w; ++c) {
                bool bright = c < w && luminance(img.at(c, r)) >= threshold_;
                if (bright && run_start < 0) run_start = c;
                if (!bright && run_start >= 0) {
                    if (c - run_start >= min_run_)
                        for (int i = run_start; i < c; ++i) bright_[std::size_t(r) * w + i] = 1;
                    run_start = -1;
                }
            }
        }
        return steering_.steer(w, h, [&](int c, int r) { return bright_[std::size_t(r) * w + c] != 0; });
    }

private:
    CentroidSteering steering_;
    double threshold_;
    int min_run_;
    std::vector<std::uint8_t> bright_;
};

class RemoteAgent final : public Agent {
public:
    explicit RemoteAgent(const std::string& endpoint) : client_(endpoint) {}

    ControlCommand act(const Frame& frame) override { return client_.agent_act(frame); }

private:
    net::Client client_;
};

} // namespace

AgentSpec AgentSpec::from_toml(const Toml& table) {
    AgentSpec spec;
    std::string kind = table.get_string("kind", "pure_pursuit_mask");
    if (kind == "pure_pursuit_mask")
        spec.kind = Kind::pure_pursuit_mask;
    else if (kind == "brightness_fragile")
        spec.kind = Kind::brightness_fragile;
    else if (kind == "remote")
        spec.kind = Kind::remote;
    else
        throw ConfigError("agent kind must be pure_pursuit_mask|brightness_fragile|remote");

    spec.gain = table.get_float("gain", spec.gain);
    spec.throttle = table.get_float("throttle", spec.throttle);
    spec.band_near_frac = table.get_float("band_near_frac", spec.band_near_frac);
    spec.band_far_frac = table.get_float("band_far_frac", spec.band_far_frac);
    spec.brightness_threshold = table.get_float("brightness_threshold", spec.brightness_threshold);
    spec.min_run = static_cast<int>(table.get_int("min_run", spec.min_run));
    spec.use_gt_mask = table.get_bool("use_gt_mask", false);
    spec.endpoint = table.get_string("endpoint", "");
    if (spec.kind == Kind::remote && spec.endpoint.empty())
        throw ConfigError("remote agent requires endpoint");
    if (std::abs(spec.gain) > 4.0) throw ConfigError("agent gain out of sensible range");
    return spec;
}

std::unique_ptr<Agent> make_agent(const AgentSpec& spec, const Palette& palette) {
    switch (spec.kind) {
        case AgentSpec::Kind::pure_pursuit_mask:
            return std::make_unique<PurePursuitMaskAgent>(spec, palette);
        case AgentSpec::Kind::brightness_fragile:
            return std::make_unique<BrightnessFragileAgent>(spec);
        case AgentSpec::Kind::remote:
            return std::make_unique<RemoteAgent>(spec.endpoint);
    }
    throw InvalidArgument("bad agent kind");
}

} // namespace adstest
