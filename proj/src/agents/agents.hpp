#pragma once

#include "core/segment.hpp"
#include "sim/world.hpp"
#include "util/toml.hpp"

#include <memory>
#include <string>

namespace adstest {

// Systems under test. Each consumes camera images only (never ground-truth
// masks, unless explicitly configured as the reference-oracle variant) and
// yields a steering/throttle command.
struct AgentSpec {
    enum class Kind { pure_pursuit_mask, brightness_fragile, remote };
    Kind kind = Kind::pure_pursuit_mask;

    double gain = 0.5;             // steering per normalized lateral offset
    double throttle = 0.6;
    double band_near_frac = 0.75;  // bottom of the lookahead row band, fraction of height
    double band_far_frac = 0.50;   // top of the band
    double brightness_threshold = 110.0; // fragile agent
    int min_run = 5;                     // fragile agent: shortest believable road run
    bool use_gt_mask = false;            // oracle variant for stability checks
    std::string endpoint;                // remote agent

    static AgentSpec from_toml(const Toml& table);
};

class Agent {
public:
    virtual ~Agent() = default;
    virtual ControlCommand act(const Frame& frame) = 0;
};

// The steering limit is applied by the simulator; agents emit raw targets.
std::unique_ptr<Agent> make_agent(const AgentSpec& spec, const Palette& palette);

} // namespace adstest
