#pragma once

#include "sim/world.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace adstest {

using nlohmann::json;

struct StageTimings {
    double sim_ms = 0.0;
    double augment_ms = 0.0;
    double validate_ms = 0.0;
    double agent_ms = 0.0;

    double total() const { return sim_ms + augment_ms + validate_ms + agent_ms; }
};

struct StepRecord {
    long step = 0;
    double s = 0.0;
    double cte = 0.0;
    double steering = 0.0;
    double speed = 0.0;
    bool fallback = false;
    bool cooldown = false;
    int retries = 0;
};

struct RunMeta {
    std::string scenario_hash;
    json agent;             // agent spec as configured
    std::string strategy = "none";
    std::string domain;
    std::uint64_t seed = 0;
    long n_steps = 0;
    double dt = 0.1;
    bool urban = false;
    double track_length = 0.0;
    int n_sectors = 40;
};

// Per-run record. Dynamics and events live in run.jsonl (deterministic,
// hashable); wall-clock stage timings live in a sibling timings.jsonl so a
// rerun with the same seed still produces a byte-identical main log.
struct RunLog {
    RunMeta meta;
    std::vector<StepRecord> steps;
    std::vector<MisbehaviorEvent> events;
    std::vector<StageTimings> timings; // parallel to steps; may be empty

    bool has_timings() const { return timings.size() == steps.size() && !steps.empty(); }
};

json meta_to_json(const RunMeta& meta);
RunMeta meta_from_json(const json& j);
json step_to_json(const StepRecord& rec);
json event_to_json(const MisbehaviorEvent& ev);

// Streaming writer: one JSON line per record, flushed as written so a killed
// run leaves a parseable prefix.
class RunLogWriter {
public:
    // `path` is the main log; timings go to `path` with a ".timings.jsonl"
    // suffix swapped in for ".jsonl".
    RunLogWriter(const std::string& path, const RunMeta& meta);

    void write_step(const StepRecord& rec, const StageTimings& timings);
    void write_event(const MisbehaviorEvent& ev);

    const std::string& path() const { return path_; }
    static std::string timings_path_for(const std::string& log_path);

private:
    std::string path_;
    std::ofstream log_;
    std::ofstream timings_;
};

// Tolerates a truncated final line; throws IoError on anything else.
RunLog load_run_log(const std::string& path);

} // namespace adstest
