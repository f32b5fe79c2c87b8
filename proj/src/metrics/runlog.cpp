#include "metrics/runlog.hpp"

#include "util/errors.hpp"
#include "util/log.hpp"

#include <filesystem>

namespace adstest {

json meta_to_json(const RunMeta& meta) {
    return json{{"type", "meta"},
                {"scenario_hash", meta.scenario_hash},
                {"agent", meta.agent},
                {"strategy", meta.strategy},
                {"domain", meta.domain},
                {"seed", meta.seed},
                {"n_steps", meta.n_steps},
                {"dt", meta.dt},
                {"urban", meta.urban},
                {"track_length", meta.track_length},
                {"n_sectors", meta.n_sectors}};
}

RunMeta meta_from_json(const json& j) {
    RunMeta meta;
    meta.scenario_hash = j.value("scenario_hash", "");
    meta.agent = j.value("agent", json::object());
    meta.strategy = j.value("strategy", "none");
    meta.domain = j.value("domain", "");
    meta.seed = j.value("seed", std::uint64_t{0});
    meta.n_steps = j.value("n_steps", 0L);
    meta.dt = j.value("dt", 0.1);
    meta.urban = j.value("urban", false);
    meta.track_length = j.value("track_length", 0.0);
    meta.n_sectors = j.value("n_sectors", 40);
    return meta;
}

json step_to_json(const StepRecord& rec) {
    return json{{"type", "step"},
                {"step", rec.step},
                {"s", rec.s},
                {"cte", rec.cte},
                {"steering", rec.steering},
                {"speed", rec.speed},
                {"retries", rec.retries},
                {"flags", {{"fallback", rec.fallback}, {"cooldown", rec.cooldown}}}};
}

json event_to_json(const MisbehaviorEvent& ev) {
    return json{{"type", "event"},
                {"kind", event_kind_name(ev.kind)},
                {"step", ev.step},
                {"sector", ev.sector},
                {"s", ev.s}};
}

std::string RunLogWriter::timings_path_for(const std::string& log_path) {
    std::filesystem::path p(log_path);
    if (p.extension() == ".jsonl") p.replace_extension(".timings.jsonl");
    else p += ".timings.jsonl";
    return p.string();
}

RunLogWriter::RunLogWriter(const std::string& path, const RunMeta& meta)
    : path_(path), log_(path, std::ios::trunc), timings_(timings_path_for(path), std::ios::trunc) {
    if (!log_ || !timings_) throw IoError("cannot open run log for writing: " + path);
    log_ << meta_to_json(meta).dump() << "\n";
    log_.flush();
}

void RunLogWriter::write_step(const StepRecord& rec, const StageTimings& timings) {
    log_ << step_to_json(rec).dump() << "\n";
    log_.flush();
    timings_ << json{{"step", rec.step},
                     {"sim", timings.sim_ms},
                     {"augment", timings.augment_ms},
                     {"validate", timings.validate_ms},
                     {"agent", timings.agent_ms}}
                    .dump()
             << "\n";
    timings_.flush();
}

void RunLogWriter::write_event(const MisbehaviorEvent& ev) {
    log_ << event_to_json(ev).dump() << "\n";
    log_.flush();
}

namespace {

// Parses a JSONL file, tolerating a truncated final line (a killed run).
std::vector<json> parse_jsonl(const std::string& path, bool required) {
    std::ifstream in(path);
    std::vector<json> out;
    if (!in) {
        if (required) throw IoError("cannot open log: " + path);
        return out;
    }
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            out.push_back(json::parse(line));
        } catch (const json::exception&) {
            if (in.eof()) {
                log::warn(path + ": dropping truncated final line " + std::to_string(line_no));
                break;
            }
            throw IoError(path + ": bad JSON at line " + std::to_string(line_no));
        }
    }
    return out;
}

} // namespace

RunLog load_run_log(const std::string& path) {
    RunLog log;
    bool have_meta = false;
    for (const json& j : parse_jsonl(path, /*required=*/true)) {
        std::string type = j.value("type", "");
        if (type == "meta") {
            log.meta = meta_from_json(j);
            have_meta = true;
        } else if (type == "step") {
            StepRecord rec;
            rec.step = j.at("step").get<long>();
            rec.s = j.at("s").get<double>();
            rec.cte = j.at("cte").get<double>();
            rec.steering = j.at("steering").get<double>();
            rec.speed = j.at("speed").get<double>();
            rec.retries = j.value("retries", 0);
            if (j.contains("flags")) {
                rec.fallback = j["flags"].value("fallback", false);
                rec.cooldown = j["flags"].value("cooldown", false);
            }
            log.steps.push_back(rec);
        } else if (type == "event") {
            MisbehaviorEvent ev;
            ev.kind = event_kind_from_name(j.at("kind").get<std::string>());
            ev.step = j.at("step").get<long>();
            ev.sector = j.at("sector").get<int>();
            ev.s = j.at("s").get<double>();
            log.events.push_back(ev);
        } else {
            throw IoError(path + ": unknown record type '" + type + "'");
        }
    }
    if (!have_meta) throw IoError(path + ": missing meta record");

    for (const json& j : parse_jsonl(RunLogWriter::timings_path_for(path), /*required=*/false)) {
        StageTimings t;
        t.sim_ms = j.value("sim", 0.0);
        t.augment_ms = j.value("augment", 0.0);
        t.validate_ms = j.value("validate", 0.0);
        t.agent_ms = j.value("agent", 0.0);
        log.timings.push_back(t);
    }
    if (!log.timings.empty() && log.timings.size() > log.steps.size()) {
        // A crash can leave the two files one line apart.
        log.timings.resize(log.steps.size());
    }
    return log;
}

} // namespace adstest
