#include "orchestrate/config.hpp"

#include "util/errors.hpp"
#include "util/toml.hpp"

#include <filesystem>

namespace adstest {

namespace fs = std::filesystem;

std::string resolve_path(const std::string& base_dir, const std::string& path) {
    if (path.empty()) return path;
    fs::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (fs::path(base_dir) / p).lexically_normal().string();
}

namespace {

json agent_table_to_json(const Toml& table) {
    json j = json::object();
    for (const auto& [key, value] : table.as_table()) {
        if (value.is_string()) j[key] = value.as_string();
        else if (value.is_bool()) j[key] = value.as_bool();
        else if (value.is_int()) j[key] = value.as_int();
        else if (value.is_float()) j[key] = value.as_float();
    }
    return j;
}

std::set<std::uint8_t> parse_class_set(const Toml& arr) {
    std::set<std::uint8_t> out;
    for (const Toml& v : arr.as_array()) out.insert(class_id_from_name(v.as_string()));
    if (out.empty()) throw ConfigError("class list must not be empty");
    return out;
}

} // namespace

CampaignConfig load_campaign_config(const std::string& path) {
    if (!fs::exists(path)) throw IoError("config file not found: " + path);
    Toml root = Toml::parse_file(path);
    CampaignConfig cfg;
    cfg.config_dir = fs::path(path).parent_path().string();

    cfg.scenario_path = resolve_path(cfg.config_dir, root.get_string("scenario"));
    if (!fs::exists(cfg.scenario_path))
        throw ConfigError("scenario file not found: " + cfg.scenario_path);

    cfg.strategy = strategy_from_name(root.get_string("strategy", "none"));
    cfg.domain = root.get_string("domain", "");
    cfg.domains_dir = resolve_path(cfg.config_dir, root.get_string("domains_dir", "domains"));
    cfg.n_steps = root.get_int("n_steps", 2000);
    if (cfg.n_steps < 1) throw ConfigError("n_steps must be >= 1");
    cfg.seed = static_cast<std::uint64_t>(root.get_int("seed", 0));
    cfg.out_dir = resolve_path(cfg.config_dir, root.get_string("out_dir", "runs/latest"));
    cfg.baseline_log = resolve_path(cfg.config_dir, root.get_string("baseline_log", ""));
    cfg.student_checkpoint = resolve_path(cfg.config_dir, root.get_string("student_checkpoint", ""));
    cfg.endpoint = root.get_string("endpoint", "");
    cfg.remote_strategy = strategy_from_name(root.get_string("remote_strategy", "inpaint"));

    if (const Toml* agent = root.find("agent")) {
        cfg.agent = AgentSpec::from_toml(*agent);
        cfg.agent_json = agent_table_to_json(*agent);
    } else {
        cfg.agent_json = json{{"kind", "pure_pursuit_mask"}};
    }

    if (const Toml* params = root.find("params")) {
        cfg.params.text_guidance = params->get_float("text_guidance", cfg.params.text_guidance);
        cfg.params.image_guidance = params->get_float("image_guidance", cfg.params.image_guidance);
        cfg.params.noise_level = params->get_float("noise_level", cfg.params.noise_level);
        cfg.params.corrupt_base_prob =
            params->get_float("corrupt_base_prob", cfg.params.corrupt_base_prob);
        if (const Toml* preserved = params->find("preserved_classes"))
            cfg.preserved = parse_class_set(*preserved);
    }
    cfg.params.seed = cfg.seed;

    if (const Toml* validator = root.find("validator")) {
        cfg.validator_threshold = validator->get_float("threshold", cfg.validator_threshold);
        if (cfg.validator_threshold < 0.0 || cfg.validator_threshold > 1.0)
            throw ConfigError("validator threshold must be in [0, 1]");
        cfg.max_retries = static_cast<int>(validator->get_int("max_retries", cfg.max_retries));
        if (cfg.max_retries < 0) throw ConfigError("max_retries must be >= 0");
        if (const Toml* checked = validator->find("checked_classes"))
            cfg.checked_classes = parse_class_set(*checked);
    }

    if (const Toml* pen = root.find("penalties")) {
        cfg.penalties.cp = pen->get_float("cp", cfg.penalties.cp);
        cfg.penalties.cv = pen->get_float("cv", cfg.penalties.cv);
        cfg.penalties.ori = pen->get_float("ori", cfg.penalties.ori);
        cfg.penalties.rli = pen->get_float("rli", cfg.penalties.rli);
        cfg.penalties.ssi = pen->get_float("ssi", cfg.penalties.ssi);
    }

    bool needs_domain = cfg.strategy != Strategy::none;
    if (needs_domain && cfg.domain.empty())
        throw ConfigError("strategy '" + std::string(strategy_name(cfg.strategy)) +
                          "' requires a domain");
    if (cfg.strategy == Strategy::student && cfg.student_checkpoint.empty())
        throw ConfigError("strategy=student requires student_checkpoint");
    if (cfg.strategy == Strategy::remote && cfg.endpoint.empty())
        throw ConfigError("strategy=remote requires endpoint");
    return cfg;
}

} // namespace adstest
