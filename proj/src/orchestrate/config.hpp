#pragma once

#include "agents/agents.hpp"
#include "augment/strategies.hpp"
#include "metrics/metrics.hpp"
#include "validate/validator.hpp"

#include <string>

namespace adstest {

struct CampaignConfig {
    std::string config_dir; // directory of the config file; relative paths resolve against it

    std::string scenario_path;
    AgentSpec agent;
    json agent_json; // raw spec, recorded in run metadata
    Strategy strategy = Strategy::none;
    std::string domain;
    std::string domains_dir;
    AugmentParams params;
    PreservedClasses preserved{cls::road};
    double validator_threshold = 0.9;
    std::set<std::uint8_t> checked_classes{cls::road};
    int max_retries = 10;
    long n_steps = 2000;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::string baseline_log;
    std::string student_checkpoint;
    std::string endpoint;
    Strategy remote_strategy = Strategy::inpaint;
    PenaltyCoefficients penalties;
};

CampaignConfig load_campaign_config(const std::string& path);

// Resolve `path` against `base_dir` unless absolute or empty.
std::string resolve_path(const std::string& base_dir, const std::string& path);

} // namespace adstest
