#pragma once

#include "metrics/runlog.hpp"

#include <map>
#include <optional>
#include <string>

namespace adstest {

// Failure Track Coverage: percent of sectors containing at least one event.
double ftc(const std::vector<MisbehaviorEvent>& events, int n_sectors);

// Relative Cross-Track Error: mean |cte| in the test log over the nominal
// log, cooldown steps excluded from both. Throws on a zero nominal mean.
double rcte(const RunLog& test, const RunLog& nominal);

// Relative Steering Jerk: mean |d steering/dt| ratio, cooldown steps
// excluded, jerk taken over consecutive retained steps.
double rsj(const RunLog& test, const RunLog& nominal);

struct InfractionCounts {
    long cp = 0;  // collisions with pedestrians
    long cv = 0;  // collisions with vehicles
    long ori = 0; // off-road infractions
    long rli = 0; // red light infractions
    long ssi = 0; // stop sign infractions
};

// Leaderboard-convention multiplicative penalties; override via config.
struct PenaltyCoefficients {
    double cp = 0.50;
    double cv = 0.60;
    double ori = 0.65;
    double rli = 0.70;
    double ssi = 0.80;
};

// DS = RC * cp^n_cp * cv^n_cv * ...
double driving_score(double route_completion, const InfractionCounts& infractions,
                     const PenaltyCoefficients& coeffs = {});

struct UrbanMetrics {
    double ds = 0.0;
    double rc = 0.0;
    InfractionCounts infractions;
};

UrbanMetrics urban_metrics(const RunLog& log, const PenaltyCoefficients& coeffs = {});

struct OverheadSummary {
    double augment_mean_ms = 0.0; // augment + validate per step, retries included
    double augment_std_ms = 0.0;
    double total_min_test = 0.0;
    double total_min_baseline = 0.0;
    double vs_baseline_percent = 0.0;
    // 100 * (total_test - (total_baseline + sum augment)) / total_baseline;
    // near zero when the baseline-equivalent step work matches.
    double accounting_gap_percent = 0.0;
};

OverheadSummary overhead_report(const RunLog& test, const RunLog& baseline);

struct RunReport {
    long collisions = 0;
    long oob = 0;
    double ftc_percent = 0.0;
    std::optional<double> rcte_ratio;
    std::optional<double> rsj_ratio;
    std::optional<UrbanMetrics> urban;
    std::optional<OverheadSummary> overhead;
};

RunReport make_report(const RunLog& test, const RunLog* baseline,
                      const PenaltyCoefficients& coeffs = {});

json report_to_json(const RunReport& report, const RunMeta& meta);
std::string report_csv_header(bool urban);
std::string report_csv_row(const RunReport& report, const RunMeta& meta);
// Aligned text in the paper's column order, "mean+-std" where applicable.
std::string report_to_text(const RunReport& report, const RunMeta& meta);
std::string format_mean_std(double mean, double std_dev);

} // namespace adstest
