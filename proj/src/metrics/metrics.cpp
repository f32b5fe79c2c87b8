#include "metrics/metrics.hpp"

#include "util/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace adstest {

double ftc(const std::vector<MisbehaviorEvent>& events, int n_sectors) {
    if (n_sectors < 1) throw InvalidArgument("ftc: n_sectors must be >= 1");
    std::set<int> sectors;
    for (const auto& ev : events) {
        if (ev.sector < 0 || ev.sector >= n_sectors)
            throw InvalidArgument("ftc: event sector " + std::to_string(ev.sector) +
                                  " out of range for " + std::to_string(n_sectors) + " sectors");
        sectors.insert(ev.sector);
    }
    return 100.0 * static_cast<double>(sectors.size()) / static_cast<double>(n_sectors);
}

namespace {

double mean_abs_cte(const RunLog& log) {
    double sum = 0.0;
    long n = 0;
    for (const auto& rec : log.steps) {
        if (rec.cooldown) continue;
        sum += std::abs(rec.cte);
        ++n;
    }
    if (n == 0) throw InvalidArgument("rcte: log has no non-cooldown steps");
    return sum / static_cast<double>(n);
}

double mean_abs_jerk(const RunLog& log) {
    if (log.steps.size() < 2) throw InvalidArgument("rsj: need at least 2 steps");
    const double dt = log.meta.dt > 0 ? log.meta.dt : 0.1;
    double sum = 0.0;
    long n = 0;
    const StepRecord* prev = nullptr;
    for (const auto& rec : log.steps) {
        if (rec.cooldown) {
            prev = nullptr;
            continue;
        }
        if (prev && rec.step == prev->step + 1) {
            sum += std::abs(rec.steering - prev->steering) / dt;
            ++n;
        }
        prev = &rec;
    }
    if (n == 0) throw InvalidArgument("rsj: no consecutive non-cooldown step pairs");
    return sum / static_cast<double>(n);
}

} // namespace

double rcte(const RunLog& test, const RunLog& nominal) {
    double denom = mean_abs_cte(nominal);
    if (denom == 0.0) throw InvalidArgument("rcte: nominal mean |cte| is zero (undefined baseline)");
    return mean_abs_cte(test) / denom;
}

double rsj(const RunLog& test, const RunLog& nominal) {
    double denom = mean_abs_jerk(nominal);
    if (denom == 0.0)
        throw InvalidArgument("rsj: nominal mean steering rate is zero (undefined baseline)");
    return mean_abs_jerk(test) / denom;
}

double driving_score(double route_completion, const InfractionCounts& infractions,
                     const PenaltyCoefficients& coeffs) {
    if (route_completion < 0.0 || route_completion > 100.0)
        throw InvalidArgument("driving_score: route completion must be in [0, 100]");
    if (infractions.cp < 0 || infractions.cv < 0 || infractions.ori < 0 || infractions.rli < 0 ||
        infractions.ssi < 0)
        throw InvalidArgument("driving_score: negative infraction count");
    double score = route_completion;
    score *= std::pow(coeffs.cp, static_cast<double>(infractions.cp));
    score *= std::pow(coeffs.cv, static_cast<double>(infractions.cv));
    score *= std::pow(coeffs.ori, static_cast<double>(infractions.ori));
    score *= std::pow(coeffs.rli, static_cast<double>(infractions.rli));
    score *= std::pow(coeffs.ssi, static_cast<double>(infractions.ssi));
    return score;
}

UrbanMetrics urban_metrics(const RunLog& log, const PenaltyCoefficients& coeffs) {
    UrbanMetrics m;
    for (const auto& ev : log.events) {
        switch (ev.kind) {
            case EventKind::collision_pedestrian: ++m.infractions.cp; break;
            case EventKind::collision_vehicle:
            case EventKind::collision: ++m.infractions.cv; break;
            case EventKind::off_road_urban:
            case EventKind::oob: ++m.infractions.ori; break;
            case EventKind::red_light: ++m.infractions.rli; break;
            case EventKind::stop_sign: ++m.infractions.ssi; break;
        }
    }

    // Route completion: distance covered over one lap of the track.
    double traveled = 0.0;
    const double total = log.meta.track_length;
    for (std::size_t i = 1; i < log.steps.size(); ++i) {
        double diff = log.steps[i].s - log.steps[i - 1].s;
        if (total > 0 && diff < -total / 2) diff += total; // lap wrap
        if (diff > 0) traveled += diff;
    }
    m.rc = total > 0 ? std::min(100.0, 100.0 * traveled / total) : 0.0;
    m.ds = driving_score(m.rc, m.infractions, coeffs);
    return m;
}

OverheadSummary overhead_report(const RunLog& test, const RunLog& baseline) {
    if (!test.has_timings() || !baseline.has_timings())
        throw InvalidArgument("overhead_report: both logs need complete timing records");

    OverheadSummary summary;
    double aug_sum = 0.0, aug_sq = 0.0, total_test = 0.0;
    for (const auto& t : test.timings) {
        double aug = t.augment_ms + t.validate_ms;
        aug_sum += aug;
        aug_sq += aug * aug;
        total_test += t.total();
    }
    double n = static_cast<double>(test.timings.size());
    summary.augment_mean_ms = aug_sum / n;
    summary.augment_std_ms = std::sqrt(std::max(0.0, aug_sq / n - summary.augment_mean_ms * summary.augment_mean_ms));

    double total_base = 0.0;
    for (const auto& t : baseline.timings) total_base += t.total();

    summary.total_min_test = total_test / 60000.0;
    summary.total_min_baseline = total_base / 60000.0;
    if (total_base <= 0.0) throw InvalidArgument("overhead_report: baseline total time is zero");
    summary.vs_baseline_percent = 100.0 * (total_test - total_base) / total_base;
    summary.accounting_gap_percent = 100.0 * (total_test - (total_base + aug_sum)) / total_base;
    return summary;
}

RunReport make_report(const RunLog& test, const RunLog* baseline, const PenaltyCoefficients& coeffs) {
    RunReport report;
    for (const auto& ev : test.events) {
        switch (ev.kind) {
            case EventKind::collision:
            case EventKind::collision_pedestrian:
            case EventKind::collision_vehicle: ++report.collisions; break;
            case EventKind::oob:
            case EventKind::off_road_urban: ++report.oob; break;
            default: break;
        }
    }
    report.ftc_percent = ftc(test.events, test.meta.n_sectors);
    if (test.meta.urban) report.urban = urban_metrics(test, coeffs);
    if (baseline) {
        report.rcte_ratio = rcte(test, *baseline);
        report.rsj_ratio = rsj(test, *baseline);
        if (test.has_timings() && baseline->has_timings())
            report.overhead = overhead_report(test, *baseline);
    }
    return report;
}

json report_to_json(const RunReport& report, const RunMeta& meta) {
    json j{{"domain", meta.domain},
           {"strategy", meta.strategy},
           {"agent", meta.agent},
           {"seed", meta.seed},
           {"collisions", report.collisions},
           {"oob", report.oob},
           {"ftc_percent", report.ftc_percent}};
    if (report.rcte_ratio) j["rcte"] = *report.rcte_ratio;
    if (report.rsj_ratio) j["rsj"] = *report.rsj_ratio;
    if (report.urban) {
        j["urban"] = {{"ds", report.urban->ds},
                      {"rc", report.urban->rc},
                      {"cp", report.urban->infractions.cp},
                      {"cv", report.urban->infractions.cv},
                      {"ori", report.urban->infractions.ori},
                      {"rli", report.urban->infractions.rli},
                      {"ssi", report.urban->infractions.ssi}};
    }
    if (report.overhead) {
        j["overhead"] = {{"augment_mean_ms", report.overhead->augment_mean_ms},
                         {"augment_std_ms", report.overhead->augment_std_ms},
                         {"total_min", report.overhead->total_min_test},
                         {"baseline_total_min", report.overhead->total_min_baseline},
                         {"vs_baseline_percent", report.overhead->vs_baseline_percent},
                         {"accounting_gap_percent", report.overhead->accounting_gap_percent}};
    }
    return j;
}

std::string format_mean_std(double mean, double std_dev) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f±%.1f", mean, std_dev);
    return buf;
}

std::string report_csv_header(bool urban) {
    std::string head = "domain,strategy,seed,C,OOB,FTC,RCTE,RSJ,augment_mean_ms,total_min,"
                       "vs_baseline_percent";
    if (urban) head += ",DS,RC,CP,CV,ORI,RLI,SSI";
    return head;
}

namespace {

std::string opt_num(const std::optional<double>& v, const char* fmt = "%.4f") {
    if (!v) return "";
    char buf[48];
    std::snprintf(buf, sizeof(buf), fmt, *v);
    return buf;
}

} // namespace

std::string report_csv_row(const RunReport& report, const RunMeta& meta) {
    std::ostringstream os;
    char buf[64];
    os << meta.domain << "," << meta.strategy << "," << meta.seed << "," << report.collisions << ","
       << report.oob << ",";
    std::snprintf(buf, sizeof(buf), "%.1f", report.ftc_percent);
    os << buf << "," << opt_num(report.rcte_ratio, "%.3f") << "," << opt_num(report.rsj_ratio, "%.3f")
       << ",";
    if (report.overhead) {
        std::snprintf(buf, sizeof(buf), "%.3f", report.overhead->augment_mean_ms);
        os << buf << ",";
        std::snprintf(buf, sizeof(buf), "%.3f", report.overhead->total_min_test);
        os << buf << ",";
        std::snprintf(buf, sizeof(buf), "%.2f", report.overhead->vs_baseline_percent);
        os << buf;
    } else {
        os << ",,";
    }
    if (report.urban) {
        std::snprintf(buf, sizeof(buf), ",%.2f,%.2f", report.urban->ds, report.urban->rc);
        os << buf << "," << report.urban->infractions.cp << "," << report.urban->infractions.cv << ","
           << report.urban->infractions.ori << "," << report.urban->infractions.rli << ","
           << report.urban->infractions.ssi;
    }
    return os.str();
}

std::string report_to_text(const RunReport& report, const RunMeta& meta) {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-24s %4s %4s %7s %6s %6s\n", "run", "C", "OOB", "FTC", "RCTE",
                  "RSJ");
    os << buf;
    std::string label = meta.domain.empty() ? meta.strategy : meta.domain + "/" + meta.strategy;
    std::snprintf(buf, sizeof(buf), "%-24s %4ld %4ld %6.1f%% %6s %6s\n", label.c_str(),
                  report.collisions, report.oob, report.ftc_percent,
                  opt_num(report.rcte_ratio, "%.2f").c_str(), opt_num(report.rsj_ratio, "%.2f").c_str());
    os << buf;
    if (report.urban) {
        std::snprintf(buf, sizeof(buf), "urban: DS %.2f  RC %.2f  CP %ld  CV %ld  ORI %ld  RLI %ld  SSI %ld\n",
                      report.urban->ds, report.urban->rc, report.urban->infractions.cp,
                      report.urban->infractions.cv, report.urban->infractions.ori,
                      report.urban->infractions.rli, report.urban->infractions.ssi);
        os << buf;
    }
    if (report.overhead) {
        std::snprintf(buf, sizeof(buf),
                      "overhead: augment %s ms  total %.1f min (baseline %.1f min, %+.1f%%)\n",
                      format_mean_std(report.overhead->augment_mean_ms, report.overhead->augment_std_ms)
                          .c_str(),
                      report.overhead->total_min_test, report.overhead->total_min_baseline,
                      report.overhead->vs_baseline_percent);
        os << buf;
    }
    return os.str();
}

} // namespace adstest
