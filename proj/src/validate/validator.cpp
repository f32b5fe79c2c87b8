#include "validate/validator.hpp"

#include "util/errors.hpp"
#include "util/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

namespace adstest {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

} // namespace

double octss(const SemanticMask& a, const SemanticMask& b, std::uint8_t class_id) {
    if (a.width() != b.width() || a.height() != b.height())
        throw InvalidArgument("octss: mask dimensions differ");
    const auto& ca = a.classes();
    const auto& cb = b.classes();
    long intersection = 0, uni = 0;
    for (std::size_t i = 0; i < ca.size(); ++i) {
        bool in_a = ca[i] == class_id;
        bool in_b = cb[i] == class_id;
        intersection += in_a && in_b;
        uni += in_a || in_b;
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(intersection) / static_cast<double>(uni);
}

ValidationVerdict validate(const Frame& original, const std::vector<Image>& augmented,
                           const ValidatorConfig& cfg) {
    auto t0 = Clock::now();
    if (!cfg.segmenter) throw InvalidArgument("validate: no segmenter configured");
    if (cfg.checked_classes.empty()) throw InvalidArgument("validate: no checked classes");
    if (cfg.threshold < 0.0 || cfg.threshold > 1.0)
        throw InvalidArgument("validate: threshold must be in [0, 1]");
    if (augmented.size() != original.masks.size() || augmented.empty())
        throw InvalidArgument("validate: need one augmented image per ground-truth mask");

    ValidationVerdict verdict;
    verdict.valid = true;
    for (std::uint8_t id : cfg.checked_classes) verdict.per_class_score[id] = 1.0;

    for (std::size_t v = 0; v < augmented.size(); ++v) {
        const SemanticMask& truth = original.masks[v];
        if (augmented[v].width() != truth.width() || augmented[v].height() != truth.height())
            throw InvalidArgument("validate: augmented view dims differ from mask");
        SemanticMask predicted = cfg.segmenter->segment(augmented[v]);
        for (std::uint8_t id : cfg.checked_classes) {
            double score = octss(predicted, truth, id);
            verdict.per_class_score[id] = std::min(verdict.per_class_score[id], score);
            if (score < cfg.threshold) verdict.valid = false;
        }
    }
    verdict.elapsed_ms = elapsed_ms_since(t0);
    return verdict;
}

ValidatedAugmentation augment_validated(const Frame& frame, const AugmentFn& augment,
                                        std::uint64_t base_seed, const ValidatorConfig& cfg) {
    if (cfg.max_retries < 0) throw InvalidArgument("max_retries must be >= 0");
    auto t0 = Clock::now();
    ValidatedAugmentation out;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        std::uint64_t seed = mix_seed(base_seed, frame.id, static_cast<std::uint64_t>(attempt));
        out.result = augment(frame, seed);
        out.augment_ms += out.result.elapsed_ms;
        out.verdict = validate(frame, out.result.images, cfg);
        out.validate_ms += out.verdict.elapsed_ms;
        out.retries = attempt;
        if (out.verdict.valid) {
            out.result.retries = out.retries;
            out.total_elapsed_ms = elapsed_ms_since(t0);
            return out;
        }
    }
    // Exhausted: pass the original frame through so the closed loop can
    // continue; callers flag the step.
    out.fallback = true;
    out.result.images = frame.views;
    out.result.gt_valid.reset();
    out.result.retries = out.retries;
    out.total_elapsed_ms = elapsed_ms_since(t0);
    return out;
}

namespace {

ScoreDistribution summarize(std::vector<double>& scores) {
    ScoreDistribution d;
    d.n = static_cast<long>(scores.size());
    if (scores.empty()) return d;
    std::sort(scores.begin(), scores.end());
    d.min = scores.front();
    d.max = scores.back();
    std::size_t mid = scores.size() / 2;
    d.median = scores.size() % 2 ? scores[mid] : 0.5 * (scores[mid - 1] + scores[mid]);
    return d;
}

} // namespace

CalibrationReport calibrate_threshold(const std::vector<CalibrationSample>& labeled) {
    if (labeled.size() < 2) throw InvalidArgument("calibrate_threshold: need at least 2 masks");
    std::set<std::string> categories;
    for (const auto& s : labeled) categories.insert(s.category);
    if (categories.size() < 2)
        throw InvalidArgument("calibrate_threshold: need at least 2 categories");

    std::vector<double> intra, inter;
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        for (std::size_t j = i + 1; j < labeled.size(); ++j) {
            double score = octss(labeled[i].mask, labeled[j].mask, cls::road);
            (labeled[i].category == labeled[j].category ? intra : inter).push_back(score);
        }
    }

    CalibrationReport report;
    for (int t = 50; t <= 99; ++t) {
        double threshold = t / 100.0;
        long inter_accept = std::count_if(inter.begin(), inter.end(),
                                          [&](double s) { return s >= threshold; });
        long intra_reject = std::count_if(intra.begin(), intra.end(),
                                          [&](double s) { return s < threshold; });
        report.rows.push_back({threshold,
                               inter.empty() ? 0.0 : double(inter_accept) / double(inter.size()),
                               intra.empty() ? 0.0 : double(intra_reject) / double(intra.size())});
    }
    report.intra = summarize(intra);
    report.inter = summarize(inter);
    return report;
}

json calibration_to_json(const CalibrationReport& report) {
    auto dist = [](const ScoreDistribution& d) {
        return json{{"min", d.min}, {"median", d.median}, {"max", d.max}, {"n", d.n}};
    };
    json rows = json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"threshold", r.threshold},
                        {"inter_acceptance", r.inter_acceptance},
                        {"intra_rejection", r.intra_rejection}});
    return json{{"intra", dist(report.intra)}, {"inter", dist(report.inter)}, {"thresholds", rows}};
}

std::string calibration_to_text(const CalibrationReport& report) {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-10s %8s %8s %8s %6s\n", "pairs", "min", "median", "max", "n");
    os << buf;
    std::snprintf(buf, sizeof(buf), "%-10s %8.4f %8.4f %8.4f %6ld\n", "intra", report.intra.min,
                  report.intra.median, report.intra.max, report.intra.n);
    os << buf;
    std::snprintf(buf, sizeof(buf), "%-10s %8.4f %8.4f %8.4f %6ld\n\n", "inter", report.inter.min,
                  report.inter.median, report.inter.max, report.inter.n);
    os << buf;
    std::snprintf(buf, sizeof(buf), "%-10s %18s %16s\n", "threshold", "inter-acceptance",
                  "intra-rejection");
    os << buf;
    for (const auto& r : report.rows) {
        std::snprintf(buf, sizeof(buf), "%-10.2f %17.1f%% %15.1f%%\n", r.threshold,
                      100.0 * r.inter_acceptance, 100.0 * r.intra_rejection);
        os << buf;
    }
    return os.str();
}

ConfusionMatrix evaluate_validator(const std::vector<std::pair<bool, bool>>& samples) {
    if (samples.empty()) throw InvalidArgument("evaluate_validator: no samples");
    ConfusionMatrix m;
    for (auto [predicted_valid, gt_valid] : samples) {
        if (predicted_valid && gt_valid) ++m.tp;
        else if (predicted_valid && !gt_valid) ++m.fp;
        else if (!predicted_valid && gt_valid) ++m.fn;
        else ++m.tn;
    }
    return m;
}

json confusion_to_json(const ConfusionMatrix& m) {
    double total = static_cast<double>(m.total());
    auto pct = [&](long v) { return total > 0 ? 100.0 * v / total : 0.0; };
    return json{{"tp", m.tp},
                {"fp", m.fp},
                {"fn", m.fn},
                {"tn", m.tn},
                {"matrix", {{m.tp, m.fp}, {m.fn, m.tn}}},
                {"percent", {{pct(m.tp), pct(m.fp)}, {pct(m.fn), pct(m.tn)}}}};
}

std::string confusion_to_text(const ConfusionMatrix& m) {
    double total = static_cast<double>(m.total());
    auto cell = [&](long v) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%ld (%.0f%%)", v, total > 0 ? 100.0 * v / total : 0.0);
        return std::string(buf);
    };
    std::ostringstream os;
    char buf[200];
    std::snprintf(buf, sizeof(buf), "%-18s %-16s %-16s\n", "", "gt valid", "gt invalid");
    os << buf;
    std::snprintf(buf, sizeof(buf), "%-18s %-16s %-16s\n", "predicted valid", cell(m.tp).c_str(),
                  cell(m.fp).c_str());
    os << buf;
    std::snprintf(buf, sizeof(buf), "%-18s %-16s %-16s\n", "predicted invalid", cell(m.fn).c_str(),
                  cell(m.tn).c_str());
    os << buf;
    os << "[[" << m.tp << ", " << m.fp << "], [" << m.fn << ", " << m.tn << "]]\n";
    return os.str();
}

} // namespace adstest
