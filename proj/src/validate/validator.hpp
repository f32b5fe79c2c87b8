#pragma once

#include "augment/strategies.hpp"
#include "core/segment.hpp"
#include "sim/world.hpp"

#include <json.hpp>

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <vector>

namespace adstest {

using nlohmann::json;

struct ValidatorConfig {
    double threshold = 0.9;
    std::set<std::uint8_t> checked_classes{cls::road};
    int max_retries = 10;
    std::shared_ptr<const Segmenter> segmenter;
};

struct ValidationVerdict {
    std::map<std::uint8_t, double> per_class_score; // min across views
    bool valid = false;
    double elapsed_ms = 0.0;
};

// One Class - Targeted Semantic Segmentation similarity, instantiated as
// single-class intersection-over-union. Empty union (class absent from both
// masks) scores 1: an absent class is trivially preserved.
double octss(const SemanticMask& a, const SemanticMask& b, std::uint8_t class_id);

// Segment each augmented view and score every checked class against the
// frame's ground-truth mask; valid iff all (class, view) scores clear the
// threshold.
ValidationVerdict validate(const Frame& original, const std::vector<Image>& augmented,
                           const ValidatorConfig& cfg);

// A single augmentation attempt for a given seed.
using AugmentFn = std::function<AugmentationResult(const Frame&, std::uint64_t seed)>;

struct ValidatedAugmentation {
    AugmentationResult result;
    ValidationVerdict verdict;
    int retries = 0;
    bool fallback = false;        // retries exhausted; original passed through
    double total_elapsed_ms = 0;  // all attempts + validations
    double augment_ms = 0;        // summed over attempts
    double validate_ms = 0;       // summed over attempts
};

// Retry loop: augment with a fresh per-attempt seed, validate, stop on valid
// or exhaustion. Fallback returns the original views so the loop stays alive.
ValidatedAugmentation augment_validated(const Frame& frame, const AugmentFn& augment,
                                        std::uint64_t base_seed, const ValidatorConfig& cfg);

// --- threshold calibration -------------------------------------------------

struct CalibrationSample {
    SemanticMask mask;
    std::string category; // straight | left | right
};

struct ScoreDistribution {
    double min = 0.0;
    double median = 0.0;
    double max = 0.0;
    long n = 0;
};

struct CalibrationReport {
    ScoreDistribution intra;
    ScoreDistribution inter;
    struct Row {
        double threshold = 0.0;
        double inter_acceptance = 0.0; // fraction of cross-category pairs accepted
        double intra_rejection = 0.0;  // fraction of same-category pairs rejected
    };
    std::vector<Row> rows; // thresholds 0.50 .. 0.99 step 0.01
};

CalibrationReport calibrate_threshold(const std::vector<CalibrationSample>& labeled);
json calibration_to_json(const CalibrationReport& report);
std::string calibration_to_text(const CalibrationReport& report);

// --- confusion matrix ------------------------------------------------------

struct ConfusionMatrix {
    long tp = 0, fp = 0, fn = 0, tn = 0;
    long total() const { return tp + fp + fn + tn; }
};

// samples: (predicted_valid, gt_valid); valid is the positive class.
ConfusionMatrix evaluate_validator(const std::vector<std::pair<bool, bool>>& samples);
json confusion_to_json(const ConfusionMatrix& m);
// [[TP, FP], [FN, TN]] with "count (percent%)" cells.
std::string confusion_to_text(const ConfusionMatrix& m);

} // namespace adstest
