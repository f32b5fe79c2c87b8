#pragma once

#include "agents/agents.hpp"
#include "core/segment.hpp"
#include "sim/world.hpp"
#include "validate/validator.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace adstest {

// --- paired dataset ----------------------------------------------------------

struct PairEntry {
    std::string id; // zero-padded index, also the file stem
    bool gt_valid = true;
    std::uint64_t seed_used = 0;
    int retries = 0;
};

struct PairDataset {
    std::string domain;
    std::string strategy;
    std::uint64_t seed = 0;
    std::vector<Image> originals;
    std::vector<SemanticMask> masks;
    std::vector<Image> augmented;
    std::vector<PairEntry> entries;

    std::size_t size() const { return originals.size(); }
};

void write_dataset(const PairDataset& ds, const std::string& dir);
PairDataset load_dataset(const std::string& dir);

struct CollectOptions {
    int n = 200;
    std::uint64_t seed = 0;
    // raw: one attempt per frame, keep the mock's validity label (confusion
    // harness); otherwise retry-validate and keep only accepted frames.
    bool raw = false;
};

// Drives the world with the given agent, augments every frame, collects
// (original, augmented) pairs. Deterministic given options.seed.
PairDataset collect_pairs(World& world, Agent& driver, const AugmentFn& augment,
                          const ValidatorConfig& validator, const std::string& domain,
                          const std::string& strategy, const CollectOptions& options);

// --- student -----------------------------------------------------------------

// Per-class affine color map on normalized [0,1] channels; classes come from
// palette segmentation of the input (or a supplied mask).
class StudentTransform {
public:
    struct ClassAffine {
        Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
        Eigen::Vector3d b = Eigen::Vector3d::Zero();
    };

    explicit StudentTransform(Palette palette = Palette::simulator_default());

    const ClassAffine& map_for(std::uint8_t class_id) const;
    void set_map(std::uint8_t class_id, ClassAffine affine);

    Image apply(const Image& image) const;
    Image apply(const Image& image, const SemanticMask& mask) const;

    json to_json() const;
    static StudentTransform from_json(const json& j, Palette palette = Palette::simulator_default());

private:
    Palette palette_;
    PaletteSegmenter segmenter_;
    std::map<std::uint8_t, ClassAffine> maps_;
};

struct Checkpoint {
    int epoch = 0; // 1-based
    StudentTransform student;
    double train_mse = 0.0;
    std::optional<double> fd_to_teacher;
};

struct FitOptions {
    int n_epochs = 10;
    int batch_size = 32;       // images per gradient step
    double learning_rate = 1e-3;
    int max_lr_halvings = 3;
    double mono_tolerance = 1e-6;
};

struct FitResult {
    std::vector<Checkpoint> checkpoints; // one per epoch
    int lr_halvings = 0;
    double final_learning_rate = 0.0;
};

// Mini-batch gradient descent on per-class mean-squared color error. Epoch
// MSE must not increase beyond tolerance; a breach halves the learning rate
// and repeats the epoch (bounded by max_lr_halvings per fit).
FitResult fit_student(const PairDataset& dataset, const FitOptions& options = {},
                      const Palette& palette = Palette::simulator_default());

void save_checkpoints(const FitResult& fit, const std::string& path);
std::vector<Checkpoint> load_checkpoints(const std::string& path,
                                         const Palette& palette = Palette::simulator_default());

// --- Frechet feature distance --------------------------------------------------

constexpr int kFeatureDim = 30;

// Per channel (R,G,B): mean, stddev, 8-bin normalized histogram, on a [0,1]
// scale.
Eigen::VectorXd feature_vector(const Image& image);

struct FrechetStats {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov; // symmetric PSD after the epsilon ridge

    static FrechetStats from_features(const std::vector<Eigen::VectorXd>& features,
                                      double epsilon = 1e-6);
    static FrechetStats from_moments(Eigen::VectorXd mean, Eigen::MatrixXd cov,
                                     double epsilon = 1e-6);
};

// ||mu_a - mu_b||^2 + Tr(Sa + Sb - 2 (Sa Sb)^(1/2)), square root taken via
// symmetric eigendecomposition of the symmetrized product.
double frechet_distance(const FrechetStats& a, const FrechetStats& b);

// Applies each checkpoint to the holdout originals and picks the one whose
// output feature Gaussian is closest to the teacher outputs'. Ties go to the
// earliest epoch; fd_to_teacher is filled in on every checkpoint.
std::size_t select_checkpoint(std::vector<Checkpoint>& checkpoints,
                              const std::vector<Image>& teacher_outputs,
                              const std::vector<Image>& holdout_originals);

// Single-checkpoint file, what a campaign's strategy=student loads.
void save_selected_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_selected_checkpoint(const std::string& path,
                                    const Palette& palette = Palette::simulator_default());

} // namespace adstest
