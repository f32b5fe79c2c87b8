#include "distill/distill.hpp"

#include "core/pnm.hpp"
#include "util/errors.hpp"
#include "util/log.hpp"
#include "util/rng.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace adstest {

namespace fs = std::filesystem;

namespace {

std::string pad_id(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06zu", i);
    return buf;
}

} // namespace

void write_dataset(const PairDataset& ds, const std::string& dir) {
    if (ds.size() == 0) throw InvalidArgument("write_dataset: empty dataset");
    fs::create_directories(dir);
    json entries = json::array();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const std::string& id = ds.entries[i].id;
        write_ppm(dir + "/" + id + ".ppm", ds.originals[i]);
        write_pgm(dir + "/" + id + ".mask.pgm", ds.masks[i]);
        write_ppm(dir + "/" + id + ".aug.ppm", ds.augmented[i]);
        entries.push_back({{"id", id},
                           {"gt_valid", ds.entries[i].gt_valid},
                           {"seed_used", ds.entries[i].seed_used},
                           {"retries", ds.entries[i].retries}});
    }
    json manifest{{"domain", ds.domain}, {"strategy", ds.strategy}, {"seed", ds.seed},
                  {"entries", entries}};
    std::ofstream out(dir + "/manifest.json", std::ios::trunc);
    if (!out) throw IoError("cannot write manifest in " + dir);
    out << manifest.dump(2) << "\n";
}

PairDataset load_dataset(const std::string& dir) {
    std::ifstream in(dir + "/manifest.json");
    if (!in) throw IoError("no manifest.json in " + dir);
    json manifest = json::parse(in);

    PairDataset ds;
    ds.domain = manifest.value("domain", "");
    ds.strategy = manifest.value("strategy", "");
    ds.seed = manifest.value("seed", std::uint64_t{0});
    for (const auto& e : manifest.at("entries")) {
        PairEntry entry;
        entry.id = e.at("id").get<std::string>();
        entry.gt_valid = e.value("gt_valid", true);
        entry.seed_used = e.value("seed_used", std::uint64_t{0});
        entry.retries = e.value("retries", 0);
        ds.originals.push_back(read_ppm(dir + "/" + entry.id + ".ppm"));
        ds.masks.push_back(read_pgm(dir + "/" + entry.id + ".mask.pgm"));
        ds.augmented.push_back(read_ppm(dir + "/" + entry.id + ".aug.ppm"));
        ds.entries.push_back(std::move(entry));
    }
    if (ds.size() == 0) throw IoError("dataset in " + dir + " is empty");
    return ds;
}

PairDataset collect_pairs(World& world, Agent& driver, const AugmentFn& augment,
                          const ValidatorConfig& validator, const std::string& domain,
                          const std::string& strategy, const CollectOptions& options) {
    if (options.n < 1) throw InvalidArgument("collect_pairs: n must be >= 1");
    PairDataset ds;
    ds.domain = domain;
    ds.strategy = strategy;
    ds.seed = options.seed;

    world.reset_detector();
    VehicleState state = world.initial_state();
    const long max_steps = 50L * options.n + 200;
    for (long step = 0; static_cast<int>(ds.size()) < options.n; ++step) {
        if (step >= max_steps)
            throw Error("collect_pairs: exhausted " + std::to_string(max_steps) +
                        " steps before collecting " + std::to_string(options.n) + " pairs");
        Frame frame = world.render(state, static_cast<std::uint64_t>(step));

        bool keep = false;
        Image augmented_front;
        PairEntry entry;
        entry.id = pad_id(ds.size());
        if (options.raw) {
            AugmentationResult result = augment(frame, mix_seed(options.seed, frame.id, 0));
            augmented_front = result.images.at(0);
            entry.gt_valid = result.gt_valid.value_or(true);
            entry.seed_used = result.seed_used;
            keep = true;
        } else {
            ValidatedAugmentation validated = augment_validated(frame, augment, options.seed, validator);
            if (!validated.fallback) {
                augmented_front = validated.result.images.at(0);
                entry.seed_used = validated.result.seed_used;
                entry.retries = validated.retries;
                keep = true;
            }
        }
        if (keep) {
            ds.originals.push_back(frame.views.at(0));
            ds.masks.push_back(frame.masks.at(0));
            ds.augmented.push_back(std::move(augmented_front));
            ds.entries.push_back(std::move(entry));
        }

        ControlCommand cmd = driver.act(frame);
        VehicleState next = world.step(state, cmd);
        auto events = world.detect_events(state, next, step);
        state = events.empty() ? next : world.reset_after_event(next);
    }
    return ds;
}

// --- student -------------------------------------------------------------------

StudentTransform::StudentTransform(Palette palette)
    : palette_(palette), segmenter_(std::move(palette)) {}

const StudentTransform::ClassAffine& StudentTransform::map_for(std::uint8_t class_id) const {
    static const ClassAffine identity;
    auto it = maps_.find(class_id);
    return it == maps_.end() ? identity : it->second;
}

void StudentTransform::set_map(std::uint8_t class_id, ClassAffine affine) {
    if (!affine.m.allFinite() || !affine.b.allFinite())
        throw InvalidArgument("student coefficients must be finite");
    maps_[class_id] = std::move(affine);
}

Image StudentTransform::apply(const Image& image) const {
    return apply(image, segmenter_.segment(image));
}

Image StudentTransform::apply(const Image& image, const SemanticMask& mask) const {
    if (mask.width() != image.width() || mask.height() != image.height())
        throw InvalidArgument("apply: mask dims differ from image");
    Image out(image.width(), image.height());
    const auto& px = image.pixels();
    const auto& ids = mask.classes();
    auto& dst = out.pixels();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const ClassAffine& map = map_for(ids[i]);
        Eigen::Vector3d x(px[i * 3] / 255.0, px[i * 3 + 1] / 255.0, px[i * 3 + 2] / 255.0);
        Eigen::Vector3d y = map.m * x + map.b;
        for (int c = 0; c < 3; ++c)
            dst[i * 3 + c] =
                static_cast<std::uint8_t>(std::clamp(std::lround(y[c] * 255.0), 0L, 255L));
    }
    return out;
}

json StudentTransform::to_json() const {
    json classes = json::object();
    for (const auto& [id, map] : maps_) {
        json coeffs = json::array();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) coeffs.push_back(map.m(i, j));
        for (int i = 0; i < 3; ++i) coeffs.push_back(map.b(i));
        classes[std::to_string(id)] = coeffs;
    }
    return json{{"classes", classes}};
}

StudentTransform StudentTransform::from_json(const json& j, Palette palette) {
    StudentTransform st(std::move(palette));
    for (const auto& [key, coeffs] : j.at("classes").items()) {
        if (coeffs.size() != 12) throw CodecError("student class entry needs 12 coefficients");
        ClassAffine map;
        for (int i = 0; i < 3; ++i)
            for (int jj = 0; jj < 3; ++jj) map.m(i, jj) = coeffs[i * 3 + jj].get<double>();
        for (int i = 0; i < 3; ++i) map.b(i) = coeffs[9 + i].get<double>();
        st.set_map(static_cast<std::uint8_t>(std::stoi(key)), std::move(map));
    }
    return st;
}

namespace {

// Sufficient statistics of one image pair per class; gradients and MSE of the
// per-class quadratic loss are exact functions of these, so epochs never need
// to revisit pixels.
struct ClassStats {
    double n = 0;
    Eigen::Vector3d sx = Eigen::Vector3d::Zero();
    Eigen::Vector3d sy = Eigen::Vector3d::Zero();
    Eigen::Matrix3d sxx = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d syx = Eigen::Matrix3d::Zero(); // sum of y x^T
    double syy = 0;
};

using ImageStats = std::map<std::uint8_t, ClassStats>;

ImageStats pair_stats(const Image& original, const SemanticMask& mask, const Image& augmented) {
    if (original.pixel_count() != augmented.pixel_count() ||
        original.pixel_count() != mask.pixel_count())
        throw InvalidArgument("pair images/mask must share dimensions");
    ImageStats stats;
    const auto& xs = original.pixels();
    const auto& ys = augmented.pixels();
    const auto& ids = mask.classes();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        ClassStats& cs = stats[ids[i]];
        Eigen::Vector3d x(xs[i * 3] / 255.0, xs[i * 3 + 1] / 255.0, xs[i * 3 + 2] / 255.0);
        Eigen::Vector3d y(ys[i * 3] / 255.0, ys[i * 3 + 1] / 255.0, ys[i * 3 + 2] / 255.0);
        cs.n += 1;
        cs.sx += x;
        cs.sy += y;
        cs.sxx += x * x.transpose();
        cs.syx += y * x.transpose();
        cs.syy += y.squaredNorm();
    }
    return stats;
}

double dataset_mse(const std::vector<ImageStats>& stats,
                   const std::map<std::uint8_t, StudentTransform::ClassAffine>& maps) {
    double total_err = 0.0, total_n = 0.0;
    for (const auto& img : stats) {
        for (const auto& [id, cs] : img) {
            const auto& map = maps.at(id);
            const Eigen::Matrix3d& m = map.m;
            const Eigen::Vector3d& b = map.b;
            double err = (m * cs.sxx * m.transpose()).trace() + 2.0 * b.dot(m * cs.sx) +
                         cs.n * b.squaredNorm() - 2.0 * (m * cs.syx.transpose()).trace() -
                         2.0 * b.dot(cs.sy) + cs.syy;
            total_err += err;
            total_n += cs.n;
        }
    }
    return total_n > 0 ? total_err / total_n : 0.0;
}

} // namespace

FitResult fit_student(const PairDataset& dataset, const FitOptions& options, const Palette& palette) {
    if (dataset.size() == 0) throw InvalidArgument("fit_student: empty dataset");
    if (options.n_epochs < 1 || options.batch_size < 1)
        throw InvalidArgument("fit_student: bad options");

    std::vector<ImageStats> stats;
    stats.reserve(dataset.size());
    std::map<std::uint8_t, StudentTransform::ClassAffine> maps;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        stats.push_back(pair_stats(dataset.originals[i], dataset.masks[i], dataset.augmented[i]));
        for (const auto& [id, cs] : stats.back()) maps.emplace(id, StudentTransform::ClassAffine{});
    }

    FitResult fit;
    double lr = options.learning_rate;
    double prev_mse = dataset_mse(stats, maps);
    int halvings_used = 0;

    for (int epoch = 1; epoch <= options.n_epochs; ++epoch) {
        auto epoch_start = maps;
        while (true) {
            for (std::size_t begin = 0; begin < stats.size(); begin += options.batch_size) {
                std::size_t end = std::min(begin + options.batch_size, stats.size());
                std::map<std::uint8_t, ClassStats> batch;
                for (std::size_t i = begin; i < end; ++i) {
                    for (const auto& [id, cs] : stats[i]) {
                        ClassStats& acc = batch[id];
                        acc.n += cs.n;
                        acc.sx += cs.sx;
                        acc.sy += cs.sy;
                        acc.sxx += cs.sxx;
                        acc.syx += cs.syx;
                        acc.syy += cs.syy;
                    }
                }
                for (const auto& [id, cs] : batch) {
                    if (cs.n == 0) continue;
                    auto& map = maps[id];
                    Eigen::Matrix3d grad_m =
                        (2.0 / cs.n) *
                        (map.m * cs.sxx + map.b * cs.sx.transpose() - cs.syx);
                    Eigen::Vector3d grad_b =
                        (2.0 / cs.n) * (map.m * cs.sx + cs.n * map.b - cs.sy);
                    map.m -= lr * grad_m;
                    map.b -= lr * grad_b;
                }
            }
            double mse = dataset_mse(stats, maps);
            if (mse > prev_mse + options.mono_tolerance && halvings_used < options.max_lr_halvings) {
                maps = epoch_start;
                lr /= 2.0;
                ++halvings_used;
                log::debug("epoch " + std::to_string(epoch) + " MSE rose; learning rate halved to " +
                           std::to_string(lr));
                continue;
            }
            if (mse > prev_mse + options.mono_tolerance)
                log::warn("epoch " + std::to_string(epoch) +
                          " MSE still rising after max halvings; accepting");
            Checkpoint ck;
            ck.epoch = epoch;
            ck.train_mse = mse;
            StudentTransform student(palette);
            for (const auto& [id, map] : maps) student.set_map(id, map);
            ck.student = std::move(student);
            fit.checkpoints.push_back(std::move(ck));
            prev_mse = mse;
            break;
        }
    }
    fit.lr_halvings = halvings_used;
    fit.final_learning_rate = lr;
    return fit;
}

void save_checkpoints(const FitResult& fit, const std::string& path) {
    json arr = json::array();
    for (const auto& ck : fit.checkpoints) {
        json j{{"epoch", ck.epoch}, {"mse", ck.train_mse}, {"student", ck.student.to_json()}};
        if (ck.fd_to_teacher) j["fd_to_teacher"] = *ck.fd_to_teacher;
        arr.push_back(j);
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoints: " + path);
    out << json{{"checkpoints", arr},
                {"lr_halvings", fit.lr_halvings},
                {"final_learning_rate", fit.final_learning_rate}}
               .dump(2)
        << "\n";
}

std::vector<Checkpoint> load_checkpoints(const std::string& path, const Palette& palette) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read checkpoints: " + path);
    json root = json::parse(in);
    std::vector<Checkpoint> out;
    for (const auto& j : root.at("checkpoints")) {
        Checkpoint ck;
        ck.epoch = j.at("epoch").get<int>();
        ck.train_mse = j.at("mse").get<double>();
        ck.student = StudentTransform::from_json(j.at("student"), palette);
        if (j.contains("fd_to_teacher")) ck.fd_to_teacher = j["fd_to_teacher"].get<double>();
        out.push_back(std::move(ck));
    }
    if (out.empty()) throw CodecError("checkpoint file has no checkpoints: " + path);
    return out;
}

// --- Frechet -----------------------------------------------------------------

Eigen::VectorXd feature_vector(const Image& image) {
    Eigen::VectorXd f(kFeatureDim);
    const auto& px = image.pixels();
    const double n = static_cast<double>(image.pixel_count());
    for (int ch = 0; ch < 3; ++ch) {
        double sum = 0.0, sum_sq = 0.0;
        std::array<double, 8> hist{};
        for (std::size_t i = ch; i < px.size(); i += 3) {
            double v = px[i] / 255.0;
            sum += v;
            sum_sq += v * v;
            hist[px[i] >> 5] += 1.0;
        }
        double mean = sum / n;
        double var = std::max(0.0, sum_sq / n - mean * mean);
        f[ch * 10] = mean;
        f[ch * 10 + 1] = std::sqrt(var);
        for (int b = 0; b < 8; ++b) f[ch * 10 + 2 + b] = hist[b] / n;
    }
    return f;
}

FrechetStats FrechetStats::from_features(const std::vector<Eigen::VectorXd>& features,
                                         double epsilon) {
    if (features.empty()) throw InvalidArgument("FrechetStats: no features");
    const Eigen::Index dim = features.front().size();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    for (const auto& f : features) {
        if (f.size() != dim) throw InvalidArgument("FrechetStats: inconsistent feature dims");
        mean += f;
    }
    mean /= static_cast<double>(features.size());

    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& f : features) {
        Eigen::VectorXd d = f - mean;
        cov += d * d.transpose();
    }
    if (features.size() > 1) cov /= static_cast<double>(features.size() - 1);
    return from_moments(std::move(mean), std::move(cov), epsilon);
}

FrechetStats FrechetStats::from_moments(Eigen::VectorXd mean, Eigen::MatrixXd cov, double epsilon) {
    if (!mean.allFinite() || !cov.allFinite())
        throw InvalidArgument("FrechetStats: non-finite moments");
    if (cov.rows() != cov.cols() || cov.rows() != mean.size())
        throw InvalidArgument("FrechetStats: dimension mismatch");
    FrechetStats s;
    s.mean = std::move(mean);
    s.cov = 0.5 * (cov + cov.transpose()) +
            epsilon * Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
    return s;
}

double frechet_distance(const FrechetStats& a, const FrechetStats& b) {
    if (a.mean.size() != b.mean.size()) throw InvalidArgument("frechet_distance: dims differ");
    if (!a.mean.allFinite() || !b.mean.allFinite() || !a.cov.allFinite() || !b.cov.allFinite())
        throw InvalidArgument("frechet_distance: non-finite inputs");

    Eigen::MatrixXd product = a.cov * b.cov;
    Eigen::MatrixXd sym = 0.5 * (product + product.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    if (eig.info() != Eigen::Success) throw Error("frechet_distance: eigendecomposition failed");

    double tr_sqrt = 0.0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
        double lambda = eig.eigenvalues()[i];
        if (lambda < -1e-8)
            throw Error("frechet_distance: strongly negative eigenvalue " + std::to_string(lambda));
        tr_sqrt += std::sqrt(std::max(0.0, lambda));
    }
    double d = (a.mean - b.mean).squaredNorm() + a.cov.trace() + b.cov.trace() - 2.0 * tr_sqrt;
    return std::max(0.0, d);
}

std::size_t select_checkpoint(std::vector<Checkpoint>& checkpoints,
                              const std::vector<Image>& teacher_outputs,
                              const std::vector<Image>& holdout_originals) {
    if (checkpoints.empty()) throw InvalidArgument("select_checkpoint: no checkpoints");
    if (holdout_originals.empty() || teacher_outputs.empty())
        throw InvalidArgument("select_checkpoint: empty holdout");

    std::vector<Eigen::VectorXd> teacher_features;
    teacher_features.reserve(teacher_outputs.size());
    for (const auto& img : teacher_outputs) teacher_features.push_back(feature_vector(img));
    FrechetStats teacher_stats = FrechetStats::from_features(teacher_features);

    std::size_t best = 0;
    double best_fd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        std::vector<Eigen::VectorXd> features;
        features.reserve(holdout_originals.size());
        for (const auto& img : holdout_originals)
            features.push_back(feature_vector(checkpoints[i].student.apply(img)));
        double fd = frechet_distance(FrechetStats::from_features(features), teacher_stats);
        checkpoints[i].fd_to_teacher = fd;
        if (fd < best_fd) {
            best_fd = fd;
            best = i;
        }
    }
    return best;
}

} // namespace adstest
