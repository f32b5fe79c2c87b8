#include "domaindist/domaindist.hpp"

#include "util/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace adstest {

Eigen::VectorXd downsample_gray(const Image& image, int down_width, int down_height) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(down_width) * down_height);
    const int w = image.width(), h = image.height();
    for (int r = 0; r < down_height; ++r) {
        int y0 = static_cast<int>(static_cast<long>(r) * h / down_height);
        int y1 = std::max(y0 + 1, static_cast<int>(static_cast<long>(r + 1) * h / down_height));
        for (int c = 0; c < down_width; ++c) {
            int x0 = static_cast<int>(static_cast<long>(c) * w / down_width);
            int x1 = std::max(x0 + 1, static_cast<int>(static_cast<long>(c + 1) * w / down_width));
            double sum = 0.0;
            for (int y = y0; y < y1 && y < h; ++y) {
                for (int x = x0; x < x1 && x < w; ++x) {
                    Rgb p = image.at(x, y);
                    sum += (p.r + p.g + p.b) / 3.0;
                }
            }
            int cells = std::max(1, (std::min(y1, h) - y0) * (std::min(x1, w) - x0));
            out[static_cast<Eigen::Index>(r) * down_width + c] = sum / cells / 255.0;
        }
    }
    return out;
}

DistanceModel fit_distance_model(const std::vector<Image>& training_images, int k) {
    if (k < 0) throw InvalidArgument("fit_distance_model: k must be >= 0");
    if (static_cast<int>(training_images.size()) < std::max(k, 1))
        throw InvalidArgument("fit_distance_model: need at least k (and one) training images");

    DistanceModel model;
    const Eigen::Index dim = static_cast<Eigen::Index>(model.down_width) * model.down_height;
    Eigen::MatrixXd data(training_images.size(), dim);
    for (std::size_t i = 0; i < training_images.size(); ++i)
        data.row(static_cast<Eigen::Index>(i)) =
            downsample_gray(training_images[i], model.down_width, model.down_height).transpose();

    model.mean = data.colwise().mean();
    data.rowwise() -= model.mean.transpose();

    if (k == 0) {
        model.components = Eigen::MatrixXd(0, dim);
        return model;
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(data, Eigen::ComputeThinV);
    model.components = svd.matrixV().leftCols(k).transpose();
    return model;
}

double reconstruction_error(const DistanceModel& model, const Image& image) {
    Eigen::VectorXd x = downsample_gray(image, model.down_width, model.down_height);
    Eigen::VectorXd centered = x - model.mean;
    Eigen::VectorXd residual = centered;
    if (model.components.rows() > 0)
        residual -= model.components.transpose() * (model.components * centered);
    return residual.squaredNorm() / static_cast<double>(x.size());
}

const char* category_name(DomainCategory c) {
    switch (c) {
        case DomainCategory::in_distribution: return "in_distribution";
        case DomainCategory::in_between: return "in_between";
        case DomainCategory::out_of_distribution: return "out_of_distribution";
    }
    throw InvalidArgument("bad category");
}

std::map<std::string, DomainCategory> categorize_domains(const std::vector<DomainScore>& scores) {
    if (scores.size() < 3) throw InvalidArgument("categorize_domains: need at least 3 domains");
    std::vector<DomainScore> sorted = scores;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const DomainScore& a, const DomainScore& b) {
                         return a.mean_error < b.mean_error;
                     });
    const std::size_t n = sorted.size();
    const std::size_t g1 = (n + 2) / 3;             // ceil(n/3)
    const std::size_t g2 = (n - g1 + 1) / 2;        // ceil((n - g1)/2)
    std::map<std::string, DomainCategory> out;
    for (std::size_t i = 0; i < n; ++i) {
        DomainCategory cat = i < g1                ? DomainCategory::in_distribution
                             : i < g1 + g2         ? DomainCategory::in_between
                                                   : DomainCategory::out_of_distribution;
        out[sorted[i].domain] = cat;
    }
    return out;
}

std::string scores_to_csv(const std::vector<DomainScore>& scores,
                          const std::map<std::string, DomainCategory>& categories) {
    std::ostringstream os;
    os << "domain,mean_reconstruction_error,n_samples,category\n";
    for (const auto& s : scores) {
        auto it = categories.find(s.domain);
        os << s.domain << "," << s.mean_error << "," << s.n_samples << ","
           << (it != categories.end() ? category_name(it->second) : "") << "\n";
    }
    return os.str();
}

json DistanceModel::to_json() const {
    json comps = json::array();
    for (Eigen::Index i = 0; i < components.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < components.cols(); ++j) row.push_back(components(i, j));
        comps.push_back(row);
    }
    json mean_arr = json::array();
    for (Eigen::Index j = 0; j < mean.size(); ++j) mean_arr.push_back(mean[j]);
    return json{{"down_width", down_width},
                {"down_height", down_height},
                {"mean", mean_arr},
                {"components", comps}};
}

DistanceModel DistanceModel::from_json(const json& j) {
    DistanceModel model;
    model.down_width = j.at("down_width").get<int>();
    model.down_height = j.at("down_height").get<int>();
    const auto& mean_arr = j.at("mean");
    model.mean.resize(static_cast<Eigen::Index>(mean_arr.size()));
    for (Eigen::Index i = 0; i < model.mean.size(); ++i) model.mean[i] = mean_arr[i].get<double>();
    const auto& comps = j.at("components");
    model.components.resize(static_cast<Eigen::Index>(comps.size()), model.mean.size());
    for (Eigen::Index i = 0; i < model.components.rows(); ++i) {
        const auto& row = comps[i];
        if (static_cast<Eigen::Index>(row.size()) != model.mean.size())
            throw CodecError("distance model: component row length mismatch");
        for (Eigen::Index c = 0; c < model.components.cols(); ++c)
            model.components(i, c) = row[c].get<double>();
    }
    return model;
}

} // namespace adstest
