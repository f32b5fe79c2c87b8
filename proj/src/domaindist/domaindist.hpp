#pragma once

#include "core/image.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace adstest {

using nlohmann::json;

// Linear autoencoder (PCA) over downsampled grayscale frames; reconstruction
// error orders augmented domains by distance from the training distribution.
struct DistanceModel {
    Eigen::MatrixXd components; // k x D, orthonormal rows
    Eigen::VectorXd mean;       // D
    int down_width = 40;
    int down_height = 20;

    json to_json() const;
    static DistanceModel from_json(const json& j);
};

Eigen::VectorXd downsample_gray(const Image& image, int down_width = 40, int down_height = 20);

DistanceModel fit_distance_model(const std::vector<Image>& training_images, int k);

double reconstruction_error(const DistanceModel& model, const Image& image);

enum class DomainCategory { in_distribution, in_between, out_of_distribution };
const char* category_name(DomainCategory c);

struct DomainScore {
    std::string domain;
    double mean_error = 0.0;
    int n_samples = 0;
};

// Sort ascending by error, split into contiguous tertiles (earlier groups
// take the remainders); ties keep input order.
std::map<std::string, DomainCategory> categorize_domains(const std::vector<DomainScore>& scores);

std::string scores_to_csv(const std::vector<DomainScore>& scores,
                          const std::map<std::string, DomainCategory>& categories);

} // namespace adstest
