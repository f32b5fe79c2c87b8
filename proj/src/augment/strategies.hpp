#pragma once

#include "augment/domain.hpp"
#include "sim/world.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace adstest {

enum class Strategy { none, instruction, inpaint, refine, student, remote };

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

struct AugmentParams {
    double text_guidance = 10.0;
    double image_guidance = 2.0;
    double noise_level = 0.5;      // nu, refine only
    double corrupt_base_prob = 0.0;
    std::uint64_t seed = 0;
};

struct AugmentationResult {
    std::vector<Image> images;
    double elapsed_ms = 0.0;
    std::uint64_t seed_used = 0;
    int retries = 0;
    std::optional<bool> gt_valid;             // mocks only
    std::optional<double> server_elapsed_ms;  // remote only
};

// The set of classes an inpainting pass must leave byte-identical.
using PreservedClasses = std::set<std::uint8_t>;

// The three strategy mocks. All are pure functions of
// (frame, domain, params, params.seed); corruption is geometric (shear or
// road-border erosion) so a mask-based validator can actually detect it.
AugmentationResult augment_instruction(const Frame& frame, const DomainSpec& domain,
                                       const AugmentParams& params);
AugmentationResult augment_inpaint(const Frame& frame, const DomainSpec& domain,
                                   const AugmentParams& params, const PreservedClasses& preserved);
AugmentationResult augment_refine(const Frame& frame, const DomainSpec& domain,
                                  const AugmentParams& params, const PreservedClasses& preserved);

// Corruption probability of the instruction mock for given guidance scales.
double instruction_corrupt_prob(const AugmentParams& params);

// Expected pixel colors per class for every generation path of a domain at
// the given params, the prototype model a campaign validator segments with.
std::vector<std::pair<std::uint8_t, Rgb>> domain_prototypes(const Palette& palette,
                                                            const DomainSpec& domain,
                                                            const AugmentParams& params);

} // namespace adstest
