#pragma once

#include "core/image.hpp"

#include <memory>
#include <vector>

namespace adstest {

// Image -> SemanticMask. Any conforming model can stand behind this; the
// palette matchers below are the desk-scale ones.
class Segmenter {
public:
    virtual ~Segmenter() = default;
    virtual SemanticMask segment(const Image& image) const = 0;
};

// Nearest palette color by squared RGB distance, ties to the lowest class id.
SemanticMask segment_palette(const Image& image, const Palette& palette);

class PaletteSegmenter final : public Segmenter {
public:
    explicit PaletteSegmenter(Palette palette) : palette_(std::move(palette)) {}
    SemanticMask segment(const Image& image) const override { return segment_palette(image, palette_); }

private:
    Palette palette_;
};

// Several reference colors per class; a pixel takes the class of the nearest
// prototype (ties to the lowest class id). Campaigns use this with the
// expected post-augmentation colors of a domain so validation keeps working
// after recoloring, the way the fine-tuned segmentation model it stands in
// for would.
class PrototypeSegmenter final : public Segmenter {
public:
    // prototypes[i] = (class_id, color); multiple rows per class allowed.
    explicit PrototypeSegmenter(std::vector<std::pair<std::uint8_t, Rgb>> prototypes);

    SemanticMask segment(const Image& image) const override;
    std::uint8_t classify(Rgb color) const;

    const std::vector<std::pair<std::uint8_t, Rgb>>& prototypes() const { return prototypes_; }

private:
    std::vector<std::pair<std::uint8_t, Rgb>> prototypes_;
    std::uint32_t tag_;
};

} // namespace adstest
