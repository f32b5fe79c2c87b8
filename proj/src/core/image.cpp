#include "core/image.hpp"

#include "util/errors.hpp"

namespace adstest {

Image::Image(int width, int height) : Image(width, height, Rgb{0, 0, 0}) {}

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw InvalidArgument("image dims must be >= 1");
    pixels_.resize(std::size_t(width) * height * 3);
    for (std::size_t i = 0; i < pixels_.size(); i += 3) {
        pixels_[i] = fill.r;
        pixels_[i + 1] = fill.g;
        pixels_[i + 2] = fill.b;
    }
}

SemanticMask::SemanticMask(int width, int height, std::uint8_t fill) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw InvalidArgument("mask dims must be >= 1");
    classes_.assign(std::size_t(width) * height, fill);
}

const char* class_name(std::uint8_t id) {
    switch (id) {
        case cls::background: return "background";
        case cls::road: return "road";
        case cls::pedestrian: return "pedestrian";
        case cls::vehicle: return "vehicle";
        case cls::traffic_sign: return "traffic_sign";
        case cls::traffic_light: return "traffic_light";
        default: throw InvalidArgument("unknown class id " + std::to_string(id));
    }
}

std::uint8_t class_id_from_name(const std::string& name) {
    for (std::uint8_t id = 0; id < cls::count; ++id) {
        if (name == class_name(id)) return id;
    }
    throw InvalidArgument("unknown class name '" + name + "'");
}

Palette::Palette(std::map<std::uint8_t, Rgb> entries) : entries_(std::move(entries)) {
    if (!entries_.count(cls::background) || !entries_.count(cls::road))
        throw InvalidArgument("palette must declare background and road");
    for (auto it = entries_.begin(); it != entries_.end(); ++it) {
        class_name(it->first); // validates the id
        for (auto jt = std::next(it); jt != entries_.end(); ++jt) {
            if (it->second == jt->second)
                throw InvalidArgument("palette colors must be pairwise distinct");
        }
    }
}

Palette Palette::simulator_default() {
    return Palette({
        {cls::background, {70, 120, 50}},
        {cls::road, {150, 150, 150}},
        {cls::pedestrian, {220, 80, 60}},
        {cls::vehicle, {50, 90, 180}},
        {cls::traffic_sign, {230, 200, 60}},
        {cls::traffic_light, {160, 30, 190}},
    });
}

Rgb Palette::color(std::uint8_t class_id) const {
    auto it = entries_.find(class_id);
    if (it == entries_.end())
        throw InvalidArgument("palette has no entry for class " + std::to_string(class_id));
    return it->second;
}

} // namespace adstest
