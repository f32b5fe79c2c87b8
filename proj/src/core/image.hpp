#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace adstest {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;

    bool operator==(const Rgb&) const = default;
};

inline double luminance(Rgb c) { return 0.299 * c.r + 0.587 * c.g + 0.114 * c.b; }

inline std::int64_t sq_dist(Rgb a, Rgb b) {
    std::int64_t dr = std::int64_t(a.r) - b.r;
    std::int64_t dg = std::int64_t(a.g) - b.g;
    std::int64_t db = std::int64_t(a.b) - b.b;
    return dr * dr + dg * dg + db * db;
}

// 8-bit RGB, row-major, top-left origin.
class Image {
public:
    Image() = default;
    Image(int width, int height);
    Image(int width, int height, Rgb fill);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return std::size_t(width_) * height_; }

    Rgb at(int x, int y) const {
        std::size_t i = (std::size_t(y) * width_ + x) * 3;
        return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
    }
    void set(int x, int y, Rgb c) {
        std::size_t i = (std::size_t(y) * width_ + x) * 3;
        pixels_[i] = c.r;
        pixels_[i + 1] = c.g;
        pixels_[i + 2] = c.b;
    }

    const std::vector<std::uint8_t>& pixels() const { return pixels_; }
    std::vector<std::uint8_t>& pixels() { return pixels_; }

    bool operator==(const Image&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

// 8-bit class indices, same layout as Image.
class SemanticMask {
public:
    SemanticMask() = default;
    SemanticMask(int width, int height, std::uint8_t fill = 0);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return std::size_t(width_) * height_; }

    std::uint8_t at(int x, int y) const { return classes_[std::size_t(y) * width_ + x]; }
    void set(int x, int y, std::uint8_t c) { classes_[std::size_t(y) * width_ + x] = c; }

    const std::vector<std::uint8_t>& classes() const { return classes_; }
    std::vector<std::uint8_t>& classes() { return classes_; }

    bool operator==(const SemanticMask&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> classes_;
};

// Fixed class registry. background and road are always present; the four
// urban classes matter only in urban scenarios but keep stable ids everywhere.
namespace cls {
constexpr std::uint8_t background = 0;
constexpr std::uint8_t road = 1;
constexpr std::uint8_t pedestrian = 2;
constexpr std::uint8_t vehicle = 3;
constexpr std::uint8_t traffic_sign = 4;
constexpr std::uint8_t traffic_light = 5;
constexpr int count = 6;
} // namespace cls

const char* class_name(std::uint8_t id);
std::uint8_t class_id_from_name(const std::string& name); // throws InvalidArgument

// ClassId -> reference color. One entry per class, colors pairwise distinct.
class Palette {
public:
    Palette() = default;
    explicit Palette(std::map<std::uint8_t, Rgb> entries);

    static Palette simulator_default();

    Rgb color(std::uint8_t class_id) const;
    bool contains(std::uint8_t class_id) const { return entries_.count(class_id) > 0; }
    const std::map<std::uint8_t, Rgb>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::uint8_t, Rgb> entries_;
};

} // namespace adstest
