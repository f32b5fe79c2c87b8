#include "core/segment.hpp"

#include "util/errors.hpp"

#include <algorithm>
#include <atomic>
#include <limits>

namespace adstest {

namespace {

// Rendered and augmented frames draw from small color sets, so memoizing
// color -> class dominates. The cache is thread_local (instances stay
// shareable across threads) and tagged per instance so two segmenters never
// see each other's entries.
constexpr std::size_t kCacheBits = 16;
constexpr std::size_t kCacheSize = std::size_t(1) << kCacheBits;

struct ClassifyCache {
    std::vector<std::uint64_t> keys = std::vector<std::uint64_t>(kCacheSize, ~std::uint64_t(0));
    std::vector<std::uint8_t> vals = std::vector<std::uint8_t>(kCacheSize, 0);
};

thread_local ClassifyCache t_cache;

std::uint32_t next_instance_tag() {
    static std::atomic<std::uint32_t> counter{1};
    return counter.fetch_add(1, std::memory_order_relaxed);
}

} // namespace

SemanticMask segment_palette(const Image& image, const Palette& palette) {
    if (palette.size() == 0) throw InvalidArgument("segment_palette: empty palette");
    std::vector<std::pair<std::uint8_t, Rgb>> protos;
    protos.reserve(palette.size());
    for (const auto& [id, color] : palette.entries()) protos.emplace_back(id, color);
    return PrototypeSegmenter(std::move(protos)).segment(image);
}

PrototypeSegmenter::PrototypeSegmenter(std::vector<std::pair<std::uint8_t, Rgb>> prototypes)
    : prototypes_(std::move(prototypes)), tag_(next_instance_tag()) {
    if (prototypes_.empty()) throw InvalidArgument("PrototypeSegmenter: no prototypes");
    // Sorting by class id makes the lowest-id tie rule fall out of the scan
    // order, independent of construction order.
    std::stable_sort(prototypes_.begin(), prototypes_.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [id, color] : prototypes_) class_name(id);
}

std::uint8_t PrototypeSegmenter::classify(Rgb color) const {
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    std::uint8_t best_id = prototypes_.front().first;
    for (const auto& [id, proto] : prototypes_) {
        std::int64_t d = sq_dist(color, proto);
        if (d < best) {
            best = d;
            best_id = id;
        }
    }
    return best_id;
}

SemanticMask PrototypeSegmenter::segment(const Image& image) const {
    ClassifyCache& cache = t_cache;
    SemanticMask mask(image.width(), image.height());
    const auto& px = image.pixels();
    auto& out = mask.classes();
    const std::size_t n = mask.pixel_count();
    const std::uint64_t tag = std::uint64_t(tag_) << 24;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t key = tag | (std::uint32_t(px[i * 3]) << 16) |
                            (std::uint32_t(px[i * 3 + 1]) << 8) | px[i * 3 + 2];
        std::size_t slot = (key * 0x9e3779b97f4a7c15ULL) >> (64 - kCacheBits);
        if (cache.keys[slot] == key) {
            out[i] = cache.vals[slot];
        } else {
            std::uint8_t id = classify({px[i * 3], px[i * 3 + 1], px[i * 3 + 2]});
            cache.keys[slot] = key;
            cache.vals[slot] = id;
            out[i] = id;
        }
    }
    return mask;
}

} // namespace adstest
