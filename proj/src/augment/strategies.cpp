#include "augment/strategies.hpp"

#include "util/errors.hpp"
#include "util/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace adstest {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Separate decision / per-view jitter streams so that strategies sharing a
// seed also share their pixel noise (refine at nu=0 must equal inpaint).
constexpr std::uint64_t kDecisionStream = 0x8c5f2a0397b1d64bULL;
constexpr std::uint64_t kJitterStream = 0x11e7d3b85a29c4f7ULL;

std::uint8_t clamp_channel(long v) {
    return static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
}

Rgb jittered(Rgb base, SplitMix64& rng) {
    // +-8 per channel
    long jr = static_cast<long>(rng.next_below(17)) - 8;
    long jg = static_cast<long>(rng.next_below(17)) - 8;
    long jb = static_cast<long>(rng.next_below(17)) - 8;
    return {clamp_channel(base.r + jr), clamp_channel(base.g + jg), clamp_channel(base.b + jb)};
}

struct CorruptionPlan {
    bool corrupt = false;
    int shear_cols = 0;    // instruction: max horizontal displacement
    int shear_dir = 1;     // +1 right, -1 left
    int erode_cols = 0;    // inpaint/refine: per-side road erosion
};

CorruptionPlan draw_corruption(double prob, std::uint64_t seed) {
    SplitMix64 rng(mix_seed(seed, kDecisionStream));
    CorruptionPlan plan;
    double u = rng.next_unit();
    plan.corrupt = u < std::clamp(prob, 0.0, 1.0);
    plan.shear_cols = 10 + static_cast<int>(rng.next_below(31));      // 10..40
    plan.shear_dir = (rng.next() & 1) ? 1 : -1;
    plan.erode_cols = 6 + static_cast<int>(rng.next_below(9));        // 6..14
    return plan;
}

Image tone_map(const Image& in, const ToneTransform& tone) {
    Image out(in.width(), in.height());
    for (int y = 0; y < in.height(); ++y)
        for (int x = 0; x < in.width(); ++x) out.set(x, y, tone.apply(in.at(x, y)));
    return out;
}

// Shear rows progressively: row r displaced by round(max_cols * r/(h-1)),
// zero at the top, max at the bottom; revealed edge replicates the border.
void shear_rows(Image& img, int max_cols, int dir) {
    const int w = img.width(), h = img.height();
    std::vector<std::uint8_t> row(static_cast<std::size_t>(w) * 3);
    for (int r = 0; r < h; ++r) {
        int shift = h == 1 ? max_cols : static_cast<int>(std::lround(double(max_cols) * r / (h - 1)));
        shift *= dir;
        if (shift == 0) continue;
        for (int c = 0; c < w; ++c) {
            int src = std::clamp(c - shift, 0, w - 1);
            Rgb v = img.at(src, r);
            row[std::size_t(c) * 3] = v.r;
            row[std::size_t(c) * 3 + 1] = v.g;
            row[std::size_t(c) * 3 + 2] = v.b;
        }
        for (int c = 0; c < w; ++c)
            img.set(c, r, {row[std::size_t(c) * 3], row[std::size_t(c) * 3 + 1], row[std::size_t(c) * 3 + 2]});
    }
}

// Recolor the first/last `cols` columns of every road run so the painted road
// narrows; geometry change a road-mask comparison can catch.
void erode_road_borders(Image& img, const SemanticMask& mask, const DomainSpec& domain, int cols,
                        SplitMix64& rng) {
    const int w = img.width(), h = img.height();
    Rgb bg = domain.target(cls::background);
    for (int r = 0; r < h; ++r) {
        int c = 0;
        while (c < w) {
            if (mask.at(c, r) != cls::road) {
                ++c;
                continue;
            }
            int run_start = c;
            while (c < w && mask.at(c, r) == cls::road) ++c;
            int run_end = c; // exclusive
            int take = std::min(cols, (run_end - run_start + 1) / 2);
            for (int i = run_start; i < run_start + take; ++i) img.set(i, r, jittered(bg, rng));
            for (int i = run_end - take; i < run_end; ++i) img.set(i, r, jittered(bg, rng));
        }
    }
}

void require_masks(const Frame& frame) {
    if (frame.masks.size() != frame.views.size() || frame.views.empty())
        throw InvalidArgument("augmentation requires a ground-truth mask per view");
}

Image inpaint_view(const Image& view, const SemanticMask& mask, const DomainSpec& domain,
                   const PreservedClasses& preserved, SplitMix64& jitter_rng) {
    Image out(view.width(), view.height());
    for (int y = 0; y < view.height(); ++y) {
        for (int x = 0; x < view.width(); ++x) {
            std::uint8_t id = mask.at(x, y);
            if (preserved.count(id)) {
                out.set(x, y, view.at(x, y));
            } else {
                out.set(x, y, jittered(domain.target(id), jitter_rng));
            }
        }
    }
    return out;
}

// Pixels within Chebyshev distance 2 of a class boundary (a pixel whose
// 4-neighborhood contains another class).
std::vector<std::uint8_t> boundary_map(const SemanticMask& mask) {
    const int w = mask.width(), h = mask.height();
    std::vector<std::uint8_t> on_boundary(std::size_t(w) * h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint8_t id = mask.at(x, y);
            if ((x + 1 < w && mask.at(x + 1, y) != id) || (x > 0 && mask.at(x - 1, y) != id) ||
                (y + 1 < h && mask.at(x, y + 1) != id) || (y > 0 && mask.at(x, y - 1) != id))
                on_boundary[std::size_t(y) * w + x] = 1;
        }
    }
    std::vector<std::uint8_t> edge(std::size_t(w) * h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!on_boundary[std::size_t(y) * w + x]) continue;
            for (int dy = -2; dy <= 2; ++dy) {
                int yy = y + dy;
                if (yy < 0 || yy >= h) continue;
                for (int dx = -2; dx <= 2; ++dx) {
                    int xx = x + dx;
                    if (xx >= 0 && xx < w) edge[std::size_t(yy) * w + xx] = 1;
                }
            }
        }
    }
    return edge;
}

} // namespace

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::none: return "none";
        case Strategy::instruction: return "instruction";
        case Strategy::inpaint: return "inpaint";
        case Strategy::refine: return "refine";
        case Strategy::student: return "student";
        case Strategy::remote: return "remote";
    }
    throw InvalidArgument("bad strategy");
}

Strategy strategy_from_name(const std::string& name) {
    for (Strategy s : {Strategy::none, Strategy::instruction, Strategy::inpaint, Strategy::refine,
                       Strategy::student, Strategy::remote}) {
        if (name == strategy_name(s)) return s;
    }
    throw InvalidArgument("unknown strategy '" + name + "'");
}

double instruction_corrupt_prob(const AugmentParams& params) {
    double p = params.corrupt_base_prob * (params.text_guidance / 10.0) *
               (2.0 / std::max(params.image_guidance, 0.1));
    return std::clamp(p, 0.0, 1.0);
}

AugmentationResult augment_instruction(const Frame& frame, const DomainSpec& domain,
                                       const AugmentParams& params) {
    auto t0 = Clock::now();
    if (frame.views.empty()) throw InvalidArgument("augment_instruction: frame has no views");
    CorruptionPlan plan = draw_corruption(instruction_corrupt_prob(params), params.seed);

    AugmentationResult result;
    result.seed_used = params.seed;
    for (const Image& view : frame.views) {
        Image out = tone_map(view, domain.tone);
        if (plan.corrupt) shear_rows(out, plan.shear_cols, plan.shear_dir);
        result.images.push_back(std::move(out));
    }
    result.gt_valid = !plan.corrupt;
    result.elapsed_ms = elapsed_ms_since(t0);
    return result;
}

AugmentationResult augment_inpaint(const Frame& frame, const DomainSpec& domain,
                                   const AugmentParams& params, const PreservedClasses& preserved) {
    auto t0 = Clock::now();
    require_masks(frame);
    for (std::uint8_t id : preserved) class_name(id);
    CorruptionPlan plan = draw_corruption(params.corrupt_base_prob, params.seed);

    AugmentationResult result;
    result.seed_used = params.seed;
    for (std::size_t v = 0; v < frame.views.size(); ++v) {
        SplitMix64 jitter(mix_seed(params.seed, kJitterStream, v));
        Image out = inpaint_view(frame.views[v], frame.masks[v], domain, preserved, jitter);
        if (plan.corrupt) erode_road_borders(out, frame.masks[v], domain, plan.erode_cols, jitter);
        result.images.push_back(std::move(out));
    }
    result.gt_valid = !plan.corrupt;
    result.elapsed_ms = elapsed_ms_since(t0);
    return result;
}

AugmentationResult augment_refine(const Frame& frame, const DomainSpec& domain,
                                  const AugmentParams& params, const PreservedClasses& preserved) {
    auto t0 = Clock::now();
    require_masks(frame);
    const double nu = params.noise_level;
    if (nu < 0.0 || nu > 1.0) throw InvalidArgument("noise_level must be in [0, 1]");
    // Corruption odds scale with the removed noise: nothing blends in, nothing
    // can break.
    CorruptionPlan plan = draw_corruption(params.corrupt_base_prob * nu, params.seed);

    AugmentationResult result;
    result.seed_used = params.seed;
    for (std::size_t v = 0; v < frame.views.size(); ++v) {
        const Image& view = frame.views[v];
        const SemanticMask& mask = frame.masks[v];
        SplitMix64 jitter(mix_seed(params.seed, kJitterStream, v));
        Image out = inpaint_view(view, mask, domain, preserved, jitter);
        std::vector<std::uint8_t> edge = boundary_map(mask);
        for (int y = 0; y < view.height(); ++y) {
            for (int x = 0; x < view.width(); ++x) {
                double w = edge[std::size_t(y) * view.width() + x] ? nu / 4.0 : nu;
                if (w == 0.0) continue;
                auto toned = domain.tone.apply_raw(view.at(x, y));
                Rgb base = out.at(x, y);
                out.set(x, y, {clamp_channel(std::lround((1.0 - w) * base.r + w * toned[0])),
                               clamp_channel(std::lround((1.0 - w) * base.g + w * toned[1])),
                               clamp_channel(std::lround((1.0 - w) * base.b + w * toned[2]))});
            }
        }
        if (plan.corrupt) erode_road_borders(out, mask, domain, plan.erode_cols, jitter);
        result.images.push_back(std::move(out));
    }
    result.gt_valid = !plan.corrupt;
    result.elapsed_ms = elapsed_ms_since(t0);
    return result;
}

std::vector<std::pair<std::uint8_t, Rgb>> domain_prototypes(const Palette& palette,
                                                            const DomainSpec& domain,
                                                            const AugmentParams& params) {
    std::vector<std::pair<std::uint8_t, Rgb>> protos;
    auto blend = [](Rgb a, const std::array<double, 3>& b, double w) -> Rgb {
        return {clamp_channel(std::lround((1.0 - w) * a.r + w * b[0])),
                clamp_channel(std::lround((1.0 - w) * a.g + w * b[1])),
                clamp_channel(std::lround((1.0 - w) * a.b + w * b[2]))};
    };
    for (const auto& [id, orig] : palette.entries()) {
        Rgb target = domain.target(id);
        auto toned = domain.tone.apply_raw(orig);
        protos.emplace_back(id, orig);
        protos.emplace_back(id, target);
        protos.emplace_back(id, domain.tone.apply(orig));
        for (double w : {params.noise_level, params.noise_level / 4.0}) {
            protos.emplace_back(id, blend(orig, toned, w));   // refine over preserved pixels
            protos.emplace_back(id, blend(target, toned, w)); // refine over repainted pixels
        }
    }
    return protos;
}

} // namespace adstest
