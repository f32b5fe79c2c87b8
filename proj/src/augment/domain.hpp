#pragma once

#include "core/image.hpp"
#include "util/toml.hpp"

#include <array>
#include <map>
#include <string>

namespace adstest {

// Global affine color transform: out = M * rgb + offset, clamped to [0,255].
struct ToneTransform {
    std::array<std::array<double, 3>, 3> matrix{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    std::array<double, 3> offset{0, 0, 0};

    std::array<double, 3> apply_raw(Rgb in) const;
    Rgb apply(Rgb in) const;
};

ToneTransform tone_identity();

// A named target operational design domain: where each class's pixels should
// land after recoloring, plus the global tone shift.
struct DomainSpec {
    std::string name;
    std::map<std::uint8_t, Rgb> per_class_color; // one entry per declared class
    ToneTransform tone;

    Rgb target(std::uint8_t class_id) const;

    static DomainSpec from_toml(const Toml& root);
    static DomainSpec from_file(const std::string& path);
};

// name -> spec, loaded from a directory of <name>.toml files.
class DomainRegistry {
public:
    DomainRegistry() = default;
    static DomainRegistry load_dir(const std::string& dir);

    void add(DomainSpec spec);
    const DomainSpec& get(const std::string& name) const; // throws ConfigError
    bool contains(const std::string& name) const { return specs_.count(name) > 0; }
    const std::map<std::string, DomainSpec>& all() const { return specs_; }

private:
    std::map<std::string, DomainSpec> specs_;
};

} // namespace adstest
