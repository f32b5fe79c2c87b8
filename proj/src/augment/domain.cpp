#include "augment/domain.hpp"

#include "util/errors.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

namespace adstest {

namespace {

std::uint8_t clamp_channel(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

} // namespace

std::array<double, 3> ToneTransform::apply_raw(Rgb in) const {
    std::array<double, 3> x{double(in.r), double(in.g), double(in.b)};
    std::array<double, 3> out;
    for (int i = 0; i < 3; ++i) {
        out[i] = matrix[i][0] * x[0] + matrix[i][1] * x[1] + matrix[i][2] * x[2] + offset[i];
        if (!std::isfinite(out[i])) throw InvalidArgument("tone transform produced non-finite value");
    }
    return out;
}

Rgb ToneTransform::apply(Rgb in) const {
    auto raw = apply_raw(in);
    return {clamp_channel(raw[0]), clamp_channel(raw[1]), clamp_channel(raw[2])};
}

ToneTransform tone_identity() { return ToneTransform{}; }

Rgb DomainSpec::target(std::uint8_t class_id) const {
    auto it = per_class_color.find(class_id);
    if (it == per_class_color.end())
        throw InvalidArgument("domain '" + name + "' has no color for class " +
                              std::string(class_name(class_id)));
    return it->second;
}

namespace {

Rgb parse_rgb(const Toml& v, const std::string& what) {
    const auto& arr = v.as_array();
    if (arr.size() != 3) throw ConfigError(what + ": expected [r, g, b]");
    auto ch = [&](int i) {
        std::int64_t c = arr[i].as_int();
        if (c < 0 || c > 255) throw ConfigError(what + ": channel out of range");
        return static_cast<std::uint8_t>(c);
    };
    return {ch(0), ch(1), ch(2)};
}

} // namespace

DomainSpec DomainSpec::from_toml(const Toml& root) {
    DomainSpec spec;
    spec.name = root.get_string("name");

    if (const Toml* tone = root.find("tone")) {
        if (const Toml* m = tone->find("matrix")) {
            const auto& rows = m->as_array();
            if (rows.size() != 3) throw ConfigError("tone.matrix must have 3 rows");
            for (int i = 0; i < 3; ++i) {
                const auto& row = rows[i].as_array();
                if (row.size() != 3) throw ConfigError("tone.matrix rows must have 3 entries");
                for (int j = 0; j < 3; ++j) spec.tone.matrix[i][j] = row[j].as_float();
            }
        } else if (const Toml* s = tone->find("scale")) {
            const auto& diag = s->as_array();
            if (diag.size() != 3) throw ConfigError("tone.scale must have 3 entries");
            spec.tone.matrix = {{{diag[0].as_float(), 0, 0},
                                 {0, diag[1].as_float(), 0},
                                 {0, 0, diag[2].as_float()}}};
        }
        if (const Toml* o = tone->find("offset")) {
            const auto& off = o->as_array();
            if (off.size() != 3) throw ConfigError("tone.offset must have 3 entries");
            for (int i = 0; i < 3; ++i) spec.tone.offset[i] = off[i].as_float();
        }
        for (const auto& row : spec.tone.matrix)
            for (double v : row)
                if (!std::isfinite(v)) throw ConfigError("tone matrix must be finite");
    }

    const Toml* colors = root.find("colors");
    if (!colors) throw ConfigError("domain '" + spec.name + "': missing [colors]");
    for (const auto& [key, value] : colors->as_table()) {
        spec.per_class_color[class_id_from_name(key)] = parse_rgb(value, "colors." + key);
    }
    for (std::uint8_t id = 0; id < cls::count; ++id) {
        if (!spec.per_class_color.count(id))
            throw ConfigError("domain '" + spec.name + "': missing color for class " +
                              std::string(class_name(id)));
    }
    return spec;
}

DomainSpec DomainSpec::from_file(const std::string& path) {
    return from_toml(Toml::parse_file(path));
}

DomainRegistry DomainRegistry::load_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    DomainRegistry reg;
    if (!fs::is_directory(dir)) throw IoError("domains dir not found: " + dir);
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".toml") reg.add(DomainSpec::from_file(entry.path().string()));
    }
    if (reg.all().empty()) throw ConfigError("no domain files in " + dir);
    return reg;
}

void DomainRegistry::add(DomainSpec spec) {
    std::string name = spec.name;
    specs_[name] = std::move(spec);
}

const DomainSpec& DomainRegistry::get(const std::string& name) const {
    auto it = specs_.find(name);
    if (it == specs_.end()) throw ConfigError("unknown domain '" + name + "'");
    return it->second;
}

} // namespace adstest
