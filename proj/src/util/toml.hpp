#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace adstest {

// Minimal TOML reader covering what the config files use: bare keys, strings,
// integers, floats, booleans, homogeneous arrays, [table.paths] and [[arrays
// of tables]]. Inline tables and datetimes are not supported.
class Toml {
public:
    using Array = std::vector<Toml>;
    using Table = std::map<std::string, Toml>;

    Toml() : value_(Table{}) {}
    explicit Toml(std::string v) : value_(std::move(v)) {}
    explicit Toml(std::int64_t v) : value_(v) {}
    explicit Toml(double v) : value_(v) {}
    explicit Toml(bool v) : value_(v) {}
    explicit Toml(Array v) : value_(std::move(v)) {}
    explicit Toml(Table v) : value_(std::move(v)) {}

    static Toml parse(const std::string& text);
    static Toml parse_file(const std::string& path);

    bool is_table() const { return std::holds_alternative<Table>(value_); }
    bool is_array() const { return std::holds_alternative<Array>(value_); }
    bool is_string() const { return std::holds_alternative<std::string>(value_); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(value_); }
    bool is_float() const { return is_int() || std::holds_alternative<double>(value_); }
    bool is_bool() const { return std::holds_alternative<bool>(value_); }

    // Lookup in a table; nullptr when absent. Throws ConfigError on type misuse.
    const Toml* find(const std::string& key) const;
    bool contains(const std::string& key) const { return find(key) != nullptr; }

    const std::string& as_string() const;
    std::int64_t as_int() const;
    double as_float() const;
    bool as_bool() const;
    const Array& as_array() const;
    const Table& as_table() const;

    // Required / defaulted typed access with key context in error messages.
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::int64_t get_int(const std::string& key) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    double get_float(const std::string& key) const;
    double get_float(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    Table& table();

private:
    std::variant<std::string, std::int64_t, double, bool, Array, Table> value_;
};

} // namespace adstest
