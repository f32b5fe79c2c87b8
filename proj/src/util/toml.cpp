#include "util/toml.hpp"

#include "util/errors.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace adstest {

namespace {

struct Parser {
    const std::string& text;
    std::size_t pos = 0;
    int line = 1;

    explicit Parser(const std::string& t) : text(t) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("toml line " + std::to_string(line) + ": " + msg);
    }

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }

    char take() {
        char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }

    void skip_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos;
    }

    void skip_ws_comments_newlines() {
        while (!eof()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r') {
                ++pos;
            } else if (c == '\n') {
                take();
            } else if (c == '#') {
                while (!eof() && peek() != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    void expect_line_end() {
        skip_ws();
        if (!eof() && peek() == '#') {
            while (!eof() && peek() != '\n') ++pos;
        }
        if (eof()) return;
        if (peek() == '\r') ++pos;
        if (eof()) return;
        if (peek() != '\n') fail("expected end of line");
        take();
    }

    std::string parse_key() {
        skip_ws();
        if (eof()) fail("expected key");
        if (peek() == '"') return parse_basic_string();
        std::string key;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) {
            key.push_back(take());
        }
        if (key.empty()) fail("expected key");
        return key;
    }

    std::vector<std::string> parse_dotted_key() {
        std::vector<std::string> parts{parse_key()};
        skip_ws();
        while (!eof() && peek() == '.') {
            take();
            parts.push_back(parse_key());
            skip_ws();
        }
        return parts;
    }

    std::string parse_basic_string() {
        if (take() != '"') fail("expected string");
        std::string out;
        while (true) {
            if (eof()) fail("unterminated string");
            char c = take();
            if (c == '"') break;
            if (c == '\n') fail("newline in string");
            if (c == '\\') {
                if (eof()) fail("unterminated escape");
                char e = take();
                switch (e) {
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    case 'r': out.push_back('\r'); break;
                    case '"': out.push_back('"'); break;
                    case '\\': out.push_back('\\'); break;
                    default: fail("unsupported escape");
                }
            } else {
                out.push_back(c);
            }
        }
        return out;
    }

    Toml parse_value() {
        skip_ws();
        if (eof()) fail("expected value");
        char c = peek();
        if (c == '"') return Toml(parse_basic_string());
        if (c == '[') return parse_array();
        if (c == 't' || c == 'f') {
            if (text.compare(pos, 4, "true") == 0) {
                pos += 4;
                return Toml(true);
            }
            if (text.compare(pos, 5, "false") == 0) {
                pos += 5;
                return Toml(false);
            }
            fail("invalid literal");
        }
        return parse_number();
    }

    Toml parse_array() {
        take(); // '['
        Toml::Array items;
        while (true) {
            skip_ws_comments_newlines();
            if (eof()) fail("unterminated array");
            if (peek() == ']') {
                take();
                break;
            }
            items.push_back(parse_value());
            skip_ws_comments_newlines();
            if (!eof() && peek() == ',') {
                take();
                continue;
            }
            skip_ws_comments_newlines();
            if (eof() || peek() != ']') fail("expected ',' or ']' in array");
        }
        return Toml(std::move(items));
    }

    Toml parse_number() {
        std::size_t start = pos;
        bool is_float = false;
        if (!eof() && (peek() == '+' || peek() == '-')) ++pos;
        while (!eof()) {
            char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '_') {
                ++pos;
            } else if (c == '.' || c == 'e' || c == 'E') {
                is_float = true;
                ++pos;
                if (!eof() && (peek() == '+' || peek() == '-')) ++pos;
            } else {
                break;
            }
        }
        if (pos == start) fail("expected value");
        std::string token = text.substr(start, pos - start);
        std::erase(token, '_');
        try {
            if (is_float) return Toml(std::stod(token));
            return Toml(static_cast<std::int64_t>(std::stoll(token)));
        } catch (const std::exception&) {
            fail("invalid number '" + token + "'");
        }
    }
};

Toml::Table* descend(Toml::Table* root, const std::vector<std::string>& parts, std::size_t n,
                     int line) {
    Toml::Table* t = root;
    for (std::size_t i = 0; i < n; ++i) {
        auto it = t->find(parts[i]);
        if (it == t->end()) {
            it = t->emplace(parts[i], Toml(Toml::Table{})).first;
        }
        Toml& node = it->second;
        if (node.is_array()) {
            // Descend into the last element of an array of tables.
            auto& arr = const_cast<Toml::Array&>(node.as_array());
            if (arr.empty() || !arr.back().is_table())
                throw ConfigError("toml line " + std::to_string(line) + ": key conflicts with array");
            t = &arr.back().table();
        } else if (node.is_table()) {
            t = &node.table();
        } else {
            throw ConfigError("toml line " + std::to_string(line) + ": key '" + parts[i] +
                              "' is not a table");
        }
    }
    return t;
}

} // namespace

Toml Toml::parse(const std::string& text) {
    Parser p(text);
    Toml root{Table{}};
    Table* current = &root.table();
    while (true) {
        p.skip_ws_comments_newlines();
        if (p.eof()) break;
        if (p.peek() == '[') {
            p.take();
            bool array_of_tables = !p.eof() && p.peek() == '[';
            if (array_of_tables) p.take();
            auto parts = p.parse_dotted_key();
            p.skip_ws();
            if (p.eof() || p.take() != ']') p.fail("expected ']'");
            if (array_of_tables && (p.eof() || p.take() != ']')) p.fail("expected ']]'");
            p.expect_line_end();

            Table* parent = descend(&root.table(), parts, parts.size() - 1, p.line);
            const std::string& leaf = parts.back();
            if (array_of_tables) {
                auto it = parent->find(leaf);
                if (it == parent->end()) it = parent->emplace(leaf, Toml(Array{})).first;
                if (!it->second.is_array()) p.fail("'" + leaf + "' is not an array of tables");
                auto& arr = const_cast<Array&>(it->second.as_array());
                arr.push_back(Toml(Table{}));
                current = &arr.back().table();
            } else {
                auto it = parent->find(leaf);
                if (it == parent->end()) it = parent->emplace(leaf, Toml(Table{})).first;
                if (!it->second.is_table()) p.fail("'" + leaf + "' redefined as table");
                current = &it->second.table();
            }
            continue;
        }
        auto parts = p.parse_dotted_key();
        p.skip_ws();
        if (p.eof() || p.take() != '=') p.fail("expected '='");
        Toml value = p.parse_value();
        p.expect_line_end();
        Table* parent = descend(current, parts, parts.size() - 1, p.line);
        if (!parent->emplace(parts.back(), std::move(value)).second)
            p.fail("duplicate key '" + parts.back() + "'");
    }
    return root;
}

Toml Toml::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

const Toml* Toml::find(const std::string& key) const {
    const Table& t = as_table();
    auto it = t.find(key);
    return it == t.end() ? nullptr : &it->second;
}

const std::string& Toml::as_string() const {
    if (!is_string()) throw ConfigError("toml: expected string");
    return std::get<std::string>(value_);
}

std::int64_t Toml::as_int() const {
    if (!is_int()) throw ConfigError("toml: expected integer");
    return std::get<std::int64_t>(value_);
}

double Toml::as_float() const {
    if (is_int()) return static_cast<double>(std::get<std::int64_t>(value_));
    if (!std::holds_alternative<double>(value_)) throw ConfigError("toml: expected number");
    return std::get<double>(value_);
}

bool Toml::as_bool() const {
    if (!is_bool()) throw ConfigError("toml: expected boolean");
    return std::get<bool>(value_);
}

const Toml::Array& Toml::as_array() const {
    if (!is_array()) throw ConfigError("toml: expected array");
    return std::get<Array>(value_);
}

const Toml::Table& Toml::as_table() const {
    if (!is_table()) throw ConfigError("toml: expected table");
    return std::get<Table>(value_);
}

Toml::Table& Toml::table() {
    if (!is_table()) throw ConfigError("toml: expected table");
    return std::get<Table>(value_);
}

std::string Toml::get_string(const std::string& key) const {
    const Toml* v = find(key);
    if (!v) throw ConfigError("missing required key '" + key + "'");
    return v->as_string();
}

std::string Toml::get_string(const std::string& key, const std::string& fallback) const {
    const Toml* v = find(key);
    return v ? v->as_string() : fallback;
}

std::int64_t Toml::get_int(const std::string& key) const {
    const Toml* v = find(key);
    if (!v) throw ConfigError("missing required key '" + key + "'");
    return v->as_int();
}

std::int64_t Toml::get_int(const std::string& key, std::int64_t fallback) const {
    const Toml* v = find(key);
    return v ? v->as_int() : fallback;
}

double Toml::get_float(const std::string& key) const {
    const Toml* v = find(key);
    if (!v) throw ConfigError("missing required key '" + key + "'");
    return v->as_float();
}

double Toml::get_float(const std::string& key, double fallback) const {
    const Toml* v = find(key);
    return v ? v->as_float() : fallback;
}

bool Toml::get_bool(const std::string& key, bool fallback) const {
    const Toml* v = find(key);
    return v ? v->as_bool() : fallback;
}

} // namespace adstest
