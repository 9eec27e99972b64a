#include "bl/config.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <fstream>
#include <sstream>

namespace bl::config {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(unsigned(s[a]))) ++a;
    while (b > a && std::isspace(unsigned(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

Value parse_value(const std::string& raw, int line_no) {
    Value v;
    const std::string s = trim(raw);
    if (s.empty()) throw ConfigError("empty value at line " + std::to_string(line_no));
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"')
            throw ConfigError("unterminated string at line " + std::to_string(line_no));
        v.kind = Value::Kind::String;
        v.str = s.substr(1, s.size() - 2);
        return v;
    }
    if (s == "true" || s == "false") {
        v.kind = Value::Kind::Bool;
        v.flag = s == "true";
        return v;
    }
    if (s.front() == '[') {
        if (s.back() != ']')
            throw ConfigError("unterminated array at line " + std::to_string(line_no));
        v.kind = Value::Kind::Array;
        std::string body = s.substr(1, s.size() - 2);
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const std::string t = trim(item);
            if (t.empty()) continue;
            try {
                std::size_t used = 0;
                v.arr.push_back(std::stod(t, &used));
                if (used != t.size()) throw std::invalid_argument(t);
            } catch (const std::exception&) {
                throw ConfigError("bad array element '" + t + "' at line " +
                                  std::to_string(line_no));
            }
        }
        return v;
    }
    try {
        std::size_t used = 0;
        v.num = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        v.kind = Value::Kind::Number;
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad value '" + s + "' at line " + std::to_string(line_no));
    }
}

} // namespace

double Section::number(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end() || it->second.kind != Value::Kind::Number)
        throw ConfigError("section [" + name + "] needs number '" + key + "'");
    touched[key] = true;
    return it->second.num;
}

double Section::number_or(const std::string& key, double fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    return number(key);
}

long Section::integer(const std::string& key) const {
    const double x = number(key);
    const long n = std::lround(x);
    if (std::abs(x - double(n)) > 1e-9)
        throw ConfigError("section [" + name + "] key '" + key + "' must be an integer");
    return n;
}

long Section::integer_or(const std::string& key, long fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    return integer(key);
}

std::string Section::string(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end() || it->second.kind != Value::Kind::String)
        throw ConfigError("section [" + name + "] needs string '" + key + "'");
    touched[key] = true;
    return it->second.str;
}

std::string Section::string_or(const std::string& key, const std::string& fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    return string(key);
}

bool Section::boolean_or(const std::string& key, bool fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    if (it->second.kind != Value::Kind::Bool)
        throw ConfigError("section [" + name + "] key '" + key + "' must be a boolean");
    touched[key] = true;
    return it->second.flag;
}

std::vector<double> Section::array(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end() || it->second.kind != Value::Kind::Array)
        throw ConfigError("section [" + name + "] needs array '" + key + "'");
    touched[key] = true;
    return it->second.arr;
}

std::vector<double> Section::array_or(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) return {};
    return array(key);
}

void Section::reject_unknown() const {
    for (const auto& [key, value] : values) {
        (void)value;
        if (!touched.count(key))
            throw ConfigError("unknown key '" + key + "' in section [" + name + "]");
    }
}

const Section* Config::find(const std::string& name) const {
    for (const auto& s : sections)
        if (s.name == name) return &s;
    return nullptr;
}

const Section& Config::require(const std::string& name) const {
    const Section* s = find(name);
    if (!s) throw ConfigError("missing section [" + name + "]");
    return *s;
}

std::vector<const Section*> Config::steps() const {
    std::vector<std::pair<long, const Section*>> found;
    for (const auto& s : sections) {
        if (s.name.rfind("step.", 0) == 0) {
            try {
                found.push_back({std::stol(s.name.substr(5)), &s});
            } catch (const std::exception&) {
                throw ConfigError("bad step section [" + s.name + "]");
            }
        }
    }
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<const Section*> out;
    for (const auto& [n, s] : found) {
        (void)n;
        out.push_back(s);
    }
    return out;
}

Config parse(const std::string& text) {
    Config cfg;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    Section* cur = nullptr;
    while (std::getline(ss, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("bad section header at line " + std::to_string(line_no));
            Section s;
            s.name = trim(line.substr(1, line.size() - 2));
            if (s.name.empty())
                throw ConfigError("empty section name at line " + std::to_string(line_no));
            cfg.sections.push_back(std::move(s));
            cur = &cfg.sections.back();
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(line_no));
        if (!cur) throw ConfigError("key outside any section at line " + std::to_string(line_no));
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("empty key at line " + std::to_string(line_no));
        if (cur->values.count(key))
            throw ConfigError("duplicate key '" + key + "' at line " + std::to_string(line_no));
        cur->values[key] = parse_value(line.substr(eq + 1), line_no);
    }
    return cfg;
}

Config parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

} // namespace bl::config
