// Scenario configuration: a small key-value text format with named sections.
//
//   # comment
//   [section]          or  [step.3]
//   count = 12
//   name = "quoted"
//   flag = true
//   coeffs = [1.0, 2.5, -0.25]
//
// Sections keep file order; unknown keys are rejected by the consumer.

#ifndef BL_CONFIG_HPP
#define BL_CONFIG_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bl/errors.hpp"

namespace bl::config {

struct Value {
    enum class Kind { Number, String, Bool, Array } kind = Kind::Number;
    double num = 0.0;
    std::string str;
    bool flag = false;
    std::vector<double> arr;
};

struct Section {
    std::string name;
    std::map<std::string, Value> values;
    mutable std::map<std::string, bool> touched;

    bool has(const std::string& key) const { return values.count(key) > 0; }
    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    long integer(const std::string& key) const;
    long integer_or(const std::string& key, long fallback) const;
    std::string string(const std::string& key) const;
    std::string string_or(const std::string& key, const std::string& fallback) const;
    bool boolean_or(const std::string& key, bool fallback) const;
    std::vector<double> array(const std::string& key) const;
    std::vector<double> array_or(const std::string& key) const;

    // every key must have been read through the accessors above
    void reject_unknown() const;
};

struct Config {
    std::vector<Section> sections;

    const Section* find(const std::string& name) const;
    const Section& require(const std::string& name) const;
    std::vector<const Section*> steps() const; // [step.N] in numeric order
};

Config parse(const std::string& text);      // throws ConfigError
Config parse_file(const std::string& path); // throws ConfigError

} // namespace bl::config

#endif
