#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fbpm {

/// Bad config text, unknown or missing key, or an unparsable value.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat `section.key = value` settings. Lines starting with '#' and blank
/// lines are ignored; a '#' after a value starts a trailing comment.
class Config {
public:
    static Config parse(std::string_view text);
    static Config load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    const std::map<std::string, std::string>& entries() const { return values_; }

    /// Throws ConfigError naming the key when it is absent.
    const std::string& require(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;

    double require_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    std::uint64_t require_uint(const std::string& key) const;
    bool get_bool(const std::string& key, bool fallback) const;
    /// Comma-separated list of numbers.
    std::vector<double> require_double_list(const std::string& key) const;

    /// Throws ConfigError on the first key not in `known`.
    void reject_unknown(const std::set<std::string>& known) const;

private:
    std::map<std::string, std::string> values_;
};

double parse_double(std::string_view text, const std::string& key);
std::uint64_t parse_uint(std::string_view text, const std::string& key);

}  // namespace fbpm
