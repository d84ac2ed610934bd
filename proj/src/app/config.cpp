#include "fbpm/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fbpm {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool valid_key(std::string_view key)
{
    const auto dot = key.find('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 == key.size()) {
        return false;
    }
    for (char c : key) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '.';
        if (!ok) {
            return false;
        }
    }
    return key.find('.', dot + 1) == std::string_view::npos;
}

}  // namespace

Config Config::parse(std::string_view text)
{
    Config cfg;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'section.key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (!valid_key(key)) {
            throw ConfigError("line " + std::to_string(line_no) + ": malformed key '" + std::string(key) + "'");
        }
        if (value.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": empty value for '" + std::string(key) + "'");
        }
        if (cfg.has(std::string(key))) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
        }
        cfg.values_.emplace(key, value);
    }
    return cfg;
}

Config Config::load(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

const std::string& Config::require(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) {
        throw ConfigError("missing required key '" + key + "'");
    }
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double parse_double(std::string_view text, const std::string& key)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw ConfigError("key '" + key + "': '" + std::string(text) + "' is not a finite number");
    }
    return v;
}

std::uint64_t parse_uint(std::string_view text, const std::string& key)
{
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError("key '" + key + "': '" + std::string(text) + "' is not a non-negative integer");
    }
    return v;
}

double Config::require_double(const std::string& key) const { return parse_double(require(key), key); }

double Config::get_double(const std::string& key, double fallback) const
{
    return has(key) ? require_double(key) : fallback;
}

std::uint64_t Config::require_uint(const std::string& key) const { return parse_uint(require(key), key); }

std::uint64_t Config::get_uint(const std::string& key, std::uint64_t fallback) const
{
    return has(key) ? require_uint(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const
{
    if (!has(key)) {
        return fallback;
    }
    const std::string& v = require(key);
    if (v == "true") {
        return true;
    }
    if (v == "false") {
        return false;
    }
    throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<double> Config::require_double_list(const std::string& key) const
{
    std::string_view rest = require(key);
    std::vector<double> out;
    while (true) {
        const auto comma = rest.find(',');
        out.push_back(parse_double(trim(rest.substr(0, comma)), key));
        if (comma == std::string_view::npos) {
            break;
        }
        rest = rest.substr(comma + 1);
    }
    return out;
}

void Config::reject_unknown(const std::set<std::string>& known) const
{
    for (const auto& [key, value] : values_) {
        if (known.count(key) == 0) {
            throw ConfigError("unknown key '" + key + "'");
        }
    }
}

}  // namespace fbpm
