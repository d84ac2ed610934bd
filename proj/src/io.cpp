#include "fbpm/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace fbpm {

std::uint64_t Rng::next()
{
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next()) * 0x1.0p-64; }

double Rng::normal()
{
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

SignalKind parse_signal_kind(std::string_view name)
{
    if (name == "sine") {
        return SignalKind::sine;
    }
    if (name == "step") {
        return SignalKind::step;
    }
    if (name == "sawtooth") {
        return SignalKind::sawtooth;
    }
    throw std::invalid_argument("unknown signal kind '" + std::string(name) + "'");
}

std::string to_string(SignalKind kind)
{
    switch (kind) {
    case SignalKind::sine:
        return "sine";
    case SignalKind::step:
        return "step";
    case SignalKind::sawtooth:
        return "sawtooth";
    }
    return "?";
}

ScalarField gen_signal(SignalKind kind, std::size_t n, double amplitude, double noise_sigma, std::uint64_t seed)
{
    if (n < 2) {
        throw std::invalid_argument("gen_signal: n must be >= 2");
    }
    ScalarField u(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(n - 1);
        switch (kind) {
        case SignalKind::sine:
            u[i] = amplitude * std::sin(2.0 * std::numbers::pi * x);
            break;
        case SignalKind::step:
            u[i] = amplitude * ((x > 0.5 ? 1.0 : 0.0) - 0.5);
            break;
        case SignalKind::sawtooth: {
            const double phase = 4.0 * x - std::floor(4.0 * x);
            u[i] = amplitude * (1.0 - 4.0 * std::abs(phase - 0.5));
            break;
        }
        }
    }
    if (noise_sigma > 0.0) {
        Rng rng(seed);
        for (double& v : u) {
            v += noise_sigma * rng.normal();
        }
    }
    return u;
}

namespace {

class PgmCursor {
public:
    explicit PgmCursor(std::string_view bytes) : bytes_(bytes) {}

    void skip_space_and_comments()
    {
        while (pos_ < bytes_.size()) {
            const char c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') {
                    ++pos_;
                }
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    // Unsigned decimal; false on anything else.
    bool read_uint(unsigned long& out)
    {
        skip_space_and_comments();
        const char* first = bytes_.data() + pos_;
        const char* last = bytes_.data() + bytes_.size();
        auto [ptr, ec] = std::from_chars(first, last, out);
        if (ec != std::errc() || ptr == first) {
            return false;
        }
        pos_ = static_cast<std::size_t>(ptr - bytes_.data());
        return true;
    }

    std::size_t pos() const { return pos_; }
    void advance(std::size_t n) { pos_ += n; }
    bool at_end() const { return pos_ >= bytes_.size(); }
    char peek() const { return bytes_[pos_]; }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

Image read_pgm(std::string_view bytes)
{
    using Kind = PgmError::Kind;
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
        throw PgmError(Kind::malformed_header, "pgm: expected magic P2 or P5");
    }
    const bool binary = bytes[1] == '5';
    PgmCursor cur(bytes);
    cur.advance(2);
    unsigned long width = 0;
    unsigned long height = 0;
    unsigned long maxval = 0;
    if (!cur.read_uint(width) || !cur.read_uint(height) || !cur.read_uint(maxval)) {
        throw PgmError(Kind::malformed_header, "pgm: malformed header");
    }
    if (width < 1 || height < 1 || maxval < 1) {
        throw PgmError(Kind::malformed_header, "pgm: zero width, height or maxval");
    }
    if (maxval > 255) {
        throw PgmError(Kind::unsupported_maxval, "pgm: maxval above 255 is not supported");
    }
    Grid grid = height == 1 ? Grid::line(width, 1.0) : Grid::rect(width, height, 1.0);
    const std::size_t count = width * height;
    ScalarField pixels(count);
    const double scale = 1.0 / static_cast<double>(maxval);

    if (binary) {
        // Exactly one whitespace byte separates maxval from the raster.
        if (cur.at_end() || !std::isspace(static_cast<unsigned char>(cur.peek()))) {
            throw PgmError(Kind::malformed_header, "pgm: missing separator before raster");
        }
        cur.advance(1);
        if (bytes.size() - cur.pos() < count) {
            throw PgmError(Kind::truncated_payload, "pgm: truncated raster");
        }
        for (std::size_t i = 0; i < count; ++i) {
            const auto v = static_cast<unsigned char>(bytes[cur.pos() + i]);
            if (v > maxval) {
                throw PgmError(Kind::malformed_header, "pgm: sample exceeds maxval");
            }
            pixels[i] = v * scale;
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            unsigned long v = 0;
            cur.skip_space_and_comments();
            if (cur.at_end()) {
                throw PgmError(Kind::truncated_payload, "pgm: truncated raster");
            }
            if (!cur.read_uint(v) || v > maxval) {
                throw PgmError(Kind::malformed_header, "pgm: bad sample value");
            }
            pixels[i] = static_cast<double>(v) * scale;
        }
    }
    return {grid, std::move(pixels)};
}

std::string write_pgm(const ScalarField& field, const Grid& grid)
{
    if (field.size() != grid.node_count()) {
        throw std::invalid_argument("write_pgm: field does not match grid");
    }
    std::string out = "P5\n" + std::to_string(grid.nx()) + " " + std::to_string(grid.ny()) + "\n255\n";
    out.reserve(out.size() + field.size());
    for (double v : field) {
        const double scaled = std::floor(v * 255.0 + 0.5);
        out.push_back(static_cast<char>(static_cast<unsigned char>(std::clamp(scaled, 0.0, 255.0))));
    }
    return out;
}

std::string format_number(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) {
        throw std::runtime_error("format_number: conversion failed");
    }
    return std::string(buf, ptr);
}

std::string write_csv(const CsvTable& table)
{
    std::string out;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        out += (i ? "," : "") + table.header[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) {
                out += ',';
            }
            out += format_number(row[i]);
        }
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t at = line.find(sep, start);
        if (at == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, at - start));
        start = at + 1;
    }
}

}  // namespace

CsvTable parse_csv(std::string_view text)
{
    CsvTable table;
    std::size_t start = 0;
    bool first = true;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const std::string_view line = text.substr(start, end - start);
        start = end + 1;
        if (first) {
            for (auto cell : split(line, ',')) {
                table.header.emplace_back(cell);
            }
            first = false;
            continue;
        }
        std::vector<double> row;
        for (auto cell : split(line, ',')) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size()) {
                throw std::runtime_error("csv: bad number '" + std::string(cell) + "'");
            }
            row.push_back(v);
        }
        if (row.size() != table.header.size()) {
            throw std::runtime_error("csv: row width does not match header");
        }
        table.rows.push_back(std::move(row));
    }
    if (first) {
        throw std::runtime_error("csv: missing header");
    }
    return table;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view bytes)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace fbpm
