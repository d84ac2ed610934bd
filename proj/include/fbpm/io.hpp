#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fbpm/grid.hpp"

namespace fbpm {

/// splitmix64. Bit-identical across platforms and languages.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    /// next() / 2^64, in [0, 1).
    double uniform();
    /// Box-Muller from two uniforms, cosine branch only:
    /// sqrt(-2 log(1 - u1)) cos(2 pi u2).
    double normal();

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

enum class SignalKind { sine, step, sawtooth };

SignalKind parse_signal_kind(std::string_view name);
std::string to_string(SignalKind kind);

/// n samples on x_i = i / (n - 1):
///   sine      a sin(2 pi x)
///   step      a (1[x > 1/2] - 1/2)
///   sawtooth  4-tooth triangle wave between -a and a, starting at -a
/// plus independent N(0, noise_sigma^2) noise when noise_sigma > 0.
ScalarField gen_signal(SignalKind kind, std::size_t n, double amplitude, double noise_sigma, std::uint64_t seed);

class PgmError : public std::runtime_error {
public:
    enum class Kind { malformed_header, unsupported_maxval, truncated_payload };
    PgmError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct Image {
    Grid grid;
    ScalarField pixels;
};

/// Reads P2 or P5 (8-bit, maxval <= 255) into [0, 1] by v / maxval. Rows map
/// to axis 1, columns to axis 0, unit spacing.
Image read_pgm(std::string_view bytes);
/// Writes binary P5 with maxval 255, round(v * 255) half up, clamped to [0, 255].
std::string write_pgm(const ScalarField& field, const Grid& grid);

/// Shortest round-trip decimal representation.
std::string format_number(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Header line then one line per row, comma separated, LF terminated.
std::string write_csv(const CsvTable& table);
/// Parses what write_csv emits. Throws std::runtime_error on malformed input.
CsvTable parse_csv(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace fbpm
