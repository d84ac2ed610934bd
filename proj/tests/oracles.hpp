#pragma once

// Independent reference implementations for the unit tests. Nothing here
// calls into the library: every formula is written out on plain vectors so
// that a shared bug cannot make both sides agree.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

inline double pm_flux(double s) { return s / (1.0 + s * s); }

/// Scalar flux s/(1+s^2) + delta |s|^{p-2} s.
inline double flux_1d(double delta, double p, double s)
{
    return pm_flux(s) + (s == 0.0 ? 0.0 : delta * std::pow(std::abs(s), p - 2.0) * s);
}

inline double potential_1d(double delta, double p, double s)
{
    return 0.5 * std::log1p(s * s) + delta / p * std::pow(std::abs(s), p);
}

/// 2D flux written component by component.
inline void flux_2d(double delta, double p, double a, double b, double& qa, double& qb)
{
    const double r2 = a * a + b * b;
    const double c = 1.0 / (1.0 + r2) + (r2 == 0.0 ? 0.0 : delta * std::pow(r2, 0.5 * (p - 2.0)));
    qa = c * a;
    qb = c * b;
}

struct Step1d {
    double h = 1.0;
    double delta = 0.0;
    std::vector<double> p;  // node exponents
    double T = 1.0;
    double m = 1.0;
    double eps = 0.1;
};

/// Step functional on a 1D line written as three explicit sums over edges
/// and nodes; the edge exponent is the mean of its end nodes.
inline double step_functional(const Step1d& s, const std::vector<double>& u, const std::vector<double>& prev)
{
    const std::size_t n = u.size();
    double energy = 0.0;
    double h1 = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double g = (u[i + 1] - u[i]) / s.h;
        const double dg = (u[i + 1] - prev[i + 1] - u[i] + prev[i]) / s.h;
        energy += s.h * potential_1d(s.delta, 0.5 * (s.p[i] + s.p[i + 1]), g);
        h1 += s.h * dg * dg;
    }
    double l2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        l2 += s.h * (u[i] - prev[i]) * (u[i] - prev[i]);
    }
    const double rate = s.m / s.T;
    return energy + 0.5 * rate * l2 + s.eps * 0.5 * rate * h1;
}

/// Minimizes f by plain gradient-free coordinate search with shrinking step.
template <class F>
std::vector<double> coordinate_search(F f, std::vector<double> x, double step, double tol)
{
    double best = f(x);
    while (step > tol) {
        bool moved = false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (double dir : {1.0, -1.0}) {
                x[i] += dir * step;
                const double v = f(x);
                if (v < best) {
                    best = v;
                    moved = true;
                } else {
                    x[i] -= dir * step;
                }
            }
        }
        if (!moved) {
            step *= 0.5;
        }
    }
    return x;
}

/// splitmix64 step, transcribed from the reference C version.
inline std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Splits CSV text into numeric rows, skipping the header line.
inline std::vector<std::vector<double>> csv_numbers(const std::string& text)
{
    std::vector<std::vector<double>> rows;
    std::size_t pos = text.find('\n');
    while (pos != std::string::npos && pos + 1 < text.size()) {
        const std::size_t end = text.find('\n', pos + 1);
        const std::string line = text.substr(pos + 1, end - pos - 1);
        std::vector<double> row;
        std::size_t a = 0;
        while (true) {
            const std::size_t b = line.find(',', a);
            row.push_back(std::stod(line.substr(a, b - a)));
            if (b == std::string::npos) {
                break;
            }
            a = b + 1;
        }
        rows.push_back(row);
        pos = end;
    }
    return rows;
}

/// Groups sorted values into clusters separated by gaps wider than `gap`.
inline std::size_t cluster_count(std::vector<double> v, double gap)
{
    if (v.empty()) {
        return 0;
    }
    std::sort(v.begin(), v.end());
    std::size_t clusters = 1;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] - v[i - 1] > gap) {
            ++clusters;
        }
    }
    return clusters;
}

}  // namespace oracle
