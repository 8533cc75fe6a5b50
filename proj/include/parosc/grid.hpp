#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "parosc/errors.hpp"

namespace parosc {

struct Grid {
    double x0 = 0.0;
    double dx = 1.0;
    int n = 0;

    double x(int i) const { return x0 + dx * i; }
    double x_max() const { return x0 + dx * (n - 1); }

    static Grid centered(double center, double half_width, int samples) {
        if (samples < 16) throw GridError("grid needs at least 16 samples");
        if (!(half_width > 0.0)) throw GridError("grid half-width must be positive");
        Grid g;
        g.dx = 2.0 * half_width / (samples - 1);
        g.x0 = center - half_width;
        g.n = samples;
        return g;
    }

    bool matches(const Grid& o) const { return x0 == o.x0 && dx == o.dx && n == o.n; }
};

// Sampled complex amplitude at a fixed time. margin marks edge samples whose
// values are stencil-contaminated after a grid-operator application; inner
// products skip them.
struct WaveField {
    Grid grid;
    std::vector<std::complex<double>> values;
    double t = 0.0;
    int margin = 0;
    std::map<std::string, std::string> metadata;
};

inline std::complex<double> inner_product(const WaveField& a, const WaveField& b) {
    if (!a.grid.matches(b.grid)) throw GridError("inner product requires matching grids");
    int m = std::max(a.margin, b.margin);
    std::complex<double> acc{};
    for (int i = m; i < a.grid.n - m; ++i) acc += std::conj(a.values[i]) * b.values[i];
    return acc * a.grid.dx;
}

inline double field_norm(const WaveField& a) { return std::sqrt(std::abs(inner_product(a, a))); }

// Probability mass in the outermost usable cells on each side; a decaying
// state on an adequate grid leaves this far below the 1e-12 gate.
inline double tail_mass(const WaveField& a, int cells = 8) {
    int m = a.margin;
    int lo_end = std::min(m + cells, a.grid.n - m);
    double acc = 0.0;
    for (int i = m; i < lo_end; ++i) acc += std::norm(a.values[i]);
    int hi_begin = std::max(a.grid.n - m - cells, lo_end);
    for (int i = hi_begin; i < a.grid.n - m; ++i) acc += std::norm(a.values[i]);
    return acc * a.grid.dx;
}

inline void require_tail_clear(const WaveField& a) {
    double mass = tail_mass(a);
    if (!(mass <= 1e-12))
        throw GridError("grid too small: boundary probability mass " + std::to_string(mass));
}

}  // namespace parosc
