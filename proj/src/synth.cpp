#include "gfr/synth.hpp"

#include <algorithm>
#include <cmath>

#include "gfr/spectral.hpp"

namespace gfr::synth {

namespace {

// Seven lattice images per axis; width <= 0.2 L keeps the truncated tail far
// below double precision.
constexpr int kImages = 3;

double gauss_sum_1d(double d, double width, double length) {
    double sum = 0.0;
    for (int m = -kImages; m <= kImages; ++m) {
        const double r = d + m * length;
        sum += std::exp(-r * r / (2.0 * width * width));
    }
    return sum;
}

void scale_to_amplitude(std::vector<std::vector<double>*> comps, double amplitude) {
    double sup = 0.0;
    for (auto* c : comps) {
        for (double v : *c) sup = std::max(sup, std::abs(v));
    }
    if (sup == 0.0) return;
    const double s = amplitude / sup;
    for (auto* c : comps) {
        for (double& v : *c) v *= s;
    }
}

std::vector<double> random_values(std::size_t count, std::mt19937_64& rng) {
    std::vector<double> v(count);
    for (double& x : v) x = 2.0 * uniform01(rng) - 1.0;
    return v;
}

} // namespace

double periodic_gaussian(double x, double cx, double width, double length) {
    return gauss_sum_1d(x - cx, width, length);
}

double periodic_gaussian(double x, double y, double cx, double cy, double width,
                         double length) {
    return gauss_sum_1d(x - cx, width, length) * gauss_sum_1d(y - cy, width, length);
}

ScalarField gaussian_bump(const TorusGrid& g, double cx, double width) {
    ScalarField f(g);
    for (int i = 0; i < g.n; ++i) {
        f.values[g.index(i)] = periodic_gaussian(g.node(i), cx, width, g.length);
    }
    return f;
}

ScalarField gaussian_bump(const TorusGrid& g, double cx, double cy, double width) {
    ScalarField f(g);
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) {
            f.values[g.index(i, j)] =
                periodic_gaussian(g.node(i), g.node(j), cx, cy, width, g.length);
        }
    }
    return f;
}

std::vector<double> lowpass_table(const TorusGrid& g, int kmax) {
    std::vector<double> table(g.size(), 0.0);
    if (g.dim == 1) {
        for (int k = 0; k < g.n; ++k) {
            table[static_cast<std::size_t>(k)] =
                std::abs(spectral::signed_freq(k, g.n)) <= kmax ? 1.0 : 0.0;
        }
        return table;
    }
    for (int ki = 0; ki < g.n; ++ki) {
        for (int kj = 0; kj < g.n; ++kj) {
            const bool keep = std::abs(spectral::signed_freq(ki, g.n)) <= kmax &&
                              std::abs(spectral::signed_freq(kj, g.n)) <= kmax;
            table[g.index(ki, kj)] = keep ? 1.0 : 0.0;
        }
    }
    return table;
}

ScalarField random_bandlimited_scalar(const TorusGrid& g, int kmax, std::uint64_t seed,
                                      double amplitude) {
    std::mt19937_64 rng(seed);
    ScalarField noise(g, 0.0);
    noise.values = random_values(g.size(), rng);
    ScalarField out = spectral::apply_mode_multiplier(noise, lowpass_table(g, kmax));
    scale_to_amplitude({&out.values}, amplitude);
    return out;
}

VectorField random_bandlimited_vector(const TorusGrid& g, int kmax, std::uint64_t seed,
                                      double amplitude) {
    std::mt19937_64 rng(seed);
    VectorField noise(g);
    for (auto& c : noise.comp) c = random_values(g.size(), rng);
    VectorField out = spectral::apply_mode_multiplier(noise, lowpass_table(g, kmax));
    std::vector<std::vector<double>*> comps;
    for (auto& c : out.comp) comps.push_back(&c);
    scale_to_amplitude(comps, amplitude);
    return out;
}

MetricField random_bandlimited_tensor(const TorusGrid& g, int kmax, std::uint64_t seed,
                                      double amplitude) {
    std::mt19937_64 rng(seed);
    const std::vector<double> table = lowpass_table(g, kmax);
    MetricField out(g);
    for (auto& c : out.comp) {
        ScalarField noise(g, 0.0);
        noise.values = random_values(g.size(), rng);
        c = spectral::apply_mode_multiplier(noise, table).values;
    }
    std::vector<std::vector<double>*> comps;
    for (auto& c : out.comp) comps.push_back(&c);
    scale_to_amplitude(comps, amplitude);
    return out;
}

} // namespace gfr::synth
