#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gfr/fields.hpp"

namespace gfr::synth {

/// Uniform double in [0, 1) from the top 53 bits of the generator output;
/// identical across platforms, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Periodized Gaussian: the sum of exp(-r^2 / (2 width^2)) over lattice
/// translates. Its integral over the torus is (sqrt(2 pi) * width)^dim.
double periodic_gaussian(double x, double cx, double width, double length);
double periodic_gaussian(double x, double y, double cx, double cy, double width,
                         double length);

ScalarField gaussian_bump(const TorusGrid& g, double cx, double width);             // dim 1
ScalarField gaussian_bump(const TorusGrid& g, double cx, double cy, double width);  // dim 2

/// Mode multiplier that keeps |k|_inf <= kmax and zeroes everything else.
std::vector<double> lowpass_table(const TorusGrid& g, int kmax);

/// Deterministic random fields, band-limited to |k|_inf <= kmax and scaled to
/// the given sup-norm amplitude.
ScalarField random_bandlimited_scalar(const TorusGrid& g, int kmax, std::uint64_t seed,
                                      double amplitude = 1.0);
VectorField random_bandlimited_vector(const TorusGrid& g, int kmax, std::uint64_t seed,
                                      double amplitude = 1.0);
/// Symmetric-tensor perturbation (not necessarily positive-definite).
MetricField random_bandlimited_tensor(const TorusGrid& g, int kmax, std::uint64_t seed,
                                      double amplitude = 1.0);

} // namespace gfr::synth
