#pragma once

#include <array>
#include <span>
#include <vector>

#include "gfr/fields.hpp"

namespace gfr {

/// Periodic linear (dim 1) / bilinear (dim 2) interpolation. Positions are
/// wrapped modulo L, so no position is ever out of range; values stored at
/// grid nodes are reproduced exactly.
double sample(const ScalarField& f, double x);
double sample(const ScalarField& f, double x, double y);

std::array<double, 2> sample(const VectorField& v, double x);
std::array<double, 2> sample(const VectorField& v, double x, double y);

/// Batch form: positions are row-major [n_points][dim] absolute coordinates.
std::vector<double> interpolate(const ScalarField& f, std::span<const double> positions);

namespace interp {

/// Wrapped linear interpolation of one raw component array on a grid.
double sample_component(const TorusGrid& g, const std::vector<double>& values, double x);
double sample_component(const TorusGrid& g, const std::vector<double>& values, double x,
                        double y);

/// Shortest signed displacement from b to a on a circle of circumference L.
double torus_delta(double a, double b, double length);

} // namespace interp

} // namespace gfr
