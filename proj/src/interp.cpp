#include "gfr/interp.hpp"

#include <cmath>

namespace gfr {

namespace interp {

namespace {

// Wrap x into [0, L). The post-check catches the representable-boundary case
// where x + L rounds to exactly L for tiny negative x.
double wrap(double x, double length) {
    x -= length * std::floor(x / length);
    if (x >= length) x -= length;
    return x;
}

struct AxisWeights {
    int i0;
    int i1;
    double w1; // weight of the upper neighbor
};

AxisWeights axis_weights(double x, const TorusGrid& g) {
    const double u = wrap(x, g.length) / g.spacing();
    int i0 = static_cast<int>(u);
    if (i0 >= g.n) i0 = g.n - 1;
    AxisWeights w;
    w.i0 = i0;
    w.i1 = (i0 + 1) % g.n;
    w.w1 = u - i0;
    return w;
}

} // namespace

double sample_component(const TorusGrid& g, const std::vector<double>& values, double x) {
    const AxisWeights a = axis_weights(x, g);
    return (1.0 - a.w1) * values[g.index(a.i0)] + a.w1 * values[g.index(a.i1)];
}

double sample_component(const TorusGrid& g, const std::vector<double>& values, double x,
                        double y) {
    const AxisWeights a = axis_weights(x, g);
    const AxisWeights b = axis_weights(y, g);
    const double v00 = values[g.index(a.i0, b.i0)];
    const double v01 = values[g.index(a.i0, b.i1)];
    const double v10 = values[g.index(a.i1, b.i0)];
    const double v11 = values[g.index(a.i1, b.i1)];
    return (1.0 - a.w1) * ((1.0 - b.w1) * v00 + b.w1 * v01) +
           a.w1 * ((1.0 - b.w1) * v10 + b.w1 * v11);
}

double torus_delta(double a, double b, double length) {
    double d = a - b;
    d -= length * std::round(d / length);
    return d;
}

} // namespace interp

double sample(const ScalarField& f, double x) {
    return interp::sample_component(f.grid, f.values, x);
}

double sample(const ScalarField& f, double x, double y) {
    return interp::sample_component(f.grid, f.values, x, y);
}

std::array<double, 2> sample(const VectorField& v, double x) {
    return {interp::sample_component(v.grid, v.comp[0], x), 0.0};
}

std::array<double, 2> sample(const VectorField& v, double x, double y) {
    return {interp::sample_component(v.grid, v.comp[0], x, y),
            interp::sample_component(v.grid, v.comp[1], x, y)};
}

std::vector<double> interpolate(const ScalarField& f, std::span<const double> positions) {
    const int dim = f.grid.dim;
    if (positions.size() % static_cast<std::size_t>(dim) != 0) {
        throw FieldError("interpolate: position array size is not a multiple of dim");
    }
    const std::size_t count = positions.size() / static_cast<std::size_t>(dim);
    std::vector<double> out(count, 0.0);
    for (std::size_t p = 0; p < count; ++p) {
        if (dim == 1) {
            out[p] = sample(f, positions[p]);
        } else {
            out[p] = sample(f, positions[2 * p], positions[2 * p + 1]);
        }
    }
    return out;
}

} // namespace gfr
