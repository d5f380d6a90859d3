#include "gfr/inertia.hpp"

#include <algorithm>
#include <cmath>

#include "gfr/spectral.hpp"

namespace gfr {

namespace {

std::vector<double> symbol_table(const InertiaSpec& spec, const TorusGrid& g, bool inverse) {
    std::vector<double> table = spectral::kappa_squared(g);
    for (double& s : table) {
        const double sym = spec.symbol(s);
        s = inverse ? 1.0 / sym : sym;
    }
    return table;
}

} // namespace

double InertiaSpec::symbol(double kappa_sq) const {
    // integer power; order_k stays small
    double base = 1.0 + alpha * kappa_sq;
    double out = 1.0;
    for (int i = 0; i < order_k; ++i) out *= base;
    return out;
}

VectorField apply_inertia(const InertiaSpec& spec, const VectorField& v) {
    require_finite(v, "apply_inertia");
    return spectral::apply_mode_multiplier(v, symbol_table(spec, v.grid, false));
}

VectorField invert_inertia(const InertiaSpec& spec, const VectorField& m) {
    require_finite(m, "invert_inertia");
    return spectral::apply_mode_multiplier(m, symbol_table(spec, m.grid, true));
}

double a_inner(const InertiaSpec& spec, const VectorField& u, const VectorField& w) {
    require_same_grid(u.grid, w.grid, "a_inner");
    return l2_inner_vector(apply_inertia(spec, u), w);
}

double a_norm(const InertiaSpec& spec, const VectorField& u) {
    return std::sqrt(std::max(0.0, a_inner(spec, u, u)));
}

} // namespace gfr
