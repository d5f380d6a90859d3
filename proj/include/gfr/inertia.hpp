#pragma once

#include "gfr/fields.hpp"

namespace gfr {

/// The Helmholtz-power operator A = (1 - alpha*Laplacian)^k acting diagonally
/// on vector-field components through its Fourier symbol
/// (1 + alpha*|kappa|^2)^k >= 1. It defines the right-invariant inner product
/// a_inner(u, w) = <A u, w>_{L2} and the norm ||u||_A.
struct InertiaSpec {
    double alpha;
    int order_k;

    InertiaSpec(double alpha_, int order_k_) : alpha(alpha_), order_k(order_k_) {
        if (!(alpha > 0.0)) throw FieldError("InertiaSpec: alpha must be positive");
        if (order_k < 2) throw FieldError("InertiaSpec: order_k must be >= 2");
    }

    double symbol(double kappa_sq) const;
};

VectorField apply_inertia(const InertiaSpec& spec, const VectorField& v);

/// Exact grid inverse of apply_inertia (divide by the symbol mode by mode).
VectorField invert_inertia(const InertiaSpec& spec, const VectorField& m);

double a_inner(const InertiaSpec& spec, const VectorField& u, const VectorField& w);
double a_norm(const InertiaSpec& spec, const VectorField& u);

} // namespace gfr
