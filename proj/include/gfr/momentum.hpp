#pragma once

#include "gfr/fields.hpp"

namespace gfr {

/// Eulerian force split into the two cotangent-lift momentum-map terms.
/// total = j1_term + j2_term holds nodewise by construction.
struct ForceBreakdown {
    VectorField j1_term; // -P grad(I) with P = I - I1
    VectorField j2_term; // div-form term applied to p = sigma * (h - g)
    VectorField total;
};

/// Momentum map for the push-forward action on functions: J1(I, P) = -P grad(I).
/// Pairs as <J1(I,P), xi> = <P, -xi . grad(I)> for every vector field xi.
VectorField momentum_j1(const ScalarField& I, const ScalarField& P);

/// Momentum map for the push-forward action on metrics, in coordinates on the
/// flat torus (indices raised with the flat metric, covariant derivative =
/// partial derivative):
///   J2(h,p)_j = 2 (d_i p_{im}) h_{jm} + 2 p_{im} (d_i h_{jm}) - p_{im} (d_j h_{im})
/// Pairs as <J2(h,p), V> = <p, -Lie_V h> for band-limited fields.
/// Requires h pointwise positive-definite.
VectorField momentum_j2(const MetricField& h, const MetricField& p);

/// F(phi) evaluated in Eulerian coordinates:
///   j1_term = J1(I, I - I1),  j2_term = J2(h, sigma * (h - g_ref)).
/// At the matched state (I = I1, h = g_ref) the total vanishes identically.
ForceBreakdown assemble_force(const ScalarField& I, const ScalarField& I1,
                              const MetricField& h, const MetricField& g_ref, double sigma);

} // namespace gfr
