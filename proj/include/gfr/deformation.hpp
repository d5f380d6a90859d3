#pragma once

#include <utility>

#include "gfr/fields.hpp"

namespace gfr {

/// Coupled forward map phi and inverse psi = phi^{-1}, both kept as periodic
/// displacement grids: phi(x) = x + d_phi(x) mod L. Displacements rather than
/// absolute maps make the periodic wrap exact and the identity a zero field.
/// The inverse is evolved alongside phi, never re-solved, so its consistency
/// defect is monitored instead of assumed.
struct DiffeoPair {
    VectorField phi_displacement;
    VectorField psi_displacement;

    DiffeoPair(VectorField phi_d, VectorField psi_d)
        : phi_displacement(std::move(phi_d)), psi_displacement(std::move(psi_d)) {
        require_same_grid(phi_displacement.grid, psi_displacement.grid, "DiffeoPair");
        require_finite(phi_displacement, "DiffeoPair phi");
        require_finite(psi_displacement, "DiffeoPair psi");
    }

    const TorusGrid& grid() const { return phi_displacement.grid; }

    static DiffeoPair identity(const TorusGrid& g) {
        return DiffeoPair(VectorField(g), VectorField(g));
    }
};

struct StepReport {
    double dt_used = 0.0;
    double min_jac_det = 1.0;
    double inverse_defect = 0.0; // grid-cell units
};

/// One explicit step of the coupled flow:
///   phi_new(x) = phi(x) + dt * u(phi(x))          (Lagrangian update)
///   psi_new(x) = psi(x - dt * u(x))               (semi-Lagrangian update)
/// Both are O(dt^2)-consistent with the continuous pair. Throws
/// NonDiffeomorphicError if min det(D phi_new) <= jac_floor.
std::pair<DiffeoPair, StepReport> advance(const DiffeoPair& pair, const VectorField& u,
                                          double dt, double jac_floor = 1e-3);

/// I(x) = I0(psi(x)), the deformed template.
ScalarField pullback_image(const ScalarField& I0, const DiffeoPair& pair);

/// h_{ij}(x) = sum_a  d_i psi^a(x) * d_j psi^a(x), the push-forward of the
/// flat metric under phi (equivalently the pull-back under psi). The Jacobian
/// of psi is spectral. Throws NonDiffeomorphicError if any nodal det <= 0.
MetricField pushforward_metric(const DiffeoPair& pair);

/// Minimum over nodes of det(I + D d_phi), D spectral.
double jacobian_min_det(const DiffeoPair& pair);

/// max_x torus-distance(phi(psi(x)), x) in grid-cell units.
double inverse_defect_cells(const DiffeoPair& pair);

} // namespace gfr
