#include "gfr/deformation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gfr/interp.hpp"
#include "gfr/spectral.hpp"

namespace gfr {

namespace {

double min_det_of_displacement_jacobian(const VectorField& d) {
    const TorusGrid& g = d.grid;
    const JacobianField J = spectral_jacobian(d);
    double min_det = std::numeric_limits<double>::infinity();
    const std::size_t sz = g.size();
    if (g.dim == 1) {
        for (std::size_t m = 0; m < sz; ++m) {
            min_det = std::min(min_det, 1.0 + J.entry(0, 0)[m]);
        }
        return min_det;
    }
    for (std::size_t m = 0; m < sz; ++m) {
        const double a00 = 1.0 + J.entry(0, 0)[m];
        const double a01 = J.entry(0, 1)[m];
        const double a10 = J.entry(1, 0)[m];
        const double a11 = 1.0 + J.entry(1, 1)[m];
        min_det = std::min(min_det, a00 * a11 - a01 * a10);
    }
    return min_det;
}

} // namespace

std::pair<DiffeoPair, StepReport> advance(const DiffeoPair& pair, const VectorField& u,
                                          double dt, double jac_floor) {
    require_same_grid(pair.grid(), u.grid, "advance");
    require_finite(u, "advance velocity");
    if (!(dt > 0.0)) throw FieldError("advance: dt must be positive");

    const TorusGrid& g = pair.grid();
    const VectorField& dphi = pair.phi_displacement;
    const VectorField& dpsi = pair.psi_displacement;
    VectorField new_phi(g);
    VectorField new_psi(g);

    if (g.dim == 1) {
        for (int i = 0; i < g.n; ++i) {
            const std::size_t m = g.index(i);
            const double x = g.node(i);
            // u sampled at the particle position phi(x)
            const double u_at_phi = interp::sample_component(g, u.comp[0], x + dphi.comp[0][m]);
            new_phi.comp[0][m] = dphi.comp[0][m] + dt * u_at_phi;
            // psi advected backward along u
            const double foot = x - dt * u.comp[0][m];
            new_psi.comp[0][m] =
                -dt * u.comp[0][m] + interp::sample_component(g, dpsi.comp[0], foot);
        }
    } else {
        for (int i = 0; i < g.n; ++i) {
            for (int j = 0; j < g.n; ++j) {
                const std::size_t m = g.index(i, j);
                const double x = g.node(i);
                const double y = g.node(j);
                const double px = x + dphi.comp[0][m];
                const double py = y + dphi.comp[1][m];
                new_phi.comp[0][m] =
                    dphi.comp[0][m] + dt * interp::sample_component(g, u.comp[0], px, py);
                new_phi.comp[1][m] =
                    dphi.comp[1][m] + dt * interp::sample_component(g, u.comp[1], px, py);
                const double fx = x - dt * u.comp[0][m];
                const double fy = y - dt * u.comp[1][m];
                new_psi.comp[0][m] =
                    -dt * u.comp[0][m] + interp::sample_component(g, dpsi.comp[0], fx, fy);
                new_psi.comp[1][m] =
                    -dt * u.comp[1][m] + interp::sample_component(g, dpsi.comp[1], fx, fy);
            }
        }
    }

    DiffeoPair next(std::move(new_phi), std::move(new_psi));
    StepReport report;
    report.dt_used = dt;
    report.min_jac_det = jacobian_min_det(next);
    report.inverse_defect = inverse_defect_cells(next);
    if (report.min_jac_det <= jac_floor) {
        throw NonDiffeomorphicError("advance: Jacobian determinant fell to " +
                                    std::to_string(report.min_jac_det) + " (floor " +
                                    std::to_string(jac_floor) + ")");
    }
    return {std::move(next), report};
}

ScalarField pullback_image(const ScalarField& I0, const DiffeoPair& pair) {
    require_same_grid(I0.grid, pair.grid(), "pullback_image");
    require_finite(I0, "pullback_image");
    const TorusGrid& g = I0.grid;
    const VectorField& dpsi = pair.psi_displacement;
    ScalarField out(g);
    if (g.dim == 1) {
        for (int i = 0; i < g.n; ++i) {
            const std::size_t m = g.index(i);
            out.values[m] = interp::sample_component(g, I0.values, g.node(i) + dpsi.comp[0][m]);
        }
        return out;
    }
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) {
            const std::size_t m = g.index(i, j);
            out.values[m] = interp::sample_component(g, I0.values, g.node(i) + dpsi.comp[0][m],
                                                     g.node(j) + dpsi.comp[1][m]);
        }
    }
    return out;
}

MetricField pushforward_metric(const DiffeoPair& pair) {
    const TorusGrid& g = pair.grid();
    const JacobianField J = spectral_jacobian(pair.psi_displacement);
    MetricField h(g);
    const std::size_t sz = g.size();
    if (g.dim == 1) {
        for (std::size_t m = 0; m < sz; ++m) {
            const double d = 1.0 + J.entry(0, 0)[m];
            h.comp[0][m] = d * d;
        }
    } else {
        for (std::size_t m = 0; m < sz; ++m) {
            // D psi = I + D d_psi; h = (D psi)^T (D psi)
            const double a00 = 1.0 + J.entry(0, 0)[m];
            const double a01 = J.entry(0, 1)[m];
            const double a10 = J.entry(1, 0)[m];
            const double a11 = 1.0 + J.entry(1, 1)[m];
            h.comp[0][m] = a00 * a00 + a10 * a10;
            h.comp[1][m] = a00 * a01 + a10 * a11;
            h.comp[2][m] = a01 * a01 + a11 * a11;
        }
    }
    for (std::size_t m = 0; m < sz; ++m) {
        if (!(h.det(m) > 0.0)) {
            throw NonDiffeomorphicError("pushforward_metric: degenerate metric at a node");
        }
    }
    return h;
}

double jacobian_min_det(const DiffeoPair& pair) {
    return min_det_of_displacement_jacobian(pair.phi_displacement);
}

double inverse_defect_cells(const DiffeoPair& pair) {
    const TorusGrid& g = pair.grid();
    const VectorField& dphi = pair.phi_displacement;
    const VectorField& dpsi = pair.psi_displacement;
    double worst = 0.0;
    if (g.dim == 1) {
        for (int i = 0; i < g.n; ++i) {
            const std::size_t m = g.index(i);
            const double x = g.node(i);
            const double psi_x = x + dpsi.comp[0][m];
            const double phi_psi_x = psi_x + interp::sample_component(g, dphi.comp[0], psi_x);
            worst = std::max(worst, std::abs(interp::torus_delta(phi_psi_x, x, g.length)));
        }
    } else {
        for (int i = 0; i < g.n; ++i) {
            for (int j = 0; j < g.n; ++j) {
                const std::size_t m = g.index(i, j);
                const double x = g.node(i);
                const double y = g.node(j);
                const double px = x + dpsi.comp[0][m];
                const double py = y + dpsi.comp[1][m];
                const double ex =
                    interp::torus_delta(px + interp::sample_component(g, dphi.comp[0], px, py),
                                        x, g.length);
                const double ey =
                    interp::torus_delta(py + interp::sample_component(g, dphi.comp[1], px, py),
                                        y, g.length);
                worst = std::max(worst, std::hypot(ex, ey));
            }
        }
    }
    return worst / g.spacing();
}

} // namespace gfr
