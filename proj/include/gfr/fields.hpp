#pragma once

#include <vector>

#include "gfr/grid.hpp"

namespace gfr {

/// Sampled real function on a periodic grid (images I0, I1, I).
struct ScalarField {
    TorusGrid grid;
    std::vector<double> values; // size grid.size()

    explicit ScalarField(const TorusGrid& g, double fill = 0.0)
        : grid(g), values(g.size(), fill) {}

    ScalarField(const TorusGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.size()) {
            throw FieldError("ScalarField: value count does not match grid");
        }
    }
};

/// Sampled velocity/direction field (v, xi, descent direction).
struct VectorField {
    TorusGrid grid;
    std::vector<std::vector<double>> comp; // comp[a], a < grid.dim

    explicit VectorField(const TorusGrid& g, double fill = 0.0) : grid(g) {
        comp.assign(static_cast<std::size_t>(g.dim), std::vector<double>(g.size(), fill));
    }
};

/// Sampled symmetric 2-tensor field (h = pushforward metric, perturbations p).
/// Only the upper triangle is stored, so symmetry is structural:
/// one component for dim 1, three (00, 01, 11) for dim 2.
struct MetricField {
    TorusGrid grid;
    std::vector<std::vector<double>> comp;

    explicit MetricField(const TorusGrid& g, double fill = 0.0) : grid(g) {
        comp.assign(static_cast<std::size_t>(component_count(g.dim)),
                    std::vector<double>(g.size(), fill));
    }

    static int component_count(int dim) { return dim == 1 ? 1 : 3; }

    /// Flat component index of entry (i, j); for dim 2 this is i + j.
    static int comp_of(int i, int j, int dim) { return dim == 1 ? 0 : i + j; }

    double at(int i, int j, std::size_t node) const {
        return comp[static_cast<std::size_t>(comp_of(i, j, grid.dim))][node];
    }

    /// The flat background metric g = identity.
    static MetricField identity(const TorusGrid& g) {
        MetricField m(g);
        for (auto& v : m.comp[0]) v = 1.0;
        if (g.dim == 2) {
            for (auto& v : m.comp[2]) v = 1.0;
        }
        return m;
    }

    /// Pointwise positive-definiteness: det > 0 and trace > 0 at every node.
    bool is_positive_definite() const;

    /// det of the tensor at a node.
    double det(std::size_t node) const {
        if (grid.dim == 1) return comp[0][node];
        return comp[0][node] * comp[2][node] - comp[1][node] * comp[1][node];
    }
};

bool all_finite(const ScalarField& f);
bool all_finite(const VectorField& f);
bool all_finite(const MetricField& f);

void require_finite(const ScalarField& f, const char* what);
void require_finite(const VectorField& f, const char* what);
void require_finite(const MetricField& f, const char* what);

/// Grid sum times cell volume: exact spectral quadrature on periodic grids.
double l2_inner_scalar(const ScalarField& a, const ScalarField& b);

/// Componentwise L2 pairing of vector fields.
double l2_inner_vector(const VectorField& a, const VectorField& b);

/// Sum of p^{ij} q_{ij} mu_g with indices raised by the flat metric, i.e. the
/// Frobenius product with off-diagonal terms counted twice, times cell volume.
double l2_inner_tensor(const MetricField& p, const MetricField& q);

ScalarField operator-(const ScalarField& a, const ScalarField& b);
VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a);
VectorField operator*(double s, const VectorField& a);
MetricField operator-(const MetricField& a, const MetricField& b);
MetricField operator*(double s, const MetricField& a);

} // namespace gfr
