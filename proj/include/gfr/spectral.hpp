#pragma once

#include <vector>

#include "gfr/fields.hpp"

namespace gfr {

/// Fourier-collocation partial derivative along one axis. The derivative of
/// the Nyquist mode is set to zero, which makes the operator skew-adjoint
/// under the grid inner product (summation by parts holds to roundoff).
ScalarField spectral_derivative(const ScalarField& f, int axis);

/// Gradient of a scalar field, one spectral derivative per axis.
VectorField spectral_gradient(const ScalarField& f);

/// Per-axis partial derivatives of every tensor component:
/// result[axis] holds d_axis t_{jk} at each node.
std::vector<MetricField> spectral_tensor_derivative(const MetricField& t);

/// Jacobian of a vector field: entry(a, b) = d v^a / d x_b per node.
struct JacobianField {
    TorusGrid grid;
    std::vector<std::vector<double>> entries; // index a * dim + b

    explicit JacobianField(const TorusGrid& g) : grid(g) {
        entries.assign(static_cast<std::size_t>(g.dim * g.dim),
                       std::vector<double>(g.size(), 0.0));
    }

    const std::vector<double>& entry(int a, int b) const {
        return entries[static_cast<std::size_t>(a * grid.dim + b)];
    }
    std::vector<double>& entry(int a, int b) {
        return entries[static_cast<std::size_t>(a * grid.dim + b)];
    }
};

JacobianField spectral_jacobian(const VectorField& v);

namespace spectral {

/// Signed integer frequency of DFT bin k on an n-point axis (Nyquist -> +n/2).
inline int signed_freq(int k, int n) { return k <= n / 2 ? k : k - n; }

/// |kappa|^2 per mode in DFT storage order, kappa = (2*pi/L) * signed frequency.
std::vector<double> kappa_squared(const TorusGrid& g);

/// Multiply every Fourier mode by a real factor given in DFT storage order,
/// then transform back. The multiplier must carry the symmetry
/// mult[-k] = mult[k]; the inverse transform is checked to be real.
ScalarField apply_mode_multiplier(const ScalarField& f, const std::vector<double>& mult);
VectorField apply_mode_multiplier(const VectorField& v, const std::vector<double>& mult);

} // namespace spectral

} // namespace gfr
