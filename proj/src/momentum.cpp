#include "gfr/momentum.hpp"

#include "gfr/spectral.hpp"

namespace gfr {

VectorField momentum_j1(const ScalarField& I, const ScalarField& P) {
    require_same_grid(I.grid, P.grid, "momentum_j1");
    require_finite(I, "momentum_j1 I");
    require_finite(P, "momentum_j1 P");
    VectorField grad = spectral_gradient(I);
    const std::size_t sz = I.grid.size();
    for (int a = 0; a < I.grid.dim; ++a) {
        auto& c = grad.comp[static_cast<std::size_t>(a)];
        for (std::size_t m = 0; m < sz; ++m) {
            c[m] = -P.values[m] * c[m];
        }
    }
    return grad;
}

VectorField momentum_j2(const MetricField& h, const MetricField& p) {
    require_same_grid(h.grid, p.grid, "momentum_j2");
    require_finite(h, "momentum_j2 h");
    require_finite(p, "momentum_j2 p");
    if (!h.is_positive_definite()) {
        throw FieldError("momentum_j2: h is not pointwise positive-definite");
    }

    const TorusGrid& g = h.grid;
    const int dim = g.dim;
    const std::vector<MetricField> dh = spectral_tensor_derivative(h);
    const std::vector<MetricField> dp = spectral_tensor_derivative(p);

    VectorField out(g);
    const std::size_t sz = g.size();
    for (int j = 0; j < dim; ++j) {
        auto& out_j = out.comp[static_cast<std::size_t>(j)];
        for (int i = 0; i < dim; ++i) {
            const auto& dp_i = dp[static_cast<std::size_t>(i)];
            const auto& dh_i = dh[static_cast<std::size_t>(i)];
            const auto& dh_j = dh[static_cast<std::size_t>(j)];
            for (int mm = 0; mm < dim; ++mm) {
                const std::size_t c_im = static_cast<std::size_t>(MetricField::comp_of(i, mm, dim));
                const std::size_t c_jm = static_cast<std::size_t>(MetricField::comp_of(j, mm, dim));
                const auto& p_im = p.comp[c_im];
                const auto& h_jm = h.comp[c_jm];
                const auto& dip_im = dp_i.comp[c_im];
                const auto& dih_jm = dh_i.comp[c_jm];
                const auto& djh_im = dh_j.comp[c_im];
                for (std::size_t node = 0; node < sz; ++node) {
                    out_j[node] += 2.0 * dip_im[node] * h_jm[node] +
                                   2.0 * p_im[node] * dih_jm[node] -
                                   p_im[node] * djh_im[node];
                }
            }
        }
    }
    return out;
}

ForceBreakdown assemble_force(const ScalarField& I, const ScalarField& I1,
                              const MetricField& h, const MetricField& g_ref, double sigma) {
    require_same_grid(I.grid, I1.grid, "assemble_force");
    require_same_grid(I.grid, h.grid, "assemble_force");
    require_same_grid(I.grid, g_ref.grid, "assemble_force");
    if (sigma < 0.0) throw FieldError("assemble_force: sigma must be non-negative");

    VectorField j1 = momentum_j1(I, I - I1);
    VectorField j2(I.grid);
    if (sigma > 0.0) {
        j2 = momentum_j2(h, sigma * (h - g_ref));
    } else if (!h.is_positive_definite()) {
        // greedy-matching mode skips the J2 derivatives but keeps the contract
        throw FieldError("assemble_force: h is not pointwise positive-definite");
    }
    ForceBreakdown out{j1, j2, j1 + j2};
    return out;
}

} // namespace gfr
