#include "gfr/fields.hpp"

#include <cmath>

namespace gfr {

namespace {

bool finite_all(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

} // namespace

bool MetricField::is_positive_definite() const {
    const std::size_t sz = grid.size();
    for (std::size_t m = 0; m < sz; ++m) {
        const double tr = grid.dim == 1 ? comp[0][m] : comp[0][m] + comp[2][m];
        if (!(det(m) > 0.0) || !(tr > 0.0)) return false;
    }
    return true;
}

bool all_finite(const ScalarField& f) { return finite_all(f.values); }

bool all_finite(const VectorField& f) {
    for (const auto& c : f.comp) {
        if (!finite_all(c)) return false;
    }
    return true;
}

bool all_finite(const MetricField& f) {
    for (const auto& c : f.comp) {
        if (!finite_all(c)) return false;
    }
    return true;
}

void require_finite(const ScalarField& f, const char* what) {
    if (!all_finite(f)) throw FieldError(std::string(what) + ": non-finite scalar field");
}

void require_finite(const VectorField& f, const char* what) {
    if (!all_finite(f)) throw FieldError(std::string(what) + ": non-finite vector field");
}

void require_finite(const MetricField& f, const char* what) {
    if (!all_finite(f)) throw FieldError(std::string(what) + ": non-finite tensor field");
}

double l2_inner_scalar(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "l2_inner_scalar");
    double sum = 0.0;
    const std::size_t sz = a.grid.size();
    for (std::size_t m = 0; m < sz; ++m) {
        sum += a.values[m] * b.values[m];
    }
    return sum * a.grid.cell_volume();
}

double l2_inner_vector(const VectorField& a, const VectorField& b) {
    require_same_grid(a.grid, b.grid, "l2_inner_vector");
    double sum = 0.0;
    const std::size_t sz = a.grid.size();
    for (int c = 0; c < a.grid.dim; ++c) {
        const auto& ac = a.comp[static_cast<std::size_t>(c)];
        const auto& bc = b.comp[static_cast<std::size_t>(c)];
        for (std::size_t m = 0; m < sz; ++m) {
            sum += ac[m] * bc[m];
        }
    }
    return sum * a.grid.cell_volume();
}

double l2_inner_tensor(const MetricField& p, const MetricField& q) {
    require_same_grid(p.grid, q.grid, "l2_inner_tensor");
    double sum = 0.0;
    const std::size_t sz = p.grid.size();
    if (p.grid.dim == 1) {
        for (std::size_t m = 0; m < sz; ++m) {
            sum += p.comp[0][m] * q.comp[0][m];
        }
    } else {
        // off-diagonal entries appear twice in the full index contraction
        for (std::size_t m = 0; m < sz; ++m) {
            sum += p.comp[0][m] * q.comp[0][m] + 2.0 * p.comp[1][m] * q.comp[1][m] +
                   p.comp[2][m] * q.comp[2][m];
        }
    }
    return sum * p.grid.cell_volume();
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "scalar difference");
    ScalarField out(a.grid);
    for (std::size_t m = 0; m < a.values.size(); ++m) {
        out.values[m] = a.values[m] - b.values[m];
    }
    return out;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
    require_same_grid(a.grid, b.grid, "vector sum");
    VectorField out(a.grid);
    for (std::size_t c = 0; c < a.comp.size(); ++c) {
        for (std::size_t m = 0; m < a.comp[c].size(); ++m) {
            out.comp[c][m] = a.comp[c][m] + b.comp[c][m];
        }
    }
    return out;
}

VectorField operator-(const VectorField& a) { return -1.0 * a; }

VectorField operator*(double s, const VectorField& a) {
    VectorField out(a.grid);
    for (std::size_t c = 0; c < a.comp.size(); ++c) {
        for (std::size_t m = 0; m < a.comp[c].size(); ++m) {
            out.comp[c][m] = s * a.comp[c][m];
        }
    }
    return out;
}

MetricField operator-(const MetricField& a, const MetricField& b) {
    require_same_grid(a.grid, b.grid, "tensor difference");
    MetricField out(a.grid);
    for (std::size_t c = 0; c < a.comp.size(); ++c) {
        for (std::size_t m = 0; m < a.comp[c].size(); ++m) {
            out.comp[c][m] = a.comp[c][m] - b.comp[c][m];
        }
    }
    return out;
}

MetricField operator*(double s, const MetricField& a) {
    MetricField out(a.grid);
    for (std::size_t c = 0; c < a.comp.size(); ++c) {
        for (std::size_t m = 0; m < a.comp[c].size(); ++m) {
            out.comp[c][m] = s * a.comp[c][m];
        }
    }
    return out;
}

} // namespace gfr
