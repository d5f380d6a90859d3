#pragma once

#include <cstddef>
#include <string>

#include "gfr/errors.hpp"

namespace gfr {

/// Uniform periodic grid on the flat torus T^dim with square cells.
/// Node positions are x_i = i * spacing() per axis. The background metric is
/// the Euclidean identity, so the Riemannian volume element is cell_volume()
/// at every node and index raising/lowering is a no-op.
struct TorusGrid {
    int dim;        // 1 or 2
    int n;          // nodes per axis; even and >= 8 (Nyquist handling needs even n)
    double length;  // side length L per axis

    TorusGrid(int dim_, int n_, double length_) : dim(dim_), n(n_), length(length_) {
        if (dim != 1 && dim != 2) {
            throw FieldError("TorusGrid: dim must be 1 or 2");
        }
        if (n < 8 || n % 2 != 0) {
            throw FieldError("TorusGrid: n must be even and >= 8");
        }
        if (!(length > 0.0)) {
            throw FieldError("TorusGrid: side length must be positive");
        }
    }

    std::size_t size() const {
        std::size_t s = static_cast<std::size_t>(n);
        return dim == 1 ? s : s * s;
    }

    double spacing() const { return length / n; }

    double cell_volume() const {
        const double h = spacing();
        return dim == 1 ? h : h * h;
    }

    /// Row-major node index; axis 0 is the slow index.
    std::size_t index(int i) const { return static_cast<std::size_t>(i); }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
               static_cast<std::size_t>(j);
    }

    /// Coordinate of node i along one axis.
    double node(int i) const { return i * spacing(); }

    bool operator==(const TorusGrid&) const = default;
};

inline void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* what) {
    if (!(a == b)) {
        throw FieldError(std::string(what) + ": fields live on different grids");
    }
}

} // namespace gfr
