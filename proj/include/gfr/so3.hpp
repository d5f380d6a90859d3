#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gfr/errors.hpp"

namespace gfr::so3 {

/// hat(w) q = w x q; the usual identification of R^3 with skew matrices.
Eigen::Matrix3d hat(const Eigen::Vector3d& w);

/// Inverse of hat; throws FieldError if the input is not skew within 1e-12.
Eigen::Vector3d vee(const Eigen::Matrix3d& W);

/// Momentum map of the cotangent-lifted rotation action: J(q, p) = q x p,
/// the angular momentum. Pairs as <J(q,p), w> = p . (w x q).
Eigen::Vector3d so3_momentum(const Eigen::Vector3d& q, const Eigen::Vector3d& p);

/// Closed-form exponential exp(hat(w)); exactly orthogonal up to roundoff.
Eigen::Matrix3d rodrigues(const Eigen::Vector3d& w);

/// Rotation with orthogonality checked on construction.
struct Rotation {
    Eigen::Matrix3d matrix;

    explicit Rotation(const Eigen::Matrix3d& m);
    static Rotation identity() { return Rotation(Eigen::Matrix3d::Identity()); }

    double orthogonality_defect() const;
};

/// Inertia operator on so(3) identified with R^3.
struct So3Inertia {
    Eigen::Matrix3d matrix;

    explicit So3Inertia(const Eigen::Matrix3d& m);
    static So3Inertia isotropic() { return So3Inertia(Eigen::Matrix3d::Identity()); }

    Eigen::Vector3d solve(const Eigen::Vector3d& rhs) const;
    double inner(const Eigen::Vector3d& a, const Eigen::Vector3d& b) const;
    double norm(const Eigen::Vector3d& a) const;
};

/// E(R) = ||R x0 - x1||^2.
double so3_energy(const Rotation& R, const Eigen::Vector3d& x0, const Eigen::Vector3d& x1);

/// Body gradient direction: omega = A^{-1} 2 (R x0) x (R x0 - x1), so that
/// grad E(R) = hat(omega) R in the right-invariant metric of A.
Eigen::Vector3d so3_gradient(const Rotation& R, const Eigen::Vector3d& x0,
                             const Eigen::Vector3d& x1, const So3Inertia& A);

struct So3TraceRecord {
    int step = 0;
    double t = 0.0;
    double energy = 0.0;
    double omega_norm_a = 0.0;
    double path_length_a = 0.0;
};

struct So3Result {
    Rotation rotation;
    std::vector<So3TraceRecord> trace;
    bool converged = false;
    int steps = 0;
    double residual = 0.0; // ||R x0 - x1|| at the end
};

/// Gradient flow R <- exp(-dt hat(omega)) R with backtracking on the energy.
/// Stops when ||R x0 - x1|| <= tol; not reaching tol within max_steps is
/// reported, not fatal.
So3Result so3_flow(const Eigen::Vector3d& x0, const Eigen::Vector3d& x1, const So3Inertia& A,
                   const Rotation& R0, double dt, int max_steps, double tol);

} // namespace gfr::so3
