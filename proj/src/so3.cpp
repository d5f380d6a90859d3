#include "gfr/so3.hpp"

#include <algorithm>
#include <cmath>

namespace gfr::so3 {

Eigen::Matrix3d hat(const Eigen::Vector3d& w) {
    Eigen::Matrix3d W;
    W << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
    return W;
}

Eigen::Vector3d vee(const Eigen::Matrix3d& W) {
    const double defect = (W + W.transpose()).cwiseAbs().maxCoeff();
    if (defect > 1e-12 * std::max(1.0, W.cwiseAbs().maxCoeff())) {
        throw FieldError("vee: input matrix is not skew-symmetric");
    }
    return Eigen::Vector3d(W(2, 1), W(0, 2), W(1, 0));
}

Eigen::Vector3d so3_momentum(const Eigen::Vector3d& q, const Eigen::Vector3d& p) {
    return q.cross(p);
}

Eigen::Matrix3d rodrigues(const Eigen::Vector3d& w) {
    const double theta = w.norm();
    const Eigen::Matrix3d W = hat(w);
    double c1; // sin(theta)/theta
    double c2; // (1 - cos(theta))/theta^2
    if (theta < 1e-4) {
        const double t2 = theta * theta;
        c1 = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
        c2 = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
    } else {
        c1 = std::sin(theta) / theta;
        c2 = (1.0 - std::cos(theta)) / (theta * theta);
    }
    return Eigen::Matrix3d::Identity() + c1 * W + c2 * (W * W);
}

Rotation::Rotation(const Eigen::Matrix3d& m) : matrix(m) {
    if (orthogonality_defect() > 1e-10) {
        throw FieldError("Rotation: matrix is not orthogonal");
    }
    if (matrix.determinant() <= 0.0) {
        throw FieldError("Rotation: determinant must be positive");
    }
}

double Rotation::orthogonality_defect() const {
    return (matrix.transpose() * matrix - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

So3Inertia::So3Inertia(const Eigen::Matrix3d& m) : matrix(m) {
    const double asym = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-14 * std::max(1.0, matrix.cwiseAbs().maxCoeff())) {
        throw FieldError("So3Inertia: matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(matrix);
    if (es.eigenvalues().minCoeff() <= 0.0) {
        throw FieldError("So3Inertia: matrix is not positive-definite");
    }
}

Eigen::Vector3d So3Inertia::solve(const Eigen::Vector3d& rhs) const {
    return matrix.llt().solve(rhs);
}

double So3Inertia::inner(const Eigen::Vector3d& a, const Eigen::Vector3d& b) const {
    return (matrix * a).dot(b);
}

double So3Inertia::norm(const Eigen::Vector3d& a) const {
    return std::sqrt(std::max(0.0, inner(a, a)));
}

double so3_energy(const Rotation& R, const Eigen::Vector3d& x0, const Eigen::Vector3d& x1) {
    return (R.matrix * x0 - x1).squaredNorm();
}

Eigen::Vector3d so3_gradient(const Rotation& R, const Eigen::Vector3d& x0,
                             const Eigen::Vector3d& x1, const So3Inertia& A) {
    const Eigen::Vector3d q = R.matrix * x0;
    return A.solve(2.0 * q.cross(q - x1));
}

So3Result so3_flow(const Eigen::Vector3d& x0, const Eigen::Vector3d& x1, const So3Inertia& A,
                   const Rotation& R0, double dt, int max_steps, double tol) {
    if (!(dt > 0.0)) throw FieldError("so3_flow: dt must be positive");
    if (max_steps < 0) throw FieldError("so3_flow: max_steps must be non-negative");

    So3Result result{R0, {}, false, 0, 0.0};
    Eigen::Matrix3d R = R0.matrix;
    double e = so3_energy(R0, x0, x1);
    double t = 0.0;
    double path = 0.0;

    Eigen::Vector3d omega = so3_gradient(Rotation(R), x0, x1, A);
    result.trace.push_back({0, 0.0, e, A.norm(omega), 0.0});

    const double dt_floor = dt * 1e-12;
    for (int step = 1; step <= max_steps; ++step) {
        result.residual = std::sqrt(e);
        if (result.residual <= tol) {
            result.converged = true;
            break;
        }
        // backtrack until the energy strictly decreases
        double trial_dt = dt;
        Eigen::Matrix3d R_new;
        double e_new = e;
        bool accepted = false;
        while (trial_dt >= dt_floor) {
            R_new = rodrigues(-trial_dt * omega) * R;
            e_new = (R_new * x0 - x1).squaredNorm();
            if (e_new < e) {
                accepted = true;
                break;
            }
            trial_dt *= 0.5;
        }
        if (!accepted) break; // discrete stationarity

        const double omega_norm = A.norm(omega);
        R = R_new;
        e = e_new;
        t += trial_dt;
        path += omega_norm * trial_dt;
        result.steps = step;

        omega = so3_gradient(Rotation(R), x0, x1, A);
        result.trace.push_back({step, t, e, A.norm(omega), path});
    }

    result.residual = std::sqrt(e);
    if (result.residual <= tol) result.converged = true;
    result.rotation = Rotation(R);
    return result;
}

} // namespace gfr::so3
