#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gfr/deformation.hpp"
#include "gfr/inertia.hpp"
#include "gfr/momentum.hpp"

namespace gfr {

struct FlowConfig {
    double sigma = 1e-3;            // metric-regularization weight
    InertiaSpec inertia{0.05, 2};   // alpha defaults to 0.05 * L^2 for L = 1
    double dt_init = 0.125;         // first trial step and ceiling for later steps
    double dt_min = 1e-10;
    int max_steps = 2000;
    double grad_tol = 0.0;          // <= 0: resolved to 1e-6 * sqrt(E(initial)) by run_flow
    double jac_floor = 1e-3;
    double defect_bound = 2.0;      // inverse-consistency bound, grid cells

    void validate() const {
        if (sigma < 0.0) throw FieldError("FlowConfig: sigma must be non-negative");
        if (!(dt_init > 0.0) || !(dt_min > 0.0) || dt_min > dt_init) {
            throw FieldError("FlowConfig: need 0 < dt_min <= dt_init");
        }
        if (max_steps < 0) throw FieldError("FlowConfig: max_steps must be non-negative");
        if (!(jac_floor > 0.0)) throw FieldError("FlowConfig: jac_floor must be positive");
        if (!(defect_bound > 0.0)) throw FieldError("FlowConfig: defect_bound must be positive");
    }
};

struct EnergyBreakdown {
    double total = 0.0;
    double match = 0.0; // (1/2) ||I - I1||^2
    double reg = 0.0;   // (sigma/2) ||h - g||^2
};

EnergyBreakdown energy(const ScalarField& I, const ScalarField& I1, const MetricField& h,
                       const MetricField& g_ref, double sigma);

struct FlowState {
    int step = 0;
    DiffeoPair pair;
    ScalarField image;        // I = I0 composed with psi
    MetricField metric;       // h = pushforward of the flat metric
    double energy_match = 0.0;
    double energy_reg = 0.0;
    double velocity_norm_a = 0.0; // ||u||_A at this state, set when evaluated
    double path_length_a = 0.0;   // sum of ||u_n||_A * dt_n
    double t_elapsed = 0.0;       // sum of accepted dt
    double min_jac_det = 1.0;
    double inverse_defect = 0.0;

    double energy_total() const { return energy_match + energy_reg; }
};

/// Build the state for a pair: pull back the image, push forward the metric,
/// evaluate the energy split.
FlowState make_flow_state(const FlowConfig& cfg, const ScalarField& I0, const ScalarField& I1,
                          const DiffeoPair& pair);

struct DescentResult {
    VectorField u;          // descent velocity, u = -A^{-1} F
    ForceBreakdown force;   // F = J(tau(phi)) in Eulerian coordinates
    double norm_a = 0.0;    // ||u||_A
};

/// Force and inverse inertia are evaluated in the Eulerian frame and the
/// update composes u with phi, exactly the factorized form of the flow.
DescentResult descent_velocity(const FlowConfig& cfg, const ScalarField& I,
                               const ScalarField& I1, const DiffeoPair& pair);

/// One gradient-flow step with backtracking: trial advance at dt, halve until
/// the energy strictly decreases. Throws LineSearchFailedError below dt_min
/// and NonDiffeomorphicError if the accepted state violates the defect bound.
std::pair<FlowState, StepReport> flow_step(const FlowConfig& cfg, const FlowState& state,
                                           const ScalarField& I0, const ScalarField& I1,
                                           double dt_start);

struct TraceRecord {
    int step = 0;
    double t = 0.0;
    double energy_total = 0.0;
    double energy_match = 0.0;
    double energy_reg = 0.0;
    double velocity_norm_a = 0.0;
    double dt = 0.0;
    double min_jac_det = 1.0;
    double inverse_defect = 0.0;
    double path_length_a = 0.0;
};

enum class Termination {
    Converged,        // ||u||_A fell to grad_tol
    MaxSteps,         // step budget exhausted
    LineSearchFailed, // discrete stationarity or resolution limit
    NonDiffeomorphic, // Jacobian floor or defect bound violated
};

const char* to_string(Termination t);

struct RunResult {
    FlowState final_state;
    std::vector<TraceRecord> trace; // row 0 is the initial state
    Termination reason = Termination::Converged;
    std::string message;            // failure detail when not converged
    double grad_tol_used = 0.0;
    double initial_energy = 0.0;
};

/// Integrate the gradient flow from `initial` until convergence, max_steps, or
/// failure. A failed run still carries the trace up to the failure.
RunResult run_flow(const FlowConfig& cfg, const ScalarField& I0, const ScalarField& I1,
                   const DiffeoPair& initial);

struct GradientCheck {
    double analytic = 0.0; // <grad E, xi>_A = a_inner(-u, xi)
    double numeric = 0.0;  // central difference of E along advance(pair, xi, eps)
    double rel_err = 0.0;
};

GradientCheck fd_gradient_check(const FlowConfig& cfg, const ScalarField& I0,
                                const ScalarField& I1, const DiffeoPair& pair,
                                const VectorField& xi, double eps);

} // namespace gfr
