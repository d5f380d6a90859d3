#include "gfr/flow.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace gfr {

EnergyBreakdown energy(const ScalarField& I, const ScalarField& I1, const MetricField& h,
                       const MetricField& g_ref, double sigma) {
    require_same_grid(I.grid, I1.grid, "energy");
    require_same_grid(I.grid, h.grid, "energy");
    EnergyBreakdown e;
    const ScalarField diff = I - I1;
    e.match = 0.5 * l2_inner_scalar(diff, diff);
    if (sigma > 0.0) {
        const MetricField pdiff = h - g_ref;
        e.reg = 0.5 * sigma * l2_inner_tensor(pdiff, pdiff);
    }
    e.total = e.match + e.reg;
    return e;
}

FlowState make_flow_state(const FlowConfig& cfg, const ScalarField& I0, const ScalarField& I1,
                          const DiffeoPair& pair) {
    FlowState st{0,
                 pair,
                 pullback_image(I0, pair),
                 pushforward_metric(pair),
                 0.0,
                 0.0,
                 0.0,
                 0.0,
                 0.0,
                 jacobian_min_det(pair),
                 inverse_defect_cells(pair)};
    const EnergyBreakdown e =
        energy(st.image, I1, st.metric, MetricField::identity(pair.grid()), cfg.sigma);
    st.energy_match = e.match;
    st.energy_reg = e.reg;
    return st;
}

DescentResult descent_velocity(const FlowConfig& cfg, const ScalarField& I,
                               const ScalarField& I1, const DiffeoPair& pair) {
    const MetricField h = pushforward_metric(pair);
    ForceBreakdown force =
        assemble_force(I, I1, h, MetricField::identity(pair.grid()), cfg.sigma);
    VectorField u = -1.0 * invert_inertia(cfg.inertia, force.total);
    DescentResult out{std::move(u), std::move(force), 0.0};
    out.norm_a = a_norm(cfg.inertia, out.u);
    return out;
}

namespace {

// Backtracking on a precomputed descent direction. Trial states that lose
// diffeomorphy count as rejections, same as an energy increase.
std::pair<FlowState, StepReport> line_search_advance(const FlowConfig& cfg,
                                                     const FlowState& state,
                                                     const ScalarField& I0,
                                                     const ScalarField& I1,
                                                     const VectorField& u, double u_norm_a,
                                                     double dt_start) {
    const MetricField g_ref = MetricField::identity(state.pair.grid());
    const double e_old = state.energy_total();
    double dt = dt_start;
    while (dt >= cfg.dt_min) {
        std::optional<std::pair<DiffeoPair, StepReport>> trial;
        try {
            trial = advance(state.pair, u, dt, cfg.jac_floor);
        } catch (const NonDiffeomorphicError&) {
            // rejected like an energy increase
        }
        if (trial.has_value()) {
            auto& [trial_pair, report] = *trial;
            std::optional<MetricField> trial_metric;
            try {
                trial_metric = pushforward_metric(trial_pair);
            } catch (const NonDiffeomorphicError&) {
            }
            if (trial_metric.has_value()) {
                ScalarField trial_image = pullback_image(I0, trial_pair);
                const EnergyBreakdown e =
                    energy(trial_image, I1, *trial_metric, g_ref, cfg.sigma);
                if (e.total < e_old) {
                    if (report.inverse_defect > cfg.defect_bound) {
                        // fail loudly rather than silently reproject
                        throw NonDiffeomorphicError(
                            "flow_step: inverse-consistency defect " +
                            std::to_string(report.inverse_defect) + " cells exceeds bound " +
                            std::to_string(cfg.defect_bound));
                    }
                    FlowState next{state.step + 1,
                                   std::move(trial_pair),
                                   std::move(trial_image),
                                   std::move(*trial_metric),
                                   e.match,
                                   e.reg,
                                   0.0,
                                   state.path_length_a + u_norm_a * dt,
                                   state.t_elapsed + dt,
                                   report.min_jac_det,
                                   report.inverse_defect};
                    return {std::move(next), report};
                }
            }
        }
        dt *= 0.5;
    }
    throw LineSearchFailedError("flow_step: no strict energy decrease above dt_min = " +
                                std::to_string(cfg.dt_min));
}

} // namespace

std::pair<FlowState, StepReport> flow_step(const FlowConfig& cfg, const FlowState& state,
                                           const ScalarField& I0, const ScalarField& I1,
                                           double dt_start) {
    cfg.validate();
    DescentResult d = descent_velocity(cfg, state.image, I1, state.pair);
    return line_search_advance(cfg, state, I0, I1, d.u, d.norm_a, dt_start);
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::Converged: return "converged";
        case Termination::MaxSteps: return "max_steps";
        case Termination::LineSearchFailed: return "line_search_failed";
        case Termination::NonDiffeomorphic: return "non_diffeomorphic";
    }
    return "unknown";
}

namespace {

TraceRecord record_of(const FlowState& st, double dt) {
    TraceRecord r;
    r.step = st.step;
    r.t = st.t_elapsed;
    r.energy_total = st.energy_total();
    r.energy_match = st.energy_match;
    r.energy_reg = st.energy_reg;
    r.velocity_norm_a = st.velocity_norm_a;
    r.dt = dt;
    r.min_jac_det = st.min_jac_det;
    r.inverse_defect = st.inverse_defect;
    r.path_length_a = st.path_length_a;
    return r;
}

} // namespace

RunResult run_flow(const FlowConfig& cfg, const ScalarField& I0, const ScalarField& I1,
                   const DiffeoPair& initial) {
    cfg.validate();
    require_same_grid(I0.grid, I1.grid, "run_flow");
    require_same_grid(I0.grid, initial.grid(), "run_flow");

    FlowState state = make_flow_state(cfg, I0, I1, initial);
    RunResult result{state, {}, Termination::MaxSteps, "", 0.0, state.energy_total()};
    result.grad_tol_used =
        cfg.grad_tol > 0.0 ? cfg.grad_tol : 1e-6 * std::sqrt(result.initial_energy);

    DescentResult d = descent_velocity(cfg, state.image, I1, state.pair);
    state.velocity_norm_a = d.norm_a;
    result.trace.push_back(record_of(state, 0.0));

    double dt_next = cfg.dt_init;
    while (true) {
        if (state.velocity_norm_a <= result.grad_tol_used) {
            result.reason = Termination::Converged;
            break;
        }
        if (state.step >= cfg.max_steps) {
            result.reason = Termination::MaxSteps;
            break;
        }
        try {
            auto [next, report] =
                line_search_advance(cfg, state, I0, I1, d.u, d.norm_a, dt_next);
            state = std::move(next);
            d = descent_velocity(cfg, state.image, I1, state.pair);
            state.velocity_norm_a = d.norm_a;
            result.trace.push_back(record_of(state, report.dt_used));
            // try to grow back toward the ceiling
            dt_next = std::min(2.0 * report.dt_used, cfg.dt_init);
        } catch (const LineSearchFailedError& err) {
            result.reason = Termination::LineSearchFailed;
            result.message = err.what();
            break;
        } catch (const NonDiffeomorphicError& err) {
            result.reason = Termination::NonDiffeomorphic;
            result.message = err.what();
            break;
        }
    }
    result.final_state = std::move(state);
    return result;
}

GradientCheck fd_gradient_check(const FlowConfig& cfg, const ScalarField& I0,
                                const ScalarField& I1, const DiffeoPair& pair,
                                const VectorField& xi, double eps) {
    if (!(eps > 0.0)) throw FieldError("fd_gradient_check: eps must be positive");
    const MetricField g_ref = MetricField::identity(pair.grid());

    const ScalarField image = pullback_image(I0, pair);
    DescentResult d = descent_velocity(cfg, image, I1, pair);
    const double analytic = -a_inner(cfg.inertia, d.u, xi);

    // advance only takes dt > 0; step along -xi for the backward probe.
    // jac_floor is relaxed: probe states only need to be evaluable.
    auto [plus_pair, r1] = advance(pair, xi, eps, 1e-12);
    auto [minus_pair, r2] = advance(pair, -xi, eps, 1e-12);
    (void)r1;
    (void)r2;
    const double e_plus =
        energy(pullback_image(I0, plus_pair), I1, pushforward_metric(plus_pair), g_ref,
               cfg.sigma)
            .total;
    const double e_minus =
        energy(pullback_image(I0, minus_pair), I1, pushforward_metric(minus_pair), g_ref,
               cfg.sigma)
            .total;
    const double numeric = (e_plus - e_minus) / (2.0 * eps);

    GradientCheck out{analytic, numeric, 0.0};
    const double denom = std::max(std::abs(analytic), std::abs(numeric));
    out.rel_err = denom > 0.0 ? std::abs(analytic - numeric) / denom : 0.0;
    return out;
}

} // namespace gfr
