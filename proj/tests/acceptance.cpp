// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned here, not configurable.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "gfr/commands.hpp"
#include "gfr/flow.hpp"
#include "gfr/interp.hpp"
#include "gfr/io.hpp"
#include "gfr/so3.hpp"
#include "gfr/spectral.hpp"
#include "gfr/synth.hpp"

#include "test_util.hpp"

using namespace gfr;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& what, bool pass, const std::string& detail) {
    if (!pass) ++g_failures;
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << "C" << number << " " << what << ": "
              << detail << "\n";
}

std::string fmt(double v) { return io::format_double(v); }

FlowConfig reference_config() {
    FlowConfig cfg;
    cfg.sigma = 1e-3;
    cfg.inertia = InertiaSpec(0.05, 2); // alpha = 0.05 * L^2 with L = 1
    cfg.max_steps = 500;
    return cfg;
}

struct ReferenceProblem {
    TorusGrid grid;
    ScalarField I0;
    ScalarField I1;
};

ReferenceProblem reference_problem(int n) {
    const TorusGrid g(2, n, 1.0);
    return {g, synth::gaussian_bump(g, 0.5, 0.5, 0.1),
            synth::gaussian_bump(g, 0.6, 0.5, 0.1)}; // shift 0.1 * L
}

// ---- C1: inertia operator round trip -------------------------------------
void check_operator_roundtrip() {
    const TorusGrid g(2, 64, 1.0);
    const InertiaSpec spec(0.05, 2);
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const VectorField v =
            synth::random_bandlimited_vector(g, 16, 10000u + trial); // band N/4
        const VectorField round = invert_inertia(spec, apply_inertia(spec, v));
        worst = std::max(worst, test::sup_diff(round, v) / test::sup_norm(v));
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    criterion(1, "operator round trip (100 fields, N=64)",
              worst <= 1e-12 && seconds < 5.0,
              "max rel sup error " + fmt(worst) + " <= 1e-12, " + fmt(seconds) + " s < 5 s");
}

// ---- C2: momentum-map pairing identities ----------------------------------
void check_pairing_identities() {
    const TorusGrid g(2, 64, 1.0);

    const ScalarField I = synth::random_bandlimited_scalar(g, 16, 20001);
    const ScalarField P = synth::random_bandlimited_scalar(g, 16, 20002);
    const VectorField xi = synth::random_bandlimited_vector(g, 16, 20003);
    const VectorField j1 = momentum_j1(I, P);
    const VectorField grad = spectral_gradient(I);
    ScalarField advect(g);
    for (std::size_t m = 0; m < g.size(); ++m) {
        advect.values[m] =
            -(xi.comp[0][m] * grad.comp[0][m] + xi.comp[1][m] * grad.comp[1][m]);
    }
    const double j1_err =
        test::rel_diff(l2_inner_vector(j1, xi), l2_inner_scalar(P, advect));

    MetricField h = MetricField::identity(g);
    const MetricField bump = synth::random_bandlimited_tensor(g, 16, 20004, 0.2);
    for (std::size_t c = 0; c < h.comp.size(); ++c) {
        for (std::size_t m = 0; m < h.comp[c].size(); ++m) h.comp[c][m] += bump.comp[c][m];
    }
    const MetricField p = synth::random_bandlimited_tensor(g, 16, 20005);
    const VectorField V = synth::random_bandlimited_vector(g, 16, 20006);
    const double lhs = l2_inner_vector(momentum_j2(h, p), V);
    const double rhs = -l2_inner_tensor(p, test::oracle_lie_derivative(V, h));
    const double j2_err = test::rel_diff(lhs, rhs);

    criterion(2, "momentum-map pairing identities",
              j1_err <= 1e-12 && j2_err <= 1e-6,
              "J1 rel " + fmt(j1_err) + " <= 1e-12, J2-vs-Lie rel " + fmt(j2_err) +
                  " <= 1e-6");
}

// ---- C3: gradient consistency ---------------------------------------------
// Known-red: the numeric side differentiates the bilinear pullback, whose
// cell-secant slopes deviate from the smooth gradient at O(h |d2 I|) with
// quasi-random sign per node. At N = 64 that floors the best achievable
// agreement near 1e-3 (direction-dependent up to ~1e-2 when a random
// direction pairs weakly with the force), independent of eps. The 1e-4
// tolerance is asserted as stated rather than weakened.
void check_gradient_consistency() {
    const ReferenceProblem prob = reference_problem(64);
    const FlowConfig cfg = reference_config();
    const VectorField warp = synth::random_bandlimited_vector(prob.grid, 2, 30001, 0.03);
    const auto [pair, report] = advance(DiffeoPair::identity(prob.grid), warp, 1.0);

    double worst = 0.0;
    for (int dir = 0; dir < 10; ++dir) {
        const VectorField xi =
            synth::random_bandlimited_vector(prob.grid, 4, 30010u + dir);
        double best = 1.0;
        for (double eps : {1e-3, 1e-4, 1e-5}) {
            best = std::min(best,
                            fd_gradient_check(cfg, prob.I0, prob.I1, pair, xi, eps).rel_err);
        }
        worst = std::max(worst, best);
    }
    criterion(3, "gradient consistency (10 directions, N=64)", worst <= 1e-4,
              "worst min-over-eps rel err " + fmt(worst) +
                  " vs 1e-4 (bilinear-interpolant slope floor, see notes)");
}

// ---- C4: dissipation identity ---------------------------------------------
void check_dissipation_identity() {
    const ReferenceProblem prob = reference_problem(48);
    FlowConfig cfg = reference_config();
    // evaluate at a slightly evolved state so probe points are not
    // node-aligned (the interpolant slope bias floors the residual there)
    cfg.max_steps = 4;
    cfg.grad_tol = 1e-30;
    const FlowState state =
        run_flow(cfg, prob.I0, prob.I1, DiffeoPair::identity(prob.grid)).final_state;
    const DescentResult d = descent_velocity(cfg, state.image, prob.I1, state.pair);
    const MetricField g_ref = MetricField::identity(prob.grid);
    const auto residual = [&](double dt) {
        const auto [pair, r] = advance(state.pair, d.u, dt, cfg.jac_floor);
        const EnergyBreakdown e = energy(pullback_image(prob.I0, pair), prob.I1,
                                         pushforward_metric(pair), g_ref, cfg.sigma);
        return std::abs((e.total - state.energy_total()) / dt + d.norm_a * d.norm_a);
    };

    bool ok = true;
    std::ostringstream detail;
    double dt = 0.2;
    double prev = residual(dt);
    for (int halving = 0; halving < 3; ++halving) {
        dt *= 0.5;
        const double cur = residual(dt);
        const double ratio = prev / cur;
        ok = ok && ratio >= 1.5 && ratio <= 2.5;
        detail << (halving ? ", " : "") << fmt(ratio);
        prev = cur;
    }
    criterion(4, "dissipation identity residual halves with dt", ok,
              "ratios " + detail.str() + " in [1.5, 2.5]");
}

// ---- C5/C6/C7: the 500-step reference run ----------------------------------
void check_reference_run(const so3::So3Result& so3_run) {
    const ReferenceProblem prob = reference_problem(64);
    const FlowConfig cfg = reference_config();

    const auto start = std::chrono::steady_clock::now();
    const RunResult run = run_flow(cfg, prob.I0, prob.I1, DiffeoPair::identity(prob.grid));
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    bool monotone = true;
    bool path_ok = true;
    bool det_ok = true;
    bool defect_ok = true;
    for (std::size_t i = 0; i < run.trace.size(); ++i) {
        const TraceRecord& r = run.trace[i];
        if (i > 0) {
            monotone = monotone && r.energy_total < run.trace[i - 1].energy_total;
        }
        path_ok = path_ok &&
                  r.path_length_a <= std::sqrt(r.t * run.initial_energy) * (1.0 + 1e-6);
        det_ok = det_ok && r.min_jac_det > 0.0;
        defect_ok = defect_ok && r.inverse_defect <= 2.0;
    }
    criterion(5, "monotone energy over the reference run", monotone,
              std::to_string(run.trace.size() - 1) + " accepted steps, zero violations");

    bool so3_path_ok = true;
    const double so3_e0 = so3_run.trace.front().energy;
    for (const auto& r : so3_run.trace) {
        so3_path_ok =
            so3_path_ok && r.path_length_a <= std::sqrt(r.t * so3_e0) * (1.0 + 1e-12);
    }
    criterion(6, "Cauchy-Schwarz path bound (flow and SO(3))", path_ok && so3_path_ok,
              std::string("flow bound ") + (path_ok ? "holds" : "violated") +
                  " (1+1e-6), so3 bound " + (so3_path_ok ? "holds" : "violated") +
                  " (1+1e-12)");

    const double match0 = run.trace.front().energy_match;
    const double match_end = run.final_state.energy_match;
    const double reduction = 1.0 - match_end / match0;
    const bool clean_end = run.reason == Termination::Converged ||
                           run.reason == Termination::MaxSteps ||
                           run.reason == Termination::LineSearchFailed;
    criterion(7, "end-to-end registration (N=64, shift 0.1 L)",
              reduction >= 0.9 && det_ok && defect_ok && seconds < 60.0 && clean_end,
              "E_match reduced " + fmt(100.0 * reduction) + "% (>= 90%), min det > 0 " +
                  (det_ok ? "ok" : "violated") + ", defect <= 2 cells " +
                  (defect_ok ? "ok" : "violated") + ", " + fmt(seconds) + " s < 60 s, end " +
                  to_string(run.reason));
}

// ---- C8: SO(3) -------------------------------------------------------------
so3::So3Result check_so3() {
    const so3::So3Result run =
        so3::so3_flow(Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
                      so3::So3Inertia::isotropic(), so3::Rotation::identity(), 0.05, 10000,
                      1e-8);

    std::mt19937_64 rng(40001);
    double pairing = 0.0;
    for (int trial = 0; trial < 64; ++trial) {
        const Eigen::Vector3d q(2.0 * synth::uniform01(rng) - 1.0,
                                2.0 * synth::uniform01(rng) - 1.0,
                                2.0 * synth::uniform01(rng) - 1.0);
        const Eigen::Vector3d p(2.0 * synth::uniform01(rng) - 1.0,
                                2.0 * synth::uniform01(rng) - 1.0,
                                2.0 * synth::uniform01(rng) - 1.0);
        const Eigen::Vector3d w(2.0 * synth::uniform01(rng) - 1.0,
                                2.0 * synth::uniform01(rng) - 1.0,
                                2.0 * synth::uniform01(rng) - 1.0);
        pairing = std::max(pairing,
                           std::abs(so3::so3_momentum(q, p).dot(w) - p.dot(w.cross(q))));
    }

    const double ortho = run.rotation.orthogonality_defect();
    criterion(8, "SO(3) flow e1 -> e2",
              run.converged && run.residual <= 1e-8 && run.steps <= 10000 &&
                  ortho <= 1e-10 && pairing <= 1e-14,
              "residual " + fmt(run.residual) + " <= 1e-8 in " + std::to_string(run.steps) +
                  " steps, orthogonality drift " + fmt(ortho) +
                  " <= 1e-10, momentum pairing " + fmt(pairing) + " <= 1e-14");
    return run;
}

// ---- C9: continuous dependence ---------------------------------------------
void check_continuous_dependence() {
    const ReferenceProblem prob = reference_problem(32);
    FlowConfig cfg = reference_config();
    cfg.max_steps = 15;
    cfg.grad_tol = 1e-30;
    cfg.dt_init = 0.25;

    const VectorField xi = synth::random_bandlimited_vector(prob.grid, 2, 50001);
    const auto run_from = [&](double delta) {
        DiffeoPair start = DiffeoPair::identity(prob.grid);
        if (delta > 0.0) start = advance(start, xi, delta).first;
        return run_flow(cfg, prob.I0, prob.I1, start);
    };

    const RunResult base = run_from(0.0);
    std::vector<double> diffs;
    for (double delta : {1e-2, 1e-3, 1e-4}) {
        const RunResult pert = run_from(delta);
        diffs.push_back(test::sup_diff(pert.final_state.pair.phi_displacement,
                                       base.final_state.pair.phi_displacement));
    }
    const double r1 = diffs[0] / diffs[1];
    const double r2 = diffs[1] / diffs[2];
    criterion(9, "continuous dependence on the initial datum",
              r1 >= 8.0 && r1 <= 12.0 && r2 >= 8.0 && r2 <= 12.0,
              "successive difference ratios " + fmt(r1) + ", " + fmt(r2) + " in 10 +/- 2");
}

// ---- C10: determinism ------------------------------------------------------
void check_determinism() {
    const fs::path root = fs::temp_directory_path() / "gfr_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    std::ostringstream log;

    cmd::SynthOptions synth_opt;
    synth_opt.kind = "translate-bump";
    synth_opt.out_dir = root.string();
    if (cmd::cmd_synth(synth_opt, log) != 0) {
        criterion(10, "byte-identical reruns", false, "synth failed");
        return;
    }

    cmd::RegisterOptions opt;
    opt.template_path = (root / "template.pgm").string();
    opt.target_path = (root / "target.pgm").string();
    opt.grid_n = 32;
    opt.max_steps = 40;

    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::vector<char>(std::istreambuf_iterator<char>(in),
                                 std::istreambuf_iterator<char>());
    };

    opt.out_dir = (root / "a").string();
    const int rc1 = cmd::cmd_register(opt, log);
    opt.out_dir = (root / "b").string();
    const int rc2 = cmd::cmd_register(opt, log);

    bool same = rc1 == rc2;
    for (const char* name :
         {"trace.csv", "phi_displacement.gfr", "psi_displacement.gfr", "warped.pgm"}) {
        same = same && slurp(root / "a" / name) == slurp(root / "b" / name);
    }
    criterion(10, "byte-identical traces and dumps across reruns", same,
              same ? "trace.csv and GFR1 dumps identical" : "artifacts differ");
    fs::remove_all(root);
}

} // namespace

int main() {
    std::cout << "acceptance suite\n";
    check_operator_roundtrip();
    check_pairing_identities();
    check_gradient_consistency();
    check_dissipation_identity();
    const so3::So3Result so3_run = check_so3();
    check_reference_run(so3_run);
    check_continuous_dependence();
    check_determinism();
    std::cout << (g_failures == 0 ? "all criteria PASS\n"
                                  : std::to_string(g_failures) + " criteria FAILED\n");
    return g_failures == 0 ? 0 : 1;
}
