#pragma once

#include <array>
#include <iosfwd>
#include <string>

#include "gfr/flow.hpp"

namespace gfr::cmd {

/// Options for the `register` subcommand. A key=value config file may set any
/// of these (keys equal the long flag names); command-line values override it.
struct RegisterOptions {
    std::string template_path;
    std::string target_path;
    std::string out_dir = ".";
    int grid_n = 64;
    double alpha = -1.0; // < 0: resolved to 0.05 * L^2
    int order_k = 2;
    double sigma = 1e-3;
    double dt = 0.125;
    double dt_min = 1e-10;
    int max_steps = 2000;
    double grad_tol = 0.0; // <= 0: resolved to 1e-6 * sqrt(E(initial))
    double jac_floor = 1e-3;
    double defect_bound = 2.0;
    long long seed = 0;
    bool dump_fields = false;
};

/// Exit codes: 0 converged or max_steps, 1 unusable input, 2 the flow failed
/// (NonDiffeomorphic or LineSearchFailed). Artifacts land in out_dir:
/// warped.pgm, grid.pgm, trace.csv, phi_displacement.gfr, psi_displacement.gfr,
/// manifest.txt, and with dump_fields also force_{j1,j2,total}.gfr.
int cmd_register(const RegisterOptions& opt, std::ostream& log);

/// Populate opt from a config file (unknown keys are an error, except the
/// result keys a manifest carries).
void apply_config_file(const std::string& path, RegisterOptions& opt);

struct SynthOptions {
    std::string kind = "translate-bump"; // translate-bump | warp-bump | two-blobs
    std::string out_dir = ".";
    int grid_n = 64;
    long long seed = 0;
    double width = 0.1;    // bump width as a fraction of L
    double shift = 0.1;    // translation as a fraction of L
    double warp_amp = 0.05; // warp displacement amplitude as a fraction of L
};

/// Writes template.pgm and target.pgm; deterministic given the seed.
int cmd_synth(const SynthOptions& opt, std::ostream& log);

struct So3DemoOptions {
    std::array<double, 3> x0 = {1.0, 0.0, 0.0};
    std::array<double, 3> x1 = {0.0, 1.0, 0.0};
    std::array<double, 3> inertia_diag = {1.0, 1.0, 1.0};
    double dt = 0.05;
    int steps = 10000;
    double tol = 1e-8;
    std::string out_dir = ".";
};

int cmd_so3_demo(const So3DemoOptions& opt, std::ostream& log);

/// Deliberate fault injection so the self-check can demonstrate that its
/// failure paths fire; never used outside the self-check battery.
struct SelfCheckMutations {
    bool j1_sign_flip = false;
    bool inertia_symbol_off_by_one = false;
};

struct SelfCheckOptions {
    SelfCheckMutations mutate;
};

/// Runs the invariant battery at N in {32, 64}, printing one PASS/FAIL line
/// per invariant with the measured value and tolerance. Exit 0 iff all pass.
int cmd_self_check(const SelfCheckOptions& opt, std::ostream& log);

} // namespace gfr::cmd
