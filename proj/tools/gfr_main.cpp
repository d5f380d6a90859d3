// gfr: metric-regularized diffeomorphic registration on the periodic torus.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gfr/commands.hpp"

namespace {

// The config file is applied before CLI11 parses, so flags given on the
// command line override file values.
std::string find_config_path(int argc, char** argv) {
    for (int i = 1; i < argc - 1; ++i) {
        if (std::string(argv[i]) == "--config") return argv[i + 1];
    }
    return {};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diffeomorphic image registration by metric-regularized gradient flow"};
    app.require_subcommand(1);

    gfr::cmd::RegisterOptions reg;
    std::string config_path;
    auto* reg_cmd = app.add_subcommand("register", "Register a template image onto a target");
    reg_cmd->add_option("template", reg.template_path, "Template image (PGM P2/P5)");
    reg_cmd->add_option("target", reg.target_path, "Target image (PGM P2/P5)");
    reg_cmd->add_option("--config", config_path, "key=value config file (flags override it)");
    reg_cmd->add_option("--grid", reg.grid_n, "Grid nodes per axis");
    reg_cmd->add_option("--alpha", reg.alpha, "Inertia length^2 (default 0.05 * L^2)");
    reg_cmd->add_option("--order-k", reg.order_k, "Inertia operator order (>= 2)");
    reg_cmd->add_option("--sigma", reg.sigma, "Metric-regularization weight");
    reg_cmd->add_option("--dt", reg.dt, "Initial/ceiling step size")->check(CLI::PositiveNumber);
    reg_cmd->add_option("--dt-min", reg.dt_min, "Line-search floor")->check(CLI::PositiveNumber);
    reg_cmd->add_option("--max-steps", reg.max_steps, "Step budget");
    reg_cmd->add_option("--grad-tol", reg.grad_tol,
                        "Stop when ||u||_A <= this (0: 1e-6 * sqrt(E0))");
    reg_cmd->add_option("--jac-floor", reg.jac_floor, "Jacobian determinant floor");
    reg_cmd->add_option("--defect-bound", reg.defect_bound,
                        "Inverse-consistency bound (cells)");
    reg_cmd->add_option("--seed", reg.seed, "Echoed into the manifest");
    reg_cmd->add_option("--out-dir", reg.out_dir, "Artifact directory");
    reg_cmd->add_flag("--dump-fields", reg.dump_fields, "Also dump force fields as GFR1");

    gfr::cmd::SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic template/target pair");
    synth_cmd->add_option("kind", synth.kind, "translate-bump | warp-bump | two-blobs")
        ->check(CLI::IsMember({"translate-bump", "warp-bump", "two-blobs"}));
    synth_cmd->add_option("--grid", synth.grid_n, "Image size per axis");
    synth_cmd->add_option("--seed", synth.seed, "Jitter seed");
    synth_cmd->add_option("--width", synth.width, "Bump width / L")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--shift", synth.shift, "Translation / L");
    synth_cmd->add_option("--warp-amp", synth.warp_amp, "Warp amplitude / L");
    synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory");

    gfr::cmd::So3DemoOptions so3;
    auto* so3_cmd = app.add_subcommand("so3-demo", "Finite-dimensional SO(3) gradient flow");
    so3_cmd->add_option("--x0", so3.x0, "Template vector")->expected(3);
    so3_cmd->add_option("--x1", so3.x1, "Target vector")->expected(3);
    so3_cmd->add_option("--inertia", so3.inertia_diag, "Diagonal inertia")->expected(3);
    so3_cmd->add_option("--dt", so3.dt, "Step size")->check(CLI::PositiveNumber);
    so3_cmd->add_option("--steps", so3.steps, "Step budget")->check(CLI::PositiveNumber);
    so3_cmd->add_option("--tol", so3.tol, "Residual tolerance")->check(CLI::PositiveNumber);
    so3_cmd->add_option("--out-dir", so3.out_dir, "Output directory");

    gfr::cmd::SelfCheckOptions self_check;
    std::vector<std::string> mutations;
    auto* check_cmd = app.add_subcommand("self-check", "Run the invariant battery");
    check_cmd
        ->add_option("--mutate", mutations,
                     "Fault injection for testing the battery: j1-sign | inertia-symbol")
        ->check(CLI::IsMember({"j1-sign", "inertia-symbol"}));

    // pre-load the config file so explicit flags win
    const std::string pre_config = find_config_path(argc, argv);
    if (!pre_config.empty()) {
        try {
            gfr::cmd::apply_config_file(pre_config, reg);
        } catch (const std::exception& err) {
            std::cerr << "error: " << err.what() << "\n";
            return 1;
        }
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (reg_cmd->parsed()) {
            if (reg.template_path.empty() || reg.target_path.empty()) {
                std::cerr << "error: register needs a template and a target "
                             "(positional or via --config)\n";
                return 1;
            }
            return gfr::cmd::cmd_register(reg, std::cout);
        }
        if (synth_cmd->parsed()) {
            return gfr::cmd::cmd_synth(synth, std::cout);
        }
        if (so3_cmd->parsed()) {
            return gfr::cmd::cmd_so3_demo(so3, std::cout);
        }
        if (check_cmd->parsed()) {
            for (const std::string& m : mutations) {
                if (m == "j1-sign") self_check.mutate.j1_sign_flip = true;
                if (m == "inertia-symbol") self_check.mutate.inertia_symbol_off_by_one = true;
            }
            return gfr::cmd::cmd_self_check(self_check, std::cout);
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
