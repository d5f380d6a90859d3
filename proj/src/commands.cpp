#include "gfr/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <random>

#include "gfr/interp.hpp"
#include "gfr/io.hpp"
#include "gfr/synth.hpp"

namespace gfr::cmd {

namespace {

namespace fs = std::filesystem;

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

// Image row r maps to field axis 0, column c to axis 1.
ScalarField image_to_field(const io::PgmImage& img, const TorusGrid& g) {
    ScalarField out(g);
    const auto wrap_sample = [&](double r, double c) {
        const int H = img.height;
        const int W = img.width;
        r -= H * std::floor(r / H);
        c -= W * std::floor(c / W);
        if (r >= H) r -= H;
        if (c >= W) c -= W;
        const int r0 = std::min(static_cast<int>(r), H - 1);
        const int c0 = std::min(static_cast<int>(c), W - 1);
        const int r1 = (r0 + 1) % H;
        const int c1 = (c0 + 1) % W;
        const double fr = r - r0;
        const double fc = c - c0;
        const auto px = [&](int rr, int cc) {
            return img.pixels[static_cast<std::size_t>(rr) * W + cc];
        };
        return (1.0 - fr) * ((1.0 - fc) * px(r0, c0) + fc * px(r0, c1)) +
               fr * ((1.0 - fc) * px(r1, c0) + fc * px(r1, c1));
    };
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) {
            const double r = static_cast<double>(i) * img.height / g.n;
            const double c = static_cast<double>(j) * img.width / g.n;
            out.values[g.index(i, j)] = wrap_sample(r, c);
        }
    }
    return out;
}

io::PgmImage field_to_image(const ScalarField& f) {
    io::PgmImage img;
    img.width = f.grid.n;
    img.height = f.grid.n;
    img.pixels = f.values;
    return img;
}

// Rasterized deformed gridlines: every 8th coordinate line mapped through phi.
io::PgmImage deformed_grid_image(const DiffeoPair& pair) {
    const TorusGrid& g = pair.grid();
    io::PgmImage img;
    img.width = g.n;
    img.height = g.n;
    img.pixels.assign(static_cast<std::size_t>(g.n) * g.n, 1.0);
    const int stride = 8;
    const int oversample = 8;
    const double h = g.spacing();
    const auto plot = [&](double x, double y) {
        const double px = x + interp::sample_component(g, pair.phi_displacement.comp[0], x, y);
        const double py = y + interp::sample_component(g, pair.phi_displacement.comp[1], x, y);
        const int i = ((static_cast<int>(std::llround(px / h)) % g.n) + g.n) % g.n;
        const int j = ((static_cast<int>(std::llround(py / h)) % g.n) + g.n) % g.n;
        img.pixels[g.index(i, j)] = 0.0;
    };
    for (int line = 0; line < g.n; line += stride) {
        const double fixed = g.node(line);
        for (int s = 0; s < g.n * oversample; ++s) {
            const double t = s * h / oversample;
            plot(fixed, t);
            plot(t, fixed);
        }
    }
    return img;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config: malformed number for '" + key + "': " + value);
    }
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config: malformed integer for '" + key + "': " + value);
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true") return true;
    if (value == "0" || value == "false") return false;
    throw std::runtime_error("config: malformed boolean for '" + key + "': " + value);
}

const char* const kResultKeys[] = {"termination",  "steps_accepted", "t_elapsed",
                                   "final_E",      "final_E_match",  "final_E_reg",
                                   "path_length_A", "min_det_jac",   "inverse_defect",
                                   "wall_time_s"};

bool is_result_key(const std::string& key) {
    for (const char* k : kResultKeys) {
        if (key == k) return true;
    }
    return false;
}

} // namespace

void apply_config_file(const std::string& path, RegisterOptions& opt) {
    const io::KeyValueFile kv = io::read_key_value(path);
    for (const auto& [key, value] : kv.entries) {
        if (is_result_key(key)) continue;
        if (key == "template") {
            opt.template_path = value;
        } else if (key == "target") {
            opt.target_path = value;
        } else if (key == "out-dir") {
            opt.out_dir = value;
        } else if (key == "grid") {
            opt.grid_n = static_cast<int>(parse_int(key, value));
        } else if (key == "alpha") {
            opt.alpha = parse_double(key, value);
        } else if (key == "order-k") {
            opt.order_k = static_cast<int>(parse_int(key, value));
        } else if (key == "sigma") {
            opt.sigma = parse_double(key, value);
        } else if (key == "dt") {
            opt.dt = parse_double(key, value);
        } else if (key == "dt-min") {
            opt.dt_min = parse_double(key, value);
        } else if (key == "max-steps") {
            opt.max_steps = static_cast<int>(parse_int(key, value));
        } else if (key == "grad-tol") {
            opt.grad_tol = parse_double(key, value);
        } else if (key == "jac-floor") {
            opt.jac_floor = parse_double(key, value);
        } else if (key == "defect-bound") {
            opt.defect_bound = parse_double(key, value);
        } else if (key == "seed") {
            opt.seed = parse_int(key, value);
        } else if (key == "dump-fields") {
            opt.dump_fields = parse_bool(key, value);
        } else {
            throw std::runtime_error("config: unknown key '" + key + "' in " + path);
        }
    }
}

int cmd_register(const RegisterOptions& opt, std::ostream& log) {
    const auto wall_start = std::chrono::steady_clock::now();

    io::PgmImage template_img;
    io::PgmImage target_img;
    try {
        template_img = io::read_pgm(opt.template_path);
        target_img = io::read_pgm(opt.target_path);
    } catch (const std::exception& err) {
        log << "error: " << err.what() << "\n";
        return 1;
    }
    if (template_img.width != target_img.width || template_img.height != target_img.height) {
        log << "error: template is " << template_img.width << "x" << template_img.height
            << " but target is " << target_img.width << "x" << target_img.height << "\n";
        return 1;
    }

    const double length = 1.0;
    FlowConfig cfg{opt.sigma,
                   InertiaSpec(opt.alpha < 0.0 ? 0.05 * length * length : opt.alpha,
                               opt.order_k),
                   opt.dt,
                   opt.dt_min,
                   opt.max_steps,
                   opt.grad_tol,
                   opt.jac_floor,
                   opt.defect_bound};
    TorusGrid grid(2, opt.grid_n, length);
    ScalarField I0(grid);
    ScalarField I1(grid);
    try {
        cfg.validate();
        grid = TorusGrid(2, opt.grid_n, length);
        I0 = image_to_field(template_img, grid);
        I1 = image_to_field(target_img, grid);
    } catch (const std::exception& err) {
        log << "error: " << err.what() << "\n";
        return 1;
    }

    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);

    const RunResult result = run_flow(cfg, I0, I1, DiffeoPair::identity(grid));
    const FlowState& final_state = result.final_state;

    io::write_pgm(join(opt.out_dir, "warped.pgm"), field_to_image(final_state.image));
    io::write_pgm(join(opt.out_dir, "grid.pgm"), deformed_grid_image(final_state.pair));
    io::write_trace_csv(join(opt.out_dir, "trace.csv"), result.trace);
    io::write_gfr1(join(opt.out_dir, "phi_displacement.gfr"),
                   final_state.pair.phi_displacement);
    io::write_gfr1(join(opt.out_dir, "psi_displacement.gfr"),
                   final_state.pair.psi_displacement);
    if (opt.dump_fields) {
        const DescentResult d = descent_velocity(cfg, final_state.image, I1, final_state.pair);
        io::write_gfr1(join(opt.out_dir, "force_j1.gfr"), d.force.j1_term);
        io::write_gfr1(join(opt.out_dir, "force_j2.gfr"), d.force.j2_term);
        io::write_gfr1(join(opt.out_dir, "force_total.gfr"), d.force.total);
    }

    const double wall_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();

    io::KeyValueFile kv;
    // absolute paths so the manifest replays from any working directory
    std::error_code abs_ec;
    const fs::path template_abs = fs::absolute(opt.template_path, abs_ec);
    const fs::path target_abs = fs::absolute(opt.target_path, abs_ec);
    kv.set("template", abs_ec ? opt.template_path : template_abs.string());
    kv.set("target", abs_ec ? opt.target_path : target_abs.string());
    kv.set("out-dir", opt.out_dir);
    kv.set("grid", static_cast<long long>(opt.grid_n));
    kv.set("alpha", cfg.inertia.alpha);
    kv.set("order-k", static_cast<long long>(opt.order_k));
    kv.set("sigma", opt.sigma);
    kv.set("dt", opt.dt);
    kv.set("dt-min", opt.dt_min);
    kv.set("max-steps", static_cast<long long>(opt.max_steps));
    kv.set("grad-tol", result.grad_tol_used);
    kv.set("jac-floor", opt.jac_floor);
    kv.set("defect-bound", opt.defect_bound);
    kv.set("seed", static_cast<long long>(opt.seed));
    kv.set("dump-fields", opt.dump_fields ? "1" : "0");
    kv.set("termination", to_string(result.reason));
    kv.set("steps_accepted", static_cast<long long>(final_state.step));
    kv.set("t_elapsed", final_state.t_elapsed);
    kv.set("final_E", final_state.energy_total());
    kv.set("final_E_match", final_state.energy_match);
    kv.set("final_E_reg", final_state.energy_reg);
    kv.set("path_length_A", final_state.path_length_a);
    kv.set("min_det_jac", final_state.min_jac_det);
    kv.set("inverse_defect", final_state.inverse_defect);
    kv.set("wall_time_s", wall_s);
    io::write_key_value(join(opt.out_dir, "manifest.txt"), kv);

    log << "registration " << to_string(result.reason) << " after " << final_state.step
        << " steps: E " << io::format_double(result.initial_energy) << " -> "
        << io::format_double(final_state.energy_total()) << "\n";
    if (!result.message.empty()) log << "  " << result.message << "\n";

    switch (result.reason) {
        case Termination::Converged:
        case Termination::MaxSteps: return 0;
        case Termination::LineSearchFailed:
        case Termination::NonDiffeomorphic: return 2;
    }
    return 2;
}

int cmd_synth(const SynthOptions& opt, std::ostream& log) {
    const double length = 1.0;
    TorusGrid grid(2, opt.grid_n, length);
    std::mt19937_64 rng(static_cast<std::uint64_t>(opt.seed));
    const double jx = (synth::uniform01(rng) - 0.5) * 0.04 * length;
    const double jy = (synth::uniform01(rng) - 0.5) * 0.04 * length;
    const double w = opt.width * length;

    ScalarField tmpl(grid);
    ScalarField target(grid);
    if (opt.kind == "translate-bump") {
        const double cx = 0.5 * length + jx;
        const double cy = 0.5 * length + jy;
        tmpl = synth::gaussian_bump(grid, cx, cy, w);
        target = synth::gaussian_bump(grid, cx + opt.shift * length, cy, w);
    } else if (opt.kind == "warp-bump") {
        const double cx = 0.5 * length + jx;
        const double cy = 0.5 * length + jy;
        tmpl = synth::gaussian_bump(grid, cx, cy, w);
        const double amp = opt.warp_amp * length;
        const double two_pi = 6.283185307179586476925286766559;
        for (int i = 0; i < grid.n; ++i) {
            for (int j = 0; j < grid.n; ++j) {
                const double x = grid.node(i);
                const double y = grid.node(j);
                const double wx = x + amp * std::sin(two_pi * y / length);
                const double wy = y + amp * std::sin(two_pi * x / length);
                target.values[grid.index(i, j)] =
                    synth::periodic_gaussian(wx, wy, cx, cy, w, length);
            }
        }
    } else if (opt.kind == "two-blobs") {
        const double a = 0.9;
        const double c1x = 0.35 * length + jx;
        const double c2x = 0.65 * length + jx;
        const double cy = 0.5 * length + jy;
        const double dy = 0.08 * length;
        for (int i = 0; i < grid.n; ++i) {
            for (int j = 0; j < grid.n; ++j) {
                const double x = grid.node(i);
                const double y = grid.node(j);
                tmpl.values[grid.index(i, j)] =
                    a * (synth::periodic_gaussian(x, y, c1x, cy, w, length) +
                         synth::periodic_gaussian(x, y, c2x, cy, w, length));
                target.values[grid.index(i, j)] =
                    a * (synth::periodic_gaussian(x, y, c1x, cy - dy, w, length) +
                         synth::periodic_gaussian(x, y, c2x, cy + dy, w, length));
            }
        }
    } else {
        log << "error: unknown synth kind '" << opt.kind << "'\n";
        return 1;
    }

    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    io::write_pgm(join(opt.out_dir, "template.pgm"), field_to_image(tmpl));
    io::write_pgm(join(opt.out_dir, "target.pgm"), field_to_image(target));
    log << "wrote " << join(opt.out_dir, "template.pgm") << " and "
        << join(opt.out_dir, "target.pgm") << "\n";
    return 0;
}

int cmd_so3_demo(const So3DemoOptions& opt, std::ostream& log) {
    try {
        const Eigen::Vector3d x0(opt.x0[0], opt.x0[1], opt.x0[2]);
        const Eigen::Vector3d x1(opt.x1[0], opt.x1[1], opt.x1[2]);
        Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
        A(0, 0) = opt.inertia_diag[0];
        A(1, 1) = opt.inertia_diag[1];
        A(2, 2) = opt.inertia_diag[2];
        const so3::So3Result result =
            so3::so3_flow(x0, x1, so3::So3Inertia(A), so3::Rotation::identity(), opt.dt,
                          opt.steps, opt.tol);
        std::error_code ec;
        fs::create_directories(opt.out_dir, ec);
        io::write_so3_trace_csv(join(opt.out_dir, "so3_trace.csv"), result.trace);
        log << "so3-demo: converged=" << (result.converged ? 1 : 0)
            << " steps=" << result.steps
            << " residual=" << io::format_double(result.residual) << "\n";
        return 0;
    } catch (const std::exception& err) {
        log << "error: " << err.what() << "\n";
        return 1;
    }
}

} // namespace gfr::cmd
