#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "mcflow/analysis.hpp"
#include "mcflow/grid.hpp"
#include "mcflow/io.hpp"
#include "mcflow/kernels.hpp"
#include "mcflow/redistance.hpp"
#include "mcflow/scheme.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOpts {
    std::string kernel = "explicit";
    double theta = 1.0;
    double tau = 1.0;
    double eps = 1.0;
    std::string variant = "plus";
    double strip = 0.0;
    double dbar = 30.0;
    double dbar_gamma = 15.0;
    int threads = 1;
};

void add_kernel_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--kernel", o.kernel, "builtin kernel (explicit|implicit|heat) or spec JSON");
    cmd->add_option("--theta", o.theta, "explicit Euler theta in (0,1]");
    cmd->add_option("--tau", o.tau, "implicit/heat time step");
    cmd->add_option("--eps", o.eps, "grid spacing");
}

void add_redistance_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--redistance", o.variant, "redistance variant: plus|minus|avg");
    cmd->add_option("--strip", o.strip, "strip width M (0 = full redistancing)");
    cmd->add_option("--dbar", o.dbar, "saturation level");
    cmd->add_option("--dbar-gamma", o.dbar_gamma, "nonlinear profile cap");
    cmd->add_option("--threads", o.threads, "parallelism cap for module operations")
        ->check(CLI::PositiveNumber);
}

mcf::RedistanceConfig redistance_config(const CommonOpts& o) {
    mcf::RedistanceConfig cfg;
    if (o.variant == "plus") cfg.variant = mcf::RedistanceVariant::plus;
    else if (o.variant == "minus") cfg.variant = mcf::RedistanceVariant::minus;
    else if (o.variant == "avg" || o.variant == "average")
        cfg.variant = mcf::RedistanceVariant::average;
    else throw mcf::io_error("unknown redistance variant: " + o.variant);
    cfg.strip_width = o.strip;
    cfg.saturation = o.dbar;
    cfg.nonlinear_cap = o.dbar_gamma;
    return cfg;
}

mcf::PhaseMask load_mask(const std::string& path, double eps) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw mcf::io_error("cannot open mask file: " + path);
    char magic[2] = {0, 0};
    probe.read(magic, 2);
    probe.close();
    if (magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5'))
        return mcf::read_pgm_mask(path, eps);
    return mcf::read_text_mask(path, eps);
}

mcf::PhaseMask disk_mask(int grid, double radius, double eps) {
    mcf::GridGeometry g = mcf::GridGeometry::box2d(grid, grid, eps);
    mcf::PhaseMask mask(g, 1);
    const int c = grid / 2;
    const double r2 = (radius / eps) * (radius / eps);
    for (std::size_t i = 0; i < mask.labels.size(); ++i) {
        const auto q = g.coords_of(i);
        const double dx = q[0] - c, dy = q[1] - c;
        if (dx * dx + dy * dy <= r2) mask.labels[i] = 0;
    }
    return mask;
}

json config_json(const CommonOpts& o, const mcf::SchemeConfig& cfg) {
    json j;
    j["kernel"] = o.kernel;
    j["theta"] = o.theta;
    j["tau"] = o.tau;
    j["eps"] = o.eps;
    j["redistance"] = o.variant;
    j["strip"] = o.strip;
    j["dbar"] = o.dbar;
    j["dbar_gamma"] = o.dbar_gamma;
    j["threads"] = o.threads;
    j["time_step"] = mcf::kernel_time_step(cfg.kernel);
    j["final_time"] = cfg.final_time;
    j["max_steps"] = cfg.max_steps;
    j["snapshot_stride"] = cfg.snapshot_stride;
    j["variant"] = cfg.variant == mcf::SchemeVariant::linear
                       ? "linear"
                       : (cfg.variant == mcf::SchemeVariant::nonlinear ? "nonlinear"
                                                                       : "multiphase");
    return j;
}

void write_outputs(const fs::path& dir, const CommonOpts& o, const mcf::SchemeConfig& cfg,
                   const mcf::EvolutionTrace& trace, const json& inputs) {
    fs::create_directories(dir);
    mcf::write_trace_csv((dir / "trace.csv").string(), trace);
    for (const auto& [step, field] : trace.snapshots) {
        char name[64];
        std::snprintf(name, sizeof name, "snap_%06ld", step);
        mcf::write_pgm_snapshot((dir / (std::string(name) + ".pgm")).string(), field);
        mcf::write_field_csv((dir / (std::string(name) + ".csv")).string(), field);
    }
    json manifest;
    manifest["config"] = config_json(o, cfg);
    manifest["inputs"] = inputs;
    manifest["kernel_report"] = mcf::kernel_report_json(mcf::validate_kernel(cfg.kernel, 256));
    manifest["trace"] = mcf::trace_summary_json(trace);
    manifest["timings"] = {{"diffusion_seconds", trace.diffusion_seconds},
                           {"redistance_seconds", trace.redistance_seconds}};
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << '\n';
    std::cout << "manifest: " << (dir / "manifest.json").string() << '\n';
}

int cmd_evolve(const CommonOpts& o, const std::string& mask_path, const std::string& scheme,
               double T, long steps, int snap_every, const std::string& out_dir,
               bool debug_checks) {
    mcf::PhaseMask mask = load_mask(mask_path, o.eps);

    mcf::SchemeConfig cfg;
    cfg.redistance = redistance_config(o);
    if (scheme == "linear") cfg.variant = mcf::SchemeVariant::linear;
    else if (scheme == "nonlinear") cfg.variant = mcf::SchemeVariant::nonlinear;
    else if (scheme == "multiphase") cfg.variant = mcf::SchemeVariant::multiphase;
    else throw mcf::io_error("unknown scheme: " + scheme);
    cfg.final_time = T;
    cfg.max_steps = steps;
    cfg.snapshot_stride = snap_every;
    cfg.debug_inequalities = debug_checks;

    const mcf::KernelSpec spec = mcf::load_kernel_spec(o.kernel, o.theta, o.tau);
    cfg.kernel = mcf::build_kernel(spec, o.eps, mask.geometry.dim, mask.geometry);

    mcf::EvolutionTrace trace = mcf::run(mask, cfg);

    json inputs;
    inputs["mask"] = {{"path", mask_path}, {"fnv1a64", mcf::fnv1a64_file(mask_path)}};
    write_outputs(out_dir, o, cfg, trace, inputs);
    std::cout << "evolve: " << trace.records.size() - 1 << " steps, termination "
              << trace.termination;
    if (trace.extinct()) std::cout << " at step " << trace.extinction_step;
    std::cout << ", final radius " << mcf::format_double(trace.records.back().radius) << '\n';
    return kExitOk;
}

int cmd_redistance(const CommonOpts& o, const std::string& in_path,
                   const std::string& out_path) {
    mcf::ScalarField f = mcf::read_field_csv(in_path, o.dbar);
    mcf::RedistanceConfig cfg = redistance_config(o);
    mcf::RedistanceResult res = mcf::redistance(f, cfg);
    if (res.extinct())
        std::cerr << "warning: one sign class is empty; output saturated at "
                  << (res.negative_empty ? "+" : "-") << mcf::format_double(o.dbar) << '\n';
    mcf::write_field_csv(out_path, res.field);
    std::cout << "redistance: wrote " << out_path << '\n';
    return kExitOk;
}

int cmd_validate_kernel(const CommonOpts& o, int dim, int extent, int samples) {
    const mcf::KernelSpec spec = mcf::load_kernel_spec(o.kernel, o.theta, o.tau);
    std::array<int, mcf::kMaxDim> ext = {extent, dim >= 2 ? extent : 1, dim >= 3 ? extent : 1};
    mcf::GridGeometry box(dim, o.eps, ext);
    const mcf::Kernel kernel = mcf::build_kernel(spec, o.eps, dim, box);
    const mcf::KernelReport rep = mcf::validate_kernel(kernel, samples);
    std::cout << mcf::kernel_report_json(rep).dump(2) << '\n';
    return rep.passed ? kExitOk : kExitCheckFailed;
}

int cmd_benchmark_disk(const CommonOpts& o, double R, int grid, const std::string& out_dir) {
    if (!(R > 0.0)) throw mcf::io_error("--R must be positive");
    if (grid < 8) throw mcf::io_error("--grid too small");
    mcf::PhaseMask mask = disk_mask(grid, R, o.eps);

    mcf::SchemeConfig cfg;
    cfg.redistance = redistance_config(o);
    const mcf::KernelSpec spec = mcf::load_kernel_spec(o.kernel, o.theta, o.tau);
    cfg.kernel = mcf::build_kernel(spec, o.eps, mask.geometry.dim, mask.geometry);
    const double h = mcf::kernel_time_step(cfg.kernel);
    const mcf::RadiusLaw law{R, 2};
    cfg.final_time = 1.5 * law.extinction_time() + h;

    mcf::EvolutionTrace trace = mcf::run(mask, cfg);
    const mcf::LawReport rep = mcf::compare_to_law(trace, law, 10.0 * o.eps);

    json inputs;
    inputs["disk"] = {{"R", R}, {"grid", grid}};
    write_outputs(out_dir, o, cfg, trace, inputs);

    json jr;
    jr["max_radius_deviation"] = rep.max_deviation;
    jr["deviation_tolerance"] = 2.0 * o.eps;
    jr["measured_extinction"] = rep.measured_extinction;
    jr["predicted_extinction"] = rep.predicted_extinction;
    jr["extinction_relative_error"] = rep.extinction_relative_error;
    jr["extinction_not_late"] = rep.extinction_not_late;
    jr["degraded"] = rep.max_deviation > 2.0 * o.eps;
    std::ofstream out(fs::path(out_dir) / "law_report.json", std::ios::binary);
    out << jr.dump(2) << '\n';
    std::cout << "benchmark-disk: extinction "
              << (trace.extinct() ? mcf::format_double(rep.measured_extinction) : "none")
              << " (continuum " << mcf::format_double(rep.predicted_extinction)
              << "), max radius deviation " << mcf::format_double(rep.max_deviation)
              << (rep.max_deviation > 2.0 * o.eps ? " [degraded]" : "") << '\n';
    return kExitOk;
}

int cmd_verify(const CommonOpts& o, const std::string& out_path) {
    json rep;
    bool ok = true;

    // builtin kernel validation
    mcf::GridGeometry box = mcf::GridGeometry::box2d(64, 64, o.eps);
    for (const std::string name : {"explicit", "implicit", "heat"}) {
        const mcf::KernelSpec spec = mcf::load_kernel_spec(name, 1.0, o.eps * o.eps);
        const mcf::Kernel k = mcf::build_kernel(spec, o.eps, 2, box);
        const mcf::KernelReport kr = mcf::validate_kernel(k, 1000);
        rep["kernels"][name] = mcf::kernel_report_json(kr);
        ok = ok && kr.passed && kr.consistency_decreasing && kr.h_relative_error < 1e-6;
    }

    // redistance bounds on random fields and a disk
    mcf::GridGeometry g32 = mcf::GridGeometry::box2d(32, 32, o.eps);
    const double bound = (4.0 * std::sqrt(2.0) + 1.0) * o.eps;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        mcf::ScalarField u = mcf::random_lipschitz_field(g32, seed);
        mcf::RedistanceConfig rc;
        rc.saturation = u.saturation;
        mcf::RedistanceResult sd = mcf::sd_plus(u, rc);
        mcf::PhaseMask m(g32, 1);
        for (std::size_t i = 0; i < u.size(); ++i)
            if (u.values[i] < 0.0) m.labels[i] = 0;
        mcf::ScalarField d = mcf::exact_signed_distance(m, u.saturation).field;
        for (std::size_t i = 0; i < u.size(); ++i)
            worst = std::max(worst, std::abs(sd.field.values[i] - d.values[i]));
    }
    rep["redistance"]["max_oracle_gap"] = worst;
    rep["redistance"]["bound"] = bound;
    ok = ok && worst <= bound;

    // strip bounds on a disk field
    mcf::PhaseMask dm = disk_mask(64, 20.0 * o.eps, o.eps);
    mcf::ScalarField disk = mcf::exact_signed_distance(dm, 1e9).field;
    const double widths[] = {5.0 * o.eps, 10.0 * o.eps};
    const mcf::StripReport sr = mcf::strip_equivalence(disk, widths);
    rep["strip"]["violations"] = sr.total_violations;
    ok = ok && sr.total_violations == 0;

    rep["passed"] = ok;
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        out << rep.dump(2) << '\n';
        std::cout << "verify: report written to " << out_path << '\n';
    } else {
        std::cout << rep.dump(2) << '\n';
    }
    std::cout << "verify: " << (ok ? "pass" : "FAIL") << '\n';
    return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"diffusion-redistancing mean curvature flow on uniform grids"};
    app.require_subcommand(1);

    CommonOpts o;

    auto* evolve = app.add_subcommand("evolve", "run a scheme from a mask");
    std::string mask_path, scheme = "linear", out_dir = "out";
    double T = -1.0;
    long steps = -1;
    int snap_every = 0;
    bool debug_checks = false;
    evolve->add_option("--mask", mask_path, "PGM or text mask")->required();
    add_kernel_opts(evolve, o);
    add_redistance_opts(evolve, o);
    evolve->add_option("--scheme", scheme, "linear|nonlinear|multiphase");
    evolve->add_option("--T", T, "final time");
    evolve->add_option("--steps", steps, "step count (overrides --T)");
    evolve->add_option("--snap-every", snap_every, "snapshot stride");
    evolve->add_option("--out", out_dir, "output directory")->required();
    evolve->add_flag("--debug-checks", debug_checks,
                     "assert the discrete super/subsolution inequalities");

    auto* redist = app.add_subcommand("redistance", "redistance a field CSV");
    std::string in_path, out_path;
    redist->add_option("--in", in_path, "input field CSV")->required();
    redist->add_option("--out", out_path, "output field CSV")->required();
    add_redistance_opts(redist, o);

    auto* valk = app.add_subcommand("validate-kernel", "print a kernel report as JSON");
    int dim = 2, extent = 64, samples = 1000;
    add_kernel_opts(valk, o);
    valk->add_option("--dim", dim, "dimension for the symbol grid");
    valk->add_option("--extent", extent, "box extent per axis for the symbol grid");
    valk->add_option("--samples", samples, "sampled frequencies for the bound check");

    auto* bench = app.add_subcommand("benchmark-disk", "shrinking-disk experiment");
    double R = 50.0;
    int grid = 128;
    bench->add_option("--R", R, "initial disk radius");
    bench->add_option("--grid", grid, "grid cells per side");
    add_kernel_opts(bench, o);
    add_redistance_opts(bench, o);
    bench->add_option("--out", out_dir, "output directory")->required();

    auto* verify = app.add_subcommand("verify", "run the quantitative verification suite");
    std::string report_path;
    verify->add_option("--out", report_path, "write the JSON report here");
    add_kernel_opts(verify, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (evolve->parsed())
            return cmd_evolve(o, mask_path, scheme, T, steps, snap_every, out_dir, debug_checks);
        if (redist->parsed()) return cmd_redistance(o, in_path, out_path);
        if (valk->parsed()) return cmd_validate_kernel(o, dim, extent, samples);
        if (bench->parsed()) return cmd_benchmark_disk(o, R, grid, out_dir);
        if (verify->parsed()) return cmd_verify(o, report_path);
    } catch (const mcf::io_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const mcf::kernel_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitConfig;
}
