#include "mcflow/scheme.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

namespace mcf {

namespace {

double ball_volume_unit(int dim) {
    // omega_N for N = 1..3
    if (dim == 1) return 2.0;
    if (dim == 2) return std::numbers::pi;
    return 4.0 * std::numbers::pi / 3.0;
}

double equivalent_radius(int dim, double area) {
    if (area <= 0.0) return 0.0;
    return std::pow(area / ball_volume_unit(dim), 1.0 / dim);
}

void check_discrete_inequalities(const ScalarField& sd_old, const ScalarField& sd_new,
                                 double h) {
    const ScalarField lap = discrete_laplacian(sd_old);
    const double tol = 1e-9 / h;
    for (std::size_t i = 0; i < sd_new.size(); ++i) {
        const double rate = (sd_new.values[i] - sd_old.values[i]) / h;
        if (sd_new.values[i] >= 0.0) {
            if (rate < lap.values[i] - tol) {
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "supersolution inequality violated at cell %zu: %.17g < %.17g", i,
                              rate, lap.values[i]);
                throw grid_error(buf);
            }
        } else if (rate > lap.values[i] + tol) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "subsolution inequality violated at cell %zu: %.17g > %.17g", i, rate,
                          lap.values[i]);
            throw grid_error(buf);
        }
    }
}

}  // namespace

long SchemeConfig::step_budget(double h) const {
    if (max_steps >= 0) return max_steps;
    if (final_time >= 0.0) return static_cast<long>(std::ceil(final_time / h - 1e-12));
    throw grid_error("scheme config needs final_time or max_steps");
}

RedistanceResult step_linear(const ScalarField& sd, const Kernel& kernel,
                             const RedistanceConfig& rcfg, bool debug_check) {
    ScalarField u = apply_kernel(kernel, sd);
    RedistanceResult res = redistance(u, rcfg);
    if (debug_check && !res.extinct() && std::holds_alternative<StencilKernel>(kernel) &&
        std::get<StencilKernel>(kernel).kind == KernelKind::explicit_euler) {
        check_discrete_inequalities(sd, res.field, kernel_time_step(kernel));
    }
    return res;
}

RedistanceResult step_nonlinear(const ScalarField& u, const Kernel& kernel,
                                const RedistanceConfig& rcfg) {
    ScalarField w = gamma_profile(u);
    w = apply_kernel(kernel, w);
    return nonlinear_redistance(w, rcfg);
}

MultiphaseStepResult step_multiphase(const std::vector<ScalarField>& phases,
                                     const Kernel& kernel, const RedistanceConfig& rcfg) {
    if (phases.size() < 2) throw grid_error("multiphase step needs at least two phases");
    const std::size_t L = phases.size();
    const std::size_t n = phases[0].size();

    std::vector<ScalarField> diffused;
    diffused.reserve(L);
    for (const auto& p : phases) diffused.push_back(apply_kernel(kernel, p));

    RedistanceConfig pcfg = rcfg;
    pcfg.variant = RedistanceVariant::plus;  // the positive part of sd+ is the phase distance

    MultiphaseStepResult out;
    for (std::size_t l = 0; l < L; ++l) {
        ScalarField v = diffused[l];
        for (std::size_t i = 0; i < n; ++i) {
            double other = -1e300;
            for (std::size_t m = 0; m < L; ++m)
                if (m != l) other = std::max(other, diffused[m].values[i]);
            v.values[i] -= other;
        }
        RedistanceResult r = sd_plus(v, pcfg);
        if (r.negative_empty) {
            out.vanished.push_back(static_cast<int>(l));
            continue;
        }
        for (double& x : r.field.values) x = std::max(0.0, x);
        out.fields.push_back(std::move(r.field));
    }
    return out;
}

std::vector<ScalarField> multiphase_seed(const PhaseMask& mask, const RedistanceConfig& rcfg) {
    std::set<std::uint8_t> labels(mask.labels.begin(), mask.labels.end());
    if (labels.size() < 2) throw grid_error("multiphase seed needs at least two labels");

    RedistanceConfig pcfg = rcfg;
    pcfg.variant = RedistanceVariant::plus;

    std::vector<ScalarField> out;
    for (std::uint8_t l : labels) {
        PhaseMask binary(mask.geometry, 1);
        for (std::size_t i = 0; i < mask.labels.size(); ++i)
            if (mask.labels[i] == l) binary.labels[i] = 0;
        ScalarField seed = seed_field(binary, rcfg.saturation);
        RedistanceResult r = sd_plus(seed, pcfg);
        for (double& x : r.field.values) x = std::max(0.0, x);
        out.push_back(std::move(r.field));
    }
    return out;
}

std::vector<std::uint8_t> multiphase_labels(const std::vector<ScalarField>& phases) {
    const std::size_t n = phases.empty() ? 0 : phases[0].size();
    std::vector<std::uint8_t> lab(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        for (std::size_t l = 1; l < phases.size(); ++l)
            if (phases[l].values[i] < phases[best].values[i]) best = l;
        lab[i] = static_cast<std::uint8_t>(best);
    }
    return lab;
}

namespace {

struct Clock {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double lap() {
        const auto t1 = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(t1 - t0).count();
        t0 = t1;
        return s;
    }
};

TraceRecord make_record(long step, double time, const ScalarField& field, int samples) {
    TraceRecord r;
    r.step = step;
    r.time = time;
    r.negative_cells = negative_cell_count(field);
    const GridGeometry& g = field.geometry;
    double cell = 1.0;
    for (int d = 0; d < g.dim; ++d) cell *= g.spacing;
    r.area = cell * static_cast<double>(r.negative_cells);
    r.radius = equivalent_radius(g.dim, r.area);
    r.lipschitz_ok = lipschitz_check(field, samples).ok;
    return r;
}

}  // namespace

EvolutionTrace run(const PhaseMask& mask, const SchemeConfig& cfg) {
    const double h = kernel_time_step(cfg.kernel);
    if (!(h > 0.0)) throw grid_error("kernel time step must be positive");
    const long budget = cfg.step_budget(h);

    EvolutionTrace trace;
    trace.time_step = h;
    Clock clock;

    auto snapshot = [&](long step, const ScalarField& f) {
        if (cfg.snapshot_stride > 0 && step % cfg.snapshot_stride == 0)
            trace.snapshots.push_back({step, f});
    };

    if (cfg.variant == SchemeVariant::multiphase) {
        std::vector<ScalarField> phases = multiphase_seed(mask, cfg.redistance);
        trace.redistance_seconds += clock.lap();
        auto phase0_field = [&]() {
            // signed view of the first phase for the trace: negative inside
            ScalarField f = phases[0];
            const auto lab = multiphase_labels(phases);
            for (std::size_t i = 0; i < f.size(); ++i)
                if (lab[i] == 0) f.values[i] = -std::max(f.values[i], 0.5 * f.geometry.spacing);
            return f;
        };
        ScalarField view = phase0_field();
        trace.records.push_back(make_record(0, 0.0, view, cfg.lipschitz_samples));
        snapshot(0, view);
        for (long k = 1; k <= budget; ++k) {
            MultiphaseStepResult res = step_multiphase(phases, cfg.kernel, cfg.redistance);
            trace.redistance_seconds += clock.lap();
            for (int v : res.vanished) trace.vanished_phases.push_back(v);
            if (res.fields.size() < 2) {
                trace.extinction_step = k;
                trace.extinct_sign = res.vanished.empty() ? 0 : +1;
                trace.termination = "extinction";
                ScalarField sat(phases[0].geometry, cfg.redistance.saturation,
                                cfg.redistance.saturation);
                trace.records.push_back(make_record(k, h * k, sat, cfg.lipschitz_samples));
                return trace;
            }
            phases = std::move(res.fields);
            view = phase0_field();
            trace.records.push_back(make_record(k, h * k, view, cfg.lipschitz_samples));
            snapshot(k, view);
        }
        trace.termination = cfg.max_steps >= 0 ? "max_steps" : "final_time";
        return trace;
    }

    // linear / nonlinear two-phase schemes
    RedistanceConfig rcfg = cfg.redistance;
    const bool nonlinear = cfg.variant == SchemeVariant::nonlinear;
    if (nonlinear) rcfg.saturation = rcfg.nonlinear_cap;

    ScalarField seed = seed_field(mask, rcfg.saturation);
    RedistanceResult state = redistance(seed, rcfg);
    trace.redistance_seconds += clock.lap();
    trace.records.push_back(make_record(0, 0.0, state.field, cfg.lipschitz_samples));
    snapshot(0, state.field);
    if (state.extinct()) {
        trace.extinction_step = 0;
        trace.extinct_sign = state.negative_empty ? +1 : -1;
        trace.termination = "extinction";
        return trace;
    }

    RedistanceConfig inner = cfg.redistance;
    inner.check_input_lipschitz = false;  // convolution preserves the invariant

    for (long k = 1; k <= budget; ++k) {
        RedistanceResult next;
        if (nonlinear) {
            ScalarField w = gamma_profile(state.field);
            w = apply_kernel(cfg.kernel, w);
            trace.diffusion_seconds += clock.lap();
            next = nonlinear_redistance(w, inner);
            trace.redistance_seconds += clock.lap();
        } else {
            ScalarField u = apply_kernel(cfg.kernel, state.field);
            trace.diffusion_seconds += clock.lap();
            next = redistance(u, inner);
            trace.redistance_seconds += clock.lap();
            if (cfg.debug_inequalities && !next.extinct() &&
                std::holds_alternative<StencilKernel>(cfg.kernel) &&
                std::get<StencilKernel>(cfg.kernel).kind == KernelKind::explicit_euler)
                check_discrete_inequalities(state.field, next.field, h);
        }
        trace.records.push_back(make_record(k, h * k, next.field, cfg.lipschitz_samples));
        if (next.extinct()) {
            trace.extinction_step = k;
            trace.extinct_sign = next.negative_empty ? +1 : -1;
            trace.termination = "extinction";
            return trace;
        }
        state = std::move(next);
        snapshot(k, state.field);
    }
    trace.termination = cfg.max_steps >= 0 ? "max_steps" : "final_time";
    return trace;
}

}  // namespace mcf
