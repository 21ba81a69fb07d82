#include "mcflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "cone.hpp"

namespace mcf {

double RadiusLaw::radius_at(double t) const {
    const double s = R0 * R0 - 2.0 * (dim - 1) * t;
    return s > 0.0 ? std::sqrt(s) : 0.0;
}

double RadiusLaw::extinction_time() const {
    if (dim <= 1) return std::numeric_limits<double>::infinity();
    return R0 * R0 / (2.0 * (dim - 1));
}

double negative_area(const ScalarField& field) {
    double cell = 1.0;
    for (int d = 0; d < field.geometry.dim; ++d) cell *= field.geometry.spacing;
    return cell * static_cast<double>(negative_cell_count(field));
}

double radius_from_field(const ScalarField& field) {
    if (field.geometry.dim != 2)
        throw wrong_dimension_error("radius_from_field expects a 2D field");
    return std::sqrt(negative_area(field) / std::numbers::pi);
}

LawReport compare_to_law(const EvolutionTrace& trace, const RadiusLaw& law, double r_min) {
    LawReport rep;
    rep.r_min = r_min;
    rep.predicted_extinction = law.extinction_time();
    for (const TraceRecord& r : trace.records) {
        const double pred = law.radius_at(r.time);
        if (pred < r_min) continue;
        rep.max_deviation = std::max(rep.max_deviation, std::abs(r.radius - pred));
    }
    if (trace.extinct()) {
        rep.measured_extinction = trace.extinction_step * trace.time_step;
        rep.extinction_relative_error =
            std::abs(rep.measured_extinction - rep.predicted_extinction) /
            rep.predicted_extinction;
        rep.extinction_not_late =
            rep.measured_extinction <= rep.predicted_extinction + trace.time_step;
    }
    return rep;
}

namespace {

Kernel family_kernel(BuiltinKernelFamily family, double eps, int dim, const GridGeometry& box) {
    switch (family) {
        case BuiltinKernelFamily::explicit_euler:
            return explicit_euler_kernel(1.0, eps, dim);
        case BuiltinKernelFamily::implicit_euler:
            return implicit_euler_symbol(eps * eps, eps, box);
        case BuiltinKernelFamily::heat_semigroup:
            return heat_semigroup_symbol(eps * eps, eps, box);
    }
    throw kernel_error("unknown kernel family");
}

}  // namespace

ScalingReport ball_step_scaling(std::span<const double> eps_list, std::span<const double> R_list,
                                BuiltinKernelFamily family, int dim) {
    ScalingReport rep;
    for (double R : R_list) {
        for (double eps : eps_list) {
            if (eps > R / 8.0)
                throw hypothesis_violated_error("ball lemma needs eps <= R/8");

            const double dbar = 10.0 * eps;
            const int half = static_cast<int>(std::ceil((R + dbar + 4.0 * eps) / eps));
            const int ext = 2 * half + 1;
            GridGeometry g(dim, eps, {ext, dim >= 2 ? ext : 1, dim >= 3 ? ext : 1});
            ScalarField u(g, 0.0, dbar);
            std::array<int, kMaxDim> center{};
            for (int d = 0; d < dim; ++d) center[d] = half;
            const std::size_t n = g.cell_count();
            std::vector<double> cone(n);
            for (std::size_t i = 0; i < n; ++i) {
                cone[i] = g.cell_distance(g.coords_of(i), center);
                u.values[i] = cone[i] - R;
            }

            const Kernel kernel = family_kernel(family, eps, dim, g);
            RedistanceConfig rcfg;
            rcfg.saturation = dbar;
            rcfg.check_input_lipschitz = false;
            RedistanceResult step = step_linear(u, kernel, rcfg);

            double excess = 0.0;
            const double band = dbar - 2.0 * eps;
            for (std::size_t i = 0; i < n; ++i) {
                if (std::abs(u.values[i]) > band) continue;
                excess = std::max(excess, step.field.values[i] - u.values[i]);
            }
            rep.points.push_back({eps, R, excess});
        }
    }

    // least squares on log excess = log C + a log eps + b log(1/R)
    double s11 = 0, s1a = 0, s1b = 0, saa = 0, sab = 0, sbb = 0;
    double sy = 0, say = 0, sby = 0;
    for (const auto& p : rep.points) {
        const double a = std::log(p.eps), b = std::log(1.0 / p.radius);
        const double y = std::log(std::max(p.excess, 1e-300));
        s11 += 1;
        s1a += a;
        s1b += b;
        saa += a * a;
        sab += a * b;
        sbb += b * b;
        sy += y;
        say += a * y;
        sby += b * y;
    }
    // solve the 3x3 normal equations by Cramer's rule
    const double m[3][3] = {{s11, s1a, s1b}, {s1a, saa, sab}, {s1b, sab, sbb}};
    const double rhs[3] = {sy, say, sby};
    auto det3 = [](const double a[3][3]) {
        return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
               a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
               a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    };
    const double det = det3(m);
    double sol[3] = {0, 0, 0};
    for (int c = 0; c < 3; ++c) {
        double t[3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) t[i][j] = (j == c) ? rhs[i] : m[i][j];
        sol[c] = det3(t) / det;
    }
    rep.fitted_constant = std::exp(sol[0]);
    rep.exponent_eps = sol[1];
    rep.exponent_inv_radius = sol[2];
    return rep;
}

StripReport strip_equivalence(const ScalarField& u, std::span<const double> strip_widths,
                              double saturation) {
    const GridGeometry& g = u.geometry;
    const int N = g.dim;
    const double eps = g.spacing;
    double diam2 = 0.0;
    for (int d = 0; d < N; ++d)
        diam2 += static_cast<double>(g.extents[d] - 1) * (g.extents[d] - 1);
    const double dbar = saturation > 0.0 ? saturation : eps * (std::sqrt(diam2) + 1.0);

    RedistanceConfig full;
    full.saturation = dbar;
    const RedistanceResult sd_full = sd_plus(u, full);

    // brute-force signed distance to the sign classes of u
    PhaseMask mask(g, 1);
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u.values[i] < 0.0) mask.labels[i] = 0;
    const ScalarField oracle = exact_signed_distance(mask, dbar).field;

    std::vector<std::uint8_t> negmask(u.size()), posmask(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        negmask[i] = u.values[i] < 0.0;
        posmask[i] = !negmask[i];
    }
    const auto edt2pos = detail::squared_edt(g, posmask);
    const auto edt2neg = detail::squared_edt(g, negmask);

    StripReport rep;
    for (double M : strip_widths) {
        StripCheck chk;
        chk.strip_width = M;
        chk.bound_vs_full = 4.0 * N * eps * eps / M;
        chk.bound_vs_oracle = std::sqrt(static_cast<double>(N)) * eps;

        RedistanceConfig scfg;
        scfg.saturation = dbar;
        const RedistanceResult sd_m = sd_strip(u, M, scfg);

        const std::int64_t reach = detail::squared_reach_threshold(eps, M);
        const double slack = 1e-9;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const bool in_strip = negmask[i] ? edt2pos[i] <= static_cast<double>(reach)
                                             : edt2neg[i] <= static_cast<double>(reach);
            if (!in_strip) continue;
            const double gap_full = sd_m.field.values[i] - sd_full.field.values[i];
            const double gap_oracle = std::abs(sd_m.field.values[i] - oracle.values[i]);
            chk.max_gap_vs_full = std::max(chk.max_gap_vs_full, gap_full);
            chk.max_gap_vs_oracle = std::max(chk.max_gap_vs_oracle, gap_oracle);
            if (gap_full > chk.bound_vs_full + slack) ++chk.violations;
            if (gap_oracle > chk.bound_vs_oracle + slack) ++chk.violations;
        }
        rep.total_violations += chk.violations;
        rep.checks.push_back(chk);
    }
    return rep;
}

ScalarField random_lipschitz_field(const GridGeometry& geometry, std::uint64_t seed,
                                   double saturation) {
    const std::size_t n = geometry.cell_count();
    double diam2 = 0.0;
    for (int d = 0; d < geometry.dim; ++d)
        diam2 += static_cast<double>(geometry.extents[d] - 1) * (geometry.extents[d] - 1);
    const double diam = geometry.spacing * std::sqrt(diam2);
    const double dbar = saturation > 0.0 ? saturation : diam + geometry.spacing;

    std::mt19937_64 rng(seed);
    auto uniform = [&]() { return (rng() >> 11) * 0x1.0p-53; };
    std::vector<double> raw(n);
    const double amp = 0.5 * diam;
    for (double& x : raw) x = amp * (2.0 * uniform() - 1.0);

    // one inf-convolution pass with the cone: the largest 1-Lipschitz
    // minorant v_i = min_j raw_j + |j-i|
    std::vector<std::array<int, kMaxDim>> coords(n);
    for (std::size_t i = 0; i < n; ++i) coords[i] = geometry.coords_of(i);
    ScalarField out(geometry, 0.0, dbar);
    for (std::size_t i = 0; i < n; ++i) {
        double best = raw[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double cand =
                raw[j] + geometry.spacing *
                             std::sqrt(static_cast<double>(
                                 GridGeometry::squared_offset(coords[i], coords[j], geometry.dim)));
            best = std::min(best, cand);
        }
        out.values[i] = best;
    }

    std::vector<double> sorted(out.values);
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2),
                     sorted.end());
    const double median = sorted[n / 2];
    for (double& x : out.values) x -= median;
    return out;
}

}  // namespace mcf
