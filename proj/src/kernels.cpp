#include "mcflow/kernels.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

namespace mcf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFourPi2 = 4.0 * std::numbers::pi * std::numbers::pi;

// Symbol of the discrete Laplacian, lambda(xi) = (2/eps^2) sum (cos(2 pi eps xi_d) - 1).
double laplacian_symbol(double eps, int dim, const std::array<double, kMaxDim>& xi) {
    double acc = 0.0;
    for (int d = 0; d < dim; ++d) acc += std::cos(kTwoPi * eps * xi[d]) - 1.0;
    return 2.0 * acc / (eps * eps);
}

double spectral_symbol_value(KernelKind kind, double tau, double eps, int dim,
                             const std::array<double, kMaxDim>& xi) {
    const double lam = laplacian_symbol(eps, dim, xi);
    if (kind == KernelKind::implicit_euler) return 1.0 / (1.0 - tau * lam);
    return std::exp(tau * lam);
}

// Laplacian of the analytic symbol at xi = 0 by Richardson-extrapolated
// central differences; feeds h = -Lap K~(0) / (8 pi^2 N).
template <typename SymbolFn>
double symbol_laplacian_at_zero(int dim, SymbolFn&& symbol) {
    auto second_diff = [&](double delta) {
        double acc = 0.0;
        for (int d = 0; d < dim; ++d) {
            std::array<double, kMaxDim> xi{};
            xi[d] = delta;
            acc += 2.0 * (symbol(xi) - 1.0) / (delta * delta);
        }
        return acc;
    };
    const double delta = 1e-3;
    const double c = second_diff(delta);
    const double f = second_diff(0.5 * delta);
    return (4.0 * f - c) / 3.0;
}

SpectralKernel build_spectral(KernelKind kind, double tau, double eps, const GridGeometry& box) {
    if (!(tau > 0.0)) throw kernel_error("tau must be positive");
    box.validate();
    if (box.spacing != eps) throw kernel_error("kernel spacing must match the box spacing");

    SpectralKernel k;
    k.kind = kind;
    k.tau = tau;
    k.box = box;
    k.cfl_warning = tau < eps * eps;

    const std::size_t n = box.cell_count();
    k.symbol.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = box.coords_of(i);
        double acc = 0.0;
        for (int d = 0; d < box.dim; ++d)
            acc += std::cos(std::numbers::pi * c[d] / box.extents[d]) - 1.0;
        const double lam = 2.0 * acc / (eps * eps);
        k.symbol[i] = (kind == KernelKind::implicit_euler) ? 1.0 / (1.0 - tau * lam)
                                                           : std::exp(tau * lam);
    }

    const double lap0 = symbol_laplacian_at_zero(box.dim, [&](const auto& xi) {
        return spectral_symbol_value(kind, tau, eps, box.dim, xi);
    });
    k.derived_h = -lap0 / (8.0 * std::numbers::pi * std::numbers::pi * box.dim);
    return k;
}

ScalarField apply_stencil(const StencilKernel& k, const ScalarField& field) {
    const GridGeometry& g = field.geometry;
    if (g.dim != k.dim || g.spacing != k.spacing)
        throw geometry_mismatch_error("stencil and field geometry disagree");

    ScalarField out(g, 0.0, field.saturation);
    const std::size_t n = g.cell_count();

    std::array<std::size_t, kMaxDim> stride{};
    stride[0] = 1;
    for (int d = 1; d < g.dim; ++d)
        stride[d] = stride[d - 1] * static_cast<std::size_t>(g.extents[d - 1]);

    int reach = 0;
    std::vector<std::ptrdiff_t> linoff(k.taps.size());
    for (std::size_t t = 0; t < k.taps.size(); ++t) {
        std::ptrdiff_t o = 0;
        for (int d = 0; d < g.dim; ++d) {
            reach = std::max(reach, std::abs(k.taps[t].first[d]));
            o += static_cast<std::ptrdiff_t>(k.taps[t].first[d]) *
                 static_cast<std::ptrdiff_t>(stride[d]);
        }
        linoff[t] = o;
    }

    auto interior = [&](const std::array<int, kMaxDim>& c) {
        for (int d = 0; d < g.dim; ++d)
            if (c[d] < reach || c[d] >= g.extents[d] - reach) return false;
        return true;
    };

    for (std::size_t i = 0; i < n; ++i) {
        const auto c = g.coords_of(i);
        double acc = 0.0;
        if (interior(c)) {
            for (std::size_t t = 0; t < k.taps.size(); ++t)
                acc += k.taps[t].second *
                       field.values[static_cast<std::size_t>(
                           static_cast<std::ptrdiff_t>(i) + linoff[t])];
        } else {
            for (const auto& [off, w] : k.taps) {
                std::size_t j = 0;
                for (int d = 0; d < g.dim; ++d)
                    j += static_cast<std::size_t>(g.reflect(c[d] + off[d], d)) * stride[d];
                acc += w * field.values[j];
            }
        }
        out.values[i] = acc;
    }
    return out;
}

ScalarField apply_spectral(const SpectralKernel& k, const ScalarField& field) {
    const GridGeometry& g = field.geometry;
    if (!(g == k.box)) throw geometry_mismatch_error("spectral kernel bound to another box");

    const std::size_t n = g.cell_count();
    std::vector<double> buf(field.values);

    fftw_r2r_kind fwd[kMaxDim], bwd[kMaxDim];
    int dims[kMaxDim];
    for (int d = 0; d < g.dim; ++d) {
        fwd[d] = FFTW_REDFT10;
        bwd[d] = FFTW_REDFT01;
        dims[d] = g.extents[g.dim - 1 - d];  // fftw wants the slowest axis first
    }

    fftw_plan pf = fftw_plan_r2r(g.dim, dims, buf.data(), buf.data(), fwd, FFTW_ESTIMATE);
    fftw_execute(pf);
    fftw_destroy_plan(pf);

    double scale = 1.0;
    for (int d = 0; d < g.dim; ++d) scale *= 2.0 * g.extents[d];
    const double inv_scale = 1.0 / scale;
    for (std::size_t i = 0; i < n; ++i) buf[i] *= k.symbol[i] * inv_scale;

    fftw_plan pb = fftw_plan_r2r(g.dim, dims, buf.data(), buf.data(), bwd, FFTW_ESTIMATE);
    fftw_execute(pb);
    fftw_destroy_plan(pb);

    ScalarField out(g, 0.0, field.saturation);
    out.values = std::move(buf);
    return out;
}

}  // namespace

StencilKernel explicit_euler_kernel(double theta, double eps, int dim) {
    if (!(theta > 0.0) || theta > 1.0)
        throw kernel_error("theta must lie in (0,1]: the center weight 1-theta stays nonnegative");
    if (!(eps > 0.0)) throw kernel_error("eps must be positive");
    if (dim < 1 || dim > kMaxDim) throw kernel_error("unsupported dimension");

    StencilKernel k;
    k.kind = KernelKind::explicit_euler;
    k.dim = dim;
    k.spacing = eps;
    k.theta = theta;
    std::array<int, kMaxDim> zero{};
    k.taps.push_back({zero, 1.0 - theta});
    const double w = theta / (2.0 * dim);
    for (int d = 0; d < dim; ++d) {
        std::array<int, kMaxDim> off{};
        off[d] = 1;
        k.taps.push_back({off, w});
        off[d] = -1;
        k.taps.push_back({off, w});
    }
    k.derived_h = theta * eps * eps / (2.0 * dim);
    return k;
}

StencilKernel make_stencil(int dim, double eps,
                           std::vector<std::pair<std::array<int, kMaxDim>, double>> taps) {
    if (dim < 1 || dim > kMaxDim) throw kernel_error("unsupported dimension");
    if (!(eps > 0.0)) throw kernel_error("eps must be positive");
    std::map<std::array<int, kMaxDim>, double> seen;
    for (const auto& [off, w] : taps) {
        if (seen.count(off)) throw kernel_error("duplicate stencil offset");
        seen[off] = w;
    }
    StencilKernel k;
    k.kind = KernelKind::stencil;
    k.dim = dim;
    k.spacing = eps;
    k.taps = std::move(taps);
    double moment = 0.0;
    for (const auto& [off, w] : k.taps) {
        double j2 = 0.0;
        for (int d = 0; d < dim; ++d) j2 += static_cast<double>(off[d]) * off[d];
        moment += j2 * w;
    }
    k.derived_h = moment * eps * eps / (2.0 * dim);
    return k;
}

SpectralKernel implicit_euler_symbol(double tau, double eps, const GridGeometry& box) {
    return build_spectral(KernelKind::implicit_euler, tau, eps, box);
}

SpectralKernel heat_semigroup_symbol(double tau, double eps, const GridGeometry& box) {
    return build_spectral(KernelKind::heat_semigroup, tau, eps, box);
}

ScalarField apply_kernel(const Kernel& kernel, const ScalarField& field) {
    if (std::holds_alternative<StencilKernel>(kernel))
        return apply_stencil(std::get<StencilKernel>(kernel), field);
    return apply_spectral(std::get<SpectralKernel>(kernel), field);
}

double kernel_time_step(const Kernel& kernel) {
    if (std::holds_alternative<StencilKernel>(kernel))
        return std::get<StencilKernel>(kernel).derived_h;
    return std::get<SpectralKernel>(kernel).derived_h;
}

int kernel_dim(const Kernel& kernel) {
    if (std::holds_alternative<StencilKernel>(kernel)) return std::get<StencilKernel>(kernel).dim;
    return std::get<SpectralKernel>(kernel).box.dim;
}

double kernel_spacing(const Kernel& kernel) {
    if (std::holds_alternative<StencilKernel>(kernel))
        return std::get<StencilKernel>(kernel).spacing;
    return std::get<SpectralKernel>(kernel).box.spacing;
}

double kernel_symbol(const Kernel& kernel, const std::array<double, kMaxDim>& xi) {
    if (std::holds_alternative<SpectralKernel>(kernel)) {
        const auto& k = std::get<SpectralKernel>(kernel);
        return spectral_symbol_value(k.kind, k.tau, k.box.spacing, k.box.dim, xi);
    }
    const auto& k = std::get<StencilKernel>(kernel);
    double acc = 0.0;
    for (const auto& [off, w] : k.taps) {
        double phase = 0.0;
        for (int d = 0; d < k.dim; ++d) phase += off[d] * xi[d];
        acc += w * std::cos(kTwoPi * k.spacing * phase);
    }
    return acc;
}

namespace {

// Kernel of the same family at scaled eps, for the fixed-frequency
// consistency trend: tau scales like eps^2 (the CFL-natural coupling),
// theta and stencil taps stay fixed.
double family_symbol(const Kernel& kernel, double eps_factor,
                     const std::array<double, kMaxDim>& xi, double* h_out) {
    if (std::holds_alternative<SpectralKernel>(kernel)) {
        const auto& k = std::get<SpectralKernel>(kernel);
        const double eps = k.box.spacing * eps_factor;
        const double tau = k.tau * eps_factor * eps_factor;
        *h_out = tau;
        return spectral_symbol_value(k.kind, tau, eps, k.box.dim, xi);
    }
    const auto& k = std::get<StencilKernel>(kernel);
    const double eps = k.spacing * eps_factor;
    double acc = 0.0, moment = 0.0;
    for (const auto& [off, w] : k.taps) {
        double phase = 0.0, j2 = 0.0;
        for (int d = 0; d < k.dim; ++d) {
            phase += off[d] * xi[d];
            j2 += static_cast<double>(off[d]) * off[d];
        }
        acc += w * std::cos(kTwoPi * eps * phase);
        moment += j2 * w;
    }
    *h_out = moment * eps * eps / (2.0 * k.dim);
    return acc;
}

}  // namespace

KernelReport validate_kernel(const Kernel& kernel, int sampled_frequencies,
                             std::uint64_t seed) {
    KernelReport rep;
    const int dim = kernel_dim(kernel);
    const double eps = kernel_spacing(kernel);

    if (std::holds_alternative<StencilKernel>(kernel)) {
        const auto& k = std::get<StencilKernel>(kernel);
        double mass = 0.0;
        std::map<std::array<int, kMaxDim>, double> w;
        for (const auto& [off, wt] : k.taps) {
            mass += wt;
            w[off] = wt;
            if (wt < 0.0) ++rep.positivity_violations;
        }
        rep.mass_error = std::abs(1.0 - mass);
        for (const auto& [off, wt] : w) {
            std::array<int, kMaxDim> neg{};
            for (int d = 0; d < dim; ++d) neg[d] = -off[d];
            const auto it = w.find(neg);
            const double mirror = (it == w.end()) ? 0.0 : it->second;
            rep.symmetry_error = std::max(rep.symmetry_error, std::abs(wt - mirror));
        }
        double moment = 0.0;
        for (const auto& [off, wt] : k.taps) {
            double j2 = 0.0;
            for (int d = 0; d < dim; ++d) j2 += static_cast<double>(off[d]) * off[d];
            moment += j2 * wt;
        }
        rep.derived_h = moment * eps * eps / (2.0 * dim);
        rep.nominal_h = (k.kind == KernelKind::explicit_euler)
                            ? k.theta * eps * eps / (2.0 * dim)
                            : rep.derived_h;
        rep.cfl_warning = false;
    } else {
        const auto& k = std::get<SpectralKernel>(kernel);
        rep.mass_error = std::abs(1.0 - k.symbol[0]);
        rep.symmetry_error = 0.0;  // the symbol is even by construction
        for (double s : k.symbol)
            if (!(s > 0.0) || s > 1.0 + 1e-12) ++rep.positivity_violations;
        rep.derived_h = k.derived_h;
        rep.nominal_h = k.tau;
        rep.cfl_warning = k.cfl_warning;
    }
    rep.h_relative_error =
        std::abs(rep.derived_h - rep.nominal_h) / std::max(std::abs(rep.nominal_h), 1e-300);

    // eq:boundsymbol on sampled frequencies (real symbols only).
    const double h = rep.derived_h;
    if (rep.symmetry_error == 0.0 && h > 0.0) {
        std::mt19937_64 rng(seed);
        auto uniform = [&]() { return (rng() >> 11) * 0x1.0p-53; };
        rep.sampled_frequencies = sampled_frequencies;
        const double nyquist = 0.5 / eps;
        for (int s = 0; s < sampled_frequencies; ++s) {
            std::array<double, kMaxDim> xi{};
            double xi2 = 0.0;
            for (int d = 0; d < dim; ++d) {
                xi[d] = (2.0 * uniform() - 1.0) * nyquist;
                xi2 += xi[d] * xi[d];
            }
            const double t = (1.0 - kernel_symbol(kernel, xi)) / h;
            const double upper = kFourPi2 * dim * xi2;
            if (t < -1e-9 || t > upper * (1.0 + 1e-9) + 1e-9) ++rep.symbol_bound_violations;
        }
    }

    // Fixed-frequency consistency: (1-K~(xi))/h -> 4 pi^2 |xi|^2 as eps -> 0.
    rep.consistency_xi = {0.1 / eps, 0.25 / eps, 0.5 / eps};
    if (rep.symmetry_error == 0.0) {
        const double factors[3] = {1.0, 0.5, 0.25};
        rep.consistency_decreasing = true;
        for (double xim : rep.consistency_xi) {
            std::array<double, 3> errs{};
            for (int f = 0; f < 3; ++f) {
                std::array<double, kMaxDim> xi{};
                xi[0] = xim;
                double hf = 0.0;
                const double sym = family_symbol(kernel, factors[f], xi, &hf);
                errs[f] = std::abs((1.0 - sym) / hf - kFourPi2 * xim * xim);
            }
            rep.consistency_error.push_back(errs);
            if (!(errs[0] > errs[1] && errs[1] > errs[2])) rep.consistency_decreasing = false;
        }
    }

    rep.passed = rep.mass_error < 1e-10 && rep.symmetry_error == 0.0 &&
                 rep.positivity_violations == 0 && rep.symbol_bound_violations == 0;
    return rep;
}

}  // namespace mcf
