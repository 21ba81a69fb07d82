#ifndef MCFLOW_KERNELS_HPP
#define MCFLOW_KERNELS_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

#include "mcflow/grid.hpp"

namespace mcf {

class kernel_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class geometry_mismatch_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class KernelKind { explicit_euler, implicit_euler, heat_semigroup, stencil };

/** Finite symmetric convolution stencil on the grid; offsets in index units.
 *  derived_h is the second-moment time step h = (1/2N) sum |eps*j|^2 K_j. */
struct StencilKernel {
    KernelKind kind = KernelKind::stencil;
    int dim = 2;
    double spacing = 1.0;
    std::vector<std::pair<std::array<int, kMaxDim>, double>> taps;
    double derived_h = 0.0;
    double theta = 0.0;  // set for explicit Euler builds
};

/** Kernel given by its Fourier symbol sampled on the cosine-frequency grid of
 *  a Neumann box; applied by DCT, never materialized in space. */
struct SpectralKernel {
    KernelKind kind = KernelKind::implicit_euler;
    double tau = 0.0;
    GridGeometry box;
    std::vector<double> symbol;  // one value per frequency tuple, box layout
    double derived_h = 0.0;      // from the symbol's second difference at 0
    bool cfl_warning = false;    // tau < eps^2
};

using Kernel = std::variant<StencilKernel, SpectralKernel>;

/** Explicit Euler stencil: (1 - theta) delta_0 + theta/(2N) sum (delta_{+-e_d});
 *  h = theta*eps^2/(2N) exactly. theta outside (0,1] makes the center weight
 *  negative and is rejected. */
StencilKernel explicit_euler_kernel(double theta, double eps, int dim);

/** General user stencil; offsets beyond the box reflect at the faces. */
StencilKernel make_stencil(int dim, double eps,
                           std::vector<std::pair<std::array<int, kMaxDim>, double>> taps);

/** Resolvent symbol of u - tau*Lap u = g: 1/(1 - tau*lambda(xi)); h = tau. */
SpectralKernel implicit_euler_symbol(double tau, double eps, const GridGeometry& box);

/** Semigroup symbol exp(tau*lambda(xi)) of the semidiscrete heat flow; h = tau. */
SpectralKernel heat_semigroup_symbol(double tau, double eps, const GridGeometry& box);

/** Stencils convolve directly with Neumann reflection; spectral kernels go
 *  through forward DCT, symbol multiply, inverse DCT. */
ScalarField apply_kernel(const Kernel& kernel, const ScalarField& field);

double kernel_time_step(const Kernel& kernel);
int kernel_dim(const Kernel& kernel);
double kernel_spacing(const Kernel& kernel);

/** Analytic symbol K~(xi) of the kernel (even in xi for symmetric kernels). */
double kernel_symbol(const Kernel& kernel, const std::array<double, kMaxDim>& xi);

struct KernelReport {
    double mass_error = 0.0;
    double symmetry_error = 0.0;
    int positivity_violations = 0;
    double derived_h = 0.0;
    double nominal_h = 0.0;
    double h_relative_error = 0.0;
    bool cfl_warning = false;
    int symbol_bound_violations = 0;  // of 0 <= (1-K~(xi))/h <= 4 pi^2 N |xi|^2
    int sampled_frequencies = 0;
    std::vector<double> consistency_xi;  // magnitudes of the fixed test frequencies
    // per xi: |(1-K~(xi))/h - 4 pi^2 |xi|^2| for eps scaled by 1, 1/2, 1/4
    std::vector<std::array<double, 3>> consistency_error;
    bool consistency_decreasing = false;
    bool passed = false;
};

KernelReport validate_kernel(const Kernel& kernel, int sampled_frequencies = 1000,
                             std::uint64_t seed = 0x73796d626f6cull);

}  // namespace mcf

#endif
