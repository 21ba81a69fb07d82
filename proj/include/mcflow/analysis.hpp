#ifndef MCFLOW_ANALYSIS_HPP
#define MCFLOW_ANALYSIS_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "mcflow/grid.hpp"
#include "mcflow/kernels.hpp"
#include "mcflow/redistance.hpp"
#include "mcflow/scheme.hpp"

namespace mcf {

class wrong_dimension_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class hypothesis_violated_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/** r(t) = sqrt(R0^2 - 2(N-1)t), the shrinking-ball solution of mean
 *  curvature flow (dR/dt = -(N-1)/R). */
struct RadiusLaw {
    double R0 = 50.0;
    int dim = 2;

    double radius_at(double t) const;
    double extinction_time() const;  // R0^2 / (2(N-1))
};

/** Area-equivalent radius sqrt(area/pi) of the negative set; N=2 only. */
double radius_from_field(const ScalarField& field);

double negative_area(const ScalarField& field);

struct LawReport {
    double max_deviation = 0.0;       // over records with predicted radius >= r_min
    double r_min = 10.0;
    double measured_extinction = -1.0;  // time; -1 if the trace never went extinct
    double predicted_extinction = 0.0;
    double extinction_relative_error = 0.0;
    bool extinction_not_late = true;  // measured <= predicted (+one step slack)
};

LawReport compare_to_law(const EvolutionTrace& trace, const RadiusLaw& law, double r_min = 10.0);

enum class BuiltinKernelFamily { explicit_euler, implicit_euler, heat_semigroup };

struct ScalingPoint {
    double eps = 0.0;
    double radius = 0.0;
    double excess = 0.0;  // max over band cells of (one-step sd - (|i| - R))
};

struct ScalingReport {
    std::vector<ScalingPoint> points;
    double fitted_constant = 0.0;  // excess ~ C eps^2 / R
    double exponent_eps = 0.0;
    double exponent_inv_radius = 0.0;
};

/** One diffuse+redistance step on the exact cone |i|-R for every (eps, R)
 *  pair; fits excess = C * eps^a * (1/R)^b. Enforces eps <= R/8. */
ScalingReport ball_step_scaling(std::span<const double> eps_list, std::span<const double> R_list,
                                BuiltinKernelFamily family, int dim = 2);

struct StripCheck {
    double strip_width = 0.0;
    double max_gap_vs_full = 0.0;    // max over strip cells of sd_M - sd_full
    double bound_vs_full = 0.0;      // 4 N eps^2 / M
    double max_gap_vs_oracle = 0.0;  // max over strip cells of |sd_M - signed distance|
    double bound_vs_oracle = 0.0;    // sqrt(N) eps
    int violations = 0;
};

struct StripReport {
    std::vector<StripCheck> checks;
    int total_violations = 0;
};

/** Checks the strip-redistancing bounds against full sd+ and the brute-force
 *  signed distance, on the strip cells. */
StripReport strip_equivalence(const ScalarField& u, std::span<const double> strip_widths,
                              double saturation = 0.0);

/** Deterministic mixed-sign 1-Lipschitz field: uniform noise projected by one
 *  inf-convolution with the cone |.|, recentered at the median. */
ScalarField random_lipschitz_field(const GridGeometry& geometry, std::uint64_t seed,
                                   double saturation = 0.0);

}  // namespace mcf

#endif
