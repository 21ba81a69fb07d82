#ifndef MCFLOW_REDISTANCE_HPP
#define MCFLOW_REDISTANCE_HPP

#include <stdexcept>

#include "mcflow/grid.hpp"

namespace mcf {

class not_lipschitz_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class RedistanceVariant { plus, minus, average };

/** Configuration of the inf/sup-convolution redistancing.
 *
 *  strip_width M > 0 restricts the source sets to the strips
 *  S_M{u<0} and S_M{u>=0} (cells of one sign class within distance M of the
 *  other); 0 means full redistancing. The saturation level dbar truncates by
 *  restricting sources to within min(M, dbar) of the opposite sign class and
 *  clamping outputs to [-dbar, +dbar]; both together preserve the 1-Lipschitz
 *  property. */
struct RedistanceConfig {
    RedistanceVariant variant = RedistanceVariant::plus;
    double strip_width = 0.0;
    double saturation = 30.0;
    double nonlinear_cap = 15.0;
    bool check_input_lipschitz = true;
};

struct RedistanceResult {
    ScalarField field;
    bool negative_empty = false;  // {u<0} was empty: field saturated at +dbar
    bool positive_empty = false;  // {u>=0} was empty: field saturated at -dbar

    bool extinct() const { return negative_empty || positive_empty; }
};

/** d+[u]_i = inf over {j: u_j<0} of u_j + |j-i|, capped at +dbar; the largest
 *  1-Lipschitz function below u on {u<0}. */
ScalarField d_plus(const ScalarField& u, const RedistanceConfig& cfg = {});

/** d-[u]_i = sup over {j: u_j>0} of u_j - |j-i|; mirror of d_plus. */
ScalarField d_minus(const ScalarField& u, const RedistanceConfig& cfg = {});

/** sd+[u]: the two-pass inf/sup redistancing. Sign-equivalent to u, equals
 *  d+ on {u>=0}, <= u on {u<0}, 1-Lipschitz, clamped to [-dbar, dbar]. */
RedistanceResult sd_plus(const ScalarField& u, const RedistanceConfig& cfg = {});

/** sd-[u] = -sd+[-u], the variant anchored on {u<=0}/{u>0}. */
RedistanceResult sd_minus(const ScalarField& u, const RedistanceConfig& cfg = {});

/** Dispatch on cfg.variant; average computes (sd+ + sd-)/2. */
RedistanceResult redistance(const ScalarField& u, const RedistanceConfig& cfg);

/** Strip-restricted sd+ (eq. sdM operators); M must exceed the spacing. */
RedistanceResult sd_strip(const ScalarField& u, double strip_width,
                          RedistanceConfig cfg = {});

/** Modica-Mortola profile gamma(s) = tanh(s), applied cellwise. */
ScalarField gamma_profile(const ScalarField& u);

/** gamma^-1 = atanh with the argument clamped to [-1+delta, 1-delta],
 *  delta = 1e-12; total on any input. */
ScalarField gamma_profile_inverse(const ScalarField& w);

/** Redistances gamma^-1(w) with saturation at cfg.nonlinear_cap; w is the
 *  post-convolution profile field with values in (-1,1). */
RedistanceResult nonlinear_redistance(const ScalarField& w, const RedistanceConfig& cfg = {});

std::size_t negative_cell_count(const ScalarField& u);

}  // namespace mcf

#endif
