#ifndef MCFLOW_SCHEME_HPP
#define MCFLOW_SCHEME_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcflow/grid.hpp"
#include "mcflow/kernels.hpp"
#include "mcflow/redistance.hpp"

namespace mcf {

enum class SchemeVariant { linear, nonlinear, multiphase };

struct SchemeConfig {
    Kernel kernel;
    RedistanceConfig redistance;
    SchemeVariant variant = SchemeVariant::linear;
    double final_time = -1.0;  // < 0: run until max_steps or extinction
    long max_steps = -1;       // < 0: derived from final_time
    int snapshot_stride = 0;   // 0: no snapshots
    bool debug_inequalities = false;
    int lipschitz_samples = 2000;  // long-range pairs checked per recorded step

    long step_budget(double h) const;
};

struct TraceRecord {
    long step = 0;
    double time = 0.0;
    std::size_t negative_cells = 0;
    double area = 0.0;
    double radius = 0.0;
    bool lipschitz_ok = true;
};

struct EvolutionTrace {
    std::vector<TraceRecord> records;
    long extinction_step = -1;       // first step with an empty sign class
    int extinct_sign = 0;            // +1: {u<0} emptied, -1: {u>=0} emptied
    std::vector<int> vanished_phases;
    std::vector<std::pair<long, ScalarField>> snapshots;
    double time_step = 0.0;
    std::string termination;  // "final_time" | "max_steps" | "extinction"
    double diffusion_seconds = 0.0;
    double redistance_seconds = 0.0;

    bool extinct() const { return extinction_step >= 0; }
};

/** One diffuse-then-redistance step, u = K * sd, sd' = sd[u]. With
 *  debug_check and an explicit-Euler kernel, verifies the discrete
 *  super/subsolution inequalities (sd'_i - sd_i)/h >= (Lap sd)_i where
 *  sd'_i >= 0 and <= where negative, to 1e-9/h. */
RedistanceResult step_linear(const ScalarField& sd, const Kernel& kernel,
                             const RedistanceConfig& rcfg, bool debug_check = false);

/** Nonlinear step sd[gamma^-1(K * gamma(u))]; u and the output live in
 *  [-nonlinear_cap, nonlinear_cap]. */
RedistanceResult step_nonlinear(const ScalarField& u, const Kernel& kernel,
                                const RedistanceConfig& rcfg);

struct MultiphaseStepResult {
    std::vector<ScalarField> fields;
    std::vector<int> vanished;  // indices into the incoming phase list
};

/** Partition scheme: diffuse each nonnegative phase distance, form
 *  v_l = u_l - max over other phases, reset u_l = max(0, sd+[v_l]).
 *  Experimental; two phases reduce to the linear two-phase scheme. */
MultiphaseStepResult step_multiphase(const std::vector<ScalarField>& phases,
                                     const Kernel& kernel, const RedistanceConfig& rcfg);

/** Seeds nonnegative phase distances from a label mask (labels sorted,
 *  one field per distinct label). */
std::vector<ScalarField> multiphase_seed(const PhaseMask& mask, const RedistanceConfig& rcfg);

/** Label map argmin_l u_l with lowest-index tie breaking. */
std::vector<std::uint8_t> multiphase_labels(const std::vector<ScalarField>& phases);

/** Full driver: seed from the mask, redistance, iterate the configured step,
 *  record the trace. Deterministic for a fixed config. */
EvolutionTrace run(const PhaseMask& mask, const SchemeConfig& cfg);

}  // namespace mcf

#endif
