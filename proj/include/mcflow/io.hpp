#ifndef MCFLOW_IO_HPP
#define MCFLOW_IO_HPP

#include <string>

#include <json.hpp>

#include "mcflow/grid.hpp"
#include "mcflow/kernels.hpp"
#include "mcflow/scheme.hpp"

namespace mcf {

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shortest round-trip decimal representation; '.' separator, no locale.
std::string format_double(double x);

/** Plain or binary PGM (P2/P5); raw values below 128 become phase 0. */
PhaseMask read_pgm_mask(const std::string& path, double eps = 1.0);

/** Rows of digits; '0' is phase 0, any other digit keeps its value
 *  (partition labels). */
PhaseMask read_text_mask(const std::string& path, double eps = 1.0);

/** Snapshot PGM rescaled from [min,max] to [0,255]; 2D fields only. */
void write_pgm_snapshot(const std::string& path, const ScalarField& field);

/** CSV with header x,y[,z],value; coordinates are index*spacing. */
void write_field_csv(const std::string& path, const ScalarField& field);
ScalarField read_field_csv(const std::string& path, double saturation);

void write_trace_csv(const std::string& path, const EvolutionTrace& trace);

std::string fnv1a64_file(const std::string& path);

/** Kernel spec file: {"type": "explicit|implicit|heat|stencil",
 *  "theta"?:, "tau"?:, "weights"?: [[[offsets...], w], ...]}. */
struct KernelSpec {
    KernelKind kind = KernelKind::explicit_euler;
    double theta = 1.0;
    double tau = 1.0;
    std::vector<std::pair<std::array<int, kMaxDim>, double>> taps;
};

KernelSpec parse_kernel_spec(const nlohmann::json& j);
KernelSpec load_kernel_spec(const std::string& path_or_builtin, double theta, double tau);
Kernel build_kernel(const KernelSpec& spec, double eps, int dim, const GridGeometry& box);

nlohmann::json kernel_report_json(const KernelReport& rep);
nlohmann::json trace_summary_json(const EvolutionTrace& trace);

}  // namespace mcf

#endif
