#ifndef MCFLOW_GRID_HPP
#define MCFLOW_GRID_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcf {

constexpr int kMaxDim = 3;

class grid_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/** Uniform grid on a bounded box of eps*Z^N with Neumann mirror reflection
 *  at the faces (half-sample symmetry: index -1 reflects to 0, index n to n-1).
 *
 *  Cells sit at the lattice points eps*(i_1,...,i_N), i_d in [0, extent_d).
 *  All cell-to-cell distances are eps*sqrt(sum of squared index offsets),
 *  evaluated as sqrt of the exact integer square; every module uses this
 *  one convention so that min/max reductions over cone values are
 *  reproducible bit for bit.
 */
struct GridGeometry {
    int dim = 2;
    double spacing = 1.0;
    std::array<int, kMaxDim> extents{};

    GridGeometry() = default;
    GridGeometry(int n, double eps, std::array<int, kMaxDim> ext)
        : dim(n), spacing(eps), extents(ext) {
        validate();
    }
    static GridGeometry box2d(int nx, int ny, double eps = 1.0) {
        return GridGeometry(2, eps, {nx, ny, 1});
    }
    static GridGeometry box1d(int nx, double eps = 1.0) {
        return GridGeometry(1, eps, {nx, 1, 1});
    }
    static GridGeometry box3d(int nx, int ny, int nz, double eps = 1.0) {
        return GridGeometry(3, eps, {nx, ny, nz});
    }

    void validate() const;

    std::size_t cell_count() const {
        std::size_t n = 1;
        for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(extents[d]);
        return n;
    }

    // Mirror reflection of a raw (possibly out-of-box) index on one axis.
    int reflect(int idx, int axis) const {
        const int n = extents[axis];
        while (idx < 0 || idx >= n) {
            if (idx < 0) idx = -1 - idx;
            if (idx >= n) idx = 2 * n - 1 - idx;
        }
        return idx;
    }

    std::size_t linear_index(const std::array<int, kMaxDim>& c) const {
        std::size_t idx = 0;
        for (int d = dim - 1; d >= 0; --d)
            idx = idx * static_cast<std::size_t>(extents[d]) + static_cast<std::size_t>(c[d]);
        return idx;
    }

    std::array<int, kMaxDim> coords_of(std::size_t idx) const {
        std::array<int, kMaxDim> c{};
        for (int d = 0; d < dim; ++d) {
            c[d] = static_cast<int>(idx % static_cast<std::size_t>(extents[d]));
            idx /= static_cast<std::size_t>(extents[d]);
        }
        return c;
    }

    // Exact squared index distance (fits easily in int64 for any desk-scale box).
    static std::int64_t squared_offset(const std::array<int, kMaxDim>& a,
                                       const std::array<int, kMaxDim>& b, int dim) {
        std::int64_t s = 0;
        for (int d = 0; d < dim; ++d) {
            const std::int64_t t = a[d] - b[d];
            s += t * t;
        }
        return s;
    }

    double cell_distance(const std::array<int, kMaxDim>& a,
                         const std::array<int, kMaxDim>& b) const {
        return spacing * std::sqrt(static_cast<double>(squared_offset(a, b, dim)));
    }

    bool operator==(const GridGeometry& o) const {
        return dim == o.dim && spacing == o.spacing && extents == o.extents;
    }
};

/** Real values on the grid, with the saturation level dbar that redistancing
 *  clamps to. Distance-valued fields share the grid's length units. */
struct ScalarField {
    GridGeometry geometry;
    std::vector<double> values;
    double saturation = 0.0;

    ScalarField() = default;
    ScalarField(const GridGeometry& g, double fill, double dbar)
        : geometry(g), values(g.cell_count(), fill), saturation(dbar) {}

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
};

/** One integer label per cell; 0/1 for two-phase masks (0 = inside),
 *  1..L for partitions. */
struct PhaseMask {
    GridGeometry geometry;
    std::vector<std::uint8_t> labels;

    PhaseMask() = default;
    PhaseMask(const GridGeometry& g, std::uint8_t fill = 1)
        : geometry(g), labels(g.cell_count(), fill) {}

    std::size_t count(std::uint8_t v) const {
        std::size_t n = 0;
        for (std::uint8_t l : labels) n += (l == v);
        return n;
    }
};

// Default saturation level: the largest truncation level exercised in the
// disk experiments.
inline double default_saturation(double eps) { return 30.0 * eps; }

/** Five-point (2N+1) discrete Laplacian with Neumann reflection:
 *  (Lap v)_i = eps^-2 sum_d (v_{i+e_d} - 2 v_i + v_{i-e_d}).  Linear; zero on
 *  constants and, away from the boundary, on affine fields. */
ScalarField discrete_laplacian(const ScalarField& field);

struct SignedDistanceResult {
    ScalarField field;
    bool one_phase_empty = false;
    int empty_phase = -1;  // 0 or 1 when one_phase_empty
};

/** Brute-force O(M^2) signed distance to the opposite phase: negative
 *  inside phase 0, clamped to [-dbar, dbar]. Exact; used as the oracle the
 *  redistancing operators are tested against. */
SignedDistanceResult exact_signed_distance(const PhaseMask& mask, double dbar);

/** +-eps/2 seed: -eps/2 on phase 0, +eps/2 elsewhere. 1-Lipschitz since
 *  adjacent cells are eps apart. */
ScalarField seed_field(const PhaseMask& mask, double dbar);

struct LipschitzReport {
    bool ok = true;
    double worst_excess = 0.0;  // max over checked pairs of |v_i-v_j| - |i-j|
    std::size_t cell_a = 0;
    std::size_t cell_b = 0;
    double value_gap = 0.0;
    double distance = 0.0;
};

/** Checks |v_i - v_j| <= |i-j| + tol with tol = 1e-9*eps over all axis
 *  neighbors plus `long_range_samples` random long-range pairs (the
 *  adjacency check alone is conclusive only for the l1 metric). */
LipschitzReport lipschitz_check(const ScalarField& field,
                                int long_range_samples = 10000,
                                std::uint64_t seed = 0x6d63666c6f77ull);

inline double lipschitz_tolerance(double eps) { return 1e-9 * eps; }

}  // namespace mcf

#endif
