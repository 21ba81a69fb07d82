#include "mcflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mcf {

void GridGeometry::validate() const {
    if (dim < 1 || dim > kMaxDim)
        throw grid_error("grid dimension must be in [1," + std::to_string(kMaxDim) + "]");
    if (!(spacing > 0.0)) throw grid_error("grid spacing must be positive");
    for (int d = 0; d < dim; ++d)
        if (extents[d] < 3)
            throw grid_error("every extent must be >= 3 (stencil needs neighbors)");
    for (int d = dim; d < kMaxDim; ++d)
        if (extents[d] != 1) throw grid_error("unused extents must be 1");
}

ScalarField discrete_laplacian(const ScalarField& field) {
    const GridGeometry& g = field.geometry;
    ScalarField out(g, 0.0, field.saturation);
    const double inv_eps2 = 1.0 / (g.spacing * g.spacing);
    const std::size_t n = g.cell_count();

    // per-axis strides
    std::array<std::size_t, kMaxDim> stride{};
    stride[0] = 1;
    for (int d = 1; d < g.dim; ++d)
        stride[d] = stride[d - 1] * static_cast<std::size_t>(g.extents[d - 1]);

    for (std::size_t i = 0; i < n; ++i) {
        const auto c = g.coords_of(i);
        double acc = 0.0;
        for (int d = 0; d < g.dim; ++d) {
            const int up = g.reflect(c[d] + 1, d);
            const int dn = g.reflect(c[d] - 1, d);
            const std::size_t base = i - static_cast<std::size_t>(c[d]) * stride[d];
            const double vu = field.values[base + static_cast<std::size_t>(up) * stride[d]];
            const double vd = field.values[base + static_cast<std::size_t>(dn) * stride[d]];
            acc += vu - 2.0 * field.values[i] + vd;
        }
        out.values[i] = acc * inv_eps2;
    }
    return out;
}

SignedDistanceResult exact_signed_distance(const PhaseMask& mask, double dbar) {
    const GridGeometry& g = mask.geometry;
    const std::size_t n = g.cell_count();
    SignedDistanceResult res;
    res.field = ScalarField(g, 0.0, dbar);

    std::size_t n0 = 0;
    for (std::uint8_t l : mask.labels) n0 += (l == 0);
    if (n0 == 0 || n0 == n) {
        res.one_phase_empty = true;
        res.empty_phase = (n0 == 0) ? 0 : 1;
        const double fill = (n0 == 0) ? dbar : -dbar;
        std::fill(res.field.values.begin(), res.field.values.end(), fill);
        return res;
    }

    std::vector<std::array<int, kMaxDim>> coords(n);
    for (std::size_t i = 0; i < n; ++i) coords[i] = g.coords_of(i);

    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t own = mask.labels[i];
        std::int64_t best = std::numeric_limits<std::int64_t>::max();
        for (std::size_t j = 0; j < n; ++j) {
            if (mask.labels[j] == own) continue;
            best = std::min(best, GridGeometry::squared_offset(coords[i], coords[j], g.dim));
        }
        double d = g.spacing * std::sqrt(static_cast<double>(best));
        d = std::min(d, dbar);
        res.field.values[i] = (own == 0) ? -d : d;
    }
    return res;
}

ScalarField seed_field(const PhaseMask& mask, double dbar) {
    const GridGeometry& g = mask.geometry;
    ScalarField out(g, 0.0, dbar);
    const double half = 0.5 * g.spacing;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.values[i] = (mask.labels[i] == 0) ? -half : half;
    return out;
}

LipschitzReport lipschitz_check(const ScalarField& field, int long_range_samples,
                                std::uint64_t seed) {
    const GridGeometry& g = field.geometry;
    LipschitzReport rep;
    const double tol = lipschitz_tolerance(g.spacing);
    const std::size_t n = g.cell_count();

    auto consider = [&](std::size_t a, std::size_t b, double dist) {
        const double gap = std::abs(field.values[a] - field.values[b]);
        const double excess = gap - dist;
        if (excess > rep.worst_excess) {
            rep.worst_excess = excess;
            rep.cell_a = a;
            rep.cell_b = b;
            rep.value_gap = gap;
            rep.distance = dist;
            if (excess > tol) rep.ok = false;
        }
    };

    std::array<std::size_t, kMaxDim> stride{};
    stride[0] = 1;
    for (int d = 1; d < g.dim; ++d)
        stride[d] = stride[d - 1] * static_cast<std::size_t>(g.extents[d - 1]);

    for (std::size_t i = 0; i < n; ++i) {
        const auto c = g.coords_of(i);
        for (int d = 0; d < g.dim; ++d) {
            if (c[d] + 1 < g.extents[d]) consider(i, i + stride[d], g.spacing);
        }
    }

    if (n >= 2) {
        std::mt19937_64 rng(seed);
        for (int k = 0; k < long_range_samples; ++k) {
            const std::size_t a = static_cast<std::size_t>(rng() % n);
            const std::size_t b = static_cast<std::size_t>(rng() % n);
            if (a == b) continue;
            consider(a, b, g.cell_distance(g.coords_of(a), g.coords_of(b)));
        }
    }
    return rep;
}

}  // namespace mcf
