#ifndef MCFLOW_TEST_ORACLES_HPP
#define MCFLOW_TEST_ORACLES_HPP

// Independent brute-force evaluations of the redistancing formulas and the
// lattice distance, written as literal double loops. They share exactly one
// convention with the library: cell distances are eps*sqrt of the exact
// integer squared offset, so both sides take min/max over identical doubles.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mcflow/grid.hpp"

namespace oracle {

using mcf::GridGeometry;
using mcf::PhaseMask;
using mcf::ScalarField;

inline double cell_dist(const GridGeometry& g, std::size_t a, std::size_t b) {
    const auto ca = g.coords_of(a), cb = g.coords_of(b);
    double d2 = 0.0;
    for (int d = 0; d < g.dim; ++d) {
        const double t = ca[d] - cb[d];
        d2 += t * t;
    }
    return g.spacing * std::sqrt(d2);
}

// d+[u]_i = min over {j: u_j < 0} of u_j + |j-i|, capped at +dbar.
inline std::vector<double> d_plus(const ScalarField& u, double dbar) {
    const auto& g = u.geometry;
    const std::size_t n = g.cell_count();
    std::vector<double> out(n, dbar);
    for (std::size_t i = 0; i < n; ++i) {
        double best = dbar;
        for (std::size_t j = 0; j < n; ++j) {
            if (!(u.values[j] < 0.0)) continue;
            best = std::min(best, u.values[j] + cell_dist(g, j, i));
        }
        out[i] = best;
    }
    return out;
}

// sd+[u]_i = max over {j: u_j >= 0} of d+_j - |j-i|, clamped to [-dbar, dbar].
inline std::vector<double> sd_plus(const ScalarField& u, double dbar) {
    const auto& g = u.geometry;
    const std::size_t n = g.cell_count();
    const std::vector<double> dp = d_plus(u, dbar);
    std::vector<double> out(n, -dbar);
    for (std::size_t i = 0; i < n; ++i) {
        double best = -dbar;
        for (std::size_t j = 0; j < n; ++j) {
            if (!(u.values[j] >= 0.0)) continue;
            best = std::max(best, dp[j] - cell_dist(g, j, i));
        }
        out[i] = best;
    }
    return out;
}

// d-[u]_i = max over {j: u_j > 0} of u_j - |j-i|, capped at -dbar from below.
inline std::vector<double> d_minus(const ScalarField& u, double dbar) {
    const auto& g = u.geometry;
    const std::size_t n = g.cell_count();
    std::vector<double> out(n, -dbar);
    for (std::size_t i = 0; i < n; ++i) {
        double best = -dbar;
        for (std::size_t j = 0; j < n; ++j) {
            if (!(u.values[j] > 0.0)) continue;
            best = std::max(best, u.values[j] - cell_dist(g, j, i));
        }
        out[i] = best;
    }
    return out;
}

// sd-[u]_i = min over {j: u_j <= 0} of d-_j + |j-i|.
inline std::vector<double> sd_minus(const ScalarField& u, double dbar) {
    const auto& g = u.geometry;
    const std::size_t n = g.cell_count();
    const std::vector<double> dm = d_minus(u, dbar);
    std::vector<double> out(n, dbar);
    for (std::size_t i = 0; i < n; ++i) {
        double best = dbar;
        for (std::size_t j = 0; j < n; ++j) {
            if (!(u.values[j] <= 0.0)) continue;
            best = std::min(best, dm[j] + cell_dist(g, j, i));
        }
        out[i] = best;
    }
    return out;
}

// Unsigned distance from cell i to {j: pred(j)}; infinity when empty.
template <typename Pred>
inline double dist_to_set(const GridGeometry& g, std::size_t i, Pred&& pred) {
    const std::size_t n = g.cell_count();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
        if (pred(j)) best = std::min(best, cell_dist(g, j, i));
    return best;
}

// Signed distance field of a binary mask, negative inside phase 0.
inline std::vector<double> signed_distance(const PhaseMask& m, double dbar) {
    const auto& g = m.geometry;
    const std::size_t n = g.cell_count();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::min(
            dbar, dist_to_set(g, i, [&](std::size_t j) { return m.labels[j] != m.labels[i]; }));
        out[i] = m.labels[i] == 0 ? -d : d;
    }
    return out;
}

}  // namespace oracle

#endif
