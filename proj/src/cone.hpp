#ifndef MCFLOW_CONE_HPP
#define MCFLOW_CONE_HPP

// Internal helpers for the redistancing passes: an exact squared Euclidean
// distance transform (index units) and a max-plus cone transform
//   out_i = max(cap_lo, max_s (val_s - eps*|s - i|)).
//
// The cone transform reproduces, bit for bit, the value a plain double loop
// over the same source set would produce: candidates are screened with an
// inflated squared comparison (never rejecting a true improvement) and the
// running max is only ever updated with val_s - eps*sqrt(d2) evaluated the
// same way the brute-force formula does.

#include <cstdint>
#include <vector>

#include "mcflow/grid.hpp"

namespace mcf::detail {

constexpr double kEdtInf = 1e12;

// Exact squared distance (index units) from every cell to {i: src[i] != 0}.
// All cells kEdtInf when the source set is empty.
std::vector<double> squared_edt(const GridGeometry& g, const std::vector<std::uint8_t>& src);

// Largest integer squared index offset d2 with eps*sqrt(d2) <= reach.
std::int64_t squared_reach_threshold(double eps, double reach);

struct ConeSourceSet {
    struct Row {
        int y = 0;
        int z = 0;
        std::vector<double> xs;    // exact integers
        std::vector<double> vals;
        double vmax = 0.0;
    };
    std::vector<Row> rows;
    std::vector<const Row*> by_y;  // 2D fast path: index y -> row (null if empty)
    double vmax = 0.0;
    std::size_t count = 0;

    bool empty() const { return count == 0; }
};

ConeSourceSet build_cone_sources(const GridGeometry& g,
                                 const std::vector<std::size_t>& cells,
                                 const std::vector<double>& values);

// out[i] for every cell with targets[i] != 0; other entries untouched.
// edt2 must hold, at every target cell, the exact squared index distance to
// the source set (used for the saturation shortcut and scan radii).
void cone_maxplus(const GridGeometry& g, const ConeSourceSet& src, double cap_lo,
                  const std::vector<std::uint8_t>& targets, const std::vector<double>& edt2,
                  std::vector<double>& out);

}  // namespace mcf::detail

#endif
