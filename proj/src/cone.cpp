#include "cone.hpp"

#include <algorithm>
#include <cmath>

namespace mcf::detail {

namespace {

// Felzenszwalb-Huttenlocher lower envelope of parabolas, d[i] = min_j f[j] + (i-j)^2.
void dt1d(const double* f, double* d, int n, int* v, double* z) {
    int k = 0;
    v[0] = 0;
    z[0] = -kEdtInf;
    z[1] = +kEdtInf;
    for (int q = 1; q < n; ++q) {
        if (f[q] >= kEdtInf) continue;
        double s;
        for (;;) {
            const int p = v[k];
            if (f[p] >= kEdtInf) {
                // empty-so-far envelope: replace
                if (k == 0) {
                    v[0] = q;
                    z[0] = -kEdtInf;
                    z[1] = +kEdtInf;
                    s = -kEdtInf;
                    break;
                }
                --k;
                continue;
            }
            s = ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) /
                (2.0 * (q - p));
            if (s <= z[k]) {
                --k;
                continue;
            }
            ++k;
            v[k] = q;
            z[k] = s;
            z[k + 1] = +kEdtInf;
            break;
        }
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < static_cast<double>(q)) ++k;
        const int p = v[k];
        const double dq = static_cast<double>(q - p);
        d[q] = (f[p] >= kEdtInf) ? kEdtInf : f[p] + dq * dq;
    }
}

}  // namespace

std::vector<double> squared_edt(const GridGeometry& g, const std::vector<std::uint8_t>& src) {
    const std::size_t n = g.cell_count();
    std::vector<double> dist(n);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
        dist[i] = src[i] ? 0.0 : kEdtInf;
        any = any || src[i];
    }
    if (!any) return dist;

    int maxext = 0;
    for (int d = 0; d < g.dim; ++d) maxext = std::max(maxext, g.extents[d]);
    std::vector<double> f(maxext), out1(maxext), z(maxext + 1);
    std::vector<int> v(maxext);

    std::array<std::size_t, kMaxDim> stride{};
    stride[0] = 1;
    for (int d = 1; d < g.dim; ++d)
        stride[d] = stride[d - 1] * static_cast<std::size_t>(g.extents[d - 1]);

    for (int axis = 0; axis < g.dim; ++axis) {
        const int len = g.extents[axis];
        const std::size_t st = stride[axis];
        const std::size_t nlines = n / static_cast<std::size_t>(len);
        for (std::size_t line = 0; line < nlines; ++line) {
            // base index of this line: enumerate cells with axis coord 0
            std::size_t rem = line, base = 0;
            for (int d = 0; d < g.dim; ++d) {
                if (d == axis) continue;
                const std::size_t e = static_cast<std::size_t>(g.extents[d]);
                base += (rem % e) * stride[d];
                rem /= e;
            }
            for (int q = 0; q < len; ++q) f[static_cast<std::size_t>(q)] = dist[base + st * q];
            dt1d(f.data(), out1.data(), len, v.data(), z.data());
            for (int q = 0; q < len; ++q) dist[base + st * q] = out1[static_cast<std::size_t>(q)];
        }
    }
    return dist;
}

std::int64_t squared_reach_threshold(double eps, double reach) {
    if (reach <= 0.0) return -1;
    double guess = (reach / eps) * (reach / eps);
    std::int64_t t = static_cast<std::int64_t>(guess + 2.0);
    auto within = [&](std::int64_t d2) {
        return eps * std::sqrt(static_cast<double>(d2)) <= reach;
    };
    while (t > 0 && !within(t)) --t;
    while (within(t + 1)) ++t;
    return t;
}

ConeSourceSet build_cone_sources(const GridGeometry& g, const std::vector<std::size_t>& cells,
                                 const std::vector<double>& values) {
    ConeSourceSet s;
    s.count = cells.size();
    if (cells.empty()) return s;

    const int ny = g.dim >= 2 ? g.extents[1] : 1;
    const int nz = g.dim >= 3 ? g.extents[2] : 1;
    std::vector<std::vector<std::pair<double, double>>> buckets(
        static_cast<std::size_t>(ny) * nz);
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const auto c = g.coords_of(cells[k]);
        const std::size_t key = static_cast<std::size_t>(c[1]) +
                                static_cast<std::size_t>(ny) * static_cast<std::size_t>(c[2]);
        buckets[key].push_back({static_cast<double>(c[0]), values[k]});
    }
    s.vmax = -kEdtInf;
    for (int z = 0; z < nz; ++z) {
        for (int y = 0; y < ny; ++y) {
            auto& b = buckets[static_cast<std::size_t>(y) + static_cast<std::size_t>(ny) * z];
            if (b.empty()) continue;
            std::sort(b.begin(), b.end());
            ConeSourceSet::Row row;
            row.y = y;
            row.z = z;
            row.vmax = -kEdtInf;
            row.xs.reserve(b.size());
            row.vals.reserve(b.size());
            for (auto& e : b) {
                row.xs.push_back(e.first);
                row.vals.push_back(e.second);
                row.vmax = std::max(row.vmax, e.second);
            }
            s.vmax = std::max(s.vmax, row.vmax);
            s.rows.push_back(std::move(row));
        }
    }
    if (g.dim == 2) {
        s.by_y.assign(static_cast<std::size_t>(ny), nullptr);
        for (const auto& r : s.rows) s.by_y[static_cast<std::size_t>(r.y)] = &r;
    }
    return s;
}

namespace {

constexpr double kScreenInflate = 1.0 + 1e-12;

// Scan one source row; returns the updated running max.
inline double scan_row(const ConeSourceSet::Row& row, double x0, double rest2, double eps,
                       double eps2, double m) {
    const double margin = row.vmax - m;
    if (!(margin > 0.0)) return m;
    const double w2 = (margin / eps) * (margin / eps) - rest2;
    if (!(w2 > 0.0)) return m;
    const double w = std::sqrt(w2) + 1.0;
    const auto lo = std::lower_bound(row.xs.begin(), row.xs.end(), x0 - w);
    const auto hi = std::upper_bound(lo, row.xs.end(), x0 + w);
    const std::size_t a = static_cast<std::size_t>(lo - row.xs.begin());
    const std::size_t b = static_cast<std::size_t>(hi - row.xs.begin());
    const double* xs = row.xs.data();
    const double* vals = row.vals.data();
    for (std::size_t j = a; j < b; ++j) {
        const double dx = xs[j] - x0;
        const double d2 = dx * dx + rest2;
        const double t = vals[j] - m;
        if (t > 0.0 && t * t * kScreenInflate >= eps2 * d2) {
            const double cand = vals[j] - eps * std::sqrt(d2);
            if (cand > m) m = cand;
        }
    }
    return m;
}

}  // namespace

void cone_maxplus(const GridGeometry& g, const ConeSourceSet& src, double cap_lo,
                  const std::vector<std::uint8_t>& targets, const std::vector<double>& edt2,
                  std::vector<double>& out) {
    const std::size_t n = g.cell_count();
    const double eps = g.spacing;
    const double eps2 = eps * eps;
    const double prune_margin = 1e-9;

    if (src.empty()) {
        for (std::size_t i = 0; i < n; ++i)
            if (targets[i]) out[i] = cap_lo;
        return;
    }

    const bool fast2d = (g.dim == 2);
    const int ny = g.dim >= 2 ? g.extents[1] : 1;

    for (std::size_t i = 0; i < n; ++i) {
        if (!targets[i]) continue;
        const auto c = g.coords_of(i);
        const double x0 = static_cast<double>(c[0]);

        // Saturation shortcut: no source can lift the value above cap_lo.
        const double dist_to_set = eps * std::sqrt(edt2[i]);
        if (src.vmax - dist_to_set <= cap_lo - prune_margin) {
            out[i] = cap_lo;
            continue;
        }

        double m = cap_lo;
        if (fast2d) {
            const int y0 = c[1];
            for (int r = 0;; ++r) {
                const double dy = eps * static_cast<double>(r);
                if (src.vmax - dy <= m) break;
                const double rest2 = static_cast<double>(r) * r;
                bool any = false;
                if (y0 + r < ny) {
                    any = true;
                    if (const auto* row = src.by_y[static_cast<std::size_t>(y0 + r)])
                        m = scan_row(*row, x0, rest2, eps, eps2, m);
                }
                if (r > 0 && y0 - r >= 0) {
                    any = true;
                    if (const auto* row = src.by_y[static_cast<std::size_t>(y0 - r)])
                        m = scan_row(*row, x0, rest2, eps, eps2, m);
                }
                if (!any) break;
            }
        } else {
            const int y0 = g.dim >= 2 ? c[1] : 0;
            const int z0 = g.dim >= 3 ? c[2] : 0;
            for (const auto& row : src.rows) {
                const double ry = static_cast<double>(row.y - y0);
                const double rz = static_cast<double>(row.z - z0);
                m = scan_row(row, x0, ry * ry + rz * rz, eps, eps2, m);
            }
        }
        out[i] = m;
    }
}

}  // namespace mcf::detail
