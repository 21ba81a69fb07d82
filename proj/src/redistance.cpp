#include "mcflow/redistance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cone.hpp"

namespace mcf {

namespace {

using detail::build_cone_sources;
using detail::cone_maxplus;
using detail::squared_edt;
using detail::squared_reach_threshold;

void require_lipschitz(const ScalarField& u) {
    const GridGeometry& g = u.geometry;
    const double tol = lipschitz_tolerance(g.spacing);
    std::array<std::size_t, kMaxDim> stride{};
    stride[0] = 1;
    for (int d = 1; d < g.dim; ++d)
        stride[d] = stride[d - 1] * static_cast<std::size_t>(g.extents[d - 1]);
    const std::size_t n = g.cell_count();
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = g.coords_of(i);
        for (int d = 0; d < g.dim; ++d) {
            if (c[d] + 1 >= g.extents[d]) continue;
            const double gap = std::abs(u.values[i] - u.values[i + stride[d]]);
            if (gap > g.spacing + tol) {
                char buf[128];
                std::snprintf(buf, sizeof buf,
                              "input is not 1-Lipschitz: |v_i-v_j|=%.17g over spacing %.17g",
                              gap, g.spacing);
                throw not_lipschitz_error(buf);
            }
        }
    }
}

struct SignSets {
    std::vector<std::uint8_t> neg;  // u_i < 0
    std::vector<std::uint8_t> pos;  // u_i >= 0
    std::size_t neg_count = 0;
};

SignSets split_signs(const ScalarField& u) {
    SignSets s;
    const std::size_t n = u.size();
    s.neg.assign(n, 0);
    s.pos.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (u.values[i] < 0.0) {
            s.neg[i] = 1;
            ++s.neg_count;
        } else {
            s.pos[i] = 1;
        }
    }
    return s;
}

double source_window(const RedistanceConfig& cfg) {
    double w = cfg.saturation;
    if (cfg.strip_width > 0.0) w = std::min(w, cfg.strip_width);
    return w;
}

void validate_config(const RedistanceConfig& cfg, double eps) {
    if (!(cfg.saturation > eps)) throw grid_error("saturation level must exceed the spacing");
    if (cfg.strip_width > 0.0 && !(cfg.strip_width > eps))
        throw grid_error("strip width must exceed the spacing");
}

// Pass 1 of sd+: dp = min(dbar, inf over A of u_a + |a-i|) at the requested
// targets, where A = negative cells within `window` of the positive class.
// edt2pos/edt2neg are exact squared index distances to the sign classes.
std::vector<double> inf_pass(const ScalarField& u, const SignSets& s,
                             const std::vector<double>& edt2pos,
                             const std::vector<double>& edt2neg, double window, double dbar,
                             const std::vector<std::uint8_t>& targets) {
    const GridGeometry& g = u.geometry;
    const std::size_t n = u.size();
    const std::int64_t reach = squared_reach_threshold(g.spacing, window);

    std::vector<std::size_t> cells;
    std::vector<double> vals;
    for (std::size_t i = 0; i < n; ++i) {
        if (s.neg[i] && edt2pos[i] <= static_cast<double>(reach)) {
            cells.push_back(i);
            vals.push_back(-u.values[i]);
        }
    }
    auto src = build_cone_sources(g, cells, vals);
    std::vector<double> out(n, 0.0);
    cone_maxplus(g, src, -dbar, targets, edt2neg, out);
    for (std::size_t i = 0; i < n; ++i)
        if (targets[i]) out[i] = -out[i];
    return out;
}

RedistanceResult sd_plus_core(const ScalarField& u, const RedistanceConfig& cfg) {
    const GridGeometry& g = u.geometry;
    const double dbar = cfg.saturation;
    validate_config(cfg, g.spacing);
    if (cfg.check_input_lipschitz) require_lipschitz(u);

    RedistanceResult res;
    const SignSets s = split_signs(u);
    const std::size_t n = u.size();

    if (s.neg_count == 0) {
        res.field = ScalarField(g, dbar, dbar);
        res.negative_empty = true;
        return res;
    }
    if (s.neg_count == n) {
        res.field = ScalarField(g, -dbar, dbar);
        res.positive_empty = true;
        return res;
    }

    const std::vector<double> edt2pos = squared_edt(g, s.pos);
    const std::vector<double> edt2neg = squared_edt(g, s.neg);
    const double window = source_window(cfg);
    const std::int64_t reach = squared_reach_threshold(g.spacing, window);

    const std::vector<double> dp = inf_pass(u, s, edt2pos, edt2neg, window, dbar, s.pos);

    // B = positive cells within `window` of the negative class, carrying dp.
    std::vector<std::size_t> bcells;
    std::vector<double> bvals;
    std::vector<std::uint8_t> in_b(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (s.pos[i] && edt2neg[i] <= static_cast<double>(reach)) {
            in_b[i] = 1;
            bcells.push_back(i);
            bvals.push_back(dp[i]);
        }
    }
    auto srcB = build_cone_sources(g, bcells, bvals);

    std::vector<std::uint8_t> targets(n, 0);
    for (std::size_t i = 0; i < n; ++i) targets[i] = s.neg[i] || in_b[i];

    std::vector<double> out(n, 0.0);
    cone_maxplus(g, srcB, -dbar, targets, edt2pos, out);

    res.field = ScalarField(g, 0.0, dbar);
    for (std::size_t i = 0; i < n; ++i)
        res.field.values[i] = targets[i] ? out[i] : dp[i];
    return res;
}

ScalarField negated(const ScalarField& u) {
    ScalarField v = u;
    for (double& x : v.values) x = -x;
    return v;
}

}  // namespace

ScalarField d_plus(const ScalarField& u, const RedistanceConfig& cfg) {
    const GridGeometry& g = u.geometry;
    validate_config(cfg, g.spacing);
    if (cfg.check_input_lipschitz) require_lipschitz(u);

    const SignSets s = split_signs(u);
    const std::size_t n = u.size();
    const double dbar = cfg.saturation;
    if (s.neg_count == 0) return ScalarField(g, dbar, dbar);

    const std::vector<double> edt2pos = squared_edt(g, s.pos);
    const std::vector<double> edt2neg = squared_edt(g, s.neg);
    std::vector<std::uint8_t> all(n, 1);
    ScalarField out(g, 0.0, dbar);
    out.values = inf_pass(u, s, edt2pos, edt2neg, source_window(cfg), dbar, all);
    // d+ = u on {u<0}; with truncated sources the cone value can only sit above.
    for (std::size_t i = 0; i < n; ++i)
        if (s.neg[i]) out.values[i] = std::min(u.values[i], out.values[i]);
    return out;
}

ScalarField d_minus(const ScalarField& u, const RedistanceConfig& cfg) {
    ScalarField r = d_plus(negated(u), cfg);
    for (double& x : r.values) x = -x;
    return r;
}

RedistanceResult sd_plus(const ScalarField& u, const RedistanceConfig& cfg) {
    return sd_plus_core(u, cfg);
}

RedistanceResult sd_minus(const ScalarField& u, const RedistanceConfig& cfg) {
    RedistanceResult r = sd_plus_core(negated(u), cfg);
    for (double& x : r.field.values) x = -x;
    std::swap(r.negative_empty, r.positive_empty);
    return r;
}

RedistanceResult redistance(const ScalarField& u, const RedistanceConfig& cfg) {
    switch (cfg.variant) {
        case RedistanceVariant::plus:
            return sd_plus(u, cfg);
        case RedistanceVariant::minus:
            return sd_minus(u, cfg);
        case RedistanceVariant::average: {
            RedistanceResult p = sd_plus(u, cfg);
            if (p.extinct()) return p;
            RedistanceConfig mcfg = cfg;
            mcfg.check_input_lipschitz = false;  // already verified
            RedistanceResult m = sd_minus(u, mcfg);
            for (std::size_t i = 0; i < p.field.size(); ++i)
                p.field.values[i] = 0.5 * (p.field.values[i] + m.field.values[i]);
            return p;
        }
    }
    throw grid_error("unknown redistance variant");
}

RedistanceResult sd_strip(const ScalarField& u, double strip_width, RedistanceConfig cfg) {
    cfg.strip_width = strip_width;
    return redistance(u, cfg);
}

ScalarField gamma_profile(const ScalarField& u) {
    ScalarField w = u;
    for (double& x : w.values) x = std::tanh(x);
    return w;
}

ScalarField gamma_profile_inverse(const ScalarField& w) {
    constexpr double delta = 1e-12;
    ScalarField u = w;
    for (double& x : u.values) x = std::atanh(std::clamp(x, -1.0 + delta, 1.0 - delta));
    return u;
}

RedistanceResult nonlinear_redistance(const ScalarField& w, const RedistanceConfig& cfg) {
    ScalarField u = gamma_profile_inverse(w);
    RedistanceConfig inner = cfg;
    inner.saturation = cfg.nonlinear_cap;
    return redistance(u, inner);
}

std::size_t negative_cell_count(const ScalarField& u) {
    std::size_t c = 0;
    for (double x : u.values) c += (x < 0.0);
    return c;
}

}  // namespace mcf
