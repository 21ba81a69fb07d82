#include "mcflow/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mcf {

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

GridGeometry grid_from_2d(int nx, int ny, double eps) {
    return GridGeometry(2, eps, {nx, ny, 1});
}

int next_pnm_token(std::istream& in, std::string& tok) {
    tok.clear();
    char c;
    while (in.get(c)) {
        if (c == '#') {
            std::string line;
            std::getline(in, line);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) return 1;
            continue;
        }
        tok.push_back(c);
    }
    return tok.empty() ? 0 : 1;
}

}  // namespace

PhaseMask read_pgm_mask(const std::string& path, double eps) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open mask file: " + path);
    std::string tok;
    if (!next_pnm_token(in, tok) || (tok != "P2" && tok != "P5"))
        throw io_error("unsupported PGM magic in " + path);
    const bool binary = tok == "P5";
    long w = 0, h = 0, maxval = 0;
    auto read_int = [&](long& v) {
        if (!next_pnm_token(in, tok)) throw io_error("truncated PGM header in " + path);
        v = std::stol(tok);
    };
    read_int(w);
    read_int(h);
    read_int(maxval);
    if (w < 3 || h < 3) throw io_error("mask must be at least 3x3: " + path);
    if (maxval <= 0 || maxval > 65535) throw io_error("bad PGM maxval in " + path);

    PhaseMask mask(grid_from_2d(static_cast<int>(w), static_cast<int>(h), eps), 1);
    const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    std::vector<long> raw(n);
    if (binary) {
        const int bytes = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> data(n * static_cast<std::size_t>(bytes));
        in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
        if (in.gcount() != static_cast<std::streamsize>(data.size()))
            throw io_error("truncated PGM payload in " + path);
        for (std::size_t i = 0; i < n; ++i)
            raw[i] = bytes == 1 ? data[i] : (long(data[2 * i]) << 8) + data[2 * i + 1];
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            if (!next_pnm_token(in, tok)) throw io_error("truncated PGM payload in " + path);
            raw[i] = std::stol(tok);
        }
    }
    // PGM rows scan top to bottom; row r maps to y index r.
    for (long y = 0; y < h; ++y)
        for (long x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            mask.labels[mask.geometry.linear_index(
                {static_cast<int>(x), static_cast<int>(y), 0})] = raw[i] < 128 ? 0 : 1;
        }
    return mask;
}

PhaseMask read_text_mask(const std::string& path, double eps) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open mask file: " + path);
    std::vector<std::string> rows;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        rows.push_back(line);
    }
    if (rows.size() < 3) throw io_error("text mask needs at least 3 rows: " + path);
    const std::size_t w = rows[0].size();
    for (const auto& r : rows)
        if (r.size() != w) throw io_error("ragged text mask: " + path);

    PhaseMask mask(grid_from_2d(static_cast<int>(w), static_cast<int>(rows.size()), eps), 1);
    for (std::size_t y = 0; y < rows.size(); ++y)
        for (std::size_t x = 0; x < w; ++x) {
            const char c = rows[y][x];
            if (c < '0' || c > '9') throw io_error("text mask must be digits: " + path);
            mask.labels[mask.geometry.linear_index(
                {static_cast<int>(x), static_cast<int>(y), 0})] =
                static_cast<std::uint8_t>(c - '0');
        }
    return mask;
}

void write_pgm_snapshot(const std::string& path, const ScalarField& field) {
    if (field.geometry.dim != 2) throw io_error("PGM snapshots are 2D only");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    const auto [mn, mx] = std::minmax_element(field.values.begin(), field.values.end());
    const double lo = *mn, span = *mx - *mn;
    const int w = field.geometry.extents[0], h = field.geometry.extents[1];
    out << "P5\n" << w << " " << h << "\n255\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(w));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double v = field.values[field.geometry.linear_index({x, y, 0})];
            const double t = span > 0.0 ? (v - lo) / span : 0.0;
            row[static_cast<std::size_t>(x)] =
                static_cast<unsigned char>(std::lround(255.0 * std::clamp(t, 0.0, 1.0)));
        }
        out.write(reinterpret_cast<const char*>(row.data()), w);
    }
}

void write_field_csv(const std::string& path, const ScalarField& field) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    const GridGeometry& g = field.geometry;
    out << (g.dim == 3 ? "x,y,z,value\n" : (g.dim == 2 ? "x,y,value\n" : "x,value\n"));
    const std::size_t n = g.cell_count();
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = g.coords_of(i);
        for (int d = 0; d < g.dim; ++d) out << format_double(c[d] * g.spacing) << ',';
        out << format_double(field.values[i]) << '\n';
    }
}

ScalarField read_field_csv(const std::string& path, double saturation) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open field file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw io_error("empty field file: " + path);
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    int dim = 0;
    if (line == "x,value") dim = 1;
    else if (line == "x,y,value") dim = 2;
    else if (line == "x,y,z,value") dim = 3;
    else throw io_error("unrecognized field CSV header: " + line);

    std::vector<std::array<double, kMaxDim>> pts;
    std::vector<double> vals;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::array<double, kMaxDim> p{};
        double v = 0.0;
        char comma;
        for (int d = 0; d < dim; ++d) {
            if (!(ss >> p[d] >> comma)) throw io_error("bad field CSV row: " + line);
        }
        if (!(ss >> v)) throw io_error("bad field CSV row: " + line);
        pts.push_back(p);
        vals.push_back(v);
    }
    if (pts.empty()) throw io_error("field CSV has no rows: " + path);

    std::array<std::vector<double>, kMaxDim> axes;
    for (int d = 0; d < dim; ++d) {
        for (const auto& p : pts) axes[d].push_back(p[d]);
        std::sort(axes[d].begin(), axes[d].end());
        axes[d].erase(std::unique(axes[d].begin(), axes[d].end()), axes[d].end());
    }
    double eps = 0.0;
    for (int d = 0; d < dim; ++d)
        for (std::size_t k = 1; k < axes[d].size(); ++k) {
            const double gap = axes[d][k] - axes[d][k - 1];
            if (eps == 0.0 || gap < eps) eps = gap;
        }
    if (eps <= 0.0) throw io_error("cannot infer grid spacing from " + path);

    std::array<int, kMaxDim> ext = {1, 1, 1};
    for (int d = 0; d < dim; ++d) ext[d] = static_cast<int>(axes[d].size());
    GridGeometry g(dim, eps, ext);
    if (g.cell_count() != pts.size()) throw io_error("field CSV is not a full grid: " + path);

    ScalarField f(g, 0.0, saturation);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        std::array<int, kMaxDim> c{};
        for (int d = 0; d < dim; ++d)
            c[d] = static_cast<int>(std::lround(pts[i][d] / eps));
        f.values[g.linear_index(c)] = vals[i];
    }
    return f;
}

void write_trace_csv(const std::string& path, const EvolutionTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    out << "step,time,neg_cells,area,radius\n";
    for (const TraceRecord& r : trace.records) {
        out << r.step << ',' << format_double(r.time) << ',' << r.negative_cells << ','
            << format_double(r.area) << ',' << format_double(r.radius) << '\n';
    }
}

std::string fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path);
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
        if (!in) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

KernelSpec parse_kernel_spec(const nlohmann::json& j) {
    KernelSpec spec;
    const std::string type = j.at("type").get<std::string>();
    if (type == "explicit") spec.kind = KernelKind::explicit_euler;
    else if (type == "implicit") spec.kind = KernelKind::implicit_euler;
    else if (type == "heat") spec.kind = KernelKind::heat_semigroup;
    else if (type == "stencil") spec.kind = KernelKind::stencil;
    else throw io_error("unknown kernel type: " + type);

    if (j.contains("theta")) spec.theta = j.at("theta").get<double>();
    if (j.contains("tau")) spec.tau = j.at("tau").get<double>();
    if (spec.kind == KernelKind::stencil) {
        if (!j.contains("weights")) throw io_error("stencil spec needs weights");
        for (const auto& e : j.at("weights")) {
            if (!e.is_array() || e.size() != 2) throw io_error("stencil weight entries are [[offsets...], w]");
            std::array<int, kMaxDim> off{};
            const auto& o = e.at(0);
            if (!o.is_array() || o.empty() || o.size() > kMaxDim)
                throw io_error("bad stencil offset");
            for (std::size_t d = 0; d < o.size(); ++d) off[d] = o.at(d).get<int>();
            spec.taps.push_back({off, e.at(1).get<double>()});
        }
    }
    return spec;
}

KernelSpec load_kernel_spec(const std::string& path_or_builtin, double theta, double tau) {
    KernelSpec spec;
    if (path_or_builtin == "explicit" || path_or_builtin == "implicit" ||
        path_or_builtin == "heat") {
        spec.kind = path_or_builtin == "explicit"
                        ? KernelKind::explicit_euler
                        : (path_or_builtin == "implicit" ? KernelKind::implicit_euler
                                                         : KernelKind::heat_semigroup);
        spec.theta = theta;
        spec.tau = tau;
        return spec;
    }
    std::ifstream in(path_or_builtin);
    if (!in) throw io_error("cannot open kernel spec: " + path_or_builtin);
    nlohmann::json j;
    try {
        in >> j;
        spec = parse_kernel_spec(j);
    } catch (const nlohmann::json::exception& e) {
        throw io_error(std::string("malformed kernel spec: ") + e.what());
    }
    if (!j.contains("theta")) spec.theta = theta;
    if (!j.contains("tau")) spec.tau = tau;
    return spec;
}

Kernel build_kernel(const KernelSpec& spec, double eps, int dim, const GridGeometry& box) {
    switch (spec.kind) {
        case KernelKind::explicit_euler:
            return explicit_euler_kernel(spec.theta, eps, dim);
        case KernelKind::implicit_euler:
            return implicit_euler_symbol(spec.tau, eps, box);
        case KernelKind::heat_semigroup:
            return heat_semigroup_symbol(spec.tau, eps, box);
        case KernelKind::stencil:
            return make_stencil(dim, eps, spec.taps);
    }
    throw io_error("unknown kernel kind");
}

nlohmann::json kernel_report_json(const KernelReport& rep) {
    nlohmann::json j;
    j["mass_error"] = rep.mass_error;
    j["symmetry_error"] = rep.symmetry_error;
    j["positivity_violations"] = rep.positivity_violations;
    j["derived_h"] = rep.derived_h;
    j["nominal_h"] = rep.nominal_h;
    j["h_relative_error"] = rep.h_relative_error;
    j["cfl_warning"] = rep.cfl_warning;
    j["symbol_bound_violations"] = rep.symbol_bound_violations;
    j["sampled_frequencies"] = rep.sampled_frequencies;
    j["consistency_xi"] = rep.consistency_xi;
    j["consistency_error"] = rep.consistency_error;
    j["consistency_decreasing"] = rep.consistency_decreasing;
    j["passed"] = rep.passed;
    return j;
}

nlohmann::json trace_summary_json(const EvolutionTrace& trace) {
    nlohmann::json j;
    j["rows"] = trace.records.size();
    j["time_step"] = trace.time_step;
    j["termination"] = trace.termination;
    j["extinction_step"] = trace.extinction_step;
    j["extinct_sign"] = trace.extinct_sign;
    if (!trace.records.empty()) {
        j["final_time"] = trace.records.back().time;
        j["final_neg_cells"] = trace.records.back().negative_cells;
        j["final_radius"] = trace.records.back().radius;
    }
    if (!trace.vanished_phases.empty()) j["vanished_phases"] = trace.vanished_phases;
    return j;
}

}  // namespace mcf
