#include "anisotv/jsonio.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "anisotv/expr.hpp"
#include "anisotv/measures.hpp"

namespace anisotv {

namespace {

[[noreturn]] void fail(const std::string& what) {
    throw Error(ErrCode::invalid_input, what);
}

void require_object(const Json& j, const std::string& where) {
    if (!j.is_object()) fail(where + " must be an object");
}

void check_keys(const Json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
    require_object(j, where);
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) fail(where + ": unknown key '" + item.key() + "'");
    }
}

const Json& field(const Json& j, const std::string& where, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) fail(where + ": missing key '" + std::string(key) + "'");
    return *it;
}

double num(const Json& j, const std::string& where) {
    if (!j.is_number()) fail(where + " must be a number");
    return j.get<double>();
}

int integer(const Json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where + " must be an integer");
    return j.get<int>();
}

std::string text(const Json& j, const std::string& where) {
    if (!j.is_string()) fail(where + " must be a string");
    return j.get<std::string>();
}

Vec2 vec2(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) fail(where + " must be a [x, y] pair");
    return Vec2{num(j[0], where), num(j[1], where)};
}

Json vec2_json(const Vec2& v) { return Json::array({v.x, v.y}); }

GridDomain parse_domain(const Json& j, Json& canonical) {
    const std::string where = "domain";
    const std::string kind = text(field(j, where, "kind"), where + ".kind");
    canonical["kind"] = kind;
    if (kind == "rect") {
        check_keys(j, where, {"kind", "h", "origin", "nx", "ny"});
        const double h = num(field(j, where, "h"), where + ".h");
        const Vec2 origin = vec2(field(j, where, "origin"), where + ".origin");
        const int nx = integer(field(j, where, "nx"), where + ".nx");
        const int ny = integer(field(j, where, "ny"), where + ".ny");
        canonical["h"] = h;
        canonical["origin"] = vec2_json(origin);
        canonical["nx"] = nx;
        canonical["ny"] = ny;
        return GridDomain::rect(nx, ny, h, origin);
    }
    if (kind == "bitmap") {
        check_keys(j, where, {"kind", "h", "origin", "rows"});
        const double h = num(field(j, where, "h"), where + ".h");
        const Vec2 origin = vec2(field(j, where, "origin"), where + ".origin");
        const Json& jrows = field(j, where, "rows");
        if (!jrows.is_array() || jrows.empty()) fail(where + ".rows must be a string array");
        std::vector<std::string> rows;
        for (const auto& r : jrows) rows.push_back(text(r, where + ".rows[]"));
        canonical["h"] = h;
        canonical["origin"] = vec2_json(origin);
        canonical["rows"] = rows;
        return GridDomain::from_bitmap(rows, h, origin);
    }
    if (kind == "shape") {
        check_keys(j, where, {"kind", "h", "origin", "nx", "ny", "shape"});
        const double h = num(field(j, where, "h"), where + ".h");
        const Vec2 origin = vec2(field(j, where, "origin"), where + ".origin");
        const int nx = integer(field(j, where, "nx"), where + ".nx");
        const int ny = integer(field(j, where, "ny"), where + ".ny");
        const Json& shape_json = field(j, where, "shape");
        const Shape shape = parse_shape(shape_json);
        canonical["h"] = h;
        canonical["origin"] = vec2_json(origin);
        canonical["nx"] = nx;
        canonical["ny"] = ny;
        canonical["shape"] = shape_json;
        return GridDomain::from_shape(shape, h, origin, nx, ny);
    }
    if (kind == "line") {
        check_keys(j, where, {"kind", "h", "n", "origin_x"});
        const double h = num(field(j, where, "h"), where + ".h");
        const int n = integer(field(j, where, "n"), where + ".n");
        const double ox = num(field(j, where, "origin_x"), where + ".origin_x");
        canonical["h"] = h;
        canonical["n"] = n;
        canonical["origin_x"] = ox;
        return GridDomain::line(n, h, ox);
    }
    fail(where + ": unknown kind '" + kind + "'");
}

CurveMeasure parse_curve(const Json& j, const std::string& where, Json& canonical) {
    const std::string kind = text(field(j, where, "kind"), where + ".kind");
    canonical["kind"] = kind;
    if (kind == "circle") {
        check_keys(j, where, {"kind", "center", "radius", "density"});
        const Vec2 center = vec2(field(j, where, "center"), where + ".center");
        const double radius = num(field(j, where, "radius"), where + ".radius");
        const double density = num(field(j, where, "density"), where + ".density");
        canonical["center"] = vec2_json(center);
        canonical["radius"] = radius;
        canonical["density"] = density;
        return CurveMeasure::circle(center, radius, density);
    }
    if (kind == "segment") {
        check_keys(j, where, {"kind", "a", "b", "density"});
        const Vec2 a = vec2(field(j, where, "a"), where + ".a");
        const Vec2 b = vec2(field(j, where, "b"), where + ".b");
        const double density = num(field(j, where, "density"), where + ".density");
        canonical["a"] = vec2_json(a);
        canonical["b"] = vec2_json(b);
        canonical["density"] = density;
        return CurveMeasure::segment(a, b, density);
    }
    if (kind == "polyline") {
        check_keys(j, where, {"kind", "points", "density"});
        const Json& jpts = field(j, where, "points");
        if (!jpts.is_array() || jpts.size() < 2) fail(where + ".points needs >= 2 points");
        std::vector<Vec2> points;
        Json cpts = Json::array();
        for (const auto& p : jpts) {
            points.push_back(vec2(p, where + ".points[]"));
            cpts.push_back(vec2_json(points.back()));
        }
        const double density = num(field(j, where, "density"), where + ".density");
        canonical["points"] = cpts;
        canonical["density"] = density;
        return CurveMeasure::polyline(points, density);
    }
    if (kind == "fractal") {
        check_keys(j, where, {"kind", "level", "density"});
        const int level = integer(field(j, where, "level"), where + ".level");
        const double density = j.contains("density")
                                   ? num(j["density"], where + ".density")
                                   : 2.0 * std::sqrt(2.0);
        canonical["level"] = level;
        canonical["density"] = density;
        return CurveMeasure::fractal_level(level, density);
    }
    fail(where + ": unknown curve kind '" + kind + "'");
}

}  // namespace

CurveMeasure parse_curve_literal(const Json& j) {
    Json scratch = Json::object();
    return parse_curve(j, "curve", scratch);
}

Shape parse_shape(const Json& j) {
    const std::string where = "shape";
    const std::string kind = text(field(j, where, "kind"), where + ".kind");
    if (kind == "disc") {
        check_keys(j, where, {"kind", "center", "radius"});
        return Shape::disc(vec2(field(j, where, "center"), where + ".center"),
                           num(field(j, where, "radius"), where + ".radius"));
    }
    if (kind == "rectangle") {
        check_keys(j, where, {"kind", "lo", "hi"});
        return Shape::rectangle(vec2(field(j, where, "lo"), where + ".lo"),
                                vec2(field(j, where, "hi"), where + ".hi"));
    }
    if (kind == "polygon") {
        check_keys(j, where, {"kind", "points"});
        const Json& jpts = field(j, where, "points");
        if (!jpts.is_array() || jpts.size() < 3) fail(where + ".points needs >= 3 points");
        std::vector<Vec2> points;
        for (const auto& p : jpts) points.push_back(vec2(p, where + ".points[]"));
        return Shape::polygon(std::move(points));
    }
    if (kind == "unit_triangle") {
        check_keys(j, where, {"kind"});
        return Shape::unit_triangle();
    }
    if (kind == "half_disc") {
        check_keys(j, where, {"kind"});
        return Shape::half_disc();
    }
    if (kind == "annulus") {
        check_keys(j, where, {"kind", "center", "r_in", "r_out"});
        return Shape::annulus(vec2(field(j, where, "center"), where + ".center"),
                              num(field(j, where, "r_in"), where + ".r_in"),
                              num(field(j, where, "r_out"), where + ".r_out"));
    }
    if (kind == "fractal") {
        check_keys(j, where, {"kind", "level"});
        return Shape::fractal_iterate(integer(field(j, where, "level"), where + ".level"));
    }
    fail(where + ": unknown kind '" + kind + "'");
}

Integrand parse_integrand(const Json& j) {
    const std::string where = "integrand";
    const std::string kind = text(field(j, where, "kind"), where + ".kind");
    bool mirror = false;
    if (j.contains("mirrored")) {
        if (!j["mirrored"].is_boolean()) fail(where + ".mirrored must be a boolean");
        mirror = j["mirrored"].get<bool>();
    }
    Integrand phi = Integrand::isotropic();
    if (kind == "isotropic") {
        check_keys(j, where, {"kind", "mirrored"});
    } else if (kind == "quadrant") {
        check_keys(j, where, {"kind", "mirrored"});
        phi = Integrand::quadrant();
    } else if (kind == "weighted_l1") {
        check_keys(j, where, {"kind", "c1", "c2", "mirrored"});
        phi = Integrand::weighted_l1(num(field(j, where, "c1"), where + ".c1"),
                                     num(field(j, where, "c2"), where + ".c2"));
    } else {
        fail(where + ": unknown kind '" + kind + "'");
    }
    return mirror ? phi.mirrored() : phi;
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const std::exception& e) {
        fail("malformed JSON in '" + path + "': " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) fail("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) fail("cannot write '" + path + "'");
    out << content;
}

ScenarioConfig parse_scenario(const Json& config) {
    const std::string where = "scenario";
    check_keys(config, where,
               {"schema_version", "seed", "domain", "integrand", "u0", "measure", "C",
                "direction", "epsilon", "delta"});
    const int version = integer(field(config, where, "schema_version"), "schema_version");
    if (version != kSchemaVersion) {
        fail("unsupported schema_version " + std::to_string(version));
    }
    ScenarioConfig out;
    Json canon;
    canon["schema_version"] = kSchemaVersion;
    if (config.contains("seed")) {
        if (!config["seed"].is_number_unsigned() && !config["seed"].is_number_integer()) {
            fail("seed must be an integer");
        }
        out.seed = config["seed"].get<unsigned long long>();
        out.has_seed = true;
        canon["seed"] = out.seed;
    }
    Json cdom = Json::object();
    out.domain = parse_domain(field(config, where, "domain"), cdom);
    canon["domain"] = cdom;

    Json cphi = Json::object();
    if (config.contains("integrand")) {
        const Json& j = config["integrand"];
        out.integrand = parse_integrand(j);
        cphi["kind"] = text(field(j, "integrand", "kind"), "integrand.kind");
        if (cphi["kind"] == "weighted_l1") {
            cphi["c1"] = num(j["c1"], "integrand.c1");
            cphi["c2"] = num(j["c2"], "integrand.c2");
        }
        cphi["mirrored"] = j.contains("mirrored") ? j["mirrored"].get<bool>() : false;
    } else {
        cphi["kind"] = "isotropic";
        cphi["mirrored"] = false;
    }
    canon["integrand"] = cphi;

    Json cu0 = Json::object();
    if (config.contains("u0")) {
        const Json& j = config["u0"];
        check_keys(j, "u0", {"expr", "constant"});
        if (j.contains("expr") == j.contains("constant")) {
            fail("u0 needs exactly one of 'expr' or 'constant'");
        }
        if (j.contains("expr")) {
            const std::string expr = text(j["expr"], "u0.expr");
            out.u0 = sample_datum(out.domain, compile_expr(expr));
            cu0["expr"] = expr;
        } else {
            const double value = num(j["constant"], "u0.constant");
            out.u0.assign(out.domain.boundary_edges().size(), value);
            cu0["constant"] = value;
        }
    } else {
        out.u0.assign(out.domain.boundary_edges().size(), 0.0);
        cu0["constant"] = 0.0;
    }
    canon["u0"] = cu0;

    Json cmeasure = Json::object();
    out.measure.cell_density.assign(static_cast<size_t>(out.domain.cell_count()), 0.0);
    std::map<int, std::pair<double, double>> atom_map;
    if (config.contains("measure")) {
        const Json& j = config["measure"];
        check_keys(j, "measure", {"density", "plus", "minus", "atoms"});
        if (j.contains("density")) {
            const Json& jd = j["density"];
            check_keys(jd, "measure.density", {"expr", "constant"});
            if (jd.contains("expr") == jd.contains("constant")) {
                fail("measure.density needs exactly one of 'expr' or 'constant'");
            }
            Json cd = Json::object();
            if (jd.contains("expr")) {
                const std::string expr = text(jd["expr"], "measure.density.expr");
                const auto fn = compile_expr(expr);
                for (int i = 0; i < out.domain.cell_count(); ++i) {
                    out.measure.cell_density[static_cast<size_t>(i)] =
                        fn(out.domain.cell_center(i));
                }
                cd["expr"] = expr;
            } else {
                const double value = num(jd["constant"], "measure.density.constant");
                out.measure.cell_density.assign(out.measure.cell_density.size(), value);
                cd["constant"] = value;
            }
            cmeasure["density"] = cd;
        }
        std::vector<CurveMeasure> plus, minus;
        for (const char* side : {"plus", "minus"}) {
            if (!j.contains(side)) continue;
            const Json& list = j[side];
            if (!list.is_array()) fail(std::string("measure.") + side + " must be an array");
            Json clist = Json::array();
            for (const auto& cj : list) {
                Json ccurve = Json::object();
                auto curve = parse_curve(cj, std::string("measure.") + side, ccurve);
                (std::string(side) == "plus" ? plus : minus).push_back(curve);
                clist.push_back(ccurve);
            }
            cmeasure[side] = clist;
        }
        if (!plus.empty() || !minus.empty()) {
            const DiscreteMeasure raster = rasterize(plus, minus, out.domain);
            for (const auto& atom : raster.atoms) {
                atom_map[atom.edge].first += atom.m_plus;
                atom_map[atom.edge].second += atom.m_minus;
            }
        }
        if (j.contains("atoms")) {
            const Json& list = j["atoms"];
            if (!list.is_array()) fail("measure.atoms must be an array");
            Json clist = Json::array();
            for (const auto& aj : list) {
                check_keys(aj, "measure.atoms[]", {"cell_a", "cell_b", "m_plus", "m_minus"});
                const Vec2 ca = vec2(field(aj, "measure.atoms[]", "cell_a"), "cell_a");
                const Vec2 cb = vec2(field(aj, "measure.atoms[]", "cell_b"), "cell_b");
                const int a = out.domain.cell_at(static_cast<int>(ca.x), static_cast<int>(ca.y));
                const int b = out.domain.cell_at(static_cast<int>(cb.x), static_cast<int>(cb.y));
                if (a < 0 || b < 0) fail("measure.atoms[]: cell coordinates outside the domain");
                const int edge = out.domain.interior_edge_between(a, b);
                if (edge < 0) fail("measure.atoms[]: cells are not face adjacent");
                double mp = 0.0;
                double mm = 0.0;
                if (aj.contains("m_plus")) mp = num(aj["m_plus"], "measure.atoms[].m_plus");
                if (aj.contains("m_minus")) mm = num(aj["m_minus"], "measure.atoms[].m_minus");
                atom_map[edge].first += mp;
                atom_map[edge].second += mm;
                Json catom = Json::object();
                catom["cell_a"] = vec2_json(ca);
                catom["cell_b"] = vec2_json(cb);
                catom["m_plus"] = mp;
                catom["m_minus"] = mm;
                clist.push_back(catom);
            }
            cmeasure["atoms"] = clist;
        }
    }
    out.measure.atoms.clear();
    out.measure.mutually_singular = true;
    for (const auto& [edge, masses] : atom_map) {
        out.measure.atoms.push_back({edge, masses.first, masses.second});
        if (std::min(masses.first, masses.second) >
            1e-12 * (masses.first + masses.second)) {
            out.measure.mutually_singular = false;
        }
    }
    out.measure.validate(out.domain);
    canon["measure"] = cmeasure;

    out.C = config.contains("C") ? num(config["C"], "C") : 1.0;
    canon["C"] = out.C;
    std::string dir = "forward";
    if (config.contains("direction")) dir = text(config["direction"], "direction");
    if (dir == "forward") {
        out.direction = ICDirection::forward;
    } else if (dir == "mirrored") {
        out.direction = ICDirection::mirrored;
    } else {
        fail("direction must be 'forward' or 'mirrored'");
    }
    canon["direction"] = dir;
    out.epsilon = config.contains("epsilon") ? num(config["epsilon"], "epsilon") : 0.0;
    out.delta = config.contains("delta") ? num(config["delta"], "delta") : 0.0;
    canon["epsilon"] = out.epsilon;
    canon["delta"] = out.delta;
    out.canonical = canon;
    return out;
}

std::string grid_function_csv(const GridFunction& w, const GridDomain& dom) {
    if (w.values.size() != static_cast<size_t>(dom.cell_count())) {
        fail("grid function does not match the domain");
    }
    std::ostringstream out;
    out << "ix,iy,x,y,value\n";
    char line[160];
    for (int i = 0; i < dom.cell_count(); ++i) {
        const auto [ix, iy] = dom.cell_coords(i);
        const Vec2 p = dom.cell_center(i);
        std::snprintf(line, sizeof line, "%d,%d,%.17g,%.17g,%.17g\n", ix, iy, p.x, p.y,
                      w.values[static_cast<size_t>(i)]);
        out << line;
    }
    return out.str();
}

Json solve_report_json(const SolveReport& rep, const GridDomain& dom, int stride) {
    if (stride < 1) fail("snapshot stride must be >= 1");
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["value"] = rep.value;
    j["gap"] = rep.gap;
    j["iterations"] = rep.iterations;
    j["converged"] = rep.converged;
    j["monotone"] = rep.monotone;
    j["round_values"] = rep.round_values;
    double sup = 0.0;
    for (double v : rep.minimizer.values) sup = std::max(sup, std::abs(v));
    j["sup_norm"] = sup;
    Json snap = Json::array();
    for (size_t i = 0; i < rep.minimizer.values.size(); i += static_cast<size_t>(stride)) {
        const auto [ix, iy] = dom.cell_coords(static_cast<int>(i));
        snap.push_back(Json::array({ix, iy, rep.minimizer.values[i]}));
    }
    j["snapshot_stride"] = stride;
    j["snapshot"] = snap;
    return j;
}

namespace {

const char* verdict_name(ICVerdict v) {
    switch (v) {
        case ICVerdict::holds: return "holds";
        case ICVerdict::violated: return "violated";
        default: return "inconclusive";
    }
}

}  // namespace

Json ic_report_json(const ICReport& rep, const GridDomain& dom) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["verdict"] = verdict_name(rep.verdict);
    j["worst_score"] = rep.worst_score;
    j["exhaustive"] = rep.exhaustive;
    j["small_volume_mode"] = rep.small_volume_mode;
    Json cells = Json::array();
    for (size_t i = 0; i < rep.worst_set.size(); ++i) {
        if (rep.worst_set[i]) {
            const auto [ix, iy] = dom.cell_coords(static_cast<int>(i));
            cells.push_back(Json::array({ix, iy}));
        }
    }
    j["worst_cells"] = cells;
    return j;
}

Json dual_report_json(const DualNormReport& rep) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["value"] = rep.value;
    j["lower"] = rep.lower;
    j["residual"] = rep.residual;
    j["iterations"] = rep.iterations;
    j["converged"] = rep.converged;
    j["singular_pair_required"] = rep.singular_pair_required;
    return j;
}

}  // namespace anisotv
