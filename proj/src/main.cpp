#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "anisotv/certificates.hpp"
#include "anisotv/gallery.hpp"
#include "anisotv/jsonio.hpp"
#include "anisotv/measures.hpp"
#include "anisotv/shapes.hpp"
#include "anisotv/solve.hpp"

namespace {

using namespace anisotv;

unsigned long long env_seed(unsigned long long fallback) {
    const char* s = std::getenv("ANISO_TV_SEED");
    if (s == nullptr || *s == '\0') return fallback;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end == s || *end != '\0') {
        throw Error(ErrCode::invalid_input, "ANISO_TV_SEED must be an unsigned integer");
    }
    return v;
}

int code_for(const Error& e) {
    switch (e.code()) {
        case ErrCode::not_converged:
        case ErrCode::unbounded_detected:
            return 3;
        default:
            return 2;
    }
}

void emit(const Json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        write_json_file(out_path, j);
    }
}

const char* verdict_name(ICVerdict v) {
    switch (v) {
        case ICVerdict::holds: return "holds";
        case ICVerdict::violated: return "violated";
        default: return "inconclusive";
    }
}

struct PerimeterArgs {
    std::string config;
    std::string out;
};

int run_perimeter(const PerimeterArgs& args) {
    const Json config = load_json_file(args.config);
    static const std::vector<const char*> keys = {"schema_version", "shape", "integrand"};
    for (const auto& item : config.items()) {
        bool known = false;
        for (const char* k : keys) known = known || item.key() == k;
        if (!known) throw Error(ErrCode::invalid_input, "unknown key '" + item.key() + "'");
    }
    if (!config.contains("schema_version") || config["schema_version"] != kSchemaVersion) {
        throw Error(ErrCode::invalid_input, "config needs schema_version 1");
    }
    const Shape shape = parse_shape(config.at("shape"));
    const Integrand phi = config.contains("integrand") ? parse_integrand(config["integrand"])
                                                       : Integrand::isotropic();
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["perimeter"] = aniso_perimeter(shape, phi);
    j["area"] = shape.area();
    emit(j, args.out);
    return 0;
}

struct MeasureArgs {
    std::string config;
    std::string out;
};

int run_measure(const MeasureArgs& args) {
    const Json config = load_json_file(args.config);
    for (const auto& item : config.items()) {
        if (item.key() != "schema_version" && item.key() != "curves" &&
            item.key() != "shape" && item.key() != "side") {
            throw Error(ErrCode::invalid_input, "unknown key '" + item.key() + "'");
        }
    }
    if (!config.contains("schema_version") || config["schema_version"] != kSchemaVersion) {
        throw Error(ErrCode::invalid_input, "config needs schema_version 1");
    }
    const Shape shape = parse_shape(config.at("shape"));
    std::string side_name = "closure";
    if (config.contains("side")) side_name = config["side"].get<std::string>();
    Side side;
    if (side_name == "closure") {
        side = Side::closure;
    } else if (side_name == "interior") {
        side = Side::interior;
    } else {
        throw Error(ErrCode::invalid_input, "side must be 'closure' or 'interior'");
    }
    if (!config.contains("curves") || !config["curves"].is_array()) {
        throw Error(ErrCode::invalid_input, "config needs a 'curves' array");
    }
    std::vector<CurveMeasure> curves;
    for (const auto& cj : config["curves"]) curves.push_back(parse_curve_literal(cj));
    const auto detailed = measure_of_detailed(curves, shape, side);
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["value"] = detailed.value;
    j["side"] = side_name;
    j["approximate_membership"] = detailed.approximate_membership;
    emit(j, args.out);
    return 0;
}

struct IcArgs {
    std::string scenario;
    std::string mode = "exhaustive";
    std::string out;
    std::optional<double> constant;
    std::optional<std::string> direction;
    std::optional<double> epsilon;
    std::optional<double> delta;
    std::string atom_rule = "closure";
    int restarts = 10;
    int steps = 20000;
    int samples = 200;
};

int run_ic_check(const IcArgs& args) {
    const ScenarioConfig sc = parse_scenario(load_json_file(args.scenario));
    ICQuery query;
    query.measure = sc.measure;
    query.integrand = sc.integrand;
    query.C = args.constant.value_or(sc.C);
    query.direction = sc.direction;
    if (args.direction) {
        if (*args.direction == "forward") {
            query.direction = ICDirection::forward;
        } else if (*args.direction == "mirrored") {
            query.direction = ICDirection::mirrored;
        } else {
            throw Error(ErrCode::invalid_input, "direction must be 'forward' or 'mirrored'");
        }
    }
    query.epsilon = args.epsilon.value_or(sc.epsilon);
    query.delta = args.delta.value_or(sc.delta);
    const unsigned long long seed = env_seed(sc.has_seed ? sc.seed : 0x2b5511c4d0e5a3a1ull);

    if (args.mode == "exhaustive" || args.mode == "anneal") {
        BruteForceOptions opts;
        opts.mode = args.mode == "exhaustive" ? BruteMode::exhaustive : BruteMode::anneal;
        if (args.atom_rule == "closure") {
            opts.atom_rule = BruteAtomRule::closure_vs_interior;
        } else if (args.atom_rule == "average") {
            opts.atom_rule = BruteAtomRule::average;
        } else {
            throw Error(ErrCode::invalid_input, "atom rule must be 'closure' or 'average'");
        }
        opts.seed = seed;
        opts.restarts = args.restarts;
        opts.steps_per_restart = args.steps;
        const ICReport rep = brute_force_ic(query, sc.domain, opts);
        emit(ic_report_json(rep, sc.domain), args.out);
        return rep.verdict == ICVerdict::holds ? 0 : 1;
    }
    if (args.mode == "dual") {
        const DualNormReport rep = dual_norm(sc.measure, sc.domain, sc.integrand);
        Json j = dual_report_json(rep);
        const ICVerdict verdict = dual_verdict(rep, query.C);
        j["constant"] = query.C;
        j["verdict"] = verdict_name(verdict);
        emit(j, args.out);
        return verdict == ICVerdict::holds ? 0 : 1;
    }
    if (args.mode == "certificate") {
        Rng rng(seed);
        std::vector<GridFunction> samples;
        for (int s = 0; s < args.samples; ++s) {
            GridFunction w;
            w.values.resize(static_cast<size_t>(sc.domain.cell_count()));
            for (auto& v : w.values) v = rng.uniform(-1.0, 1.0);
            w.datum.assign(sc.domain.boundary_edges().size(), 0.0);
            samples.push_back(std::move(w));
        }
        const GlobalCheckReport rep = global_inequality_check(samples, query, sc.domain);
        Json j;
        j["schema_version"] = kSchemaVersion;
        j["samples"] = rep.samples;
        j["max_violation"] = rep.max_violation;
        j["consistent"] = rep.consistent;
        emit(j, args.out);
        return rep.consistent ? 0 : 1;
    }
    throw Error(ErrCode::invalid_input, "mode must be exhaustive, anneal, dual, or certificate");
}

struct CertArgs {
    std::string name;
    std::string out;
    double theta = 1.0;
    int level = 1;
    int truncation = 4000;
};

int run_certificate(const CertArgs& args) {
    CertificateReport rep;
    if (args.name == "signed-balance") {
        rep = check_certificate(signed_balance_field(args.theta),
                                signed_balance_mu_plus(args.theta),
                                signed_balance_mu_minus(args.theta),
                                signed_balance_test_shapes(), Integrand::isotropic());
    } else if (args.name == "alternating-shell") {
        rep = check_certificate(alternating_shell_field(),
                                alternating_shell_mu_plus(args.truncation),
                                alternating_shell_mu_minus(args.truncation),
                                alternating_shell_test_shapes(), Integrand::isotropic());
    } else if (args.name == "triangle-zone") {
        rep = check_certificate(triangle_zone_field(), triangle_boundary_measure(0), {},
                                triangle_zone_test_shapes(), Integrand::quadrant());
    } else if (args.name == "fractal") {
        rep = check_certificate(build_fractal_certificate(args.level),
                                triangle_boundary_measure(args.level),
                                {}, fractal_test_shapes(args.level), Integrand::quadrant());
    } else {
        throw Error(ErrCode::invalid_input,
                    "certificate must be signed-balance, alternating-shell, triangle-zone, "
                    "or fractal");
    }
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["max_flux_residual"] = rep.max_residual;
    j["sup_polar"] = rep.sup_polar;
    j["bound"] = rep.bound_C;
    j["flux_ok"] = rep.flux_ok;
    j["polar_ok"] = rep.polar_ok;
    j["pass"] = rep.pass;
    Json checks = Json::array();
    for (const auto& c : rep.checks) {
        checks.push_back(Json{{"flux", c.flux}, {"target", c.target}, {"residual", c.residual}});
    }
    j["flux_checks"] = checks;
    emit(j, args.out);
    return rep.pass ? 0 : 1;
}

struct SolveArgs {
    std::string scenario;
    std::string functional = "phi";
    std::string report;
    std::string csv;
    std::optional<double> h;
    int stride = 1;
    int max_iters = 20000;
    double tol = 1e-6;
    int dc_rounds = 50;
};

int run_solve(const SolveArgs& args) {
    Json config = load_json_file(args.scenario);
    if (args.h) {
        if (!config.contains("domain") || !config["domain"].is_object() ||
            !config["domain"].contains("h")) {
            throw Error(ErrCode::invalid_input, "scenario domain has no spacing to override");
        }
        Json& dom = config["domain"];
        const double old_h = dom["h"].get<double>();
        // Rescale the cell counts so the covered box stays fixed.
        for (const char* key : {"nx", "ny", "n"}) {
            if (dom.contains(key)) {
                const double count = dom[key].get<double>();
                dom[key] = static_cast<int>(std::lround(count * old_h / *args.h));
            }
        }
        dom["h"] = *args.h;
    }
    const ScenarioConfig sc = parse_scenario(config);
    SolveConfig cfg;
    cfg.max_iters = args.max_iters;
    cfg.tol_primal_dual = args.tol;
    cfg.dc_max_rounds = args.dc_rounds;
    SolveReport rep;
    if (args.functional == "phi") {
        rep = minimize_phi(sc.domain, sc.integrand, sc.measure, sc.u0, cfg);
    } else if (args.functional == "phi-hat") {
        rep = minimize_phi_hat(sc.domain, sc.integrand, sc.measure, sc.u0, cfg);
    } else {
        throw Error(ErrCode::invalid_input, "functional must be 'phi' or 'phi-hat'");
    }
    emit(solve_report_json(rep, sc.domain, args.stride), args.report);
    if (!args.csv.empty()) {
        write_text_file(args.csv, grid_function_csv(rep.minimizer, sc.domain));
    }
    return 0;
}

struct GalleryArgs {
    std::string name;
    std::string config;
    std::string out;
    bool all = false;
    int jobs = 1;
};

GalleryOptions gallery_options_from(const std::string& path) {
    GalleryOptions opts;
    if (path.empty()) return opts;
    const Json j = load_json_file(path);
    for (const auto& item : j.items()) {
        if (item.key() == "theta") {
            opts.theta = item.value().get<double>();
        } else if (item.key() == "alpha") {
            opts.alpha = item.value().get<double>();
        } else {
            throw Error(ErrCode::invalid_input, "unknown override '" + item.key() + "'");
        }
    }
    return opts;
}

int run_gallery(const GalleryArgs& args) {
    const GalleryOptions opts = gallery_options_from(args.config);
    if (!args.all) {
        const ScenarioReport rep = run_scenario(args.name, opts);
        emit(rep.to_json(), args.out);
        return rep.pass ? 0 : 1;
    }
    const auto& names = gallery_names();
    std::vector<std::optional<ScenarioReport>> reports(names.size());
    std::vector<std::string> errors(names.size());
    std::atomic<size_t> next{0};
    const int jobs = std::max(1, args.jobs);
    auto worker = [&] {
        for (;;) {
            const size_t idx = next.fetch_add(1);
            if (idx >= names.size()) return;
            try {
                reports[idx] = run_scenario(names[idx], opts);
            } catch (const std::exception& e) {
                errors[idx] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    Json j;
    j["schema_version"] = kSchemaVersion;
    Json list = Json::array();
    bool all_pass = true;
    for (size_t i = 0; i < names.size(); ++i) {
        if (reports[i]) {
            list.push_back(reports[i]->to_json());
            all_pass = all_pass && reports[i]->pass;
        } else {
            Json failed;
            failed["scenario"] = names[i];
            failed["error"] = errors[i];
            list.push_back(failed);
            all_pass = false;
        }
    }
    j["scenarios"] = list;
    j["pass"] = all_pass;
    emit(j, args.out);
    return all_pass ? 0 : 1;
}

struct CoareaArgs {
    int cases = 200;
    unsigned long long seed = 0x7c0a6ea15eedull;
};

int run_coarea(const CoareaArgs& args) {
    Rng rng(env_seed(args.seed));
    double worst = 0.0;
    for (int t = 0; t < args.cases; ++t) {
        const int nx = 1 + static_cast<int>(rng.next_below(6));
        const int ny = 1 + static_cast<int>(rng.next_below(6));
        const double h = rng.next_double() < 0.5 ? 0.5 : 1.0;
        const GridDomain dom = GridDomain::rect(nx, ny, h, {0.0, 0.0});
        GridFunction w;
        w.values.resize(static_cast<size_t>(dom.cell_count()));
        for (auto& v : w.values) v = rng.uniform(-2.0, 2.0);
        w.datum.resize(dom.boundary_edges().size());
        for (auto& v : w.datum) v = rng.uniform(-2.0, 2.0);
        const Integrand phi = t % 3 == 0   ? Integrand::isotropic()
                              : t % 3 == 1 ? Integrand::quadrant()
                                           : Integrand::weighted_l1(1.0, 2.0);
        const double direct = tv_phi(w, dom, phi);
        const double layered = coarea_tv(w, dom, phi);
        worst = std::max(worst, std::abs(direct - layered) / (1.0 + std::abs(direct)));
    }
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["cases"] = args.cases;
    j["worst_relative_residual"] = worst;
    j["pass"] = worst <= 1e-10;
    std::cout << j.dump(2) << "\n";
    return worst <= 1e-10 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anisotropic total-variation toolkit"};
    app.require_subcommand(1);

    PerimeterArgs perimeter_args;
    auto* perimeter = app.add_subcommand("perimeter", "weighted perimeter and area of a shape");
    perimeter->add_option("config", perimeter_args.config, "JSON file with shape and integrand")
        ->required();
    perimeter->add_option("--out", perimeter_args.out, "write the report to a file");

    MeasureArgs measure_args;
    auto* measure = app.add_subcommand("measure", "mass a curve measure assigns to a shape");
    measure->add_option("config", measure_args.config, "JSON file with curves, shape, side")
        ->required();
    measure->add_option("--out", measure_args.out, "write the report to a file");

    IcArgs ic_args;
    auto* ic = app.add_subcommand("ic-check", "interaction inequality checks on a grid scenario");
    ic->add_option("scenario", ic_args.scenario, "scenario JSON file")->required();
    ic->add_option("--mode", ic_args.mode, "exhaustive | anneal | dual | certificate");
    ic->add_option("--constant", ic_args.constant, "override the inequality constant");
    ic->add_option("--direction", ic_args.direction, "forward | mirrored");
    ic->add_option("--epsilon", ic_args.epsilon, "small-volume score allowance");
    ic->add_option("--delta", ic_args.delta, "small-volume area cutoff (0 disables)");
    ic->add_option("--atom-rule", ic_args.atom_rule, "closure | average");
    ic->add_option("--restarts", ic_args.restarts, "annealing restarts");
    ic->add_option("--steps", ic_args.steps, "annealing steps per restart");
    ic->add_option("--samples", ic_args.samples, "sample count for certificate mode");
    ic->add_option("--out", ic_args.out, "write the report to a file");

    CertArgs cert_args;
    auto* cert = app.add_subcommand("certificate", "continuum divergence-field batteries");
    cert->add_option("name", cert_args.name,
                     "signed-balance | alternating-shell | triangle-zone | fractal")
        ->required();
    cert->add_option("--theta", cert_args.theta, "outer surplus for signed-balance");
    cert->add_option("--level", cert_args.level, "refinement depth for fractal");
    cert->add_option("--truncation", cert_args.truncation,
                     "circle count for alternating-shell targets");
    cert->add_option("--out", cert_args.out, "write the report to a file");

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "minimize a grid functional from a scenario");
    solve->add_option("--scenario", solve_args.scenario, "scenario JSON file")->required();
    solve->add_option("--functional", solve_args.functional, "phi | phi-hat");
    solve->add_option("--spacing", solve_args.h, "override the grid spacing");
    solve->add_option("--report", solve_args.report, "write the report to a file");
    solve->add_option("--csv", solve_args.csv, "write the minimizer as CSV");
    solve->add_option("--stride", solve_args.stride, "snapshot stride");
    solve->add_option("--max-iters", solve_args.max_iters, "iteration budget");
    solve->add_option("--tol", solve_args.tol, "primal-dual gap tolerance");
    solve->add_option("--dc-rounds", solve_args.dc_rounds, "linearization round budget");

    GalleryArgs gallery_args;
    auto* gallery = app.add_subcommand("gallery", "worked-example scenario reports");
    auto* gallery_run = gallery->add_subcommand("run", "run one scenario or all of them");
    gallery_run->add_option("name", gallery_args.name, "scenario name");
    gallery_run->add_flag("--all", gallery_args.all, "run the whole catalog");
    gallery_run->add_option("--jobs", gallery_args.jobs, "parallel workers for --all");
    gallery_run->add_option("--config", gallery_args.config, "JSON overrides (theta, alpha)");
    gallery_run->add_option("--out", gallery_args.out, "write the report to a file");
    auto* gallery_list = gallery->add_subcommand("list", "print catalog names");
    gallery->require_subcommand(1);

    CoareaArgs coarea_args;
    auto* coarea = app.add_subcommand("coarea-test", "randomized layer-cake identity check");
    coarea->add_option("--cases", coarea_args.cases, "number of random cases");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (perimeter->parsed()) return run_perimeter(perimeter_args);
        if (measure->parsed()) return run_measure(measure_args);
        if (ic->parsed()) return run_ic_check(ic_args);
        if (cert->parsed()) return run_certificate(cert_args);
        if (solve->parsed()) return run_solve(solve_args);
        if (gallery->parsed()) {
            if (gallery_list->parsed()) {
                for (const auto& name : gallery_names()) std::cout << name << "\n";
                return 0;
            }
            if (!gallery_args.all && gallery_args.name.empty()) {
                std::cerr << "error: give a scenario name or --all\n";
                return 2;
            }
            return run_gallery(gallery_args);
        }
        if (coarea->parsed()) return run_coarea(coarea_args);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
