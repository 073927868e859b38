#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "anisotv/grid.hpp"
#include "anisotv/icheck.hpp"
#include "anisotv/integrand.hpp"
#include "anisotv/shapes.hpp"
#include "anisotv/solve.hpp"

namespace anisotv {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Fully parsed scenario file. `canonical` is the normalized re-serialization
// with defaults filled in; parsing it again reproduces it byte for byte.
struct ScenarioConfig {
    GridDomain domain = GridDomain::rect(1, 1, 1.0, {0.0, 0.0});
    Integrand integrand = Integrand::isotropic();
    std::vector<double> u0;
    DiscreteMeasure measure;
    double C = 1.0;
    ICDirection direction = ICDirection::forward;
    double epsilon = 0.0;
    double delta = 0.0;
    unsigned long long seed = 0;
    bool has_seed = false;
    Json canonical;
};

Json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);
void write_text_file(const std::string& path, const std::string& text);

// Rejects unknown keys, missing schema_version, and malformed fields with
// ErrCode::invalid_input.
ScenarioConfig parse_scenario(const Json& config);

Shape parse_shape(const Json& j);
Integrand parse_integrand(const Json& j);
CurveMeasure parse_curve_literal(const Json& j);

// One row per cell: ix,iy,x,y,value.
std::string grid_function_csv(const GridFunction& w, const GridDomain& dom);

Json solve_report_json(const SolveReport& rep, const GridDomain& dom, int stride = 1);
Json ic_report_json(const ICReport& rep, const GridDomain& dom);
Json dual_report_json(const DualNormReport& rep);

}  // namespace anisotv
