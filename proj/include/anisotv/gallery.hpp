#pragma once

#include <string>
#include <vector>

#include "anisotv/jsonio.hpp"

namespace anisotv {

struct ScenarioCheck {
    std::string description;
    double computed = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct ScenarioReport {
    std::string name;
    std::vector<ScenarioCheck> checks;
    std::vector<std::string> notes;
    bool pass = true;

    Json to_json() const;
};

struct GalleryOptions {
    // Outer circle surplus of the signed radial instance, in (0, 1].
    double theta = 1.0;
    // Datum blow-up exponent of the half-disc instance, in (0, 1/2).
    double alpha = 0.4;
};

const std::vector<std::string>& gallery_names();

// Throws ErrCode::unknown_scenario for names outside the catalog.
ScenarioReport run_scenario(const std::string& name, const GalleryOptions& opts = {});

}  // namespace anisotv
