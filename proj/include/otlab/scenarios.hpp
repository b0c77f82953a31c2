#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace otlab {

// One named assertion inside a scenario. cmp is "abs" (|observed - expected|
// <= tol), "le" (observed <= expected) or "ge" (observed >= expected).
struct CheckRow {
    std::string name;
    double observed = 0.0;
    double expected = 0.0;
    double tol = 0.0;
    std::string cmp = "abs";
    bool pass = false;
};

struct ScenarioResult {
    std::string scenario_id;
    bool pass = false;
    std::vector<CheckRow> checks;
    std::string reference;  // what the scenario replicates
    uint64_t seed = 0;
};

std::vector<std::string> scenario_ids();
std::string scenario_reference(const std::string& id);
ScenarioResult run_scenario(const std::string& id, uint64_t seed);
nlohmann::json scenario_to_json(const ScenarioResult& r);

}  // namespace otlab
