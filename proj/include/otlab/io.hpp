#pragma once

#include <string>

#include "json.hpp"
#include "otlab/measures.hpp"
#include "otlab/norms.hpp"
#include "otlab/projections.hpp"
#include "otlab/rigidity.hpp"

namespace otlab {

using json = nlohmann::json;

// {"dimension": 2, "atoms": [{"point": [0, 1], "weight": 0.5}, ...]};
// weights accept a float or {"num": 1, "den": 3}.
DiscreteMeasure measure_from_json(const json& j);
json measure_to_json(const DiscreteMeasure& m);

// {"kind": "lq", "q": 4.0} | {"kind": "euclidean"} | {"kind": "linf"} |
// {"kind": "l1"}
NormSpec norm_from_json(const json& j);
json norm_to_json(const NormSpec& spec);

// {"base": [0, 0, 0], "directions": [[1, 1, 1]]}
AffineSubspace subspace_from_json(const json& j);
json subspace_to_json(const AffineSubspace& s);

// {"kind": "phi_t", "t": 0.69, "axis": [1, 0], "origin": [0, 0]} |
// {"kind": "phi_star", ...} | {"kind": "rotation", "angle": 0.78}
IsometryCandidate candidate_from_json(const json& j);

json vec_to_json(const Vec& v);
Vec vec_from_json(const json& j);

// Deterministic serialization: keys sorted, floats with 17 significant
// digits. Same inputs and seeds give byte-identical output.
std::string emit_json(const json& j, int indent = 2);

std::string format_double(double v);

json load_json_file(const std::string& path);   // UsageError when unreadable
json parse_json_arg(const std::string& arg);    // inline JSON or @file
void write_text_file(const std::string& path, const std::string& text);

}  // namespace otlab
