#pragma once

#include <string>

#include <json.hpp>

#include "qms/channels.hpp"
#include "qms/concentration.hpp"
#include "qms/semigroups.hpp"

namespace qms {

using json = nlohmann::json;

// {"dim": d, "re": [...], "im": [...]}, row-major. "im" may be omitted.
json matrix_to_json(const cmat& m);
cmat matrix_from_json(const json& j);

// {"kind": "kraus" | "superop", "dim": d, "kraus": [matrix...] | "superop": matrix,
//  "reference": optional density matrix}
json channel_to_json(const QuantumChannel& c);
QuantumChannel channel_from_json(const json& j, const Tolerances& tol = {});

// Model spec types:
//   depolarizing      {"d", optional "reference" matrix or "beta"}
//   cyclic_graph      {"d"}
//   graph_walk        {"n", "edges": [[u, v, w], ...]}
//   nc_birth_death    {"n", "beta", optional "weights"}
//   su2_transference  {"j", optional "generators" (default "XY")}
//   custom_gns        {"jumps": [matrix...], "weights": [...], "reference": matrix}
struct Model {
    std::string type;
    json spec;
    Lindbladian generator;
};
Model model_from_json(const json& j, const Tolerances& tol = {});

// Parses a file path or, when the text starts with '{', inline JSON.
json load_json_argument(const std::string& path_or_inline);

json report_to_json(const BoundReport& r);
std::string report_csv_header();
std::string report_csv_row(const BoundReport& r);

std::string bernstein_csv_header();
std::string bernstein_csv_row(const BernsteinRecord& r);

// Shortest round-trip decimal representation, so output bytes are reproducible.
std::string format_double(double x);

}  // namespace qms
