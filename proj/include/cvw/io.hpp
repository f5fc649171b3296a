#pragma once

// Files written and read by the command-line tool.
//
// Every CSV starts with `#` lines carrying the provenance record; the
// header row follows. JSON files carry it under "provenance".
//
// Branch CSV columns: s, m, Q, amplitude, bound, margin, minQ2gv, graph_min,
// residual, newton_iters.
//
// Branch JSON:
//   { "provenance": {...},
//     "params": {g, k, h, upsilon},
//     "config": {modes, nodes, sign, policy, ...},
//     "status": "...", "message": "...",
//     "points": [ {s, m, Q, cos_coeffs: [a_0..a_N],
//                  diagnostics: {residual_norm, newton_iterations, amplitude,
//                                bound, bound_margin, min_head, min_graph,
//                                identity_residual, tail, certified,
//                                conditions: [{name, pass, margin, location}]}} ] }

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvw/continuation.hpp"

namespace cvw {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Provenance {
  std::string version = CVW_VERSION;
  std::string command;
  std::string config_text;             // the config file byte for byte
  std::vector<std::string> overrides;  // in the order given
  std::string effective;               // resolved settings
};

nlohmann::ordered_json to_json(const Provenance& p);
void write_csv_preamble(std::ostream& out, const Provenance& p);

nlohmann::ordered_json to_json(const ConditionReport& r);
nlohmann::ordered_json to_json(const PointDiagnostics& d);
nlohmann::ordered_json to_json(const Branch& b, const Provenance& p);

void write_branch_csv(std::ostream& out, const Branch& b);

/// Inverse of to_json(Branch). Diagnostics are read back as stored; callers
/// that want them recomputed run diagnose(). Throws IoError.
Branch branch_from_json(const nlohmann::json& j);
Branch read_branch_file(const std::string& path);

/// Writes `text` to `path`, throwing IoError on failure.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace cvw
