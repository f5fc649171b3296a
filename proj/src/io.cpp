#include "cvw/io.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace cvw {

using nlohmann::ordered_json;

namespace {

void comment_block(std::ostream& out, const std::string& label, const std::string& text) {
  out << "# " << label << ":\n";
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out << "#   " << line << '\n';
}

}  // namespace

ordered_json to_json(const Provenance& p) {
  return ordered_json{{"version", p.version},
                      {"command", p.command},
                      {"config_text", p.config_text},
                      {"overrides", p.overrides},
                      {"effective", p.effective}};
}

void write_csv_preamble(std::ostream& out, const Provenance& p) {
  out << "# cvwave " << p.version << ' ' << p.command << '\n';
  comment_block(out, "config file", p.config_text);
  std::string ov;
  for (const auto& o : p.overrides) ov += o + '\n';
  comment_block(out, "overrides", ov);
  comment_block(out, "effective", p.effective);
}

ordered_json to_json(const ConditionReport& r) {
  ordered_json a = ordered_json::array();
  for (const auto& e : r.entries)
    a.push_back({{"name", e.name}, {"pass", e.pass}, {"margin", e.margin},
                 {"location", e.location}});
  return a;
}

ordered_json to_json(const PointDiagnostics& d) {
  return ordered_json{{"residual_norm", d.residual_norm},
                      {"newton_iterations", d.newton_iterations},
                      {"amplitude", d.amplitude},
                      {"bound", d.bound},
                      {"bound_margin", d.bound_margin},
                      {"min_head", d.min_head},
                      {"min_graph", d.min_graph},
                      {"identity_residual", d.identity_residual},
                      {"tail", d.tail},
                      {"certified", d.certified},
                      {"conditions", to_json(d.conditions)}};
}

ordered_json to_json(const Branch& b, const Provenance& p) {
  const ContinuationConfig& c = b.config;
  ordered_json j;
  j["provenance"] = to_json(p);
  j["params"] = {{"g", b.params.g}, {"k", b.params.k}, {"h", b.params.h},
                 {"upsilon", b.params.vorticity}};
  j["config"] = {{"modes", c.modes},
                 {"nodes", c.nodes},
                 {"sign", c.sign == BranchSign::minus ? "minus" : "plus"},
                 {"policy", c.policy == Policy::warn ? "warn" : "halt"},
                 {"s_init", c.s_init},
                 {"initial_step", c.initial_step},
                 {"max_step", c.max_step},
                 {"min_step", c.min_step},
                 {"shrink", c.shrink},
                 {"grow", c.grow},
                 {"easy_iterations", c.easy_iterations},
                 {"arclength_switch", c.arclength_switch},
                 {"newton_tol", c.newton_tol},
                 {"max_newton", c.max_newton},
                 {"stagnation_stop", c.stagnation_stop},
                 {"max_points", c.max_points},
                 {"fd_jacobian", c.finite_difference_jacobian},
                 {"kernel_max_terms", c.kernel.max_terms},
                 {"kernel_tail_tol", c.kernel.tail_tol}};
  j["status"] = to_string(b.status);
  j["message"] = b.message;
  ordered_json pts = ordered_json::array();
  for (const auto& bp : b.points)
    pts.push_back({{"s", bp.s},
                   {"m", bp.point.m},
                   {"Q", bp.point.Q},
                   {"cos_coeffs", bp.point.v.cos_coeffs()},
                   {"diagnostics", to_json(bp.diagnostics)}});
  j["points"] = std::move(pts);
  return j;
}

void write_branch_csv(std::ostream& out, const Branch& b) {
  out << "s,m,Q,amplitude,bound,margin,minQ2gv,graph_min,residual,newton_iters\n"
      << std::setprecision(17);
  for (const auto& bp : b.points) {
    const PointDiagnostics& d = bp.diagnostics;
    out << bp.s << ',' << bp.point.m << ',' << bp.point.Q << ',' << d.amplitude << ','
        << d.bound << ',' << d.bound_margin << ',' << d.min_head << ',' << d.min_graph << ','
        << d.residual_norm << ',' << d.newton_iterations << '\n';
  }
}

Branch branch_from_json(const nlohmann::json& j) {
  try {
    Branch b;
    const auto& p = j.at("params");
    b.params.g = p.at("g").get<double>();
    b.params.k = p.at("k").get<double>();
    b.params.h = p.at("h").get<double>();
    b.params.vorticity = p.at("upsilon").get<double>();
    const auto& c = j.at("config");
    ContinuationConfig& cfg = b.config;
    cfg.modes = c.at("modes").get<int>();
    cfg.nodes = c.at("nodes").get<int>();
    cfg.sign = c.at("sign").get<std::string>() == "plus" ? BranchSign::plus : BranchSign::minus;
    cfg.policy = c.at("policy").get<std::string>() == "halt" ? Policy::halt : Policy::warn;
    cfg.s_init = c.at("s_init").get<double>();
    cfg.initial_step = c.at("initial_step").get<double>();
    cfg.max_step = c.at("max_step").get<double>();
    cfg.min_step = c.at("min_step").get<double>();
    cfg.shrink = c.at("shrink").get<double>();
    cfg.grow = c.at("grow").get<double>();
    cfg.easy_iterations = c.at("easy_iterations").get<int>();
    cfg.arclength_switch = c.at("arclength_switch").get<double>();
    cfg.newton_tol = c.at("newton_tol").get<double>();
    cfg.max_newton = c.at("max_newton").get<int>();
    cfg.stagnation_stop = c.at("stagnation_stop").get<double>();
    cfg.max_points = c.at("max_points").get<int>();
    cfg.finite_difference_jacobian = c.at("fd_jacobian").get<bool>();
    cfg.kernel.max_terms = c.at("kernel_max_terms").get<int>();
    cfg.kernel.tail_tol = c.at("kernel_tail_tol").get<double>();
    b.message = j.value("message", "");
    for (const auto& pt : j.at("points")) {
      BranchPoint bp;
      bp.s = pt.at("s").get<double>();
      bp.point.params = b.params;
      bp.point.m = pt.at("m").get<double>();
      bp.point.Q = pt.at("Q").get<double>();
      auto a = pt.at("cos_coeffs").get<std::vector<double>>();
      std::vector<double> zero(a.size(), 0.0);
      bp.point.v = PeriodicField(std::move(a), std::move(zero), Parity::even);
      const auto& d = pt.at("diagnostics");
      bp.diagnostics.residual_norm = d.at("residual_norm").get<double>();
      bp.diagnostics.newton_iterations = d.at("newton_iterations").get<int>();
      bp.diagnostics.certified = d.at("certified").get<bool>();
      b.points.push_back(std::move(bp));
    }
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed branch file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("malformed branch file: ") + e.what());
  }
}

Branch read_branch_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("'" + path + "' is not valid JSON: " + e.what());
  }
  return branch_from_json(j);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace cvw
