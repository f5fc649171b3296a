// cvwave: command-line front end.
//
// Exit status: 0 ok, 1 usage, 2 config error, 3 convergence failure,
// 4 certification failure, 5 I/O error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "cvw/bounds.hpp"
#include "cvw/config.hpp"
#include "cvw/io.hpp"
#include "cvw/reconstruction.hpp"

using namespace cvw;

namespace {

enum Exit { ok = 0, usage = 1, config_error = 2, convergence = 3, certification = 4, io = 5 };

struct Options {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  std::string branch_file;
  std::optional<std::string> upsilon;
  std::optional<std::string> modes;
  std::optional<std::string> policy;
  std::optional<std::string> point;
  bool svg = false;
};

RunConfig resolve(const Options& o, const std::string& command, Provenance& prov) {
  std::vector<std::string> sets = o.sets;
  if (o.upsilon) sets.push_back("physics.upsilon=" + *o.upsilon);
  if (o.modes) sets.push_back("grid.modes=" + *o.modes);
  if (o.policy) sets.push_back("continuation.policy=" + *o.policy);
  if (o.point) sets.push_back("reconstruct.point=" + *o.point);
  if (!o.out_dir.empty()) sets.push_back("output.dir=" + o.out_dir);
  if (o.svg) sets.push_back("output.svg=true");
  RunConfig cfg = load_config(o.config_path, sets);
  prov.command = command;
  prov.config_text = cfg.source_text;
  prov.overrides = cfg.overrides;
  prov.effective = cfg.effective();
  return cfg;
}

std::string path_in(const RunConfig& cfg, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError("cannot create '" + cfg.output_dir + "': " + ec.message());
  return (std::filesystem::path(cfg.output_dir) / name).string();
}

void write_csv(const RunConfig& cfg, const Provenance& prov, const std::string& name,
               const std::function<void(std::ostream&)>& body) {
  std::ostringstream s;
  write_csv_preamble(s, prov);
  body(s);
  const std::string path = path_in(cfg, name);
  write_text_file(path, s.str());
  std::cout << "wrote " << path << '\n';
}

void write_json(const RunConfig& cfg, const std::string& name, const nlohmann::ordered_json& j) {
  const std::string path = path_in(cfg, name);
  write_text_file(path, j.dump(1) + "\n");
  std::cout << "wrote " << path << '\n';
}

// Minimal line chart for quick inspection.
std::string svg_chart(const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<double>& x,
                      const std::vector<double>& y, bool equal_aspect = false) {
  const double W = 640, H = 400, pad = 50;
  double x0 = *std::min_element(x.begin(), x.end()), x1 = *std::max_element(x.begin(), x.end());
  double y0 = *std::min_element(y.begin(), y.end()), y1 = *std::max_element(y.begin(), y.end());
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  double sx = (W - 2 * pad) / (x1 - x0), sy = (H - 2 * pad) / (y1 - y0);
  if (equal_aspect) sx = sy = std::min(sx, sy);
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\">" << title << "</text>\n"
    << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">" << xlabel
    << "</text>\n<text x=\"14\" y=\"" << H / 2 << "\" transform=\"rotate(-90 14 " << H / 2
    << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n"
    << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
  for (size_t i = 0; i < x.size(); ++i)
    s << pad + (x[i] - x0) * sx << ',' << H - pad - (y[i] - y0) * sy << ' ';
  s << "\"/>\n</svg>\n";
  return s.str();
}

int kernel_study(const RunConfig& cfg, const Provenance& prov) {
  const KernelReport lemma = lemma1_verify(cfg.kernel_d, cfg.continuation.kernel, cfg.kernel_samples);
  const KernelReport scan = conjecture_scan(cfg.kernel_d, cfg.continuation.kernel);
  write_csv(cfg, prov, "kernel.csv", [&](std::ostream& o) { write_kernel_csv(o, lemma); });
  std::printf("min beta_d(pi/2) = %.15g, min margin over (pi-2)/pi = %.6g\n",
              lemma.min_beta_half_pi, lemma.min_strpos_margin);
  std::printf("beta_d(pi/2) >= 1 on every sampled d: %s (exploratory)\n",
              scan.conjecture_held ? "yes" : "no");
  for (const auto& f : lemma.failures)
    std::fprintf(stderr, "FAIL d=%g s=%g: %s\n", f.d, f.s, f.what.c_str());
  return lemma.ok() ? ok : certification;
}

int bifurcate(const RunConfig& cfg, const Provenance& prov) {
  const PhysicalParams& p = cfg.params;
  const BifurcationData b = bifurcation_data(p);
  const GridSpec grid = cfg.continuation.grid(p.strip_height());
  std::printf("m*- = %.12g  Q*- = %.12g  lambda- = %.12g\n", b.m_minus, b.Q_minus, b.lambda_minus);
  std::printf("m*+ = %.12g  Q*+ = %.12g  lambda+ = %.12g\n", b.m_plus, b.Q_plus, b.lambda_plus);
  const double centre = cfg.continuation.sign == BranchSign::minus ? b.m_minus : b.m_plus;
  std::vector<std::pair<double, double>> rows;
  double at_centre = 1.0;
  for (double off : cfg.bifurcate_offsets) {
    const double sv = detect_singularity(p, centre + off, grid);
    rows.emplace_back(centre + off, sv);
    if (off == 0.0) at_centre = sv;
  }
  write_csv(cfg, prov, "bifurcate.csv", [&](std::ostream& o) {
    o << "m,sigma_ratio\n" << std::setprecision(17);
    for (const auto& [m, sv] : rows) o << m << ',' << sv << '\n';
  });
  std::printf("sigma_min/sigma_max at m* = %.3e\n", at_centre);
  return at_centre < 1e-8 ? ok : certification;
}

int trace(const RunConfig& cfg, const Provenance& prov) {
  const Branch b = trace_branch(cfg.params, cfg.continuation);
  write_csv(cfg, prov, "branch.csv", [&](std::ostream& o) { write_branch_csv(o, b); });
  write_json(cfg, "branch.json", to_json(b, prov));
  const GridSpec grid = cfg.continuation.grid(cfg.params.strip_height());
  if (!b.points.empty()) {
    const FlowField flow = build_flow(b.points.back().point, {0.0}, grid);
    write_csv(cfg, prov, "profile_last.csv", [&](std::ostream& o) { write_surface_csv(o, flow); });
    if (cfg.svg) {
      std::vector<double> amp, Q;
      for (const auto& bp : b.points) {
        Q.push_back(bp.point.Q);
        amp.push_back(bp.diagnostics.amplitude);
      }
      write_text_file(path_in(cfg, "branch.svg"), svg_chart("branch", "Q", "v(0) - v(pi)", Q, amp));
      write_text_file(path_in(cfg, "profile_last.svg"),
                      svg_chart("surface", "X", "Y", flow.map.U[0], flow.map.V[0], true));
    }
  }
  int uncertified = 0;
  for (const auto& bp : b.points) uncertified += bp.diagnostics.certified ? 0 : 1;
  std::printf("%zu points, status %s%s%s\n", b.points.size(), to_string(b.status).c_str(),
              b.message.empty() ? "" : ": ", b.message.c_str());
  if (uncertified > 0)
    std::fprintf(stderr, "warning: %d points failed certification\n", uncertified);
  switch (b.status) {
    case BranchStatus::corrector_failure: return convergence;
    case BranchStatus::certification_halt: return certification;
    default: return ok;
  }
}

int verify(const RunConfig& cfg, const Options& o) {
  if (o.branch_file.empty()) throw CLI::ValidationError("verify", "--branch is required");
  const Branch b = read_branch_file(o.branch_file);
  ContinuationConfig cc = b.config;
  cc.kernel = cfg.continuation.kernel;
  const GridSpec grid = cc.grid(b.params.strip_height());
  const double tol = cc.newton_tol;
  int failures = 0, checked = 0;
  auto fail = [&](size_t i, const std::string& what) {
    ++failures;
    std::printf("point %zu: FAIL %s\n", i, what.c_str());
  };
  Branch recomputed = b;
  for (size_t i = 0; i < b.points.size(); ++i) {
    const BranchPoint& bp = b.points[i];
    const PointDiagnostics d = diagnose(bp.point, grid, cc);
    recomputed.points[i].diagnostics = d;
    if (!bp.diagnostics.certified) continue;  // stored as a warning; not asserted
    ++checked;
    if (!(d.residual_norm < 10.0 * tol))
      fail(i, "residual " + std::to_string(d.residual_norm));
    for (const auto& name : d.conditions.failures()) {
      const auto e = d.conditions.find(name);
      fail(i, name + " (margin " + std::to_string(e->margin) + ")");
    }
    if (!(d.bound_margin > 0.0)) fail(i, "amplitude_bound");
    const FlowField flow = build_flow(bp.point, default_levels(grid.strip_height()), grid);
    const PhysicalReport r = physical_checks(bp.point, flow);
    if (!r.ok()) {
      std::ostringstream s;
      s << "physical_checks (bernoulli " << r.bernoulli_residual << ", R " << r.R_max
        << ", max psi_Y " << r.max_psi_Y << ")";
      fail(i, s.str());
    }
  }
  recomputed.points.erase(
      std::remove_if(recomputed.points.begin(), recomputed.points.end(),
                     [&](const BranchPoint& p) {
                       const auto idx = &p - recomputed.points.data();
                       return !b.points[idx].diagnostics.certified;
                     }),
      recomputed.points.end());
  if (recomputed.points.size() >= 2) {
    const AuditReport audit = branch_audit(recomputed, cc.kernel);
    if (!audit.margins_positive) fail(0, "branch_audit: amplitude bound margin");
    if (!audit.replay_ok) fail(0, "branch_audit: proof replay");
    if (!audit.head_decreased) fail(0, "branch_audit: min(Q - 2gv) did not decrease");
  }
  std::printf("verified %d certified points of %zu: %d failures\n", checked, b.points.size(),
              failures);
  return failures == 0 ? ok : certification;
}

int reconstruct(const RunConfig& cfg, const Provenance& prov, const Options& o) {
  if (o.branch_file.empty()) throw CLI::ValidationError("reconstruct", "--branch is required");
  const Branch b = read_branch_file(o.branch_file);
  if (b.points.empty()) throw IoError("branch file has no points");
  const int n = static_cast<int>(b.points.size());
  const int idx = cfg.reconstruct_point < 0 ? n + cfg.reconstruct_point : cfg.reconstruct_point;
  if (idx < 0 || idx >= n) throw ConfigError("reconstruct.point out of range");
  const SolutionPoint& p = b.points[idx].point;
  const GridSpec grid = b.config.grid(b.params.strip_height());
  const FlowField flow = build_flow(p, default_levels(grid.strip_height(), cfg.reconstruct_levels), grid);
  const PhysicalReport r = physical_checks(p, flow);
  const CurrentProfile prof = current_profile(p, grid, default_profile_heights(p, cfg.profile_heights));
  write_csv(cfg, prov, "surface.csv", [&](std::ostream& os) { write_surface_csv(os, flow); });
  write_csv(cfg, prov, "velocity.csv", [&](std::ostream& os) { write_velocity_csv(os, flow); });
  write_csv(cfg, prov, "current.csv", [&](std::ostream& os) {
    os << "Y,current,affine_fit\n" << std::setprecision(17);
    for (size_t i = 0; i < prof.Y.size(); ++i)
      os << prof.Y[i] << ',' << prof.current[i] << ',' << prof.U0 + prof.slope * prof.Y[i] << '\n';
  });
  if (cfg.svg)
    write_text_file(path_in(cfg, "surface.svg"),
                    svg_chart("surface", "X", "Y", flow.map.U[0], flow.map.V[0], true));
  const double harm = harmonicity_residual(p, grid);
  std::printf("point %d: bernoulli %.3e  R %.3e  max psi_Y %.6g  min head %.6g\n", idx,
              r.bernoulli_residual, r.R_max, r.max_psi_Y, r.min_head);
  std::printf("current: U0 %.12g slope %.12g (vorticity %.12g) deviation %.3e; harmonicity %.3e\n",
              prof.U0, prof.slope, p.params.vorticity, prof.max_deviation, harm);
  const bool pass = r.ok() && std::abs(prof.slope - p.params.vorticity) < 1e-8 &&
                    prof.max_deviation < 1e-8;
  return pass ? ok : certification;
}

int sweep(const RunConfig& cfg, const Provenance& prov) {
  const SweepTable t =
      upsilon_sweep(cfg.params, cfg.sweep_upsilons, cfg.continuation, cfg.sweep_workers);
  write_csv(cfg, prov, "sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, t); });
  for (const auto& r : t.rows)
    std::printf("upsilon %-6g bound %.6g  max amplitude %.6g  points %d  %s\n", r.vorticity,
                r.bound, r.max_amplitude, r.points_traced, r.message.c_str());
  std::printf("amplitudes below bound: %s; bound decreasing: %s\n", t.below_bound ? "yes" : "no",
              t.bound_decreasing ? "yes" : "no");
  return t.below_bound && t.bound_decreasing ? ok : certification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic water waves with constant vorticity: kernel study, branch tracing, "
               "verification and flow reconstruction"};
  app.set_version_flag("--version", std::string(CVW_VERSION));
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", o.config_path, "INI config file")->check(CLI::ExistingFile);
    sub->add_option("--set", o.sets, "override, section.key=value (repeatable)");
    sub->add_option("-o,--out", o.out_dir, "output directory");
    sub->add_option("--upsilon", o.upsilon, "vorticity");
    sub->add_option("--modes", o.modes, "Fourier modes N");
    sub->add_option("--policy", o.policy, "warn or halt");
    sub->add_flag("--svg", o.svg, "also render SVG images");
  };
  std::string command;
  struct Sub { const char* name; const char* help; };
  for (const Sub s : {Sub{"kernel-study", "kernel lemma checks and the beta_d(pi/2) scan"},
                      Sub{"bifurcate", "bifurcation data and the singular-value table"},
                      Sub{"trace", "trace the downstream branch"},
                      Sub{"verify", "re-check a stored branch file"},
                      Sub{"reconstruct", "flow field of one stored branch point"},
                      Sub{"sweep", "trace over several vorticities and compare with the bound"}}) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    common(sub);
    if (std::string(s.name) == "verify" || std::string(s.name) == "reconstruct")
      sub->add_option("-b,--branch", o.branch_file, "branch JSON written by trace");
    if (std::string(s.name) == "reconstruct")
      sub->add_option("--point", o.point, "point index, negative counts from the end");
    sub->callback([&command, name = std::string(s.name)] { command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    Provenance prov;
    const RunConfig cfg = resolve(o, command, prov);
    if (command == "kernel-study") return kernel_study(cfg, prov);
    if (command == "bifurcate") return bifurcate(cfg, prov);
    if (command == "trace") return trace(cfg, prov);
    if (command == "verify") return verify(cfg, o);
    if (command == "reconstruct") return reconstruct(cfg, prov, o);
    if (command == "sweep") return sweep(cfg, prov);
    return usage;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return config_error;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return io;
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return usage;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "convergence failure: %s\n", e.what());
    return convergence;
  } catch (const FlowError& e) {
    std::fprintf(stderr, "reconstruction failed: %s\n", e.what());
    return certification;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return config_error;
  }
}
