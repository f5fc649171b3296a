#include "cvw/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

namespace cvw {

namespace {
constexpr double pi = std::numbers::pi;
}

BoundReport amplitude_bound(const PhysicalParams& p, const KernelConfig& kernel) {
  p.validate();
  if (p.vorticity < 0.0)
    throw std::invalid_argument("amplitude_bound: requires nonnegative vorticity");
  KernelConfig cfg = kernel;
  cfg.d = p.strip_height();
  BoundReport r;
  r.beta_half_pi = beta_eval(pi / 2.0, cfg);
  const double g = p.g, k = p.k, U = p.vorticity;
  const double c = 24.0 * pi * g / (k * r.beta_half_pi);
  r.vorticity_bound = c / (std::sqrt(36.0 * g * g + c * U * U) + 6.0 * g);
  r.zero_vorticity_bound = 2.0 * pi / (k * r.beta_half_pi);
  r.universal_cap = 2.0 * pi * pi / ((pi - 2.0) * k);
  r.bound = U > 0.0 ? r.vorticity_bound : r.zero_vorticity_bound;
  r.chain_ok = r.zero_vorticity_bound <= r.universal_cap &&
               (U > 0.0 ? r.vorticity_bound < r.zero_vorticity_bound : true);
  r.margin = r.bound;
  return r;
}

BoundReport amplitude_bound(const SolutionPoint& point, const KernelConfig& kernel) {
  BoundReport r = amplitude_bound(point.params, kernel);
  r.amplitude = point.v(0.0) - point.v(pi);
  r.margin = r.bound - r.amplitude;
  return r;
}

ProofReplay proof_replay(const SolutionPoint& point, const GridSpec& grid,
                         double beta_half_pi) {
  const FFormView ff = to_f_form(point, grid);
  const double A = ff.A;
  const double beta = beta_half_pi;
  const PeriodicField Jf = op_J(ff.f, grid);
  const PeriodicField Kf = op_K(ff.f, grid);
  const PeriodicField cfp = strip_hilbert(derivative(ff.f), grid);
  std::vector<double> half_f2 = synthesize(ff.f, grid);
  for (double& x : half_f2) x = 0.5 * x * x;
  const PeriodicField cffp =
      strip_hilbert(derivative(analyze(half_f2, grid, Parity::even)), grid);

  ProofReplay r;
  const double f0 = ff.f(0.0), fpi = ff.f(pi);
  r.f0 = f0;
  r.fpi = fpi;
  const double jsum = Jf(pi) + Jf(0.0);
  const double rise = fpi - f0;
  r.lhs = rise * (1.0 + ff.a * A + ff.B - A * (fpi + f0) / 2.0 + 0.5 * A * jsum);
  r.rhs = (fpi * cfp(pi) - f0 * cfp(0.0)) + (cffp(pi) - cffp(0.0)) -
          0.5 * A * (Kf(pi) - Kf(0.0)) + 0.5 * A * rise * jsum;
  r.averaged_max = ff.a * A + ff.B - 0.5 * A * (fpi + f0) + 0.5 * A * jsum;
  r.lebo_margin = rise - r.lhs;
  r.fi_lower = rise * (beta / pi * f0 + beta / (2.0 * pi) * (fpi + f0) +
                       A * beta / (24.0 * pi) * rise * rise);
  r.fi_margin = r.rhs - r.fi_lower;
  r.Fi_margin = 24.0 * pi / beta - (24.0 * f0 + 12.0 * (fpi + f0) + A * rise * rise);

  const std::vector<double> jv = synthesize(op_J(point.v, grid), grid);
  const std::vector<double> kv = synthesize(op_K(point.v, grid), grid);
  const double amp = point.v(0.0) - point.v(pi);
  r.ekj_margin = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < jv.size(); ++j)
    r.ekj_margin = std::min(r.ekj_margin, (2.0 / 3.0) * amp * std::abs(jv[j]) - std::abs(kv[j]));

  r.ok = r.lebo_margin >= 0.0 && r.fi_margin >= 0.0 && r.Fi_margin >= 0.0 &&
         r.ekj_margin >= 0.0 && r.averaged_max <= 0.0;
  return r;
}

AuditReport branch_audit(const Branch& branch, const KernelConfig& kernel) {
  AuditReport report;
  if (branch.points.empty()) return report;
  const GridSpec grid = branch.config.grid(branch.params.strip_height());
  const BoundReport skeleton = amplitude_bound(branch.params, kernel);
  report.margins_positive = true;
  report.replay_ok = true;
  double max_m = 0.0, max_Q = 0.0;
  for (const BranchPoint& bp : branch.points) {
    AuditRow row;
    row.s = bp.s;
    row.bound = amplitude_bound(bp.point, kernel);
    row.replay = proof_replay(bp.point, grid, skeleton.beta_half_pi);
    max_m = std::max(max_m, std::abs(bp.point.m));
    max_Q = std::max(max_Q, std::abs(bp.point.Q));
    row.max_abs_m = max_m;
    row.max_abs_Q = max_Q;
    const auto v = synthesize(bp.point.v, grid);
    row.min_head = bp.point.Q - 2.0 * branch.params.g * *std::max_element(v.begin(), v.end());
    report.margins_positive = report.margins_positive && row.bound.margin > 0.0;
    report.replay_ok = report.replay_ok && row.replay.ok;
    report.rows.push_back(row);
  }
  report.head_decreased = report.rows.back().min_head < report.rows.front().min_head;
  return report;
}

SweepTable upsilon_sweep(const PhysicalParams& base, const std::vector<double>& vorticities,
                         const ContinuationConfig& cfg, int workers) {
  SweepTable table;
  table.rows.resize(vorticities.size());
  for (double U : vorticities)
    if (!(U >= 0.0)) throw std::invalid_argument("upsilon_sweep: vorticity must be >= 0");

  auto run_row = [&](size_t i) {
    SweepRow& row = table.rows[i];
    PhysicalParams p = base;
    p.vorticity = vorticities[i];
    row.vorticity = p.vorticity;
    try {
      row.bound = amplitude_bound(p, cfg.kernel).bound;
      const Branch b = trace_branch(p, cfg);
      row.points_traced = static_cast<int>(b.points.size());
      for (const auto& bp : b.points)
        row.max_amplitude = std::max(row.max_amplitude, bp.diagnostics.amplitude);
      if (!b.points.empty()) row.final_min_head = b.points.back().diagnostics.min_head;
      row.trace_ok = b.status == BranchStatus::stagnation;
      row.message = to_string(b.status) + (b.message.empty() ? "" : ": " + b.message);
    } catch (const std::exception& e) {
      row.trace_ok = false;
      row.message = e.what();
    }
  };

  const size_t n = vorticities.size();
  const size_t threads = std::clamp<size_t>(workers < 1 ? 1 : workers, 1, std::max<size_t>(n, 1));
  if (threads <= 1) {
    for (size_t i = 0; i < n; ++i) run_row(i);
  } else {
    std::mutex mutex;
    size_t next = 0;
    std::vector<std::thread> pool;
    for (size_t t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        while (true) {
          size_t i;
          {
            std::lock_guard lock(mutex);
            if (next >= n) return;
            i = next++;
          }
          run_row(i);
        }
      });
    for (auto& th : pool) th.join();
  }

  table.below_bound = std::all_of(table.rows.begin(), table.rows.end(), [](const SweepRow& r) {
    return r.trace_ok && r.max_amplitude <= r.bound;
  });
  table.bound_decreasing = true;
  const SweepRow* prev = nullptr;
  for (const auto& r : table.rows) {
    if (!(r.vorticity > 0.0)) continue;
    if (prev && !(r.vorticity > prev->vorticity && r.bound < prev->bound))
      table.bound_decreasing = false;
    prev = &r;
  }
  return table;
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  out << "upsilon,bound,max_amplitude,points_traced,final_minQ2gv\n" << std::setprecision(17);
  for (const auto& r : table.rows)
    out << r.vorticity << ',' << r.bound << ',' << r.max_amplitude << ',' << r.points_traced
        << ',' << r.final_min_head << '\n';
}

}  // namespace cvw
