#pragma once

// Explicit amplitude bounds for waves on the downstream branch, the
// per-point replay of the inequalities behind them, and the vorticity sweep.

#include <iosfwd>
#include <string>
#include <vector>

#include "cvw/continuation.hpp"

namespace cvw {

struct BoundReport {
  double beta_half_pi = 0.0;
  /// √(36g²/Υ⁴ + 24πg/(Υ²kβ)) - 6g/Υ², evaluated without cancellation;
  /// equal to the zero-vorticity bound at Υ = 0.
  double vorticity_bound = 0.0;
  double zero_vorticity_bound = 0.0;  // 2π/(kβ)
  double universal_cap = 0.0;         // 2π²/((π-2)k)
  double bound = 0.0;                 // the sharpest of the three
  double amplitude = 0.0;             // observed v(0) - v(π), if any
  double margin = 0.0;                // bound - amplitude
  bool chain_ok = false;
};

/// Bound skeleton for the given parameters (amplitude 0). Requires Υ ≥ 0.
BoundReport amplitude_bound(const PhysicalParams& p, const KernelConfig& kernel);

/// The same with the observed amplitude of `point` filled in.
BoundReport amplitude_bound(const SolutionPoint& point, const KernelConfig& kernel);

/// Quantities of the f-form argument at x = 0 and x = π.
struct ProofReplay {
  double f0 = 0.0;
  double fpi = 0.0;
  double lhs = 0.0;           // ℒf
  double rhs = 0.0;           // ℛf
  double lebo_margin = 0.0;   // f(π) - f(0) - ℒf
  double fi_lower = 0.0;      // lower bound for ℛf
  double fi_margin = 0.0;     // ℛf - fi_lower
  double Fi_margin = 0.0;     // 24π/β - 24f(0) - 12(f(π)+f(0)) - A(f(π)-f(0))²
  double ekj_margin = 0.0;    // min_x (2/3)(v(0)-v(π))|𝒥v| - |𝒦v|
  double averaged_max = 0.0;  // left side of the averaged flow-sign inequality
  bool ok = false;
};

ProofReplay proof_replay(const SolutionPoint& point, const GridSpec& grid,
                         double beta_half_pi);

struct AuditRow {
  double s = 0.0;
  BoundReport bound;
  ProofReplay replay;
  double max_abs_m = 0.0;  // running extrema along the branch
  double max_abs_Q = 0.0;
  double min_head = 0.0;
};

struct AuditReport {
  std::vector<AuditRow> rows;
  bool margins_positive = false;
  bool replay_ok = false;
  bool head_decreased = false;  // min(Q - 2gv) smaller at the last point than the first

  bool ok() const { return margins_positive && replay_ok && head_decreased; }
};

AuditReport branch_audit(const Branch& branch, const KernelConfig& kernel);

struct SweepRow {
  double vorticity = 0.0;
  double bound = 0.0;
  double max_amplitude = 0.0;
  int points_traced = 0;
  double final_min_head = 0.0;
  bool trace_ok = false;
  std::string message;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  bool below_bound = false;       // every row: max amplitude ≤ bound
  bool bound_decreasing = false;  // strictly, over rows with Υ > 0
};

/// Traces one branch per vorticity value; a failed trace flags its row.
SweepTable upsilon_sweep(const PhysicalParams& base, const std::vector<double>& vorticities,
                         const ContinuationConfig& cfg, int workers = 1);

/// Columns: upsilon, bound, max_amplitude, points_traced, final_minQ2gv.
void write_sweep_csv(std::ostream& out, const SweepTable& table);

}  // namespace cvw
