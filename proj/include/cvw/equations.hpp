#pragma once

// Residuals of the conformal one-dimensional water-wave system, its
// f-form, and the regularity/sign conditions evaluated on a solution.

#include <optional>
#include <string>
#include <vector>

#include "cvw/spectral.hpp"

namespace cvw {

/// Fixed data of the wave problem. `vorticity` is Υ.
struct PhysicalParams {
  double g = 9.81;
  double k = 1.0;
  double h = 1.0;
  double vorticity = 0.0;

  void validate() const;
  double strip_height() const { return k * h; }
};

/// One solution candidate (m, Q, v) with [v] = h and v even.
struct SolutionPoint {
  double m = 0.0;
  double Q = 0.0;
  PeriodicField v;
  PhysicalParams params;
};

/// Q on the laminar family: 2gh + (m/h + Υh/2)².
double trivial_head(const PhysicalParams& p, double m);

/// Throws std::invalid_argument when [v] ≠ h or v is not even, and
/// GridMismatch when the modes or strip height disagree with grid.
void check_point(const SolutionPoint& p, const GridSpec& grid);

/// The laminar solution v ≡ h at mass flux m.
SolutionPoint trivial_point(const PhysicalParams& p, double m, int modes);

/// Nodal values of the quantities every residual is built from.
struct SurfaceTerms {
  std::vector<double> v;       // v
  std::vector<double> vp;      // v'
  std::vector<double> cvp;     // 𝒞(v')
  std::vector<double> vy;      // 1/k + 𝒞(v'), the normal derivative of V on top
  std::vector<double> cvvp;    // 𝒞(v v')
  std::vector<double> w;       // m/(kh) - Υ[v²]/(2kh) - Υ𝒞(v v'), i.e. ζ_y on top
  std::vector<double> z;       // w + Υ v (1/k + 𝒞 v')
  std::vector<double> head;    // Q - 2 g v
  double mean_v2 = 0.0;
};

SurfaceTerms surface_terms(const SolutionPoint& p, const GridSpec& grid);

struct SystemResidual {
  PeriodicField field;  // left side of the pseudo-differential equation
  double scalar = 0.0;  // left side of the averaged Bernoulli constraint

  /// Euclidean norm of (cosine coefficients 0..N, scalar).
  double norm() const;
};

/// Throws std::invalid_argument when [v] ≠ h or v is not even, and
/// GridMismatch when v does not carry grid.modes() modes.
SystemResidual residual_system(const SolutionPoint& p, const GridSpec& grid);

/// Derivative of residual_system at p in the direction (dv, dm, dQ).
/// dv must be even with zero mean.
SystemResidual linearized_residual(const SolutionPoint& p, const GridSpec& grid,
                                   const PeriodicField& dv, double dm, double dQ);

/// f = (k/2g)(Q - 2gv) and the constants of the f-form equation.
struct FFormView {
  PeriodicField f;
  double A = 0.0;
  double B = 0.0;
  double a = 0.0;
  double b = 0.0;
};

FFormView to_f_form(const SolutionPoint& p, const GridSpec& grid);

/// [v²] recovered from [f²]: Qh/g - Q²/4g² + [f²]/k².
double mean_v2_from_f(const SolutionPoint& p, const FFormView& ff,
                      const GridSpec& grid);

/// f + (aA + B) f - (A/2) f² - {f𝒞f' + 𝒞(ff')} - b + (A/2) 𝒦f.
PeriodicField residual_ef(const FFormView& ff, const GridSpec& grid);

/// max over the nodes of |Z² - (Q - 2gv)((v')² + (1/k + 𝒞v')²)|.
double identity_add_check(const SolutionPoint& p, const GridSpec& grid);

enum class BranchSign { minus, plus };

struct ConditionEntry {
  std::string name;
  bool pass = false;
  double margin = 0.0;    // min over the grid of the quantity required positive
  double location = 0.0;  // x where the margin is attained
};

struct ConditionReport {
  std::vector<ConditionEntry> entries;

  bool all_pass() const;
  std::vector<std::string> failures() const;
  std::optional<ConditionEntry> find(const std::string& name) const;
};

/// Relative tolerance applied to the pointwise Bernoulli identity entry.
inline constexpr double kIdentityTolerance = 1e-8;

/// Evaluates on the collocation grid, with margins:
///   head_positive        Q - 2gv > 0
///   depth_positive       v > 0
///   monotone_profile     v' < 0 on (0, π)
///   crest_trough         v''(0) < 0 < v''(π)
///   conjugate_range      0 < x/k + 𝒞(v - h) < π/k on (0, π)
///   graph_crest_trough   1/k + 𝒞v' > 0 at 0 and π
///   flow_sign            ±Z > 0 with the requested sign
///   graph                1/k + 𝒞v' > 0 everywhere
///   injective            distinct nodes give distinct surface points
///   nonvanishing         (v')² + (1/k + 𝒞v')² > 0
///   f_positive, f_increasing, cf_below_one, f_flow_sign, f_averaged
///   bernoulli_identity   pointwise identity residual below 1e-8 Q
ConditionReport condition_suite(const SolutionPoint& p, const GridSpec& grid,
                                BranchSign sign);

}  // namespace cvw
