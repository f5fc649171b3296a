#pragma once

// Reconstruction of the physical flow from a solution (m, Q, v): the
// conformal map of the strip onto the fluid domain, the stream function,
// the velocity field, and the checks that can be run on them.

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "cvw/equations.hpp"

namespace cvw {

using Table = std::vector<std::vector<double>>;  // [level][node]

class FlowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// y_j = -d (1 - cos(π j / (2(count-1)))), j = 0..count-1: from the top of
/// the strip (y = 0) down to the bed (y = -d), clustered near the surface.
std::vector<double> default_levels(double strip_height, int count = 33);

/// Harmonic extension into the strip -d < y < 0 of an even trace, vanishing
/// on y = -d. With `linear_x` the conjugate also carries the term x/k that
/// makes U + iV a map onto one period of the fluid domain.
class StripExtension {
 public:
  StripExtension(const PeriodicField& trace, double strip_height);

  struct Value {
    double f = 0.0, fx = 0.0, fy = 0.0;
  };

  Value at(double x, double y) const;

  /// The harmonic conjugate with U_x = V_y, U_y = -V_x, and mean slope
  /// trace.mean()/d in x.
  double conjugate(double x, double y) const;

  /// Nodal values on the level y over `nodes` equispaced points.
  void level(double y, int nodes, std::vector<double>& f, std::vector<double>& fx,
             std::vector<double>& fy) const;
  std::vector<double> conjugate_level(double y, int nodes) const;

  const PeriodicField& trace() const { return trace_; }

 private:
  PeriodicField trace_;
  double d_;
};

/// (U, V) and first derivatives on the requested levels.
struct StripMap {
  double d = 0.0;
  std::vector<double> x;
  std::vector<double> y;
  Table U, V, Ux, Uy, Vx, Vy;
};

StripMap build_strip_map(const SolutionPoint& p, const std::vector<double>& levels,
                         const GridSpec& grid);

/// ζ is the harmonic function equal to m - Υv²/2 on top and 0 on the bed;
/// the stream function is ψ = ζ - m + ΥV²/2 at (X, Y) = (U, V).
struct FlowField {
  StripMap map;
  Table zeta, zeta_x, zeta_y;
  Table psi;
  Table psi_Y;       // horizontal velocity
  Table minus_psi_X; // vertical velocity
};

/// Throws FlowError when the map degenerates (V_x² + V_y² < 1e-14).
FlowField build_flow(const SolutionPoint& p, const std::vector<double>& levels,
                     const GridSpec& grid);

struct PhysicalReport {
  double bernoulli_residual = 0.0;  // max ||∇ψ|² + 2gY - Q| / Q on the surface
  double R_max = 0.0;               // max |½|∇ψ|² + gY - Q/2 - Υψ| / Q on the surface
  double max_psi_Y = 0.0;           // over the whole grid
  double min_head = 0.0;            // min Q - 2gY on the surface
  double identity_residual = 0.0;   // max |(ζ_y + ΥVV_y)² - (Q - 2gV)|∇V|²| on top
  double surface_psi = 0.0;         // max |ψ| on the surface

  bool ok(double tol = 1e-8) const {
    return bernoulli_residual < tol && R_max < tol && max_psi_Y < 0.0 && min_head > 0.0;
  }
};

/// Requires a level at y = 0 in `flow`.
PhysicalReport physical_checks(const SolutionPoint& p, const FlowField& flow);

/// Mean horizontal velocity along lines Y = const below the trough.
struct CurrentProfile {
  std::vector<double> Y;
  std::vector<double> current;
  double U0 = 0.0;     // least-squares intercept
  double slope = 0.0;  // least-squares slope, Υ for an affine current
  double max_deviation = 0.0;
};

/// Throws std::invalid_argument for Y outside [0, v(π)).
CurrentProfile current_profile(const SolutionPoint& p, const GridSpec& grid,
                               const std::vector<double>& Y);

/// `count` values of Y spread over (0, v(π)).
std::vector<double> default_profile_heights(const SolutionPoint& p, int count = 17);

/// Largest discrete Laplacian of U, V and ζ over a few interior levels:
/// spectral in x and fourth-order differences in y.
double harmonicity_residual(const SolutionPoint& p, const GridSpec& grid);

/// Columns x, u, v: the surface in parametric form.
void write_surface_csv(std::ostream& out, const FlowField& flow);

/// Columns X, Y, psi_Y, minus_psi_X over every level.
void write_velocity_csv(std::ostream& out, const FlowField& flow);

}  // namespace cvw
