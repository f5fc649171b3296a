#pragma once

// Bifurcation from the laminar flows and predictor-corrector tracing of
// the bifurcating branch of periodic waves.

#include <array>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cvw/equations.hpp"
#include "cvw/kernel.hpp"

namespace cvw {

struct BifurcationData {
  double m_minus = 0.0;
  double m_plus = 0.0;
  double Q_minus = 0.0;
  double Q_plus = 0.0;
  double lambda_minus = 0.0;  // surface velocity parameter m/h + Υh/2
  double lambda_plus = 0.0;
};

BifurcationData bifurcation_data(const PhysicalParams& p);

/// Smallest singular value, divided by the largest, of the Jacobian of the
/// discrete system at the laminar point (m, Q(m), v ≡ h) restricted to even
/// zero-mean perturbations of v.
double detect_singularity(const PhysicalParams& p, double m, const GridSpec& grid);

enum class Policy { warn, halt };

struct ContinuationConfig {
  int modes = 128;
  int nodes = 0;                 // 0 selects 4 * modes
  BranchSign sign = BranchSign::minus;
  double s_init = 1e-3;          // first cosine coefficient of the first point
  double initial_step = 2e-3;    // in scaled arclength
  double max_step = 2.5e-3;
  double min_step = 1e-6;
  double shrink = 0.5;
  double grow = 1.3;
  int easy_iterations = 3;       // Newton counts at or below this are "easy"
  double arclength_switch = 0.5; // |da1/ds| below which arclength takes over
  double newton_tol = 1e-11;
  int max_newton = 12;
  double stagnation_stop = 1e-3;
  int max_points = 400;
  Policy policy = Policy::warn;
  bool finite_difference_jacobian = false;
  KernelConfig kernel{};

  void validate() const;
  GridSpec grid(double strip_height) const;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual_norm, int iterations)
      : std::runtime_error(what), residual_norm_(residual_norm), iterations_(iterations) {}
  double residual_norm() const { return residual_norm_; }
  int iterations() const { return iterations_; }

 private:
  double residual_norm_;
  int iterations_;
};

/// a_1 = value.
struct AmplitudePin {
  double value = 0.0;
};

/// tangent · (σ(u) - σ(anchor)) = step, with σ = (a_1, m, Q) / scale.
struct ArclengthPin {
  std::array<double, 3> anchor{};
  std::array<double, 3> tangent{};
  std::array<double, 3> scale{1.0, 1.0, 1.0};
  double step = 0.0;
};

using PinConstraint = std::variant<AmplitudePin, ArclengthPin>;

/// Unknowns (a_1..a_N, m, Q) packed into one vector.
Eigen::VectorXd pack(const SolutionPoint& p);
SolutionPoint unpack(const Eigen::VectorXd& u, const PhysicalParams& params);

/// Stacked residual: cosine modes 0..N of the field equation, the scalar
/// constraint, and the pin.
Eigen::VectorXd stacked_residual(const SolutionPoint& p, const GridSpec& grid,
                                 const PinConstraint& pin);

/// (N+3) x (N+2) Jacobian of stacked_residual with respect to pack(p).
Eigen::MatrixXd stacked_jacobian(const SolutionPoint& p, const GridSpec& grid,
                                 const PinConstraint& pin, bool finite_difference = false);

/// First guess (m*, Q*, h + s cos x) on the branch selected by `sign`.
SolutionPoint predict_initial(const PhysicalParams& p, int modes, double s,
                              BranchSign sign = BranchSign::minus);

/// b + t (b - a) in (coefficients, m, Q).
SolutionPoint predict_secant(const SolutionPoint& a, const SolutionPoint& b, double t);

struct CorrectorResult {
  SolutionPoint point;
  int iterations = 0;
  double residual_norm = 0.0;
};

/// Damped Gauss-Newton with column-pivoted QR least squares. Throws
/// ConvergenceError when the stacked residual does not fall below newton_tol.
CorrectorResult correct(const SolutionPoint& guess, const GridSpec& grid,
                        const ContinuationConfig& cfg, const PinConstraint& pin);

struct PointDiagnostics {
  double residual_norm = 0.0;
  int newton_iterations = 0;
  double amplitude = 0.0;       // v(0) - v(π)
  double bound = 0.0;           // amplitude bound for these parameters
  double bound_margin = 0.0;    // bound - amplitude
  double min_head = 0.0;        // min (Q - 2gv)
  double min_graph = 0.0;       // min (1/k + 𝒞v')
  double identity_residual = 0.0;
  double tail = 0.0;            // largest |a_n| over the top quarter of modes
  ConditionReport conditions;
  bool certified = false;
};

struct BranchPoint {
  double s = 0.0;  // s_init plus the accumulated scaled arclength times h
  SolutionPoint point;
  PointDiagnostics diagnostics;
};

enum class BranchStatus { stagnation, max_points, corrector_failure, certification_halt };

std::string to_string(BranchStatus s);

struct Branch {
  PhysicalParams params;
  ContinuationConfig config;
  std::vector<BranchPoint> points;
  BranchStatus status = BranchStatus::max_points;
  std::string message;
};

/// Runs condition_suite, the identity check and the amplitude bound on p.
PointDiagnostics diagnose(const SolutionPoint& p, const GridSpec& grid,
                          const ContinuationConfig& cfg);

Branch trace_branch(const PhysicalParams& params, const ContinuationConfig& cfg);

}  // namespace cvw
