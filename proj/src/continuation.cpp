#include "cvw/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cvw/bounds.hpp"

namespace cvw {

namespace {

std::array<double, 3> scaled(const SolutionPoint& p, const std::array<double, 3>& scale) {
  return {p.v.cos_coeff(1) / scale[0], p.m / scale[1], p.Q / scale[2]};
}

double distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                   (a[2] - b[2]) * (a[2] - b[2]));
}

double pin_value(const SolutionPoint& p, const PinConstraint& pin) {
  if (const auto* a = std::get_if<AmplitudePin>(&pin)) return p.v.cos_coeff(1) - a->value;
  const auto& c = std::get<ArclengthPin>(pin);
  const auto s = scaled(p, c.scale);
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) sum += c.tangent[i] * (s[i] - c.anchor[i]);
  return sum - c.step;
}

// ∂pin/∂(a_1, m, Q).
std::array<double, 3> pin_gradient(const PinConstraint& pin) {
  if (std::holds_alternative<AmplitudePin>(pin)) return {1.0, 0.0, 0.0};
  const auto& c = std::get<ArclengthPin>(pin);
  return {c.tangent[0] / c.scale[0], c.tangent[1] / c.scale[1], c.tangent[2] / c.scale[2]};
}

}  // namespace

BifurcationData bifurcation_data(const PhysicalParams& p) {
  p.validate();
  const double t = std::tanh(p.k * p.h);
  const double U = p.vorticity;
  const double centre = U * t / (2.0 * p.k);
  const double radius = std::sqrt(centre * centre + p.g * t / p.k);
  BifurcationData b;
  b.lambda_minus = centre - radius;
  b.lambda_plus = centre + radius;
  b.m_minus = p.h * (b.lambda_minus - U * p.h / 2.0);
  b.m_plus = p.h * (b.lambda_plus - U * p.h / 2.0);
  b.Q_minus = 2.0 * p.g * p.h + b.lambda_minus * b.lambda_minus;
  b.Q_plus = 2.0 * p.g * p.h + b.lambda_plus * b.lambda_plus;
  return b;
}

double detect_singularity(const PhysicalParams& p, double m, const GridSpec& grid) {
  const int N = grid.modes();
  const SolutionPoint base = trivial_point(p, m, N);
  Eigen::MatrixXd J(N + 2, N);
  for (int n = 1; n <= N; ++n) {
    const SystemResidual r =
        linearized_residual(base, grid, PeriodicField::cosine(N, n), 0.0, 0.0);
    for (int i = 0; i <= N; ++i) J(i, n - 1) = r.field.cos_coeff(i);
    J(N + 1, n - 1) = r.scalar;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv(0) > 0.0))
    throw std::runtime_error("detect_singularity: degenerate Jacobian");
  return sv(sv.size() - 1) / sv(0);
}

void ContinuationConfig::validate() const {
  if (modes < 8) throw std::invalid_argument("continuation: modes must be at least 8");
  if (nodes != 0 && nodes < 4 * modes)
    throw std::invalid_argument("continuation: nodes must be 0 or at least 4 * modes");
  if (!(s_init > 0.0)) throw std::invalid_argument("continuation: s_init must be positive");
  if (!(initial_step > 0.0) || !(max_step >= initial_step) || !(min_step > 0.0) ||
      min_step > initial_step)
    throw std::invalid_argument("continuation: need 0 < min_step <= initial_step <= max_step");
  if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("continuation: shrink in (0,1)");
  if (!(grow >= 1.0)) throw std::invalid_argument("continuation: grow must be >= 1");
  if (!(newton_tol >= 1e-13)) throw std::invalid_argument("continuation: newton_tol >= 1e-13");
  if (max_newton < 1) throw std::invalid_argument("continuation: max_newton >= 1");
  if (!(stagnation_stop > 0.0 && stagnation_stop < 1.0))
    throw std::invalid_argument("continuation: stagnation_stop in (0,1)");
  if (max_points < 1) throw std::invalid_argument("continuation: max_points >= 1");
  if (!(arclength_switch > 0.0 && arclength_switch <= 1.0))
    throw std::invalid_argument("continuation: arclength_switch in (0,1]");
  kernel.validate();
}

GridSpec ContinuationConfig::grid(double strip_height) const {
  return GridSpec(modes, nodes == 0 ? 4 * modes : nodes, strip_height);
}

Eigen::VectorXd pack(const SolutionPoint& p) {
  const int N = p.v.modes();
  Eigen::VectorXd u(N + 2);
  for (int n = 1; n <= N; ++n) u(n - 1) = p.v.cos_coeff(n);
  u(N) = p.m;
  u(N + 1) = p.Q;
  return u;
}

SolutionPoint unpack(const Eigen::VectorXd& u, const PhysicalParams& params) {
  const int N = static_cast<int>(u.size()) - 2;
  std::vector<double> c(N + 1), s(N + 1);
  c[0] = params.h;
  for (int n = 1; n <= N; ++n) c[n] = u(n - 1);
  return {u(N), u(N + 1), PeriodicField(std::move(c), std::move(s), Parity::even), params};
}

Eigen::VectorXd stacked_residual(const SolutionPoint& p, const GridSpec& grid,
                                 const PinConstraint& pin) {
  const int N = grid.modes();
  const SystemResidual r = residual_system(p, grid);
  Eigen::VectorXd out(N + 3);
  for (int n = 0; n <= N; ++n) out(n) = r.field.cos_coeff(n);
  out(N + 1) = r.scalar;
  out(N + 2) = pin_value(p, pin);
  return out;
}

Eigen::MatrixXd stacked_jacobian(const SolutionPoint& p, const GridSpec& grid,
                                 const PinConstraint& pin, bool finite_difference) {
  const int N = grid.modes();
  Eigen::MatrixXd J(N + 3, N + 2);
  if (finite_difference) {
    const Eigen::VectorXd u = pack(p);
    for (int i = 0; i < N + 2; ++i) {
      const double e = 1e-7 * std::max(1.0, std::abs(u(i)));
      Eigen::VectorXd up = u, um = u;
      up(i) += e;
      um(i) -= e;
      J.col(i) = (stacked_residual(unpack(up, p.params), grid, pin) -
                  stacked_residual(unpack(um, p.params), grid, pin)) /
                 (2.0 * e);
    }
    return J;
  }
  const auto grad = pin_gradient(pin);
  auto fill = [&](int col, const SystemResidual& r, double pin_entry) {
    for (int n = 0; n <= N; ++n) J(n, col) = r.field.cos_coeff(n);
    J(N + 1, col) = r.scalar;
    J(N + 2, col) = pin_entry;
  };
  for (int n = 1; n <= N; ++n)
    fill(n - 1, linearized_residual(p, grid, PeriodicField::cosine(N, n), 0.0, 0.0),
         n == 1 ? grad[0] : 0.0);
  const PeriodicField none = PeriodicField::zero(N);
  fill(N, linearized_residual(p, grid, none, 1.0, 0.0), grad[1]);
  fill(N + 1, linearized_residual(p, grid, none, 0.0, 1.0), grad[2]);
  return J;
}

SolutionPoint predict_initial(const PhysicalParams& p, int modes, double s, BranchSign sign) {
  const BifurcationData b = bifurcation_data(p);
  const bool minus = sign == BranchSign::minus;
  SolutionPoint out = trivial_point(p, minus ? b.m_minus : b.m_plus, modes);
  out.Q = minus ? b.Q_minus : b.Q_plus;
  out.v += PeriodicField::cosine(modes, 1, s);
  return out;
}

SolutionPoint predict_secant(const SolutionPoint& a, const SolutionPoint& b, double t) {
  const Eigen::VectorXd ua = pack(a), ub = pack(b);
  return unpack(ub + t * (ub - ua), b.params);
}

CorrectorResult correct(const SolutionPoint& guess, const GridSpec& grid,
                        const ContinuationConfig& cfg, const PinConstraint& pin) {
  Eigen::VectorXd u = pack(guess);
  Eigen::VectorXd r = stacked_residual(guess, grid, pin);
  double norm = r.norm();
  int it = 0;
  while (!(norm < cfg.newton_tol)) {
    if (it == cfg.max_newton)
      throw ConvergenceError("corrector: no convergence within the iteration limit", norm, it);
    const SolutionPoint current = unpack(u, guess.params);
    const Eigen::MatrixXd J =
        stacked_jacobian(current, grid, pin, cfg.finite_difference_jacobian);
    const Eigen::VectorXd delta = J.colPivHouseholderQr().solve(-r);
    bool accepted = false;
    for (double lambda = 1.0; lambda > 1.0 / 64.0; lambda *= 0.5) {
      const Eigen::VectorXd trial = u + lambda * delta;
      Eigen::VectorXd rt;
      try {
        rt = stacked_residual(unpack(trial, guess.params), grid, pin);
      } catch (const std::invalid_argument&) {
        continue;
      }
      if (rt.allFinite() && rt.norm() < norm) {
        u = trial;
        r = rt;
        norm = rt.norm();
        accepted = true;
        break;
      }
    }
    ++it;
    if (!accepted)
      throw ConvergenceError("corrector: residual plateau above tolerance", norm, it);
  }
  return {unpack(u, guess.params), it, norm};
}

std::string to_string(BranchStatus s) {
  switch (s) {
    case BranchStatus::stagnation: return "stagnation";
    case BranchStatus::max_points: return "max_points";
    case BranchStatus::corrector_failure: return "corrector_failure";
    case BranchStatus::certification_halt: return "certification_halt";
  }
  return "unknown";
}

PointDiagnostics diagnose(const SolutionPoint& p, const GridSpec& grid,
                          const ContinuationConfig& cfg) {
  PointDiagnostics d;
  d.residual_norm = residual_system(p, grid).norm();
  const auto t = surface_terms(p, grid);
  d.amplitude = p.v(0.0) - p.v(std::numbers::pi);
  d.min_head = *std::min_element(t.head.begin(), t.head.end());
  d.min_graph = *std::min_element(t.vy.begin(), t.vy.end());
  d.identity_residual = identity_add_check(p, grid);
  const int N = p.v.modes();
  for (int n = 3 * N / 4 + 1; n <= N; ++n)
    d.tail = std::max(d.tail, std::abs(p.v.cos_coeff(n)));
  d.conditions = condition_suite(p, grid, cfg.sign);
  if (p.params.vorticity >= 0.0) {
    const BoundReport b = amplitude_bound(p, cfg.kernel);
    d.bound = b.bound;
    d.bound_margin = b.margin;
  } else {
    d.bound = std::numeric_limits<double>::quiet_NaN();
    d.bound_margin = std::numeric_limits<double>::quiet_NaN();
  }
  d.certified = d.conditions.all_pass() && d.bound_margin > 0.0;
  return d;
}

Branch trace_branch(const PhysicalParams& params, const ContinuationConfig& cfg) {
  params.validate();
  cfg.validate();
  const GridSpec grid = cfg.grid(params.strip_height());
  const BifurcationData bif = bifurcation_data(params);
  const bool minus = cfg.sign == BranchSign::minus;
  const double m_star = minus ? bif.m_minus : bif.m_plus;
  const double Q_star = minus ? bif.Q_minus : bif.Q_plus;
  const std::array<double, 3> scale{params.h, std::abs(m_star) > 0.0 ? std::abs(m_star) : 1.0,
                                    Q_star};

  Branch branch;
  branch.params = params;
  branch.config = cfg;

  auto accept = [&](const CorrectorResult& c, double s) {
    BranchPoint bp;
    bp.s = s;
    bp.point = c.point;
    bp.diagnostics = diagnose(c.point, grid, cfg);
    bp.diagnostics.residual_norm = c.residual_norm;
    bp.diagnostics.newton_iterations = c.iterations;
    branch.points.push_back(std::move(bp));
  };

  try {
    accept(correct(predict_initial(params, cfg.modes, cfg.s_init, cfg.sign), grid, cfg,
                   AmplitudePin{cfg.s_init}),
           cfg.s_init);
  } catch (const ConvergenceError& e) {
    branch.status = BranchStatus::corrector_failure;
    branch.message = std::string("first point: ") + e.what();
    return branch;
  }

  bool arclength = false;
  double step = cfg.initial_step;
  int easy = 0;
  while (true) {
    const BranchPoint& last = branch.points.back();
    if (last.diagnostics.min_head < cfg.stagnation_stop * last.point.Q) {
      branch.status = BranchStatus::stagnation;
      break;
    }
    if (!last.diagnostics.certified && cfg.policy == Policy::halt) {
      branch.status = BranchStatus::certification_halt;
      std::string failed;
      for (const auto& name : last.diagnostics.conditions.failures())
        failed += (failed.empty() ? "" : ",") + name;
      if (!(last.diagnostics.bound_margin > 0.0))
        failed += failed.empty() ? "amplitude_bound" : ",amplitude_bound";
      branch.message = "certification failed at s = " + std::to_string(last.s) + " (" +
                       failed + "); returned up to the last certified point";
      branch.points.pop_back();
      break;
    }
    if (static_cast<int>(branch.points.size()) >= cfg.max_points) {
      branch.status = BranchStatus::max_points;
      break;
    }

    const SolutionPoint& p1 = last.point;
    const auto s1 = scaled(p1, scale);
    const bool have_secant = branch.points.size() >= 2;
    std::array<double, 3> tangent{1.0, 0.0, 0.0};
    double secant_length = 0.0;
    if (have_secant) {
      const auto s0 = scaled(branch.points[branch.points.size() - 2].point, scale);
      secant_length = distance(s0, s1);
      for (int i = 0; i < 3; ++i) tangent[i] = (s1[i] - s0[i]) / secant_length;
      if (!arclength && std::abs(tangent[0]) < cfg.arclength_switch) arclength = true;
    }

    PinConstraint pin;
    SolutionPoint guess;
    if (arclength && have_secant) {
      pin = ArclengthPin{s1, tangent, scale, step};
      guess = predict_secant(branch.points[branch.points.size() - 2].point, p1,
                             step / secant_length);
    } else {
      const double target = p1.v.cos_coeff(1) + step * params.h;
      pin = AmplitudePin{target};
      if (have_secant) {
        const double da = p1.v.cos_coeff(1) -
                          branch.points[branch.points.size() - 2].point.v.cos_coeff(1);
        guess = predict_secant(branch.points[branch.points.size() - 2].point, p1,
                               (target - p1.v.cos_coeff(1)) / da);
      } else {
        guess = p1;
        guess.v += PeriodicField::cosine(cfg.modes, 1, target - p1.v.cos_coeff(1));
      }
    }

    try {
      const CorrectorResult c = correct(guess, grid, cfg, pin);
      const auto v = synthesize(c.point.v, grid);
      if (c.point.Q - 2.0 * params.g * *std::max_element(v.begin(), v.end()) <= 0.0) {
        // Overshot the highest wave; shorten the step and approach again.
        step *= cfg.shrink;
        easy = 0;
        if (step < cfg.min_step) {
          branch.status = BranchStatus::stagnation;
          branch.message = "stagnation approached to within the minimum step";
          break;
        }
        continue;
      }
      const double ds = distance(s1, scaled(c.point, scale)) * params.h;
      accept(c, last.s + ds);
      if (c.iterations <= cfg.easy_iterations) {
        if (++easy >= 2) {
          step = std::min(step * cfg.grow, cfg.max_step);
          easy = 0;
        }
      } else {
        easy = 0;
      }
    } catch (const ConvergenceError& e) {
      step *= cfg.shrink;
      easy = 0;
      if (have_secant) arclength = true;
      if (step < cfg.min_step) {
        branch.status = BranchStatus::corrector_failure;
        branch.message = std::string(e.what()) + " (residual " +
                         std::to_string(e.residual_norm()) + ")";
        break;
      }
    }
  }
  return branch;
}

}  // namespace cvw
