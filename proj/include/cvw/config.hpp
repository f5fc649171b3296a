#pragma once

// Run configuration: an INI file (sections of key = value) plus
// `section.key=value` overrides, where overrides win.
//
//   [physics]       g = 9.81, k = 1, h = 1, upsilon = 0
//   [grid]          modes = 128, nodes = 0 (4 * modes)
//   [continuation]  sign = minus, policy = warn, s_init = 1e-3,
//                   initial_step = 2e-3, max_step = 2.5e-3, min_step = 1e-6,
//                   shrink = 0.5, grow = 1.3, easy_iterations = 3,
//                   arclength_switch = 0.5, newton_tol = 1e-11,
//                   max_newton = 12, stagnation_stop = 1e-3,
//                   max_points = 400, fd_jacobian = false
//   [kernel]        max_terms = 200000, tail_tol = 1e-13
//   [kernel_study]  d = 0.05,0.1,0.2,0.5,1,2,5,10,20,50,100,1000,10000
//                   samples = 64
//   [bifurcate]     offsets = -0.5,-0.25,-0.1,0,0.1,0.25,0.5
//   [reconstruct]   point = -1 (last), levels = 33, profile_heights = 17
//   [sweep]         upsilons = 0,1,2,5,10, workers = 1
//   [output]        dir = ., svg = false

#include <stdexcept>
#include <string>
#include <vector>

#include "cvw/continuation.hpp"

namespace cvw {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  PhysicalParams params;
  ContinuationConfig continuation;

  std::vector<double> kernel_d{0.05, 0.1, 0.2, 0.5, 1, 2, 5, 10, 20, 50, 100, 1000, 10000};
  int kernel_samples = 64;
  std::vector<double> bifurcate_offsets{-0.5, -0.25, -0.1, 0.0, 0.1, 0.25, 0.5};
  int reconstruct_point = -1;
  int reconstruct_levels = 33;
  int profile_heights = 17;
  std::vector<double> sweep_upsilons{0, 1, 2, 5, 10};
  int sweep_workers = 1;
  std::string output_dir = ".";
  bool svg = false;

  // Provenance: the file exactly as read, and the overrides in order.
  std::string source_text;
  std::vector<std::string> overrides;

  /// Every field as `section.key = value`, one per line, in a fixed order.
  std::string effective() const;
};

/// Parses `text` then applies each `section.key=value` override. Throws
/// ConfigError on syntax errors, unknown keys and invalid values.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

/// Reads the file (empty path: defaults only). Throws ConfigError when it
/// cannot be read.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

}  // namespace cvw
