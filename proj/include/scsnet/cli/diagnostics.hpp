#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace scsnet::cli {

struct GradcheckCase {
  std::string name;  // e.g. "scs#3"
  std::string shape;
  double error = 0.0;
};

struct GradcheckSummary {
  std::vector<GradcheckCase> cases;
  double max_error = 0.0;
};

/// Finite-difference checks on randomly shaped layers drawn from `seed`:
/// `per_kind` cases each of scs (kernel, input, p_log, q_raw), maxabs pool,
/// conv2d and conv3d (kernel, bias, input) and dense. The loss is a fixed
/// random weighting of the layer output.
GradcheckSummary gradcheck_suite(std::uint64_t seed, std::size_t per_kind, double eps = 1e-6);

/// The scs part alone, case `index` of the sequence for `seed`.
GradcheckCase scs_gradcheck_case(std::uint64_t seed, std::uint64_t index, double eps = 1e-6);

}  // namespace scsnet::cli
