#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mp/rng.hpp"

namespace mp {

// One parameter group for a gradient check. `values` is perturbed in place
// during the check and restored afterwards. `candidates` optionally restricts
// which coordinates may be sampled (useful for sparse gradients); empty means
// all coordinates.
struct GradCheckGroup {
  std::string name;
  double* values = nullptr;
  std::size_t count = 0;
  const double* analytic = nullptr;
  std::vector<std::size_t> candidates;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::vector<std::pair<std::string, double>> per_group;
};

// Central-difference check of analytic gradients: for each sampled coordinate
// the relative error is |analytic - numeric| / max(|analytic|, |numeric|,
// 1e-8). The loss function must be deterministic (dropout disabled). A check
// over zero parameter groups reports error 0 by convention.
GradCheckReport grad_check(const std::function<double()>& loss,
                           std::vector<GradCheckGroup> groups, double epsilon,
                           std::size_t samples_per_group, Rng& rng);

}  // namespace mp
