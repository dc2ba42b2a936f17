#include "mp/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mp/errors.hpp"

namespace mp {

GradCheckReport grad_check(const std::function<double()>& loss,
                           std::vector<GradCheckGroup> groups, double epsilon,
                           std::size_t samples_per_group, Rng& rng) {
  if (epsilon <= 0.0) throw ConfigError("grad_check: epsilon must be positive");
  GradCheckReport report;
  for (GradCheckGroup& g : groups) {
    std::vector<std::size_t> pool = g.candidates;
    if (pool.empty()) {
      pool.resize(g.count);
      std::iota(pool.begin(), pool.end(), std::size_t{0});
    }
    // Sample without replacement; small pools are checked exhaustively.
    if (pool.size() > samples_per_group) {
      for (std::size_t i = 0; i < samples_per_group; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(pool.size() - i));
        std::swap(pool[i], pool[j]);
      }
      pool.resize(samples_per_group);
    }
    double group_max = 0.0;
    for (std::size_t idx : pool) {
      double saved = g.values[idx];
      g.values[idx] = saved + epsilon;
      double up = loss();
      g.values[idx] = saved - epsilon;
      double down = loss();
      g.values[idx] = saved;
      double numeric = (up - down) / (2.0 * epsilon);
      double analytic = g.analytic[idx];
      double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
      group_max = std::max(group_max, std::fabs(analytic - numeric) / denom);
    }
    report.per_group.emplace_back(g.name, group_max);
    report.max_rel_error = std::max(report.max_rel_error, group_max);
  }
  return report;
}

}  // namespace mp
