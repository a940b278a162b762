#pragma once

#include <random>
#include <vector>

#include "quditbell/scenario.hpp"

namespace quditbell::test_support {

// Each row drawn from a flat Dirichlet distribution.
inline JointProbabilityTable random_table(const BellScenario& sc, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<std::vector<double>> rows(sc.setting_count(), std::vector<double>(sc.outcome_count()));
  for (auto& row : rows) {
    double sum = 0.0;
    for (auto& p : row) sum += (p = e(rng));
    for (auto& p : row) p /= sum;
  }
  return JointProbabilityTable::from_rows(sc, std::move(rows));
}

}  // namespace quditbell::test_support
