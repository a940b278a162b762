#pragma once

// Maximal quantum violations: the prescribed optimal phase settings, the
// CGLMP closed form and its N-party scaling, noise thresholds, and a
// derivative-free phase search to reproduce them numerically.

#include <cstdint>
#include <string>
#include <vector>

#include "quditbell/parallel.hpp"
#include "quditbell/quantum.hpp"
#include "quditbell/scenario.hpp"

namespace quditbell {

// Critical visibility of the N-qubit Svetlichny test, independent of d.
inline constexpr double kSvetlichnyVisibility = 0.70710678118654752440;

struct ViolationReport {
  BellScenario scenario;
  double max_value = 0.0;
  PhaseConfiguration angles;
  double ratio = 0.0;                 // max_value / 2^{N-1}
  double critical_visibility = 0.0;   // 1 / ratio
  double svetlichny_visibility = kSvetlichnyVisibility;
  // critical_visibility < svetlichny_visibility.
  bool more_noise_resistant_than_svetlichny = false;
  std::string angles_mode = "paper";
};

// Identical for every party:
//   setting 1: (0, m1 pi/2d, 2 m1 pi/2d, ..., (d-1) m1 pi/2d), m1 = 15/N
//   setting 2: same with m2 = m1 - 6.
PhaseConfiguration paper_optimal_angles(const BellScenario& scenario);

// [I^2]^max = 4d sum_{k=0}^{floor(d/2)-1} (1 - 2k/(d-1)) (q_k - q_{-(k+1)}),
// q_c = 1 / (2 d^3 sin^2(pi (c + 1/4) / d)). Throws InputError for d < 2.
double cglmp_max_closed_form(int dimension);

// 2^{N-2} [I^2]^max.
double max_violation(const BellScenario& scenario);

// 2^{N-1}.
double hlnhv_bound_value(const BellScenario& scenario);

ViolationReport make_violation_report(const BellScenario& scenario, double max_value,
                                      PhaseConfiguration angles, std::string angles_mode);

// Report for the closed-form maximum at the paper angles.
ViolationReport critical_visibility(const BellScenario& scenario);

enum class PhaseMode {
  // One pair of phase vectors shared by every party (2d parameters).
  Symmetric,
  // Independent vectors per party (2Nd parameters).
  Free,
};

struct OptimizerOptions {
  PhaseMode mode = PhaseMode::Symmetric;
  std::int64_t max_evaluations = 200'000;
  // Stop once a full coordinate sweep improves the value by less than this.
  double tolerance = 1e-9;
};

struct OptimizationResult {
  PhaseConfiguration config;
  double value = 0.0;
  double start_value = 0.0;
  std::int64_t evaluations = 0;
  int sweeps = 0;
  bool converged = false;
  // value > max_violation + 1e-6: the closed form was beaten, which should
  // not happen and is surfaced rather than hidden.
  bool exceeds_closed_form = false;
};

// Cyclic coordinate search maximizing ghz_bell_value. Each coordinate gets
// a golden-section line search over [x - pi, x + pi]; moves that do not
// improve the value are rejected, so value >= start_value. In symmetric
// mode the start is taken from party 1's vectors.
OptimizationResult optimize_phases(const BellScenario& scenario, const PhaseConfiguration& start,
                                   const OptimizerOptions& options = {});

struct RestartOptions {
  OptimizerOptions optimizer;
  int restarts = 20;
  std::uint64_t seed = 0x5eed;
  unsigned threads = default_threads();
};

struct RestartResult {
  OptimizationResult best;
  int best_restart = 0;
  std::vector<double> values;  // per restart
};

// Independent runs from uniformly random phases. The winner is the highest
// value, lowest restart index on ties; thread count does not change it.
RestartResult optimize_with_restarts(const BellScenario& scenario, const RestartOptions& options = {});

std::string to_string(PhaseMode mode);

}  // namespace quditbell
