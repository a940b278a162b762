#include "quditbell/optimize.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <random>

#include "quditbell/errors.hpp"

namespace quditbell {

PhaseConfiguration paper_optimal_angles(const BellScenario& scenario) {
  const int n = scenario.n_parties();
  const int d = scenario.dimension();
  const double m1 = 15.0 / n;
  const double m2 = m1 - 6.0;
  std::vector<double> v1(static_cast<std::size_t>(d));
  std::vector<double> v2(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    v1[static_cast<std::size_t>(j)] = j * m1 * std::numbers::pi / (2.0 * d);
    v2[static_cast<std::size_t>(j)] = j * m2 * std::numbers::pi / (2.0 * d);
  }
  PhaseConfiguration config(n, d);
  for (int p = 0; p < n; ++p) {
    config.set_phases(p, 1, v1);
    config.set_phases(p, 2, v2);
  }
  return config;
}

double cglmp_max_closed_form(int dimension) {
  if (dimension < 2) throw InputError("dimension must be >= 2");
  const double d = dimension;
  auto q = [d](int c) {
    const double s = std::sin(std::numbers::pi * (c + 0.25) / d);
    return 1.0 / (2.0 * d * d * d * s * s);
  };
  double sum = 0.0;
  for (int k = 0; k < dimension / 2; ++k) {
    sum += (1.0 - 2.0 * k / (d - 1.0)) * (q(k) - q(-(k + 1)));
  }
  return 4.0 * d * sum;
}

double max_violation(const BellScenario& scenario) {
  return std::ldexp(cglmp_max_closed_form(scenario.dimension()), scenario.n_parties() - 2);
}

double hlnhv_bound_value(const BellScenario& scenario) { return std::ldexp(1.0, scenario.n_parties() - 1); }

ViolationReport make_violation_report(const BellScenario& scenario, double max_value,
                                      PhaseConfiguration angles, std::string angles_mode) {
  ViolationReport r{scenario, max_value, std::move(angles)};
  r.ratio = max_value / hlnhv_bound_value(scenario);
  r.critical_visibility = 1.0 / r.ratio;
  r.more_noise_resistant_than_svetlichny = r.critical_visibility < r.svetlichny_visibility;
  r.angles_mode = std::move(angles_mode);
  return r;
}

ViolationReport critical_visibility(const BellScenario& scenario) {
  return make_violation_report(scenario, max_violation(scenario), paper_optimal_angles(scenario), "paper");
}

std::string to_string(PhaseMode mode) {
  return mode == PhaseMode::Symmetric ? "optimized-symmetric" : "optimized-free";
}

namespace {

constexpr double kInvPhi = 0.61803398874989484820;  // 1/golden ratio

class Objective {
 public:
  Objective(const BellScenario& scenario, PhaseMode mode, std::int64_t budget)
      : mode_(mode), budget_(budget), config_(scenario.n_parties(), scenario.dimension()) {}

  std::size_t parameter_count() const {
    const auto per_party = static_cast<std::size_t>(2 * config_.dimension());
    return mode_ == PhaseMode::Symmetric ? per_party : per_party * static_cast<std::size_t>(config_.n_parties());
  }

  void load(const PhaseConfiguration& start, std::vector<double>& params) const {
    const auto flat = start.flat();
    params.assign(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(parameter_count()));
  }

  const PhaseConfiguration& materialize(const std::vector<double>& params) {
    auto flat = config_.flat_mut();
    if (mode_ == PhaseMode::Free) {
      std::copy(params.begin(), params.end(), flat.begin());
    } else {
      for (std::size_t off = 0; off < flat.size(); off += params.size()) {
        std::copy(params.begin(), params.end(), flat.begin() + static_cast<std::ptrdiff_t>(off));
      }
    }
    return config_;
  }

  double operator()(const std::vector<double>& params) {
    ++evaluations_;
    return ghz_bell_value(materialize(params));
  }

  bool exhausted() const { return evaluations_ >= budget_; }
  std::int64_t evaluations() const { return evaluations_; }

 private:
  PhaseMode mode_;
  std::int64_t budget_;
  std::int64_t evaluations_ = 0;
  PhaseConfiguration config_;
};

// Golden-section maximization of params[i] over [lo, hi].
std::pair<double, double> golden_section(Objective& f, std::vector<double>& params, std::size_t i, double lo,
                                         double hi, double x_tolerance) {
  auto eval_at = [&](double x) {
    params[i] = x;
    return f(params);
  };
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double e = a + kInvPhi * (b - a);
  double fc = eval_at(c);
  double fe = eval_at(e);
  while (b - a > x_tolerance && !f.exhausted()) {
    if (fc > fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - kInvPhi * (b - a);
      fc = eval_at(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + kInvPhi * (b - a);
      fe = eval_at(e);
    }
  }
  return fc > fe ? std::pair{c, fc} : std::pair{e, fe};
}

}  // namespace

OptimizationResult optimize_phases(const BellScenario& scenario, const PhaseConfiguration& start,
                                   const OptimizerOptions& options) {
  if (options.max_evaluations <= 0) throw InputError("optimizer budget must be positive");
  if (start.n_parties() != scenario.n_parties() || start.dimension() != scenario.dimension()) {
    throw InputError("start configuration does not match the scenario");
  }
  Objective f(scenario, options.mode, options.max_evaluations);
  std::vector<double> params;
  f.load(start, params);

  OptimizationResult result{start};
  result.start_value = f(params);
  double value = result.start_value;

  while (!f.exhausted()) {
    const double sweep_start = value;
    for (std::size_t i = 0; i < params.size() && !f.exhausted(); ++i) {
      const double x0 = params[i];
      const auto [x, fx] = golden_section(f, params, i, x0 - std::numbers::pi, x0 + std::numbers::pi, 1e-9);
      if (fx > value) {
        params[i] = std::remainder(x, 2.0 * std::numbers::pi);
        value = fx;
      } else {
        params[i] = x0;
      }
    }
    ++result.sweeps;
    if (value - sweep_start < options.tolerance) {
      result.converged = true;
      break;
    }
  }

  result.config = f.materialize(params);
  result.value = value;
  result.evaluations = f.evaluations();
  result.exceeds_closed_form = value > max_violation(scenario) + 1e-6;
  return result;
}

RestartResult optimize_with_restarts(const BellScenario& scenario, const RestartOptions& options) {
  if (options.restarts <= 0) throw InputError("restart count must be positive");
  const auto count = static_cast<std::size_t>(options.restarts);
  std::vector<std::optional<OptimizationResult>> runs(count);
  parallel_chunks(count, options.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      std::seed_seq seq{options.seed, static_cast<std::uint64_t>(r)};
      std::mt19937_64 rng(seq);
      const auto start = random_phases(scenario.n_parties(), scenario.dimension(), rng);
      runs[r] = optimize_phases(scenario, start, options.optimizer);
    }
  });
  RestartResult out{*runs[0], 0, {}};
  for (std::size_t r = 0; r < count; ++r) {
    out.values.push_back(runs[r]->value);
    if (runs[r]->value > out.best.value) {
      out.best = *runs[r];
      out.best_restart = static_cast<int>(r);
    }
  }
  return out;
}

}  // namespace quditbell
