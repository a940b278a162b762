// Acceptance suite. Each criterion prints one PASS/FAIL line with the
// measured quantity; the exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "quditbell/bounds.hpp"
#include "quditbell/optimize.hpp"
#include "quditbell/quantum.hpp"
#include "quditbell/scenario.hpp"
#include "test_helpers.hpp"

using namespace quditbell;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail << "; ";
      detail << "FAILED " << what;
      pass = false;
    }
  }
};

const double kTwoRootTwo = 2.0 * std::sqrt(2.0);
const double kQutritMax = (12.0 + 8.0 * std::sqrt(3.0)) / 9.0;

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void criterion1(Outcome& o) {
  const double v2 = cglmp_max_closed_form(2);
  const double v3 = cglmp_max_closed_form(3);
  o.check(std::abs(v2 - kTwoRootTwo) <= 1e-9, "d=2 value " + num(v2));
  o.check(std::abs(v3 - kQutritMax) <= 1e-9, "d=3 value " + num(v3));
  if (o.pass) o.detail << "d=2: " << num(v2) << ", d=3: " << num(v3);
}

void criterion2(Outcome& o) {
  double worst = 0.0;
  for (auto [n, d] : {std::pair{2, 2}, std::pair{2, 3}, std::pair{3, 2}, std::pair{3, 3}, std::pair{4, 2},
                      std::pair{4, 3}}) {
    const BellScenario sc(n, d);
    const double dense = bell_value(joint_probabilities(ghz_state(sc), paper_optimal_angles(sc)));
    const double target = std::ldexp(cglmp_max_closed_form(d), n - 2);
    const double diff = std::abs(dense - target);
    worst = std::max(worst, diff);
    o.check(diff <= 1e-6, "(N,d)=(" + std::to_string(n) + "," + std::to_string(d) + ") dense " + num(dense) +
                              " vs " + num(target));
  }
  if (o.pass) o.detail << "6 scenarios, max |dense - closed form| = " << num(worst);
}

void criterion3(Outcome& o) {
  int checked = 0;
  auto certify = [&](int n, int d, const std::vector<int>& block) {
    const BellScenario sc(n, d);
    const Bipartition part(n, block);
    const auto b = hlnhv_bound(sc, part);
    const Rational expect(std::int64_t{1} << (n - 1));
    o.check(b.bound == expect, "N=" + std::to_string(n) + " d=" + std::to_string(d) + " " + part.to_string() +
                                   " gave " + b.bound.to_string());
    o.check(strategy_bell_value(b.witness, sc) == b.bound, "witness value for " + part.to_string());
    ++checked;
  };
  for (int d = 2; d <= 5; ++d) {
    certify(3, d, {0});
    certify(3, d, {0, 1});
  }
  for (int d = 2; d <= 3; ++d) {
    certify(4, d, {0});
    certify(4, d, {0, 1});
  }
  if (o.pass) o.detail << checked << " (N,d,partition) cases, all exactly 2^(N-1)";
}

void criterion4(Outcome& o) {
  int groups = 0;
  for (int n = 3; n <= 5; ++n) {
    std::int64_t t_sum = 0;
    for (int k = 0; k <= n - 2; ++k) t_sum += t_multiplicity(n, k);
    o.check(t_sum == (std::int64_t{1} << (n - 2)), "sum T(k) for N=" + std::to_string(n));
    for (int d = 2; d <= 3; ++d) {
      const BellScenario sc(n, d);
      for (const auto& part : Bipartition::all(n)) {
        const auto g = build_grouping(sc, part);
        std::vector<int> hits(std::size_t{1} << n, 0);
        for (const auto& q : g.groups) {
          for (const auto& s : q.settings) ++hits[s.mask()];
          const auto m = group_max(q, part, sc);
          o.check(m == Rational(2), "group max " + m.to_string() + " at N=" + std::to_string(n) +
                                        " d=" + std::to_string(d) + " " + part.to_string());
          ++groups;
        }
        for (int h : hits) o.check(h == 1, "setting coverage at N=" + std::to_string(n) + " " + part.to_string());
        for (int k = 0; k <= n - 2; ++k) {
          o.check(g.multiplicities[static_cast<std::size_t>(k)] == t_multiplicity(n, k), "multiplicity T(k)");
        }
      }
    }
  }
  if (o.pass) o.detail << groups << " quadruples, every exhaustive group max exactly 2";
}

void criterion5(Outcome& o) {
  for (int n = 2; n <= 4; ++n) {
    const double v2 = critical_visibility(BellScenario(n, 2)).critical_visibility;
    const double v3 = critical_visibility(BellScenario(n, 3)).critical_visibility;
    o.check(std::abs(v2 - 0.707) <= 1e-3, "V_cr d=2 N=" + std::to_string(n) + " = " + num(v2));
    o.check(std::abs(v3 - 0.696) <= 1e-3, "V_cr d=3 N=" + std::to_string(n) + " = " + num(v3));
  }
  for (int d = 3; d <= 8; ++d) {
    const double v = critical_visibility(BellScenario(3, d)).critical_visibility;
    o.check(v < 1.0 / std::sqrt(2.0), "V_cr d=" + std::to_string(d) + " = " + num(v) + " not below 1/sqrt2");
  }
  double worst = 0.0;
  for (int n = 2; n <= 4; ++n) {
    for (int d = 2; d <= 3; ++d) {
      const BellScenario sc(n, d);
      const auto report = critical_visibility(sc);
      const auto rho = mix_with_noise(ghz_state(sc), report.critical_visibility);
      const double value = bell_value(joint_probabilities(rho, report.angles));
      const double diff = std::abs(value - std::ldexp(1.0, n - 1));
      worst = std::max(worst, diff);
      o.check(diff <= 1e-6, "crossover N=" + std::to_string(n) + " d=" + std::to_string(d) + " value " + num(value));
    }
  }
  if (o.pass) {
    o.detail << "V_cr(d=2) = " << num(critical_visibility(BellScenario(2, 2)).critical_visibility)
             << ", V_cr(d=3) = " << num(critical_visibility(BellScenario(2, 3)).critical_visibility)
             << ", crossover max deviation " << num(worst);
  }
}

void criterion6(Outcome& o) {
  std::mt19937_64 rng(0xacce97);
  int trials = 0;
  double closest = -1e300;
  struct Case {
    int n, d;
  };
  const std::vector<Case> cases{{3, 2}, {3, 3}, {4, 2}, {4, 3}};
  // 20 (scenario, partition) pairs, 10 states each.
  while (trials < 200) {
    for (const auto& c : cases) {
      for (const auto& part : Bipartition::all(c.n)) {
        const int na = static_cast<int>(part.block_a().size());
        const int nb = c.n - na;
        std::uniform_int_distribution<int> rank_a(1, static_cast<int>(std::pow(c.d, na)));
        std::uniform_int_distribution<int> rank_b(1, static_cast<int>(std::pow(c.d, nb)));
        const auto rho_a = random_density_matrix(na, c.d, rank_a(rng), rng);
        const auto rho_b = random_density_matrix(nb, c.d, rank_b(rng), rng);
        const auto rho = product_state(rho_a, rho_b, part.block_a());
        const double value = bell_value(joint_probabilities(rho, random_phases(c.n, c.d, rng)));
        const double bound = std::ldexp(1.0, c.n - 1);
        closest = std::max(closest, value - bound);
        o.check(value <= bound + 1e-9, "N=" + std::to_string(c.n) + " d=" + std::to_string(c.d) + " " +
                                           part.to_string() + " value " + num(value));
        ++trials;
      }
    }
  }
  if (o.pass) o.detail << trials << " product states, max (value - bound) = " << num(closest);
}

void criterion7(Outcome& o) {
  std::mt19937_64 rng(0x0c1e);
  // (a) strategy value vs delta-table Bell value.
  double worst_a = 0.0;
  int count_a = 0;
  const std::vector<std::pair<int, int>> sizes{{2, 3}, {3, 2}, {3, 3}, {4, 2}, {4, 3}};
  while (count_a < 200) {
    for (auto [n, d] : sizes) {
      const BellScenario sc(n, d);
      const auto parts = Bipartition::all(n);
      const auto& part = parts[static_cast<std::size_t>(count_a) % parts.size()];
      std::uniform_int_distribution<int> digit(0, d - 1);
      DeterministicStrategy s{part, std::vector<int>(std::size_t{1} << part.block_a().size()),
                              std::vector<int>(std::size_t{1} << part.block_b().size())};
      for (auto& v : s.xi) v = digit(rng);
      for (auto& v : s.zeta) v = digit(rng);
      worst_a = std::max(worst_a, std::abs(strategy_bell_value(s, sc).to_double() - bell_value(induced_table(s, sc))));
      ++count_a;
    }
  }
  o.check(worst_a <= 1e-12, "(a) deviation " + num(worst_a));

  // (b) closed-form GHZ probabilities vs dense path, 50 configurations.
  double worst_b = 0.0;
  for (int c = 0; c < 50; ++c) {
    const auto [n, d] = sizes[static_cast<std::size_t>(c) % sizes.size()];
    const BellScenario sc(n, d);
    const auto config = random_phases(n, d, rng);
    const auto dense = joint_probabilities(ghz_state(sc), config);
    for (const auto& s : SettingString::all(n)) {
      for (std::size_t i = 0; i < sc.outcome_count(); ++i) {
        const double closed = ghz_probability_closed_form(config, s, OutcomeTuple::from_index(i, n, d));
        worst_b = std::max(worst_b, std::abs(closed - dense.row(s)[i]));
      }
    }
  }
  o.check(worst_b <= 1e-10, "(b) deviation " + num(worst_b));

  // (c) CGLMP form of relabelled two-party tables.
  double worst_c = 0.0;
  for (int k = 0; k < 100; ++k) {
    const BellScenario sc(2, 2 + k % 7);
    const auto table = test_support::random_table(sc, rng);
    worst_c = std::max(worst_c, std::abs(cglmp_value(relabel_for_cglmp(table)) - bell_value(table)));
  }
  o.check(worst_c <= 1e-12, "(c) deviation " + num(worst_c));

  // (d) reflection identity, compared exactly and against the integer form
  // (d-1) g1(x) = d-1-2 (x mod d).
  int count_d = 0;
  for (int d = 2; d <= 12; ++d) {
    const BellScenario sc(2, d);
    for (int x = -3 * d; x <= 3 * d; ++x, ++count_d) {
      o.check(g1(x, sc) == -g2(x + 1, sc), "(d) d=" + std::to_string(d) + " x=" + std::to_string(x));
      const int m = ((x % d) + d) % d;
      o.check(g1(x, sc) * (d - 1) == static_cast<double>(d - 1 - 2 * m), "(d) integer form");
    }
  }
  if (o.pass) {
    o.detail << "(a) " << count_a << " strategies, max dev " << num(worst_a) << "; (b) 50 configs, max dev "
             << num(worst_b) << "; (c) 100 tables, max dev " << num(worst_c) << "; (d) " << count_d
             << " exact identities";
  }
}

void criterion8(Outcome& o) {
  for (int d = 2; d <= 3; ++d) {
    const BellScenario sc(2, d);
    RestartOptions opts;
    opts.restarts = 20;
    const auto res = optimize_with_restarts(sc, opts);
    const double target = cglmp_max_closed_form(d);
    o.check(std::abs(res.best.value - target) <= 1e-6,
            "d=" + std::to_string(d) + " best " + num(res.best.value) + " vs " + num(target));
    o.check(!res.best.exceeds_closed_form, "d=" + std::to_string(d) + " exceeded the closed form");
    if (o.pass) {
      o.detail << (d == 2 ? "" : ", ") << "d=" << d << ": best " << num(res.best.value) << " (|diff| "
               << num(std::abs(res.best.value - target)) << ")";
    }
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"1 CGLMP closed-form maxima", criterion1},
      {"2 simulation vs closed-form scaling", criterion2},
      {"3 HLNHV bound certification", criterion3},
      {"4 grouping verification", criterion4},
      {"5 critical visibility", criterion5},
      {"6 product states never violate", criterion6},
      {"7 oracle equivalences", criterion7},
      {"8 optimizer reproduces maxima", criterion8},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %s: %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.str().c_str(), secs);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
