#include <gtest/gtest.h>

#include <random>
#include <set>

#include "quditbell/bounds.hpp"
#include "quditbell/errors.hpp"

using namespace quditbell;

namespace {

DeterministicStrategy random_strategy(const BellScenario& sc, const Bipartition& part, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> digit(0, sc.dimension() - 1);
  DeterministicStrategy s{part, {}, {}};
  s.xi.resize(std::size_t{1} << part.block_a().size());
  s.zeta.resize(std::size_t{1} << part.block_b().size());
  for (auto& v : s.xi) v = digit(rng);
  for (auto& v : s.zeta) v = digit(rng);
  return s;
}

std::int64_t binomial(int n, int k) {
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

int t_count(const SettingString& s) {
  int t = 0;
  for (int p = 0; p < s.size(); ++p) t += s.setting(p) == 2;
  return t;
}

}  // namespace

TEST(Bipartition, ParseAndCanonicalize) {
  const auto p = Bipartition::parse("3/1,2", 3);
  EXPECT_EQ(p.block_a(), (std::vector<int>{0, 1}));
  EXPECT_EQ(p.block_b(), (std::vector<int>{2}));
  EXPECT_EQ(p, Bipartition(3, {2}));
  EXPECT_EQ(p.to_string(), "1,2/3");
  EXPECT_THROW(Bipartition::parse("1,2", 3), InputError);
  EXPECT_THROW(Bipartition::parse("1,2/2,3", 3), InputError);
  EXPECT_THROW(Bipartition::parse("1/4", 3), InputError);
  EXPECT_THROW(Bipartition(3, {}), InputError);
  EXPECT_THROW(Bipartition(3, {0, 1, 2}), InputError);
  EXPECT_EQ(Bipartition::all(3).size(), 3u);
  EXPECT_EQ(Bipartition::all(4).size(), 7u);
}

TEST(BlockKeys, JoinInvertsSplit) {
  const Bipartition part(5, {0, 2, 3});
  for (const auto& s : SettingString::all(5)) {
    const auto ka = block_key(s, part.block_a());
    const auto kb = block_key(s, part.block_b());
    EXPECT_EQ(join_keys(5, part.block_a(), ka, part.block_b(), kb).mask(), s.mask());
  }
}

TEST(StrategyValue, AllZeroStrategyForThreeQubits) {
  const BellScenario sc(3, 2);
  const DeterministicStrategy zero{Bipartition(3, {0, 1}), std::vector<int>(4, 0), std::vector<int>(2, 0)};
  EXPECT_EQ(strategy_bell_value(zero, sc), Rational(0));
  EXPECT_NEAR(bell_value(induced_table(zero, sc)), 0.0, 1e-12);
}

TEST(StrategyValue, MatchesBellValueOfInducedTable) {
  std::mt19937_64 rng(77);
  int checked = 0;
  for (auto [n, d] : {std::pair{2, 3}, std::pair{3, 2}, std::pair{3, 3}, std::pair{4, 2}, std::pair{4, 3}}) {
    const BellScenario sc(n, d);
    for (const auto& part : Bipartition::all(n)) {
      for (int k = 0; k < 10; ++k, ++checked) {
        const auto s = random_strategy(sc, part, rng);
        EXPECT_NEAR(strategy_bell_value(s, sc).to_double(), bell_value(induced_table(s, sc)), 1e-12);
      }
    }
  }
  EXPECT_GE(checked, 200);
}

TEST(StrategyValue, LocalStrategyMatchesInducedTable) {
  std::mt19937_64 rng(5);
  const BellScenario sc(3, 3);
  std::uniform_int_distribution<int> digit(0, 2);
  for (int k = 0; k < 50; ++k) {
    LocalStrategy s{std::vector<std::array<int, 2>>(3)};
    for (auto& o : s.outcomes) o = {digit(rng), digit(rng)};
    EXPECT_NEAR(strategy_bell_value(s, sc).to_double(), bell_value(induced_table(s, sc)), 1e-12);
  }
}

TEST(StrategyValue, RejectsInvalidStrategies) {
  const BellScenario sc(3, 2);
  const Bipartition part(3, {0, 1});
  EXPECT_THROW(validate_strategy({part, std::vector<int>(3, 0), std::vector<int>(2, 0)}, sc), InputError);
  EXPECT_THROW(validate_strategy({part, std::vector<int>{0, 0, 2, 0}, std::vector<int>(2, 0)}, sc), InputError);
  EXPECT_THROW(strategy_bell_value(DeterministicStrategy{part, {0, 0, 0, 0}, {0, -1}}, sc), InputError);
}

TEST(Hlnhv, KnownValues) {
  const auto b33 = hlnhv_bound(BellScenario(3, 3), Bipartition(3, {0, 1}));
  EXPECT_EQ(b33.bound, Rational(4));
  EXPECT_EQ(b33.strategies_enumerated, 729u);
  EXPECT_EQ(strategy_bell_value(b33.witness, BellScenario(3, 3)), Rational(4));

  const auto b42 = hlnhv_bound(BellScenario(4, 2), Bipartition(4, {0, 1}));
  EXPECT_EQ(b42.bound, Rational(8));
  EXPECT_EQ(b42.strategies_enumerated, 256u);

  EXPECT_EQ(hlnhv_bound(BellScenario(2, 5), Bipartition(2, {0})).bound, Rational(2));
  EXPECT_EQ(hlnhv_bound(BellScenario(3, 2), Bipartition(3, {0, 1})).bound, Rational(4));
}

TEST(Hlnhv, PartitionInvarianceAndAlgebraicCeiling) {
  for (auto [n, d] : {std::pair{3, 2}, std::pair{3, 3}, std::pair{4, 2}}) {
    const BellScenario sc(n, d);
    const Rational expect(std::int64_t{1} << (n - 1));
    for (const auto& part : Bipartition::all(n)) {
      const auto b = hlnhv_bound(sc, part);
      EXPECT_EQ(b.bound, expect) << part.to_string();
      EXPECT_LE(b.bound, Rational(std::int64_t{1} << n));
    }
  }
}

TEST(Hlnhv, WitnessIsIndependentOfThreadCount) {
  const BellScenario sc(3, 3);
  const Bipartition part(3, {0, 1});
  const auto ref = hlnhv_bound(sc, part, {kDefaultEnumerationBudget, 1});
  for (unsigned threads : {2u, 3u, 7u, 16u}) {
    const auto b = hlnhv_bound(sc, part, {kDefaultEnumerationBudget, threads});
    EXPECT_EQ(b.bound, ref.bound);
    EXPECT_EQ(b.witness.xi, ref.witness.xi);
    EXPECT_EQ(b.witness.zeta, ref.witness.zeta);
  }
}

// The witness is the least argmax: no lexicographically smaller strategy
// attains the bound.
TEST(Hlnhv, WitnessIsLexicographicallyLeast) {
  const BellScenario sc(3, 2);
  const Bipartition part(3, {0, 1});
  const auto b = hlnhv_bound(sc, part);
  std::vector<int> best_digits;
  for (std::uint32_t code = 0; code < 64; ++code) {
    DeterministicStrategy s{part, std::vector<int>(4), std::vector<int>(2)};
    std::vector<int> digits(6);
    // Most significant digit first, so increasing code is lexicographic order.
    for (int i = 0; i < 6; ++i) digits[static_cast<std::size_t>(i)] = (code >> (5 - i)) & 1u;
    std::copy(digits.begin(), digits.begin() + 4, s.xi.begin());
    std::copy(digits.begin() + 4, digits.end(), s.zeta.begin());
    if (strategy_bell_value(s, sc) == b.bound) {
      best_digits = digits;
      break;
    }
  }
  std::vector<int> witness(b.witness.xi);
  witness.insert(witness.end(), b.witness.zeta.begin(), b.witness.zeta.end());
  EXPECT_EQ(witness, best_digits);
}

TEST(Hlnhv, BudgetIsEnforced) {
  const BellScenario sc(3, 3);
  const Bipartition part(3, {0, 1});
  EXPECT_DOUBLE_EQ(static_cast<double>(hlnhv_strategy_count(sc, part)), 729.0);
  try {
    hlnhv_bound(sc, part, {700, 1});
    FAIL() << "expected BudgetExceeded";
  } catch (const BudgetExceeded& e) {
    EXPECT_DOUBLE_EQ(static_cast<double>(e.required()), 729.0);
  }
  EXPECT_THROW(hlnhv_bound(BellScenario(6, 4), Bipartition(6, {0, 1, 2})), BudgetExceeded);
}

TEST(Lhv, KnownValues) {
  const auto l22 = lhv_bound(BellScenario(2, 2));
  EXPECT_EQ(l22.bound, Rational(2));
  EXPECT_EQ(l22.strategies_enumerated, 16u);
  EXPECT_EQ(lhv_bound(BellScenario(2, 3)).bound, Rational(2));
  const auto l32 = lhv_bound(BellScenario(3, 2));
  EXPECT_LE(l32.bound, Rational(4));
  EXPECT_EQ(strategy_bell_value(l32.witness, BellScenario(3, 2)), l32.bound);
  EXPECT_EQ(l32.strategies_enumerated, 64u);
  EXPECT_THROW(lhv_bound(BellScenario(3, 3), {100, 1}), BudgetExceeded);
}

TEST(Lhv, NeverExceedsHlnhv) {
  for (auto [n, d] : {std::pair{2, 4}, std::pair{3, 3}, std::pair{4, 2}}) {
    const BellScenario sc(n, d);
    EXPECT_LE(lhv_bound(sc).bound, hlnhv_bound(sc, Bipartition::all(n).front()).bound);
  }
}

TEST(Grouping, MultiplicityFormulaMatchesBinomial) {
  for (int n = 2; n <= 12; ++n) {
    std::int64_t total = 0;
    for (int k = 0; k <= n - 2; ++k) {
      EXPECT_EQ(t_multiplicity(n, k), binomial(n - 2, k)) << "n=" << n << " k=" << k;
      total += t_multiplicity(n, k);
    }
    EXPECT_EQ(total, std::int64_t{1} << (n - 2));
  }
  EXPECT_EQ(t_multiplicity(4, 0), 1);
  EXPECT_EQ(t_multiplicity(4, 1), 2);
  EXPECT_EQ(t_multiplicity(4, 2), 1);
}

TEST(Grouping, PartitionsSettingsWithTheRightShape) {
  for (int n = 2; n <= 6; ++n) {
    const BellScenario sc(n, 2);
    for (const auto& part : Bipartition::all(n)) {
      const auto g = build_grouping(sc, part);
      ASSERT_EQ(g.groups.size(), std::size_t{1} << (n - 2));
      std::set<std::uint32_t> seen;
      std::vector<std::int64_t> counts(static_cast<std::size_t>(n - 1), 0);
      for (const auto& q : g.groups) {
        const int k = q.base_t;
        EXPECT_EQ(t_count(q.settings[0]), k);
        EXPECT_EQ(t_count(q.settings[1]), k + 1);
        EXPECT_EQ(t_count(q.settings[2]), k + 1);
        EXPECT_EQ(t_count(q.settings[3]), k + 2);
        for (const auto& s : q.settings) EXPECT_TRUE(seen.insert(s.mask()).second);
        ++counts[static_cast<std::size_t>(k)];
      }
      EXPECT_EQ(seen.size(), std::size_t{1} << n);
      for (int k = 0; k <= n - 2; ++k) {
        EXPECT_EQ(counts[static_cast<std::size_t>(k)], t_multiplicity(n, k));
        EXPECT_EQ(g.multiplicities[static_cast<std::size_t>(k)], t_multiplicity(n, k));
      }
    }
  }
}

TEST(Grouping, GroupValuesSumToStrategyValueAndMatchCglmp) {
  std::mt19937_64 rng(91);
  for (auto [n, d] : {std::pair{2, 3}, std::pair{3, 2}, std::pair{3, 3}, std::pair{4, 3}, std::pair{5, 2}}) {
    const BellScenario sc(n, d);
    for (const auto& part : Bipartition::all(n)) {
      const auto g = build_grouping(sc, part);
      for (int k = 0; k < 10; ++k) {
        const auto s = random_strategy(sc, part, rng);
        Rational total(0);
        for (const auto& q : g.groups) {
          const auto v = verify_group_cglmp(q, s, sc);
          EXPECT_LE(v, Rational(2));
          EXPECT_EQ(v, cglmp_deterministic_value(cglmp_substitution(q, s, sc), sc));
          total = total + v;
        }
        EXPECT_EQ(total, strategy_bell_value(s, sc));
      }
    }
  }
}

TEST(Grouping, EachGroupMaxIsTwoForThreeQubits) {
  const BellScenario sc(3, 2);
  for (const auto& part : Bipartition::all(3)) {
    const auto g = build_grouping(sc, part);
    for (const auto& q : g.groups) {
      EXPECT_EQ(group_max(q, part, sc), Rational(2));
      // Independent route: every strategy of the partition.
      Rational best(-100);
      const std::size_t na = std::size_t{1} << part.block_a().size();
      const std::size_t nb = std::size_t{1} << part.block_b().size();
      for (std::uint32_t code = 0; code < (1u << (na + nb)); ++code) {
        DeterministicStrategy s{part, std::vector<int>(na), std::vector<int>(nb)};
        for (std::size_t i = 0; i < na; ++i) s.xi[i] = (code >> i) & 1u;
        for (std::size_t i = 0; i < nb; ++i) s.zeta[i] = (code >> (na + i)) & 1u;
        best = std::max(best, group_value(q, s, sc));
      }
      EXPECT_EQ(best, Rational(2));
    }
  }
}

TEST(Grouping, MalformedQuadrupleIsRejected) {
  const BellScenario sc(3, 2);
  const Bipartition part(3, {0, 1});
  auto q = build_grouping(sc, part).groups.front();
  const DeterministicStrategy s{part, std::vector<int>(4, 0), std::vector<int>(2, 0)};
  std::swap(q.settings[0], q.settings[3]);
  EXPECT_THROW(verify_group_cglmp(q, s, sc), InputError);
}
