#pragma once

// Hidden-variable bounds of the Bell functional by exhaustive enumeration
// of deterministic strategies, plus the quadruple grouping that splits I^N
// into CGLMP-shaped pieces.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "quditbell/parallel.hpp"
#include "quditbell/rational.hpp"
#include "quditbell/scenario.hpp"

namespace quditbell {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 100'000'000;

// Two non-empty blocks of 0-based party indices. Always canonical: both
// blocks sorted and block_a contains party 0.
class Bipartition {
 public:
  // block_b is the complement of block_a. Throws InputError for empty or
  // full blocks, duplicates or out-of-range parties.
  Bipartition(int n_parties, std::vector<int> block_a);

  // "1,2/3": slash-separated, comma lists, 1-based. Both sides must be
  // given and together cover 1..N exactly once.
  static Bipartition parse(std::string_view text, int n_parties);
  // Every bipartition of n parties, canonical, in increasing order of the
  // block_a bitmask.
  static std::vector<Bipartition> all(int n_parties);

  int n_parties() const { return n_; }
  const std::vector<int>& block_a() const { return a_; }
  const std::vector<int>& block_b() const { return b_; }
  std::string to_string() const;

  friend bool operator==(const Bipartition&, const Bipartition&) = default;

 private:
  int n_;
  std::vector<int> a_;
  std::vector<int> b_;
};

// Setting string restricted to a block, as a block-local mask: bit j is set
// when the j-th party of the block uses setting 2.
std::uint32_t block_key(const SettingString& setting, const std::vector<int>& block);
// Inverse of block_key for a pair of complementary blocks.
SettingString join_keys(int n_parties, const std::vector<int>& block_a, std::uint32_t key_a,
                        const std::vector<int>& block_b, std::uint32_t key_b);

// One point of the HLNHV hidden-variable space: block A (block B) outputs
// an outcome sum xi (zeta) in Z_d for each of its setting combinations,
// indexed by block_key.
struct DeterministicStrategy {
  Bipartition partition;
  std::vector<int> xi;
  std::vector<int> zeta;
};

// Fully local deterministic assignment: outcomes[p][s-1] for party p, setting s.
struct LocalStrategy {
  std::vector<std::array<int, 2>> outcomes;
};

struct EnumerationOptions {
  std::uint64_t budget = kDefaultEnumerationBudget;
  unsigned threads = default_threads();
};

struct HlnhvBound {
  Rational bound;
  DeterministicStrategy witness;
  std::uint64_t strategies_enumerated = 0;
};

struct LhvBound {
  Rational bound;
  LocalStrategy witness;
  std::uint64_t strategies_enumerated = 0;
};

// Throws InputError if the maps are not total or values leave [0, d-1].
void validate_strategy(const DeterministicStrategy& strategy, const BellScenario& scenario);

// -sum_I f^I(xi_{I|A} + zeta_{I|B}, s_t), exact.
Rational strategy_bell_value(const DeterministicStrategy& strategy, const BellScenario& scenario);
Rational strategy_bell_value(const LocalStrategy& strategy, const BellScenario& scenario);

// Delta-distribution table realizing the strategy: the first party of each
// block carries the block's outcome sum, all other parties output 0.
JointProbabilityTable induced_table(const DeterministicStrategy& strategy, const BellScenario& scenario);
JointProbabilityTable induced_table(const LocalStrategy& strategy, const BellScenario& scenario);

// Strategy counts, as long double so oversize requests can be reported.
long double hlnhv_strategy_count(const BellScenario& scenario, const Bipartition& partition);
long double lhv_strategy_count(const BellScenario& scenario);

// Maximum over every deterministic strategy for the partition, with the
// lexicographically least argmax (xi then zeta, keys in increasing order).
// Throws BudgetExceeded when the count exceeds options.budget.
HlnhvBound hlnhv_bound(const BellScenario& scenario, const Bipartition& partition,
                       const EnumerationOptions& options = {});

// Maximum over fully local deterministic assignments (d^{2N} of them).
LhvBound lhv_bound(const BellScenario& scenario, const EnumerationOptions& options = {});

// Four setting strings (a b), (a b'), (a' b), (a' b') where a, a' are
// block-A keys with t(a') = t(a) + 1 and likewise b, b' on block B.
struct Quadruple {
  int base_t = 0;  // t-count of (a b)
  std::uint32_t key_a = 0;
  std::uint32_t key_a_prime = 0;
  std::uint32_t key_b = 0;
  std::uint32_t key_b_prime = 0;
  std::array<SettingString, 4> settings{SettingString(1, 0), SettingString(1, 0), SettingString(1, 0),
                                        SettingString(1, 0)};
};

struct Grouping {
  Bipartition partition;
  std::vector<Quadruple> groups;
  // Number of groups with base t-count k, k = 0..N-2.
  std::vector<std::int64_t> multiplicities;
};

// T(k) = sum_{i=0}^{k} (-1)^{k-i} (k+1-i) C(N, i).
std::int64_t t_multiplicity(int n_parties, int k);

Grouping build_grouping(const BellScenario& scenario, const Bipartition& partition);

// Outcome-sum variables of the two-party CGLMP expression
//   -g1(a1+b1+3) - g2(a1+b2+3) - g2(a2+b1+3) - g1(a2+b2)
// that a quadruple reduces to under the block strategy.
struct CglmpAssignment {
  int alpha1 = 0;
  int alpha2 = 0;
  int beta1 = 0;
  int beta2 = 0;
};

CglmpAssignment cglmp_substitution(const Quadruple& group, const DeterministicStrategy& strategy,
                                   const BellScenario& scenario);

// The two-party deterministic CGLMP value for the assignment, exact.
Rational cglmp_deterministic_value(const CglmpAssignment& assignment, const BellScenario& scenario);

// Sum of -f over the quadruple's four terms, evaluated directly.
Rational group_value(const Quadruple& group, const DeterministicStrategy& strategy,
                     const BellScenario& scenario);

// group_value, cross-checked against the CGLMP substitution route. Throws
// InputError for a malformed quadruple and std::logic_error if the two
// routes disagree.
Rational verify_group_cglmp(const Quadruple& group, const DeterministicStrategy& strategy,
                            const BellScenario& scenario);

// Max of group_value over all d^4 values of the quadruple's four free
// strategy entries.
Rational group_max(const Quadruple& group, const Bipartition& partition, const BellScenario& scenario);

}  // namespace quditbell
