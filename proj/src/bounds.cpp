#include "quditbell/bounds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "quditbell/errors.hpp"

namespace quditbell {

Bipartition::Bipartition(int n_parties, std::vector<int> block_a) : n_(n_parties) {
  if (n_parties < 2 || n_parties > kMaxParties) throw InputError("bipartition needs 2..30 parties");
  std::vector<bool> in_a(static_cast<std::size_t>(n_parties), false);
  for (int p : block_a) {
    if (p < 0 || p >= n_parties) {
      throw InputError("party " + std::to_string(p + 1) + " is out of range 1.." + std::to_string(n_parties));
    }
    if (in_a[static_cast<std::size_t>(p)]) throw InputError("party " + std::to_string(p + 1) + " listed twice");
    in_a[static_cast<std::size_t>(p)] = true;
  }
  if (block_a.empty() || static_cast<int>(block_a.size()) == n_parties) {
    throw InputError("both blocks of a bipartition must be non-empty");
  }
  if (!in_a[0]) {
    for (auto&& flag : in_a) flag = !flag;
  }
  for (int p = 0; p < n_parties; ++p) {
    (in_a[static_cast<std::size_t>(p)] ? a_ : b_).push_back(p);
  }
}

Bipartition Bipartition::parse(std::string_view text, int n_parties) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos || text.find('/', slash + 1) != std::string_view::npos) {
    throw InputError("partition must look like '1,2/3': '" + std::string(text) + "'");
  }
  auto parse_list = [&](std::string_view part) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos <= part.size()) {
      const auto comma = std::min(part.find(',', pos), part.size());
      const std::string_view item = part.substr(pos, comma - pos);
      if (item.empty() || item.find_first_not_of("0123456789") != std::string_view::npos || item.size() > 3) {
        throw InputError("partition entry '" + std::string(item) + "' is not a party number");
      }
      out.push_back(std::stoi(std::string(item)) - 1);
      pos = comma + 1;
    }
    return out;
  };
  const auto a = parse_list(text.substr(0, slash));
  const auto b = parse_list(text.substr(slash + 1));
  std::vector<int> seen(static_cast<std::size_t>(std::max(n_parties, 0)), 0);
  for (int p : a) {
    if (p < 0 || p >= n_parties) throw InputError("party " + std::to_string(p + 1) + " is out of range");
    ++seen[static_cast<std::size_t>(p)];
  }
  for (int p : b) {
    if (p < 0 || p >= n_parties) throw InputError("party " + std::to_string(p + 1) + " is out of range");
    ++seen[static_cast<std::size_t>(p)];
  }
  for (std::size_t p = 0; p < seen.size(); ++p) {
    if (seen[p] != 1) {
      throw InputError("party " + std::to_string(p + 1) + " must appear in exactly one block");
    }
  }
  return Bipartition(n_parties, a);
}

std::vector<Bipartition> Bipartition::all(int n_parties) {
  std::vector<Bipartition> out;
  // Masks containing party 0, excluding the full set.
  const std::uint32_t full = (1u << n_parties) - 1;
  for (std::uint32_t m = 1; m < full; m += 2) {
    std::vector<int> block;
    for (int p = 0; p < n_parties; ++p) {
      if ((m >> p) & 1u) block.push_back(p);
    }
    out.emplace_back(n_parties, std::move(block));
  }
  return out;
}

std::string Bipartition::to_string() const {
  std::ostringstream os;
  auto emit = [&](const std::vector<int>& block) {
    for (std::size_t i = 0; i < block.size(); ++i) os << (i ? "," : "") << block[i] + 1;
  };
  emit(a_);
  os << '/';
  emit(b_);
  return os.str();
}

std::uint32_t block_key(const SettingString& setting, const std::vector<int>& block) {
  std::uint32_t key = 0;
  for (std::size_t j = 0; j < block.size(); ++j) {
    if (setting.setting(block[j]) == 2) key |= 1u << j;
  }
  return key;
}

SettingString join_keys(int n_parties, const std::vector<int>& block_a, std::uint32_t key_a,
                        const std::vector<int>& block_b, std::uint32_t key_b) {
  std::uint32_t mask = 0;
  for (std::size_t j = 0; j < block_a.size(); ++j) {
    if ((key_a >> j) & 1u) mask |= 1u << block_a[j];
  }
  for (std::size_t j = 0; j < block_b.size(); ++j) {
    if ((key_b >> j) & 1u) mask |= 1u << block_b[j];
  }
  return SettingString(n_parties, mask);
}

namespace {

// Strategy space as a list of blocks; each block assigns one digit in Z_d
// per block-local setting combination. Digits are laid out block after
// block, keys in increasing order, so increasing strategy index is
// lexicographic order.
struct BlockLayout {
  int n = 0;
  int d = 0;
  std::vector<std::vector<int>> blocks;
  std::vector<std::size_t> offsets;          // first digit of each block
  std::size_t digit_count = 0;
  std::vector<std::vector<std::size_t>> positions;  // per setting, one digit per block
  std::vector<int> t_counts;                 // per setting
  std::vector<std::vector<int>> coef;        // [t][sum of digits], scaled by d-1

  BlockLayout(const BellScenario& scenario, std::vector<std::vector<int>> blocks_in)
      : n(scenario.n_parties()), d(scenario.dimension()), blocks(std::move(blocks_in)) {
    for (const auto& b : blocks) {
      offsets.push_back(digit_count);
      digit_count += std::size_t{1} << b.size();
    }
    for (const auto& s : SettingString::all(n)) {
      std::vector<std::size_t> pos;
      for (std::size_t b = 0; b < blocks.size(); ++b) pos.push_back(offsets[b] + block_key(s, blocks[b]));
      positions.push_back(std::move(pos));
      t_counts.push_back(s.t_count());
    }
    const int max_sum = static_cast<int>(blocks.size()) * (d - 1);
    coef.assign(static_cast<std::size_t>(n + 1), std::vector<int>(static_cast<std::size_t>(max_sum + 1)));
    for (int t = 0; t <= n; ++t) {
      for (int r = 0; r <= max_sum; ++r) {
        coef[static_cast<std::size_t>(t)][static_cast<std::size_t>(r)] = scaled_coefficient(t, r, d);
      }
    }
  }

  long double count() const {
    return std::pow(static_cast<long double>(d), static_cast<long double>(digit_count));
  }

  // (d-1) * value.
  std::int64_t scaled_value(const std::vector<int>& digits) const {
    std::int64_t total = 0;
    for (std::size_t s = 0; s < positions.size(); ++s) {
      int sum = 0;
      for (std::size_t p : positions[s]) sum += digits[p];
      total -= coef[static_cast<std::size_t>(t_counts[s])][static_cast<std::size_t>(sum)];
    }
    return total;
  }
};

struct EnumerationResult {
  std::int64_t best = 0;
  std::vector<int> digits;
  std::uint64_t count = 0;
};

EnumerationResult enumerate(const BlockLayout& layout, const EnumerationOptions& options,
                            const std::string& what) {
  const long double required = layout.count();
  if (required > static_cast<long double>(options.budget)) {
    std::ostringstream os;
    os.precision(6);
    os << what << " needs " << required << " strategies, budget is " << options.budget;
    throw BudgetExceeded(os.str(), required);
  }
  const auto total = static_cast<std::uint64_t>(std::llround(required));
  const auto d = static_cast<std::uint64_t>(layout.d);
  const std::size_t digits_n = layout.digit_count;

  struct Partial {
    bool found = false;
    std::int64_t best = std::numeric_limits<std::int64_t>::min();
    std::vector<int> digits;
  };
  std::vector<Partial> partials(std::max(1u, options.threads));

  const std::size_t chunks =
      parallel_chunks(total, std::max(1u, options.threads), [&](std::size_t c, std::size_t begin, std::size_t end) {
        std::vector<int> digits(digits_n, 0);
        std::uint64_t rest = begin;
        for (std::size_t i = digits_n; i-- > 0;) {
          digits[i] = static_cast<int>(rest % d);
          rest /= d;
        }
        Partial& mine = partials[c];
        for (std::uint64_t idx = begin; idx < end; ++idx) {
          const std::int64_t v = layout.scaled_value(digits);
          if (!mine.found || v > mine.best) {
            mine.found = true;
            mine.best = v;
            mine.digits = digits;
          }
          for (std::size_t i = digits_n; i-- > 0;) {
            if (++digits[i] < layout.d) break;
            digits[i] = 0;
          }
        }
      });

  EnumerationResult result;
  result.count = total;
  bool have = false;
  for (std::size_t c = 0; c < chunks; ++c) {
    if (partials[c].found && (!have || partials[c].best > result.best)) {
      have = true;
      result.best = partials[c].best;
      result.digits = partials[c].digits;
    }
  }
  return result;
}

std::vector<int> digits_of(const DeterministicStrategy& s) {
  std::vector<int> out(s.xi);
  out.insert(out.end(), s.zeta.begin(), s.zeta.end());
  return out;
}

std::vector<int> digits_of(const LocalStrategy& s) {
  std::vector<int> out;
  for (const auto& o : s.outcomes) {
    out.push_back(o[0]);
    out.push_back(o[1]);
  }
  return out;
}

std::vector<std::vector<int>> singleton_blocks(int n) {
  std::vector<std::vector<int>> blocks;
  for (int p = 0; p < n; ++p) blocks.push_back({p});
  return blocks;
}

void check_digit(int v, int d) {
  if (v < 0 || v >= d) throw InputError("strategy value " + std::to_string(v) + " outside [0, d-1]");
}

void validate_local(const LocalStrategy& strategy, const BellScenario& scenario) {
  if (static_cast<int>(strategy.outcomes.size()) != scenario.n_parties()) {
    throw InputError("local strategy needs one outcome pair per party");
  }
  for (const auto& o : strategy.outcomes) {
    check_digit(o[0], scenario.dimension());
    check_digit(o[1], scenario.dimension());
  }
}

}  // namespace

void validate_strategy(const DeterministicStrategy& strategy, const BellScenario& scenario) {
  const auto& part = strategy.partition;
  if (part.n_parties() != scenario.n_parties()) {
    throw InputError("strategy partition does not match the scenario's party count");
  }
  if (strategy.xi.size() != (std::size_t{1} << part.block_a().size()) ||
      strategy.zeta.size() != (std::size_t{1} << part.block_b().size())) {
    throw InputError("strategy maps must cover every setting combination of their block");
  }
  for (int v : strategy.xi) check_digit(v, scenario.dimension());
  for (int v : strategy.zeta) check_digit(v, scenario.dimension());
}

Rational strategy_bell_value(const DeterministicStrategy& strategy, const BellScenario& scenario) {
  validate_strategy(strategy, scenario);
  const BlockLayout layout(scenario, {strategy.partition.block_a(), strategy.partition.block_b()});
  return Rational(layout.scaled_value(digits_of(strategy)), scenario.dimension() - 1);
}

Rational strategy_bell_value(const LocalStrategy& strategy, const BellScenario& scenario) {
  validate_local(strategy, scenario);
  const BlockLayout layout(scenario, singleton_blocks(scenario.n_parties()));
  return Rational(layout.scaled_value(digits_of(strategy)), scenario.dimension() - 1);
}

JointProbabilityTable induced_table(const DeterministicStrategy& strategy, const BellScenario& scenario) {
  validate_strategy(strategy, scenario);
  const int n = scenario.n_parties();
  const int d = scenario.dimension();
  const auto& a = strategy.partition.block_a();
  const auto& b = strategy.partition.block_b();
  std::vector<std::size_t> index;
  for (const auto& s : SettingString::all(n)) {
    OutcomeTuple t;
    t.outcomes.assign(static_cast<std::size_t>(n), 0);
    t.outcomes[static_cast<std::size_t>(a.front())] = strategy.xi[block_key(s, a)];
    t.outcomes[static_cast<std::size_t>(b.front())] = strategy.zeta[block_key(s, b)];
    index.push_back(t.index(d));
  }
  return JointProbabilityTable::point_mass(scenario, index);
}

JointProbabilityTable induced_table(const LocalStrategy& strategy, const BellScenario& scenario) {
  validate_local(strategy, scenario);
  const int n = scenario.n_parties();
  std::vector<std::size_t> index;
  for (const auto& s : SettingString::all(n)) {
    OutcomeTuple t;
    for (int p = 0; p < n; ++p) {
      t.outcomes.push_back(strategy.outcomes[static_cast<std::size_t>(p)][static_cast<std::size_t>(s.setting(p) - 1)]);
    }
    index.push_back(t.index(scenario.dimension()));
  }
  return JointProbabilityTable::point_mass(scenario, index);
}

long double hlnhv_strategy_count(const BellScenario& scenario, const Bipartition& partition) {
  const std::size_t digits = (std::size_t{1} << partition.block_a().size()) + (std::size_t{1} << partition.block_b().size());
  return std::pow(static_cast<long double>(scenario.dimension()), static_cast<long double>(digits));
}

long double lhv_strategy_count(const BellScenario& scenario) {
  return std::pow(static_cast<long double>(scenario.dimension()), static_cast<long double>(2 * scenario.n_parties()));
}

HlnhvBound hlnhv_bound(const BellScenario& scenario, const Bipartition& partition,
                       const EnumerationOptions& options) {
  if (partition.n_parties() != scenario.n_parties()) {
    throw InputError("partition does not match the scenario's party count");
  }
  const auto& a = partition.block_a();
  const auto& b = partition.block_b();
  if (a.size() >= 63 || b.size() >= 63 || hlnhv_strategy_count(scenario, partition) > static_cast<long double>(options.budget)) {
    const long double required = hlnhv_strategy_count(scenario, partition);
    std::ostringstream os;
    os.precision(6);
    os << "HLNHV enumeration for partition " << partition.to_string() << " needs " << required
       << " strategies, budget is " << options.budget;
    throw BudgetExceeded(os.str(), required);
  }
  const BlockLayout layout(scenario, {a, b});
  const auto r = enumerate(layout, options, "HLNHV enumeration");
  HlnhvBound out{Rational(r.best, scenario.dimension() - 1),
                 DeterministicStrategy{partition, {}, {}}, r.count};
  const std::size_t na = std::size_t{1} << a.size();
  out.witness.xi.assign(r.digits.begin(), r.digits.begin() + static_cast<std::ptrdiff_t>(na));
  out.witness.zeta.assign(r.digits.begin() + static_cast<std::ptrdiff_t>(na), r.digits.end());
  return out;
}

LhvBound lhv_bound(const BellScenario& scenario, const EnumerationOptions& options) {
  if (lhv_strategy_count(scenario) > static_cast<long double>(options.budget)) {
    const long double required = lhv_strategy_count(scenario);
    std::ostringstream os;
    os.precision(6);
    os << "LHV enumeration needs " << required << " strategies, budget is " << options.budget;
    throw BudgetExceeded(os.str(), required);
  }
  const BlockLayout layout(scenario, singleton_blocks(scenario.n_parties()));
  const auto r = enumerate(layout, options, "LHV enumeration");
  LhvBound out{Rational(r.best, scenario.dimension() - 1), {}, r.count};
  for (std::size_t p = 0; p < static_cast<std::size_t>(scenario.n_parties()); ++p) {
    out.witness.outcomes.push_back({r.digits[2 * p], r.digits[2 * p + 1]});
  }
  return out;
}

std::int64_t t_multiplicity(int n_parties, int k) {
  if (k < 0) return 0;
  std::int64_t total = 0;
  std::int64_t binom = 1;  // C(N, i)
  for (int i = 0; i <= k; ++i) {
    if (i > 0) binom = binom * (n_parties - i + 1) / i;
    const std::int64_t sign = ((k - i) % 2 == 0) ? 1 : -1;
    total += sign * (k + 1 - i) * binom;
  }
  return total;
}

Grouping build_grouping(const BellScenario& scenario, const Bipartition& partition) {
  const int n = scenario.n_parties();
  if (partition.n_parties() != n) throw InputError("partition does not match the scenario's party count");
  const auto& a = partition.block_a();
  const auto& b = partition.block_b();

  // Pair every block-local key with bit 0 clear to the key with bit 0 set:
  // flipping the first party's setting raises the t-count by one.
  auto pairs = [](std::size_t block_size) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    for (std::uint32_t k = 0; k < (1u << block_size); k += 2) out.emplace_back(k, k | 1u);
    return out;
  };

  Grouping g{partition, {}, std::vector<std::int64_t>(static_cast<std::size_t>(n - 1), 0)};
  for (const auto& [ka, ka2] : pairs(a.size())) {
    for (const auto& [kb, kb2] : pairs(b.size())) {
      Quadruple q;
      q.key_a = ka;
      q.key_a_prime = ka2;
      q.key_b = kb;
      q.key_b_prime = kb2;
      q.settings = {join_keys(n, a, ka, b, kb), join_keys(n, a, ka, b, kb2), join_keys(n, a, ka2, b, kb),
                    join_keys(n, a, ka2, b, kb2)};
      q.base_t = q.settings[0].t_count();
      ++g.multiplicities[static_cast<std::size_t>(q.base_t)];
      g.groups.push_back(q);
    }
  }
  return g;
}

namespace {

void check_quadruple(const Quadruple& q, const Bipartition& part) {
  const auto& a = part.block_a();
  const auto& b = part.block_b();
  const int n = part.n_parties();
  const bool keys_ok = q.key_a < (1u << a.size()) && q.key_a_prime < (1u << a.size()) &&
                       q.key_b < (1u << b.size()) && q.key_b_prime < (1u << b.size()) &&
                       std::popcount(q.key_a_prime) == std::popcount(q.key_a) + 1 &&
                       std::popcount(q.key_b_prime) == std::popcount(q.key_b) + 1;
  if (!keys_ok) throw InputError("malformed quadruple: keys do not differ by one setting-2 count");
  const std::array<SettingString, 4> expect{
      join_keys(n, a, q.key_a, b, q.key_b), join_keys(n, a, q.key_a, b, q.key_b_prime),
      join_keys(n, a, q.key_a_prime, b, q.key_b), join_keys(n, a, q.key_a_prime, b, q.key_b_prime)};
  if (expect != q.settings || q.base_t != expect[0].t_count()) {
    throw InputError("malformed quadruple: settings do not match its block keys");
  }
}

}  // namespace

CglmpAssignment cglmp_substitution(const Quadruple& group, const DeterministicStrategy& strategy,
                                   const BellScenario& scenario) {
  validate_strategy(strategy, scenario);
  check_quadruple(group, strategy.partition);
  const int d = scenario.dimension();
  const int k = group.base_t;
  const int xa = strategy.xi[group.key_a];
  const int xa2 = strategy.xi[group.key_a_prime];
  CglmpAssignment out;
  out.beta1 = strategy.zeta[group.key_b];
  out.beta2 = strategy.zeta[group.key_b_prime];
  if (k % 2 == 0) {
    // xi_a = alpha1 + 3a, xi_a' = alpha2 + 3a with a = k/2.
    const int a = k / 2;
    out.alpha1 = mod_d(xa - 3 * a, d);
    out.alpha2 = mod_d(xa2 - 3 * a, d);
  } else {
    // xi_a = alpha2 + 3(b-1), xi_a' = alpha1 + 3b with b = (k+1)/2.
    const int bb = (k + 1) / 2;
    out.alpha2 = mod_d(xa - 3 * (bb - 1), d);
    out.alpha1 = mod_d(xa2 - 3 * bb, d);
  }
  return out;
}

Rational cglmp_deterministic_value(const CglmpAssignment& c, const BellScenario& scenario) {
  const int d = scenario.dimension();
  auto g1s = [&](std::int64_t x) { return (d - 1) - 2 * mod_d(x, d); };
  auto g2s = [&](std::int64_t x) { return (d - 1) - 2 * mod_d(-x, d); };
  const std::int64_t scaled = -g1s(c.alpha1 + c.beta1 + 3) - g2s(c.alpha1 + c.beta2 + 3) -
                              g2s(c.alpha2 + c.beta1 + 3) - g1s(c.alpha2 + c.beta2);
  return Rational(scaled, d - 1);
}

Rational group_value(const Quadruple& group, const DeterministicStrategy& strategy,
                     const BellScenario& scenario) {
  validate_strategy(strategy, scenario);
  check_quadruple(group, strategy.partition);
  const int d = scenario.dimension();
  const std::array<std::pair<std::uint32_t, std::uint32_t>, 4> keys{
      std::pair{group.key_a, group.key_b}, std::pair{group.key_a, group.key_b_prime},
      std::pair{group.key_a_prime, group.key_b}, std::pair{group.key_a_prime, group.key_b_prime}};
  std::int64_t scaled = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const int sum = strategy.xi[keys[i].first] + strategy.zeta[keys[i].second];
    scaled -= scaled_coefficient(group.settings[i].t_count(), sum, d);
  }
  return Rational(scaled, d - 1);
}

Rational verify_group_cglmp(const Quadruple& group, const DeterministicStrategy& strategy,
                            const BellScenario& scenario) {
  const Rational direct = group_value(group, strategy, scenario);
  const Rational via_cglmp = cglmp_deterministic_value(cglmp_substitution(group, strategy, scenario), scenario);
  if (direct != via_cglmp) {
    throw std::logic_error("quadruple value " + direct.to_string() + " differs from its CGLMP form " +
                           via_cglmp.to_string());
  }
  return direct;
}

Rational group_max(const Quadruple& group, const Bipartition& partition, const BellScenario& scenario) {
  const int d = scenario.dimension();
  DeterministicStrategy s{partition, std::vector<int>(std::size_t{1} << partition.block_a().size(), 0),
                          std::vector<int>(std::size_t{1} << partition.block_b().size(), 0)};
  std::optional<Rational> best;
  for (int v0 = 0; v0 < d; ++v0) {
    for (int v1 = 0; v1 < d; ++v1) {
      for (int v2 = 0; v2 < d; ++v2) {
        for (int v3 = 0; v3 < d; ++v3) {
          s.xi[group.key_a] = v0;
          s.xi[group.key_a_prime] = v1;
          s.zeta[group.key_b] = v2;
          s.zeta[group.key_b_prime] = v3;
          const Rational v = group_value(group, s, scenario);
          if (!best || v > *best) best = v;
        }
      }
    }
  }
  return *best;
}

}  // namespace quditbell
