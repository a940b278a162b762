#include "quditbell/scenario.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "quditbell/errors.hpp"

namespace quditbell {

BellScenario::BellScenario(int n_parties, int dimension)
    : n_parties_(n_parties), dimension_(dimension) {
  if (n_parties < 2 || n_parties > kMaxParties) {
    throw InputError("party count must be in [2, " + std::to_string(kMaxParties) +
                     "], got " + std::to_string(n_parties));
  }
  if (dimension < 2) {
    throw InputError("dimension must be >= 2, got " + std::to_string(dimension));
  }
}

std::size_t BellScenario::outcome_count() const {
  std::size_t count = 1;
  for (int i = 0; i < n_parties_; ++i) {
    if (count > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(dimension_)) {
      throw BudgetExceeded("d^N overflows", std::pow(static_cast<long double>(dimension_),
                                                      static_cast<long double>(n_parties_)));
    }
    count *= static_cast<std::size_t>(dimension_);
  }
  return count;
}

SettingString::SettingString(int n_parties, std::uint32_t mask) : n_(n_parties), mask_(mask) {
  if (n_parties < 1 || n_parties > kMaxParties) {
    throw std::invalid_argument("setting string length out of range");
  }
  if (n_parties < 32 && (mask >> n_parties) != 0) {
    throw std::invalid_argument("setting mask has bits beyond the party count");
  }
}

SettingString SettingString::parse(std::string_view text) {
  if (text.empty() || text.size() > static_cast<std::size_t>(kMaxParties)) {
    throw InputError("setting string must have 1.." + std::to_string(kMaxParties) +
                     " characters: '" + std::string(text) + "'");
  }
  std::uint32_t mask = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '2') {
      mask |= 1u << i;
    } else if (text[i] != '1') {
      throw InputError("setting string may only contain '1' and '2': '" + std::string(text) + "'");
    }
  }
  return SettingString(static_cast<int>(text.size()), mask);
}

std::vector<SettingString> SettingString::all(int n_parties) {
  std::vector<SettingString> out;
  const std::uint32_t count = 1u << n_parties;
  out.reserve(count);
  for (std::uint32_t m = 0; m < count; ++m) out.emplace_back(n_parties, m);
  return out;
}

int SettingString::t_count() const { return std::popcount(mask_); }

std::string SettingString::to_string() const {
  std::string s(static_cast<std::size_t>(n_), '1');
  for (int i = 0; i < n_; ++i) {
    if (setting(i) == 2) s[static_cast<std::size_t>(i)] = '2';
  }
  return s;
}

std::size_t OutcomeTuple::index(int dimension) const {
  std::size_t idx = 0;
  for (auto it = outcomes.rbegin(); it != outcomes.rend(); ++it) {
    if (*it < 0 || *it >= dimension) {
      throw std::invalid_argument("outcome out of range [0, d-1]");
    }
    idx = idx * static_cast<std::size_t>(dimension) + static_cast<std::size_t>(*it);
  }
  return idx;
}

OutcomeTuple OutcomeTuple::from_index(std::size_t index, int n_parties, int dimension) {
  OutcomeTuple t;
  t.outcomes.resize(static_cast<std::size_t>(n_parties));
  for (auto& x : t.outcomes) {
    x = static_cast<int>(index % static_cast<std::size_t>(dimension));
    index /= static_cast<std::size_t>(dimension);
  }
  return t;
}

JointProbabilityTable JointProbabilityTable::from_rows(const BellScenario& scenario,
                                                       std::vector<std::vector<double>> rows) {
  const std::size_t settings = scenario.setting_count();
  const std::size_t outcomes = scenario.outcome_count();
  if (rows.size() != settings) {
    throw InputError("expected " + std::to_string(settings) + " setting rows, got " +
                     std::to_string(rows.size()));
  }
  for (std::size_t s = 0; s < settings; ++s) {
    const std::string label = SettingString(scenario.n_parties(), static_cast<std::uint32_t>(s)).to_string();
    auto& row = rows[s];
    if (row.size() != outcomes) {
      throw InputError("setting " + label + ": expected " + std::to_string(outcomes) +
                       " probabilities, got " + std::to_string(row.size()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
      double& p = row[i];
      if (!std::isfinite(p)) {
        throw InputError("setting " + label + ": entry " + std::to_string(i) + " is not finite");
      }
      if (p < -kTolerance) {
        throw InputError("setting " + label + ": entry " + std::to_string(i) +
                         " is negative (" + std::to_string(p) + ")");
      }
      if (p < 0.0) p = 0.0;
      sum += p;
    }
    if (std::abs(sum - 1.0) > kTolerance) {
      throw InputError("setting " + label + ": probabilities sum to " + std::to_string(sum) +
                       ", expected 1");
    }
  }
  return JointProbabilityTable(scenario, std::move(rows));
}

JointProbabilityTable JointProbabilityTable::uniform(const BellScenario& scenario) {
  const std::size_t outcomes = scenario.outcome_count();
  std::vector<std::vector<double>> rows(scenario.setting_count(),
                                        std::vector<double>(outcomes, 1.0 / static_cast<double>(outcomes)));
  return JointProbabilityTable(scenario, std::move(rows));
}

JointProbabilityTable JointProbabilityTable::point_mass(const BellScenario& scenario,
                                                        std::span<const std::size_t> outcome_index) {
  const std::size_t outcomes = scenario.outcome_count();
  if (outcome_index.size() != scenario.setting_count()) {
    throw std::invalid_argument("point_mass: one outcome index per setting required");
  }
  std::vector<std::vector<double>> rows(scenario.setting_count(), std::vector<double>(outcomes, 0.0));
  for (std::size_t s = 0; s < rows.size(); ++s) {
    rows[s].at(outcome_index[s]) = 1.0;
  }
  return JointProbabilityTable(scenario, std::move(rows));
}

std::span<const double> JointProbabilityTable::row(const SettingString& setting) const {
  if (setting.size() != scenario_.n_parties()) {
    throw std::invalid_argument("setting string length does not match the scenario");
  }
  return rows_.at(setting.mask());
}

double JointProbabilityTable::probability(const SettingString& setting,
                                          const OutcomeTuple& outcome) const {
  if (static_cast<int>(outcome.outcomes.size()) != scenario_.n_parties()) {
    throw std::invalid_argument("outcome tuple length does not match the scenario");
  }
  return row(setting)[outcome.index(scenario_.dimension())];
}

int mod_d(std::int64_t x, int d) {
  if (d < 2) throw std::invalid_argument("mod_d: d must be >= 2");
  const std::int64_t r = x % d;
  return static_cast<int>(r < 0 ? r + d : r);
}

double g1(std::int64_t arg, const BellScenario& scenario) {
  const int d = scenario.dimension();
  return static_cast<double>((d - 1) - 2 * mod_d(arg, d)) / static_cast<double>(d - 1);
}

double g2(std::int64_t arg, const BellScenario& scenario) { return g1(-arg, scenario); }

int shift(int t_count) {
  if (t_count < 0) throw std::invalid_argument("shift: t-count must be non-negative");
  return 3 * (1 - t_count / 2);
}

int scaled_coefficient(int t_count, std::int64_t outcome_sum, int dimension) {
  const std::int64_t shifted = outcome_sum + shift(t_count);
  const int m = (t_count % 2 == 0) ? mod_d(shifted, dimension) : mod_d(-shifted, dimension);
  return (dimension - 1) - 2 * m;
}

double coefficient(const SettingString& setting, const OutcomeTuple& outcome,
                   const BellScenario& scenario) {
  if (setting.size() != scenario.n_parties() ||
      static_cast<int>(outcome.outcomes.size()) != scenario.n_parties()) {
    throw std::invalid_argument("coefficient: setting/outcome length does not match the scenario");
  }
  const std::int64_t sum = std::accumulate(outcome.outcomes.begin(), outcome.outcomes.end(), std::int64_t{0});
  const int d = scenario.dimension();
  return static_cast<double>(scaled_coefficient(setting.t_count(), sum, d)) / static_cast<double>(d - 1);
}

std::vector<double> residue_masses(std::span<const double> row, const BellScenario& scenario) {
  const int d = scenario.dimension();
  const int n = scenario.n_parties();
  std::vector<double> mass(static_cast<std::size_t>(d), 0.0);
  // Odometer over outcome digits, tracking the digit sum mod d.
  std::vector<int> digits(static_cast<std::size_t>(n), 0);
  int residue = 0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    mass[static_cast<std::size_t>(residue)] += row[i];
    for (int p = 0; p < n; ++p) {
      auto& dig = digits[static_cast<std::size_t>(p)];
      if (++dig < d) {
        residue = residue + 1 == d ? 0 : residue + 1;
        break;
      }
      dig = 0;
      // Rolled over: the digit dropped by d-1.
      residue = mod_d(residue - (d - 1), d);
    }
  }
  return mass;
}

double correlation_q(const SettingString& setting, const JointProbabilityTable& table) {
  const BellScenario& sc = table.scenario();
  const auto mass = residue_masses(table.row(setting), sc);
  const int d = sc.dimension();
  const int t = setting.t_count();
  double q = 0.0;
  for (int r = 0; r < d; ++r) {
    q += static_cast<double>(scaled_coefficient(t, r, d)) * mass[static_cast<std::size_t>(r)];
  }
  return q / static_cast<double>(d - 1);
}

std::vector<double> correlations(const JointProbabilityTable& table) {
  std::vector<double> out;
  for (const auto& s : SettingString::all(table.scenario().n_parties())) {
    out.push_back(correlation_q(s, table));
  }
  return out;
}

double bell_value(const JointProbabilityTable& table) {
  double sum = 0.0;
  for (double q : correlations(table)) sum += q;
  return -sum;
}

double cglmp_value(const JointProbabilityTable& table) {
  const BellScenario& sc = table.scenario();
  if (sc.n_parties() != 2) {
    throw InputError("cglmp_value requires exactly two parties");
  }
  const int d = sc.dimension();
  double total = 0.0;
  for (const auto& s : SettingString::all(2)) {
    const auto mass = residue_masses(table.row(s), sc);
    for (int r = 0; r < d; ++r) {
      double f = 0.0;
      switch (s.mask()) {
        case 0b00: f = g2(r, sc); break;              // 11
        case 0b10: case 0b01: f = g1(r, sc); break;   // 12, 21
        case 0b11: f = -g1(r, sc); break;             // 22
      }
      total += f * mass[static_cast<std::size_t>(r)];
    }
  }
  return total;
}

JointProbabilityTable relabel_for_cglmp(const JointProbabilityTable& table) {
  const BellScenario& sc = table.scenario();
  if (sc.n_parties() != 2) {
    throw InputError("relabel_for_cglmp requires exactly two parties");
  }
  const int d = sc.dimension();
  std::vector<std::vector<double>> rows(sc.setting_count());
  for (const auto& s : SettingString::all(2)) {
    const auto src = table.row(s);
    auto& dst = rows[s.mask()];
    dst.assign(src.size(), 0.0);
    const int shift_a = s.setting(0) == 1 ? 2 : 0;
    const int shift_b = s.setting(1) == 1 ? 2 : 0;
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        const int a2 = mod_d(a + shift_a, d);
        const int b2 = mod_d(b + shift_b, d);
        dst[static_cast<std::size_t>(a2 + d * b2)] = src[static_cast<std::size_t>(a + d * b)];
      }
    }
  }
  return JointProbabilityTable::from_rows(sc, std::move(rows));
}

JointProbabilityTable permute_parties(const JointProbabilityTable& table, std::span<const int> perm) {
  const BellScenario& sc = table.scenario();
  const int n = sc.n_parties();
  const int d = sc.dimension();
  if (static_cast<int>(perm.size()) != n) {
    throw std::invalid_argument("permutation length does not match the party count");
  }
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int p : perm) {
    if (p < 0 || p >= n || seen[static_cast<std::size_t>(p)]) {
      throw std::invalid_argument("not a permutation");
    }
    seen[static_cast<std::size_t>(p)] = true;
  }
  const std::size_t outcomes = sc.outcome_count();
  std::vector<std::vector<double>> rows(sc.setting_count(), std::vector<double>(outcomes));
  for (std::uint32_t m = 0; m < sc.setting_count(); ++m) {
    std::uint32_t pm = 0;
    for (int p = 0; p < n; ++p) {
      if ((m >> p) & 1u) pm |= 1u << perm[static_cast<std::size_t>(p)];
    }
    const auto src = table.row(m);
    for (std::size_t i = 0; i < outcomes; ++i) {
      auto t = OutcomeTuple::from_index(i, n, d);
      OutcomeTuple moved;
      moved.outcomes.resize(static_cast<std::size_t>(n));
      for (int p = 0; p < n; ++p) {
        moved.outcomes[static_cast<std::size_t>(perm[static_cast<std::size_t>(p)])] =
            t.outcomes[static_cast<std::size_t>(p)];
      }
      rows[pm][moved.index(d)] = src[i];
    }
  }
  return JointProbabilityTable::from_rows(sc, std::move(rows));
}

}  // namespace quditbell
