#pragma once

// Bell scenario: N parties, two settings each, d outcomes per measurement,
// and the Bell functional I^N = -sum_I Q_I over all 2^N setting strings.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quditbell/rational.hpp"

namespace quditbell {

// Largest party count addressable by a SettingString mask.
inline constexpr int kMaxParties = 30;

class BellScenario {
 public:
  // Throws InputError unless 2 <= n_parties <= kMaxParties and dimension >= 2.
  BellScenario(int n_parties, int dimension);

  int n_parties() const { return n_parties_; }
  int dimension() const { return dimension_; }
  // (d - 1) / 2, exact.
  Rational spin() const { return Rational(dimension_ - 1, 2); }

  std::size_t setting_count() const { return std::size_t{1} << n_parties_; }
  // d^N. Throws BudgetExceeded if it does not fit in size_t.
  std::size_t outcome_count() const;

  friend bool operator==(const BellScenario&, const BellScenario&) = default;

 private:
  int n_parties_;
  int dimension_;
};

// One setting choice (1 or 2) per party. Bit n of the mask is set when
// party n (0-based) uses setting 2, so the mask doubles as the table index.
class SettingString {
 public:
  SettingString(int n_parties, std::uint32_t mask);

  // "121" means party 1 -> setting 1, party 2 -> setting 2, party 3 -> setting 1.
  static SettingString parse(std::string_view text);
  static std::vector<SettingString> all(int n_parties);

  int size() const { return n_; }
  std::uint32_t mask() const { return mask_; }
  int setting(int party) const { return ((mask_ >> party) & 1u) ? 2 : 1; }
  // Number of parties using setting 2.
  int t_count() const;
  std::string to_string() const;

  friend bool operator==(const SettingString&, const SettingString&) = default;

 private:
  int n_;
  std::uint32_t mask_;
};

struct OutcomeTuple {
  std::vector<int> outcomes;

  // Mixed-radix index, party 1 least significant.
  std::size_t index(int dimension) const;
  static OutcomeTuple from_index(std::size_t index, int n_parties, int dimension);
};

// P(x_1..x_N | setting) for every setting string, stored densely as one row
// of d^N probabilities per setting, indexed by SettingString::mask().
class JointProbabilityTable {
 public:
  static constexpr double kTolerance = 1e-9;

  // Validates shape and normalization. Entries in [-1e-9, 0) are clipped to
  // zero; anything more negative, or a row whose sum is off by more than
  // 1e-9, is an InputError.
  static JointProbabilityTable from_rows(const BellScenario& scenario,
                                         std::vector<std::vector<double>> rows);

  // P = 1/d^N everywhere.
  static JointProbabilityTable uniform(const BellScenario& scenario);

  // Probability 1 on outcome_index[s] for setting s.
  static JointProbabilityTable point_mass(const BellScenario& scenario,
                                          std::span<const std::size_t> outcome_index);

  const BellScenario& scenario() const { return scenario_; }
  std::span<const double> row(const SettingString& setting) const;
  std::span<const double> row(std::size_t mask) const { return rows_.at(mask); }
  double probability(const SettingString& setting, const OutcomeTuple& outcome) const;

 private:
  JointProbabilityTable(BellScenario scenario, std::vector<std::vector<double>> rows)
      : scenario_(scenario), rows_(std::move(rows)) {}

  BellScenario scenario_;
  std::vector<std::vector<double>> rows_;
};

// Representative of x mod d in [0, d-1]. Throws std::invalid_argument for d < 2.
int mod_d(std::int64_t x, int d);

// g1(a) = 1 - M(a, d)/S and g2(a) = 1 - M(-a, d)/S, with a the already
// shifted argument.
double g1(std::int64_t arg, const BellScenario& scenario);
double g2(std::int64_t arg, const BellScenario& scenario);

// s_t = 3 * (1 - floor(t/2)).
int shift(int t_count);

// (d-1) * f, which is an integer: coefficients are multiples of 1/S = 2/(d-1).
// Depends only on the t-count and the outcome sum.
int scaled_coefficient(int t_count, std::int64_t outcome_sum, int dimension);

// f^I(x_1..x_N, s_t): g1 of the shifted outcome sum for even t, g2 for odd t.
double coefficient(const SettingString& setting, const OutcomeTuple& outcome,
                   const BellScenario& scenario);

// Probability mass of each outcome-sum residue r in [0, d-1] for one row.
std::vector<double> residue_masses(std::span<const double> row, const BellScenario& scenario);

// Q_I = sum_x f^I(x) P(x | I).
double correlation_q(const SettingString& setting, const JointProbabilityTable& table);

// Q_I for every setting, indexed by mask.
std::vector<double> correlations(const JointProbabilityTable& table);

// I^N = -sum_I Q_I.
double bell_value(const JointProbabilityTable& table);

// Textbook CGLMP form for two parties, in g-notation:
//   g2(r11) + g1(r12) + g1(r21) - g1(r22),  r_ij = alpha_i + beta_j.
// Throws InputError unless N = 2.
double cglmp_value(const JointProbabilityTable& table);

// Shifts the setting-1 outcomes of both parties by +2 (mod d). With this
// relabeling cglmp_value(relabel_for_cglmp(T)) == bell_value(T).
JointProbabilityTable relabel_for_cglmp(const JointProbabilityTable& table);

// Reorders parties: party p of the input becomes party perm[p] of the output,
// for both settings and outcomes.
JointProbabilityTable permute_parties(const JointProbabilityTable& table,
                                      std::span<const int> perm);

}  // namespace quditbell
