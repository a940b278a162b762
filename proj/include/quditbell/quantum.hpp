#pragma once

// N-qudit states, multiport-beamsplitter measurements and the joint
// probabilities they produce.
//
// Measurement model: party n with phase vector phi applies
//   U_kl(phi) = w^{kl} exp(i phi_l) / sqrt(d),   w = exp(2 pi i / d),
// to its qudit and then reads the computational basis, so
//   P(x | I) = <x| (U_1 x ... x U_N) rho (U_1 x ... x U_N)^dag |x>.

#include <complex>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "quditbell/scenario.hpp"

namespace quditbell {

using cplx = std::complex<double>;

// Largest d^N accepted by the dense matrix path.
inline constexpr std::size_t kDenseDimensionLimit = 4096;

// Density matrix on (C^d)^{xN}, row-major, party 1 least significant in
// both row and column indices.
class DensityMatrix {
 public:
  static constexpr double kHermitianTolerance = 1e-12;
  static constexpr double kTraceTolerance = 1e-12;
  static constexpr double kPsdTolerance = 1e-10;

  // Validates Hermiticity, unit trace and positive semidefiniteness.
  static DensityMatrix from_entries(int n_parties, int dimension, std::vector<cplx> entries);
  // |psi><psi| for a normalized copy of the amplitudes.
  static DensityMatrix from_pure(int n_parties, int dimension, std::span<const cplx> amplitudes);
  static DensityMatrix maximally_mixed(int n_parties, int dimension);

  int n_parties() const { return n_; }
  int dimension() const { return d_; }
  // d^N.
  std::size_t size() const { return size_; }
  BellScenario scenario() const { return BellScenario(n_, d_); }

  std::span<const cplx> entries() const { return entries_; }
  cplx operator()(std::size_t row, std::size_t col) const { return entries_[row * size_ + col]; }

  double trace() const;
  // Tr(rho^2).
  double purity() const;
  double min_eigenvalue() const;

 private:
  DensityMatrix(int n, int d, std::size_t size, std::vector<cplx> entries)
      : n_(n), d_(d), size_(size), entries_(std::move(entries)) {}

  friend DensityMatrix mix_with_noise(const DensityMatrix&, double);
  friend DensityMatrix product_state(const DensityMatrix&, const DensityMatrix&, std::span<const int>);

  int n_;
  int d_;
  std::size_t size_;
  std::vector<cplx> entries_;
};

// Per party, per setting phase vectors of length d (radians).
class PhaseConfiguration {
 public:
  // All phases zero.
  PhaseConfiguration(int n_parties, int dimension);

  int n_parties() const { return n_; }
  int dimension() const { return d_; }

  // party is 0-based, setting is 1 or 2.
  std::span<const double> phases(int party, int setting) const;
  void set_phases(int party, int setting, std::span<const double> values);

  // All 2*N*d values, party-major then setting then entry.
  std::span<const double> flat() const { return values_; }
  std::span<double> flat_mut() { return values_; }

  friend bool operator==(const PhaseConfiguration&, const PhaseConfiguration&) = default;

 private:
  std::size_t offset(int party, int setting) const;

  int n_;
  int d_;
  std::vector<double> values_;
};

class MultiportUnitary {
 public:
  explicit MultiportUnitary(std::span<const double> phases);

  int dimension() const { return d_; }
  cplx operator()(int row, int col) const {
    return entries_[static_cast<std::size_t>(row * d_ + col)];
  }
  std::span<const cplx> entries() const { return entries_; }

 private:
  int d_;
  std::vector<cplx> entries_;
};

enum class SignConvention { Plus, Minus };

// (1/sqrt(d)) sum_j |j j ... j>.
DensityMatrix ghz_state(const BellScenario& scenario);

// Entry (k, l) = w^{kl} e^{i phi_l} / sqrt(d).
MultiportUnitary multiport_unitary(std::span<const double> phases);

// Dense path. Throws BudgetExceeded when d^N > kDenseDimensionLimit.
// Settings are processed independently; `threads` only changes wall time.
JointProbabilityTable joint_probabilities(const DensityMatrix& rho, const PhaseConfiguration& config,
                                          unsigned threads = 1);

// GHZ probability from the analytic reduction:
//   (1/d^{N+1}) |sum_j exp(i s [sum_n phi^{(n, I_n)}_j + 2 pi j sum_n x_n / d])|^2
// with s = +1 (Plus) or -1 (Minus). Plus matches the dense path.
double ghz_probability_closed_form(const PhaseConfiguration& config, const SettingString& setting,
                                   const OutcomeTuple& outcome,
                                   SignConvention sign = SignConvention::Plus);

// Full table from the closed form; no d^N x d^N matrices involved.
JointProbabilityTable ghz_joint_probabilities(const PhaseConfiguration& config,
                                              SignConvention sign = SignConvention::Plus);

// bell_value(ghz_joint_probabilities(config)) in O(2^N d^2 N) without
// materializing the table.
double ghz_bell_value(const PhaseConfiguration& config);

// V rho + (1 - V) 1/d^N. Throws InputError unless 0 <= V <= 1.
DensityMatrix mix_with_noise(const DensityMatrix& rho, double visibility);

// rho_A on the parties listed in block_a (0-based, sorted), rho_B on the rest.
DensityMatrix product_state(const DensityMatrix& rho_a, const DensityMatrix& rho_b,
                            std::span<const int> block_a);
// rho_A on parties 1..m, rho_B on m+1..N.
DensityMatrix product_state(const DensityMatrix& rho_a, const DensityMatrix& rho_b);

// G G^dag / Tr(G G^dag) for a complex Gaussian d^N x rank matrix G.
DensityMatrix random_density_matrix(int n_parties, int dimension, int rank, std::mt19937_64& rng);

// Phases drawn uniformly from [0, 2 pi).
PhaseConfiguration random_phases(int n_parties, int dimension, std::mt19937_64& rng);

}  // namespace quditbell
