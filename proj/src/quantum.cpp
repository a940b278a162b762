#include "quditbell/quantum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "quditbell/errors.hpp"
#include "quditbell/kernels.hpp"
#include "quditbell/parallel.hpp"

namespace quditbell {

namespace {

std::size_t checked_power(int d, int n) {
  if (n < 1) throw InputError("party count must be >= 1");
  if (d < 2) throw InputError("dimension must be >= 2");
  std::size_t size = 1;
  for (int i = 0; i < n; ++i) {
    size *= static_cast<std::size_t>(d);
    if (size > kDenseDimensionLimit) {
      throw BudgetExceeded("dense path limited to d^N <= " + std::to_string(kDenseDimensionLimit) +
                               "; use the GHZ closed-form path",
                           std::pow(static_cast<long double>(d), static_cast<long double>(n)));
    }
  }
  return size;
}

// out = (I x ... x U x ... x I) in, acting on the row digit of `party`.
// Rows are contiguous runs of `row_len` entries.
void apply_row_transform(const MultiportUnitary& u, int party, std::size_t rows, std::size_t row_len,
                         std::span<const cplx> in, std::span<cplx> out) {
  const auto d = static_cast<std::size_t>(u.dimension());
  std::size_t stride = row_len;
  for (int p = 0; p < party; ++p) stride *= d;
  const std::size_t outer = rows * row_len / (stride * d);
  std::fill(out.begin(), out.end(), cplx{});
  for (std::size_t o = 0; o < outer; ++o) {
    const std::size_t base = o * stride * d;
    for (std::size_t k = 0; k < d; ++k) {
      auto dst = out.subspan(base + k * stride, stride);
      for (std::size_t l = 0; l < d; ++l) {
        kernels::caxpy(u(static_cast<int>(k), static_cast<int>(l)), in.subspan(base + l * stride, stride), dst);
      }
    }
  }
}

}  // namespace

DensityMatrix DensityMatrix::from_entries(int n_parties, int dimension, std::vector<cplx> entries) {
  const std::size_t size = checked_power(dimension, n_parties);
  if (entries.size() != size * size) {
    throw InputError("density matrix needs " + std::to_string(size * size) + " entries, got " +
                     std::to_string(entries.size()));
  }
  DensityMatrix rho(n_parties, dimension, size, std::move(entries));
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = i; j < size; ++j) {
      if (std::abs(rho(i, j) - std::conj(rho(j, i))) > kHermitianTolerance) {
        throw InputError("density matrix is not Hermitian at (" + std::to_string(i) + ", " +
                         std::to_string(j) + ")");
      }
    }
  }
  if (std::abs(rho.trace() - 1.0) > kTraceTolerance) {
    throw InputError("density matrix trace is " + std::to_string(rho.trace()) + ", expected 1");
  }
  if (rho.min_eigenvalue() < -kPsdTolerance) {
    throw InputError("density matrix is not positive semidefinite");
  }
  return rho;
}

DensityMatrix DensityMatrix::from_pure(int n_parties, int dimension, std::span<const cplx> amplitudes) {
  const std::size_t size = checked_power(dimension, n_parties);
  if (amplitudes.size() != size) {
    throw InputError("state vector needs " + std::to_string(size) + " amplitudes");
  }
  const double norm2 = kernels::cdotc(amplitudes, amplitudes).real();
  if (!(norm2 > 0.0)) throw InputError("state vector has zero norm");
  std::vector<cplx> entries(size * size);
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      entries[i * size + j] = amplitudes[i] * std::conj(amplitudes[j]) / norm2;
    }
  }
  return DensityMatrix(n_parties, dimension, size, std::move(entries));
}

DensityMatrix DensityMatrix::maximally_mixed(int n_parties, int dimension) {
  const std::size_t size = checked_power(dimension, n_parties);
  std::vector<cplx> entries(size * size);
  for (std::size_t i = 0; i < size; ++i) entries[i * size + i] = 1.0 / static_cast<double>(size);
  return DensityMatrix(n_parties, dimension, size, std::move(entries));
}

double DensityMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < size_; ++i) t += entries_[i * size_ + i].real();
  return t;
}

double DensityMatrix::purity() const {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return kernels::cdotc(entries_, entries_).real();
}

double DensityMatrix::min_eigenvalue() const {
  using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const auto n = static_cast<Eigen::Index>(size_);
  const Eigen::Map<const Mat> m(entries_.data(), n, n);
  Eigen::SelfAdjointEigenSolver<Mat> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalue solver did not converge");
  }
  return solver.eigenvalues().minCoeff();
}

PhaseConfiguration::PhaseConfiguration(int n_parties, int dimension) : n_(n_parties), d_(dimension) {
  if (n_parties < 1 || dimension < 2) {
    throw InputError("phase configuration needs n >= 1 and d >= 2");
  }
  values_.assign(static_cast<std::size_t>(2 * n_parties * dimension), 0.0);
}

std::size_t PhaseConfiguration::offset(int party, int setting) const {
  if (party < 0 || party >= n_) throw std::out_of_range("party index out of range");
  if (setting != 1 && setting != 2) throw std::out_of_range("setting must be 1 or 2");
  return static_cast<std::size_t>((party * 2 + (setting - 1)) * d_);
}

std::span<const double> PhaseConfiguration::phases(int party, int setting) const {
  return std::span<const double>(values_).subspan(offset(party, setting), static_cast<std::size_t>(d_));
}

void PhaseConfiguration::set_phases(int party, int setting, std::span<const double> values) {
  if (values.size() != static_cast<std::size_t>(d_)) {
    throw InputError("phase vector must have exactly d = " + std::to_string(d_) + " entries");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw InputError("phase values must be finite");
  }
  std::copy(values.begin(), values.end(), values_.begin() + static_cast<std::ptrdiff_t>(offset(party, setting)));
}

MultiportUnitary::MultiportUnitary(std::span<const double> phases)
    : d_(static_cast<int>(phases.size())) {
  if (d_ < 2) throw InputError("multiport unitary needs d >= 2 phases");
  entries_.resize(static_cast<std::size_t>(d_ * d_));
  const double norm = 1.0 / std::sqrt(static_cast<double>(d_));
  for (int k = 0; k < d_; ++k) {
    for (int l = 0; l < d_; ++l) {
      // Reduce k*l mod d before scaling so w^{kl} stays accurate for large d.
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((k * l) % d_) / d_ +
                           phases[static_cast<std::size_t>(l)];
      entries_[static_cast<std::size_t>(k * d_ + l)] = std::polar(norm, angle);
    }
  }
}

MultiportUnitary multiport_unitary(std::span<const double> phases) { return MultiportUnitary(phases); }

DensityMatrix ghz_state(const BellScenario& scenario) {
  const int n = scenario.n_parties();
  const int d = scenario.dimension();
  const std::size_t size = checked_power(d, n);
  std::vector<cplx> psi(size);
  // |j j ... j> has index j * (1 + d + ... + d^{N-1}).
  std::size_t step = 0;
  for (std::size_t p = 0, pow = 1; p < static_cast<std::size_t>(n); ++p, pow *= static_cast<std::size_t>(d)) {
    step += pow;
  }
  for (int j = 0; j < d; ++j) psi[static_cast<std::size_t>(j) * step] = 1.0;
  return DensityMatrix::from_pure(n, d, psi);
}

JointProbabilityTable joint_probabilities(const DensityMatrix& rho, const PhaseConfiguration& config,
                                          unsigned threads) {
  const int n = rho.n_parties();
  const int d = rho.dimension();
  if (config.n_parties() != n || config.dimension() != d) {
    throw InputError("phase configuration does not match the state's (N, d)");
  }
  const BellScenario scenario(n, d);
  const std::size_t size = rho.size();
  const std::size_t settings = scenario.setting_count();

  // Two d^N x d^N work buffers per worker.
  const std::size_t bytes_per_worker = 2 * size * size * sizeof(cplx);
  const std::size_t memory_cap = std::size_t{1} << 31;
  const unsigned workers =
      std::max<unsigned>(1, std::min<unsigned>(threads, static_cast<unsigned>(memory_cap / bytes_per_worker)));

  std::vector<std::vector<double>> rows(settings);
  parallel_chunks(settings, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<cplx> a(size * size);
    std::vector<cplx> b(size * size);
    std::vector<cplx> w_row(size);
    for (std::size_t s = begin; s < end; ++s) {
      const SettingString setting(n, static_cast<std::uint32_t>(s));
      std::vector<MultiportUnitary> us;
      us.reserve(static_cast<std::size_t>(n));
      for (int p = 0; p < n; ++p) us.emplace_back(config.phases(p, setting.setting(p)));

      // a <- W rho, one party at a time.
      std::copy(rho.entries().begin(), rho.entries().end(), a.begin());
      for (int p = 0; p < n; ++p) {
        apply_row_transform(us[static_cast<std::size_t>(p)], p, size, size, a, b);
        std::swap(a, b);
      }

      // P(x) = (W rho W^dag)_xx = sum_k conj(W_xk) (W rho)_xk.
      auto& row = rows[s];
      row.resize(size);
      for (std::size_t x = 0; x < size; ++x) {
        std::size_t len = 1;
        std::size_t rest = x;
        w_row[0] = 1.0;
        for (int p = 0; p < n; ++p) {
          const int xp = static_cast<int>(rest % static_cast<std::size_t>(d));
          rest /= static_cast<std::size_t>(d);
          const auto& u = us[static_cast<std::size_t>(p)];
          for (int k = d - 1; k >= 0; --k) {
            const cplx f = u(xp, k);
            for (std::size_t j = 0; j < len; ++j) {
              w_row[static_cast<std::size_t>(k) * len + j] = w_row[j] * f;
            }
          }
          len *= static_cast<std::size_t>(d);
        }
        const auto m_row = std::span<const cplx>(a).subspan(x * size, size);
        row[x] = kernels::cdotc(std::span<const cplx>(w_row), m_row).real();
      }
    }
  });
  return JointProbabilityTable::from_rows(scenario, std::move(rows));
}

namespace {

// |sum_j exp(i s [phase_sum_j + 2 pi j r / d])|^2
double coherent_intensity(std::span<const double> phase_sum, int residue, double sign) {
  const int d = static_cast<int>(phase_sum.size());
  cplx acc{};
  for (int j = 0; j < d; ++j) {
    const double angle = phase_sum[static_cast<std::size_t>(j)] +
                         sign * 2.0 * std::numbers::pi * static_cast<double>((j * residue) % d) / d;
    acc += std::polar(1.0, angle);
  }
  return std::norm(acc);
}

std::vector<double> setting_phase_sum(const PhaseConfiguration& config, const SettingString& setting) {
  std::vector<double> sum(static_cast<std::size_t>(config.dimension()), 0.0);
  for (int p = 0; p < config.n_parties(); ++p) {
    const auto ph = config.phases(p, setting.setting(p));
    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += ph[j];
  }
  return sum;
}

}  // namespace

double ghz_probability_closed_form(const PhaseConfiguration& config, const SettingString& setting,
                                   const OutcomeTuple& outcome, SignConvention sign) {
  const int n = config.n_parties();
  const int d = config.dimension();
  if (setting.size() != n || static_cast<int>(outcome.outcomes.size()) != n) {
    throw InputError("setting/outcome length does not match the phase configuration");
  }
  std::int64_t total = 0;
  for (int x : outcome.outcomes) total += x;
  const auto phase_sum = setting_phase_sum(config, setting);
  const double s = sign == SignConvention::Plus ? 1.0 : -1.0;
  return coherent_intensity(phase_sum, mod_d(total, d), s) / std::pow(static_cast<double>(d), n + 1);
}

JointProbabilityTable ghz_joint_probabilities(const PhaseConfiguration& config, SignConvention sign) {
  const BellScenario scenario(config.n_parties(), config.dimension());
  const int n = scenario.n_parties();
  const int d = scenario.dimension();
  const std::size_t outcomes = scenario.outcome_count();
  const double s = sign == SignConvention::Plus ? 1.0 : -1.0;
  const double norm = std::pow(static_cast<double>(d), n + 1);

  std::vector<std::vector<double>> rows(scenario.setting_count());
  for (const auto& setting : SettingString::all(n)) {
    const auto phase_sum = setting_phase_sum(config, setting);
    std::vector<double> by_residue(static_cast<std::size_t>(d));
    for (int r = 0; r < d; ++r) by_residue[static_cast<std::size_t>(r)] = coherent_intensity(phase_sum, r, s) / norm;
    auto& row = rows[setting.mask()];
    row.resize(outcomes);
    // Outcome index digits are little-endian; track the digit sum mod d.
    std::vector<int> digits(static_cast<std::size_t>(n), 0);
    int residue = 0;
    for (std::size_t i = 0; i < outcomes; ++i) {
      row[i] = by_residue[static_cast<std::size_t>(residue)];
      for (int p = 0; p < n; ++p) {
        auto& dig = digits[static_cast<std::size_t>(p)];
        if (++dig < d) {
          residue = (residue + 1) % d;
          break;
        }
        dig = 0;
        residue = mod_d(residue - (d - 1), d);
      }
    }
  }
  return JointProbabilityTable::from_rows(scenario, std::move(rows));
}

double ghz_bell_value(const PhaseConfiguration& config) {
  const BellScenario scenario(config.n_parties(), config.dimension());
  const int d = scenario.dimension();
  double total_q = 0.0;
  for (const auto& setting : SettingString::all(scenario.n_parties())) {
    const auto phase_sum = setting_phase_sum(config, setting);
    const int t = setting.t_count();
    double q = 0.0;
    for (int r = 0; r < d; ++r) {
      // d^{N-1} outcome tuples share residue r, each with probability
      // intensity / d^{N+1}.
      const double mass = coherent_intensity(phase_sum, r, 1.0) / static_cast<double>(d * d);
      q += static_cast<double>(scaled_coefficient(t, r, d)) * mass;
    }
    total_q += q / static_cast<double>(d - 1);
  }
  return -total_q;
}

DensityMatrix mix_with_noise(const DensityMatrix& rho, double visibility) {
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw InputError("visibility must lie in [0, 1]");
  }
  const std::size_t size = rho.size();
  std::vector<cplx> entries(rho.entries().begin(), rho.entries().end());
  for (auto& e : entries) e *= visibility;
  const double noise = (1.0 - visibility) / static_cast<double>(size);
  for (std::size_t i = 0; i < size; ++i) entries[i * size + i] += noise;
  return DensityMatrix(rho.n_parties(), rho.dimension(), size, std::move(entries));
}

DensityMatrix product_state(const DensityMatrix& rho_a, const DensityMatrix& rho_b,
                            std::span<const int> block_a) {
  const int d = rho_a.dimension();
  if (rho_b.dimension() != d) throw InputError("product_state: factor dimensions differ");
  const int na = rho_a.n_parties();
  const int nb = rho_b.n_parties();
  const int n = na + nb;
  if (static_cast<int>(block_a.size()) != na) {
    throw InputError("product_state: block size does not match the first factor");
  }
  std::vector<bool> in_a(static_cast<std::size_t>(n), false);
  for (std::size_t i = 0; i < block_a.size(); ++i) {
    const int p = block_a[i];
    if (p < 0 || p >= n || in_a[static_cast<std::size_t>(p)] || (i > 0 && block_a[i - 1] >= p)) {
      throw InputError("product_state: block must be sorted distinct party indices");
    }
    in_a[static_cast<std::size_t>(p)] = true;
  }
  const std::size_t size = checked_power(d, n);

  // Split every full index into its (A, B) sub-indices.
  std::vector<std::size_t> ia(size), ib(size);
  for (std::size_t i = 0; i < size; ++i) {
    std::size_t rest = i, a = 0, b = 0, pa = 1, pb = 1;
    for (int p = 0; p < n; ++p) {
      const std::size_t digit = rest % static_cast<std::size_t>(d);
      rest /= static_cast<std::size_t>(d);
      if (in_a[static_cast<std::size_t>(p)]) {
        a += digit * pa;
        pa *= static_cast<std::size_t>(d);
      } else {
        b += digit * pb;
        pb *= static_cast<std::size_t>(d);
      }
    }
    ia[i] = a;
    ib[i] = b;
  }
  std::vector<cplx> entries(size * size);
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      entries[i * size + j] = rho_a(ia[i], ia[j]) * rho_b(ib[i], ib[j]);
    }
  }
  return DensityMatrix(n, d, size, std::move(entries));
}

DensityMatrix product_state(const DensityMatrix& rho_a, const DensityMatrix& rho_b) {
  std::vector<int> block(static_cast<std::size_t>(rho_a.n_parties()));
  for (std::size_t i = 0; i < block.size(); ++i) block[i] = static_cast<int>(i);
  return product_state(rho_a, rho_b, block);
}

DensityMatrix random_density_matrix(int n_parties, int dimension, int rank, std::mt19937_64& rng) {
  const std::size_t size = checked_power(dimension, n_parties);
  if (rank < 1) throw InputError("rank must be >= 1");
  std::normal_distribution<double> gauss;
  const auto r = static_cast<std::size_t>(rank);
  std::vector<cplx> g(size * r);
  for (auto& z : g) z = cplx(gauss(rng), gauss(rng));
  std::vector<cplx> entries(size * size);
  double tr = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      cplx acc{};
      for (std::size_t k = 0; k < r; ++k) acc += g[i * r + k] * std::conj(g[j * r + k]);
      entries[i * size + j] = acc;
    }
    tr += entries[i * size + i].real();
  }
  for (auto& e : entries) e /= tr;
  // Exact Hermiticity after rounding.
  for (std::size_t i = 0; i < size; ++i) {
    entries[i * size + i] = entries[i * size + i].real();
    for (std::size_t j = i + 1; j < size; ++j) entries[j * size + i] = std::conj(entries[i * size + j]);
  }
  return DensityMatrix::from_entries(n_parties, dimension, std::move(entries));
}

PhaseConfiguration random_phases(int n_parties, int dimension, std::mt19937_64& rng) {
  PhaseConfiguration config(n_parties, dimension);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (auto& v : config.flat_mut()) v = angle(rng);
  return config;
}

}  // namespace quditbell
