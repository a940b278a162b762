#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "quditbell/kernels.hpp"

namespace quditbell::kernels {

#if !defined(QUDITBELL_HAVE_AVX2)
namespace avx2 {
void caxpy(cplx, const cplx*, cplx*, std::size_t) {
  throw std::logic_error("AVX2 kernels not compiled in");
}
cplx cdotc(const cplx*, const cplx*, std::size_t) {
  throw std::logic_error("AVX2 kernels not compiled in");
}
}  // namespace avx2
#endif

#if !defined(QUDITBELL_HAVE_NEON)
namespace neon {
void caxpy(cplx, const cplx*, cplx*, std::size_t) {
  throw std::logic_error("NEON kernels not compiled in");
}
cplx cdotc(const cplx*, const cplx*, std::size_t) {
  throw std::logic_error("NEON kernels not compiled in");
}
}  // namespace neon
#endif

namespace {

bool cpu_has_avx2() {
#if defined(QUDITBELL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool cpu_has_neon() {
#if defined(QUDITBELL_HAVE_NEON)
  return true;  // mandatory on aarch64
#else
  return false;
#endif
}

Backend detect_best() {
  // QUDITBELL_KERNELS=scalar pins the reference path.
  if (const char* env = std::getenv("QUDITBELL_KERNELS")) {
    if (std::string(env) == "scalar") return Backend::Scalar;
  }
  if (cpu_has_avx2()) return Backend::Avx2;
  if (cpu_has_neon()) return Backend::Neon;
  return Backend::Scalar;
}

std::atomic<Backend>& selected() {
  static std::atomic<Backend> backend{detect_best()};
  return backend;
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) {
    throw std::invalid_argument("kernel operands differ in length: " + std::to_string(a) +
                                " vs " + std::to_string(b));
  }
}

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::Scalar};
  if (cpu_has_avx2()) out.push_back(Backend::Avx2);
  if (cpu_has_neon()) out.push_back(Backend::Neon);
  return out;
}

Backend active_backend() { return selected().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  for (Backend avail : available_backends()) {
    if (avail == b) {
      selected().store(b, std::memory_order_relaxed);
      return;
    }
  }
  throw std::invalid_argument("kernel backend not available: " + std::string(backend_name(b)));
}

void caxpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  check_sizes(x.size(), y.size());
  switch (active_backend()) {
    case Backend::Avx2: return avx2::caxpy(alpha, x.data(), y.data(), x.size());
    case Backend::Neon: return neon::caxpy(alpha, x.data(), y.data(), x.size());
    case Backend::Scalar: break;
  }
  scalar::caxpy(alpha, x.data(), y.data(), x.size());
}

cplx cdotc(std::span<const cplx> x, std::span<const cplx> y) {
  check_sizes(x.size(), y.size());
  switch (active_backend()) {
    case Backend::Avx2: return avx2::cdotc(x.data(), y.data(), x.size());
    case Backend::Neon: return neon::cdotc(x.data(), y.data(), x.size());
    case Backend::Scalar: break;
  }
  return scalar::cdotc(x.data(), y.data(), x.size());
}

}  // namespace quditbell::kernels
