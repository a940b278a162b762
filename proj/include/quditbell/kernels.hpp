#pragma once

// Inner-loop kernels for the dense probability path.
//
// Every kernel has a scalar reference implementation; vectorized variants
// (AVX2+FMA on x86-64, NEON on aarch64) are selected at runtime when the
// CPU supports them. Variants must agree with the scalar reference up to
// floating-point reassociation.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace quditbell::kernels {

using cplx = std::complex<double>;

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b);

// Backends compiled in and supported by the running CPU. Always contains
// Backend::Scalar.
std::vector<Backend> available_backends();

// Currently selected backend (best available unless overridden).
Backend active_backend();

// Forces a backend. Throws std::invalid_argument if it is not available.
void set_backend(Backend b);

// y += alpha * x. Sizes must match.
void caxpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);

// sum_i conj(x_i) * y_i. Sizes must match.
cplx cdotc(std::span<const cplx> x, std::span<const cplx> y);

// Direct access to each variant, for equivalence tests.
namespace scalar {
void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);
cplx cdotc(const cplx* x, const cplx* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);
cplx cdotc(const cplx* x, const cplx* y, std::size_t n);
}  // namespace avx2

namespace neon {
void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);
cplx cdotc(const cplx* x, const cplx* y, std::size_t n);
}  // namespace neon

}  // namespace quditbell::kernels
