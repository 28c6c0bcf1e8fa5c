#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace demeasure::kernels {

// Inner loops shared by the density-matrix simulator and the bit-sliced
// Monte Carlo engine. Every backend must produce bit-identical output:
// the complex kernels use the same operation order and no fused
// multiply-add, and the bit kernels are exact.

/// dst[i] += (re + i*im) * src[i] over `n` interleaved complex values.
using CaxpyFn = void (*)(double* dst, const double* src, double re, double im, std::size_t n);

/// out[i] = majority(a[i], b[i], c[i]) bitwise over `words` 64-bit words.
using Majority3Fn = void (*)(const std::uint64_t* a, const std::uint64_t* b, const std::uint64_t* c,
                             std::uint64_t* out, std::size_t words);

struct KernelTable {
  std::string_view name;
  CaxpyFn caxpy;
  Majority3Fn majority3;
};

const KernelTable& scalar();

/// AVX2 backend, or nullptr when not compiled in or not supported by the CPU.
const KernelTable* avx2();

/// Backend chosen at first use: AVX2 when available, else scalar.
/// DEMEASURE_KERNELS=scalar|avx2 overrides the choice.
const KernelTable& active();

}  // namespace demeasure::kernels
