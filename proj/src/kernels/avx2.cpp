// Compiled with -mavx2 (and without -mfma) when the compiler supports it.
#include "demeasure/kernels.hpp"

#if defined(DEMEASURE_HAVE_AVX2)
#include <immintrin.h>
#endif

namespace demeasure::kernels {

#if defined(DEMEASURE_HAVE_AVX2)

namespace {

void caxpy_avx2(double* dst, const double* src, double re, double im, std::size_t n) {
  const __m256d vre = _mm256_set1_pd(re);
  const __m256d vim = _mm256_set1_pd(im);
  std::size_t i = 0;
  // Two complex values per register: (xr0, xi0, xr1, xi1).
  for (; i + 2 <= n; i += 2) {
    const __m256d x = _mm256_loadu_pd(src + 2 * i);
    const __m256d xs = _mm256_permute_pd(x, 0b0101);  // (xi, xr, ...)
    const __m256d t1 = _mm256_mul_pd(vre, x);         // (re*xr, re*xi)
    const __m256d t2 = _mm256_mul_pd(vim, xs);        // (im*xi, im*xr)
    const __m256d prod = _mm256_addsub_pd(t1, t2);    // (re*xr - im*xi, re*xi + im*xr)
    const __m256d d = _mm256_loadu_pd(dst + 2 * i);
    _mm256_storeu_pd(dst + 2 * i, _mm256_add_pd(d, prod));
  }
  for (; i < n; ++i) {
    const double xr = src[2 * i];
    const double xi = src[2 * i + 1];
    const double pr = re * xr - im * xi;
    const double pi = re * xi + im * xr;
    dst[2 * i] += pr;
    dst[2 * i + 1] += pi;
  }
}

void majority3_avx2(const std::uint64_t* a, const std::uint64_t* b, const std::uint64_t* c,
                    std::uint64_t* out, std::size_t words) {
  std::size_t i = 0;
  for (; i + 4 <= words; i += 4) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    const __m256i vc = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(c + i));
    const __m256i ab = _mm256_and_si256(va, vb);
    const __m256i ac = _mm256_and_si256(va, vc);
    const __m256i bc = _mm256_and_si256(vb, vc);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i),
                        _mm256_or_si256(_mm256_or_si256(ab, ac), bc));
  }
  for (; i < words; ++i) out[i] = (a[i] & b[i]) | (a[i] & c[i]) | (b[i] & c[i]);
}

}  // namespace

const KernelTable* avx2() {
  static constexpr KernelTable table{"avx2", &caxpy_avx2, &majority3_avx2};
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &table : nullptr;
}

#else

const KernelTable* avx2() { return nullptr; }

#endif

}  // namespace demeasure::kernels
