#include "demeasure/kernels.hpp"

namespace demeasure::kernels {

namespace {

void caxpy_scalar(double* dst, const double* src, double re, double im, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = src[2 * i];
    const double xi = src[2 * i + 1];
    const double pr = re * xr - im * xi;
    const double pi = re * xi + im * xr;
    dst[2 * i] += pr;
    dst[2 * i + 1] += pi;
  }
}

void majority3_scalar(const std::uint64_t* a, const std::uint64_t* b, const std::uint64_t* c,
                      std::uint64_t* out, std::size_t words) {
  for (std::size_t i = 0; i < words; ++i) {
    out[i] = (a[i] & b[i]) | (a[i] & c[i]) | (b[i] & c[i]);
  }
}

}  // namespace

const KernelTable& scalar() {
  static constexpr KernelTable table{"scalar", &caxpy_scalar, &majority3_scalar};
  return table;
}

}  // namespace demeasure::kernels
