#include <cstdlib>
#include <string_view>

#include "demeasure/kernels.hpp"

namespace demeasure::kernels {

namespace {

const KernelTable& choose() {
  const char* forced = std::getenv("DEMEASURE_KERNELS");
  if (forced != nullptr && std::string_view(forced) == "scalar") return scalar();
  if (const KernelTable* vec = avx2()) return *vec;
  return scalar();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = choose();
  return table;
}

}  // namespace demeasure::kernels
