#pragma once

namespace demeasure {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace demeasure
