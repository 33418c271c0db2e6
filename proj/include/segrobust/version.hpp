#pragma once

namespace segrobust {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace segrobust
