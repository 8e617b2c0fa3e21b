#pragma once

namespace betaout {
inline constexpr const char* kToolVersion = "0.1.0";
}
