#pragma once

namespace tklab {

inline constexpr const char* kVersion = "0.1.0";

}
