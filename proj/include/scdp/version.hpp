#pragma once

namespace scdp {
inline constexpr const char* kVersion = "0.1.0";
}
