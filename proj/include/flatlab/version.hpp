#pragma once

namespace flatlab {

// Library version, embedded in every machine-readable report.
inline constexpr const char* kVersion = "flatlab 0.1.0";

}  // namespace flatlab
