#pragma once

namespace semeq {

// Version stamp embedded in every artifact file. Deliberately a compile-time
// constant (never a timestamp) so reruns produce byte-identical outputs.
inline constexpr const char* kVersion = "semeq/1.0.0";

}  // namespace semeq
