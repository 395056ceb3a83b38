#pragma once

namespace mfhurst {

inline constexpr const char* kVersion = "0.1.0";

// RNG algorithm identity recorded in synthetic-output headers and manifests.
// mt19937-64 has a fully specified output stream; normals come from a
// Box-Muller transform on 53-bit uniforms, so streams are reproducible
// for a given (algorithm id, seed).
inline constexpr const char* kRngId = "mt19937-64/box-muller/v1";

}  // namespace mfhurst
