#pragma once

// Numeric tolerances shared across the library. Read-only constants; every
// module that makes a rank/Hermiticity/invertibility decision uses these.

namespace specflow::tol {

inline constexpr double kHermitian = 1e-12;      // relative ‖A - A*‖ admitted before rejection
inline constexpr double kKernel = 1e-8;          // singular values below this count as kernel
inline constexpr double kEigenvalueGap = 1e-9;   // divided-difference tie-break threshold
inline constexpr double kInvertibility = 1e-10;  // smallest singular value required of loop samples
inline constexpr double kEndpoint = 1e-10;       // endpoint/closure consistency checks
inline constexpr double kProjection = 1e-12;     // idempotency tolerance for projections

}  // namespace specflow::tol
