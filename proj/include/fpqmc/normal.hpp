#pragma once

namespace fpqmc {

/// Lower clamp applied to 32-bit fixed-point fractions before inversion.
inline constexpr double kFractionClip = 0x1p-32 + 1e-12;

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse of the standard normal CDF for u in (0, 1).
///
/// Rational approximation followed by one Halley step against erfc; absolute
/// error stays below 1e-9 down to u = 1e-15 (in practice near 1e-15 relative).
/// Throws DomainError for u <= 0, u >= 1 or NaN.
double inverse_normal_cdf(double u);

/// Inverse normal CDF for quasi-random fractions in [0, 1]: the input is first
/// clamped into [kFractionClip, 1 - kFractionClip] so that the Sobol' origin
/// maps to a finite deviate. Throws DomainError outside [0, 1].
double normal_from_fraction(double u);

}  // namespace fpqmc
