#pragma once

#include <complex>
#include <span>

namespace qsm {

inline constexpr int hermite_max_order = 512;

/// Physicists' Hermite polynomial H_n(x) by the three-term recurrence
/// H_{n+1} = 2x H_n - 2n H_{n-1}. Overflow for large n, |x| is the
/// caller's problem; n is capped at hermite_max_order.
double hermite_poly(int n, double x);

/// Normalized oscillator eigenfunction
///   phi_n(x) = (2^n n! sqrt(pi))^{-1/2} e^{-x^2/2} H_n(x),
/// evaluated with the stable recurrence on phi itself so intermediates
/// never exceed max_x |phi_0|.
double hermite_function(int n, double x);

/// Fills out[0..n_max] with phi_0(x) .. phi_n_max(x).
void hermite_function_all(int n_max, double x, std::span<double> out);

/// Fourier image of phi_n: phi_n integrated against e^{ipx} equals
/// i^n sqrt(2 pi) phi_n(p). Purely real for even n, imaginary for odd.
std::complex<double> hermite_function_ft(int n, double p);

}  // namespace qsm
