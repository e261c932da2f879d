#pragma once

// Independent reference computations for the test suite. Everything here is
// written directly against the defining formulas with plain loops and long
// double accumulation; nothing routes through the library implementation.

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
using cld = std::complex<long double>;

/**
 * @brief n-th Bell number via the Bell triangle, n in 1..20.
 */
unsigned long long bell_number(int n);

/**
 * @brief All set partitions of {0..n-1} by direct recursion.
 *
 * Element n-1 is appended to each block of each partition of {0..n-2}, or
 * opened as a new block. Independent of restricted-growth-string enumeration.
 */
std::vector<std::vector<std::vector<int>>> partitions_brute(int n);

/**
 * @brief Thermal covariance as a literal truncated Matsubara series.
 *
 * 2/(beta h) + (2/beta) sum_{n=1..N} [2h/(h^2+omega_n^2)] cos(omega_n t),
 * omega_n = 2 pi n / beta, accumulated in long double.
 */
long double matsubara_plain(long double h, long double t, long double beta, int n_modes);

/**
 * @brief Matsubara series with the slowly decaying part resummed exactly.
 *
 * The mode weight satisfies 2h/(h^2+w^2) = 2h/w^2 - 2h^3/w^4 + 2h^5/(w^4 (h^2+w^2)).
 * The 1/w^2 and 1/w^4 pieces are summed in closed form through the Fourier
 * series of the Bernoulli polynomials B2 and B4; only the 1/w^6-decaying
 * remainder is truncated at n_modes. Requires t in [0, beta]. Accurate as long
 * as the result is not exponentially smaller than the h*beta polynomial terms.
 */
long double matsubara_tail_resummed(long double h, long double t, long double beta,
                                    int n_modes);

/**
 * @brief Double time integral of two profiles against a sharp kernel.
 *
 * Composite trapezoid on [0,beta]^2 with grid+1 nodes per axis:
 * integral conj(psi1(tau)) psi2(sigma) kernel(tau - sigma) dtau dsigma.
 */
cld profile_quadrature_2d(const std::function<cld(long double)>& psi1,
                          const std::function<cld(long double)>& psi2,
                          const std::function<long double(long double)>& kernel,
                          long double beta, int grid);

/**
 * @brief Single time integral of a profile against a sharp kernel:
 * integral psi(sigma) kernel(tau0 - sigma) dsigma.
 */
cld profile_quadrature_1d(long double tau0,
                          const std::function<cld(long double)>& psi,
                          const std::function<long double(long double)>& kernel,
                          long double beta, int grid);

/**
 * @brief Thermal covariance closed form in long double, t in [-beta, beta].
 */
long double covariance_closed(long double h, long double t, long double beta);

/**
 * @brief Gaussian characteristic value exp(i c.M - 1/2 c* S c) in long double.
 *
 * S is a dense covariance matrix, M a mean vector, c a coefficient vector;
 * the quadratic form is sesquilinear in c.
 */
cld gaussian_value(std::span<const cld> coeff,
                   const std::vector<std::vector<cld>>& S, std::span<const cld> M);

/**
 * @brief n-th mixed moment of the Gaussian functional by finite differences.
 *
 * Differentiates gaussian_value along the first n real coordinate directions
 * (one derivative per coordinate; duplicated sample points enter as duplicated
 * rows of S) with central differences at steps h, h/2, h/4 and two Richardson
 * extrapolation levels, then divides by i^n.
 */
cld gaussian_moment_fd(const std::vector<std::vector<cld>>& S, std::span<const cld> M,
                       int n, long double step);

} // namespace oracle
