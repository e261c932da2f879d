#pragma once

#include <variant>
#include <vector>

#include "kmsgf/spectral.hpp"

namespace kmsgf {

/** Euclidean time circle of circumference beta, modelled as [-beta/2, beta/2)
 *  with endpoints identified. */
struct ThermalCircle {
  double beta = 1.0;

  ThermalCircle() = default;
  explicit ThermalCircle(double b);

  /** Reduce t to [-beta/2, beta/2).  Values already inside are returned
   *  unchanged (no floating-point perturbation of in-range times). */
  double fold(double t) const;

  /** Matsubara frequency omega_n = 2 pi n / beta. */
  double matsubara(int n) const;
};

/** Weighted sum of delta functions on the circle. */
struct DeltaComb {
  struct Atom {
    double tau = 0.0;
    double weight = 0.0;
  };
  std::vector<Atom> atoms;
};

/** Finite Fourier series  psi(t) = sum_{|n| <= n_max} c_n e^{i omega_n t}.
 *  Coefficients are stored for n = -n_max..n_max at index n + n_max and must
 *  satisfy c_{-n} = conj(c_n) exactly (psi real valued). */
struct MatsubaraSeries {
  int n_max = 0;
  std::vector<cd> coeffs;

  cd coeff(int n) const;  // zero outside the truncation
};

/** A real function psi on the circle, either singular (comb) or smooth
 *  (finite Matsubara series). */
struct TimeProfile {
  std::variant<DeltaComb, MatsubaraSeries> value;

  bool is_comb() const { return std::holds_alternative<DeltaComb>(value); }
  const DeltaComb& comb() const { return std::get<DeltaComb>(value); }
  const MatsubaraSeries& series() const { return std::get<MatsubaraSeries>(value); }
};

/** Comb profile with taus folded into [-beta/2, beta/2); validates weights. */
TimeProfile make_delta_comb(std::vector<DeltaComb::Atom> atoms, const ThermalCircle& circle);

/** Single delta at tau with the given weight. */
TimeProfile make_delta(double tau, double weight, const ThermalCircle& circle);

/** Series profile; enforces the exact reality pairing c_{-n} = conj(c_n). */
TimeProfile make_series(int n_max, std::vector<cd> coeffs);

/** psi(-t) on the circle. */
TimeProfile reflect(const TimeProfile& p, const ThermalCircle& circle);

/** psi(t - s) on the circle. */
TimeProfile shift(const TimeProfile& p, double s, const ThermalCircle& circle);

/** Integral of psi over the circle: sum of weights, or beta * c_0. */
double profile_integral(const TimeProfile& p, const ThermalCircle& circle);

/** Pointwise value; combs are evaluated as 0 away from atoms (only useful
 *  for series support checks). */
double profile_value(const TimeProfile& p, double t, const ThermalCircle& circle);

/** Atomic measure on chemical potentials, supported in [floor, inf),
 *  floor > 0.  Probability normalization (weights summing to 1) is the
 *  default; pass normalized = false to relax it. */
struct SpectralMeasure {
  struct Atom {
    double mu = 0.0;
    double weight = 0.0;
  };
  double support_floor = 0.0;
  std::vector<Atom> atoms;
  bool normalized = true;

  static SpectralMeasure make(double support_floor, std::vector<Atom> atoms,
                              bool normalized = true);
};

/** Thermal covariance at spectral value h:
 *
 *    (e^{-|t| h} + e^{-(beta - |t|) h}) / (1 - e^{-beta h})
 *      = cosh(h (beta/2 - |t|)) / sinh(beta h / 2)
 *
 * Evaluated in the cosh/sinh form, switching to the pure-exponential
 * asymptotic branch for beta*h > 700 to avoid overflow.  t is reduced
 * mod beta first; the function is beta-periodic and even in t.
 */
double covariance_scalar(double h, double t, const ThermalCircle& circle);

/** Matsubara coefficient of the covariance: 2 h / (h^2 + omega^2). */
double matsubara_mode_weight(double h, double omega);

/** Covariance of sharp-time arguments delta_{t1} (x) f1, delta_{t2} (x) f2:
 *  spectral_pairing(f1, f2, lambda -> covariance_scalar(lambda, t1 - t2)). */
cd kernel_sharp(double t1, const TestFunction& f1, double t2, const TestFunction& f2,
                const Dispersion& disp, const ThermalCircle& circle);

/** Covariance of smeared arguments psi1 (x) f1, psi2 (x) f2.
 *
 * Comb x comb goes through the time domain (double weighted sum of
 * kernel_sharp).  Any pair involving a series goes through the frequency
 * domain: beta * sum_n conj(c1_n) c2_n pairing(f1, f2, 2 lambda/(lambda^2 +
 * omega_n^2)), where a comb contributes its implied Fourier coefficients
 * (1/beta) sum_a w_a e^{-i omega_n tau_a}.  Series truncations need not
 * match; missing modes count as zero.
 */
cd kernel_smeared(const TimeProfile& p1, const TestFunction& f1,
                  const TimeProfile& p2, const TestFunction& f2,
                  const Dispersion& disp, const ThermalCircle& circle);

/** Covariance averaged over the spectral measure: sum of atom weight times
 *  kernel_smeared at Dispersion(kind, atom mu). */
cd kernel_mixed(const TimeProfile& p1, const TestFunction& f1,
                const TimeProfile& p2, const TestFunction& f2,
                const SpectralMeasure& measure, Dispersion::Kind kind,
                const ThermalCircle& circle);

} // namespace kmsgf
