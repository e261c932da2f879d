#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>

#include "kmsgf/greens.hpp"

namespace kmsgf {

/** Outcome of a positivity audit on one Hermitian test matrix. */
struct GramReport {
  enum class Verdict { psd, indefinite };

  Eigen::MatrixXcd matrix;      // hermitized (A + A^dagger)/2
  Eigen::VectorXd eigenvalues;  // ascending
  Verdict verdict = Verdict::indefinite;
  double tolerance = 0.0;
  double asymmetry = 0.0;  // ||A - A^dagger||_F of the raw input
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  Eigen::VectorXcd witness;  // eigenvector of lambda_min when indefinite
};

/** Hermitize, solve the spectrum, and apply the verdict rule
 *  psd iff lambda_min >= -tol * max(1, lambda_max).
 *  Throws when the raw asymmetry exceeds 1e-10 * ||A||_F. */
GramReport classify_gram(const Eigen::MatrixXcd& A, double tol);

/** Bochner-type audit: M_ag = G(arg_a - arg_g), the difference taken as a
 *  signed formal combination. */
GramReport s_positivity(const GreenFunctional& G, std::span<const Argument> family,
                        double tol);

/** Reflection audit: M_ag = G(arg_a - R arg_g), each profile required to be
 *  supported on [0, beta/2] (exact for combs; sampled for series). */
GramReport reflection_positivity(const GreenFunctional& G, std::span<const Argument> family,
                                 const ThermalCircle& circle, double tol);

/** A sesquilinear covariance form B(arg, arg'). */
using KernelForm = std::function<cd(const Argument&, const Argument&)>;

KernelForm free_kernel_form(const Dispersion& disp, const ThermalCircle& circle);
KernelForm mixed_kernel_form(const SpectralMeasure& measure, Dispersion::Kind kind,
                             const ThermalCircle& circle);

enum class GramType { s_type, r_type };

/** Kernel-level audit: M_ag = B(arg_a, arg_g) (s_type) or
 *  B(arg_a, R arg_g) with supported profiles (r_type). */
GramReport kernel_positivity(const KernelForm& B, std::span<const Argument> family,
                             GramType type, const ThermalCircle& circle, double tol);

/** Profile reflected in time; test function untouched. */
Argument reflect_argument(const Argument& arg, const ThermalCircle& circle);

/** Throws unless the profile is supported on [0, beta/2]: comb atoms checked
 *  exactly, series sampled at 1024 circle points with |psi| < 1e-12 required
 *  outside the half circle. */
void require_reflection_support(const Argument& arg, const ThermalCircle& circle);

/** Deviations of multitime values under time shifts, reflection, and a full
 *  beta period. */
struct InvarianceReport {
  double shift_deviation = 0.0;
  double reflection_deviation = 0.0;
  double periodicity_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

InvarianceReport invariance_audit(const GreenFunctional& G,
                                  std::span<const SharpPoint> points,
                                  std::span<const double> shifts,
                                  const ThermalCircle& circle, double tol);

/** Empirical check of |B(f,g)| <= C * ||f||_{-1} ||g||_{-1} over a family,
 *  with the negative-index Sobolev norm taken at index -1 (probe choice).
 *  Zero test functions contribute ratio 0. */
struct BoundednessReport {
  double sup_ratio = 0.0;
  double bound = 0.0;
  std::size_t pairs = 0;
  bool pass = false;
};

/** Envelope constant for the sharp free kernel at time separation 0:
 *  lambda_family_max * coth(beta mu / 2), padded by 1e-9 relative. */
double sharp_kernel_bound(const Dispersion& disp, const ThermalCircle& circle,
                          double lambda_family_max);

/** Largest spectral value lambda(k) over the nodes of a family. */
double family_lambda_max(std::span<const TestFunction> family, const Dispersion& disp);

BoundednessReport boundedness_probe(const KernelForm& B,
                                    std::span<const TestFunction> family,
                                    const Dispersion& disp, const ThermalCircle& circle,
                                    double bound);

/** Fit of equal-argument Gaussian moments S_n = (n-1)!! a^(n/2) against
 *  C (n!)^gamma R^n over even n <= n_max; C is lifted so the bound holds at
 *  every probed order, and the fit residual is reported. */
struct GrowthReport {
  double C = 0.0;
  double R = 0.0;
  double gamma = 0.0;
  double max_residual = 0.0;  // max |log-domain fit residual|
  int n_max = 0;
  bool bound_holds = false;
};

GrowthReport growth_estimate_probe(double a, int n_max, double gamma);

} // namespace kmsgf
