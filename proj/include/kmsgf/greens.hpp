#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "kmsgf/kernel.hpp"

namespace kmsgf {

/** Sharp-time evaluation point: the pair (tau, f) standing for delta_tau (x) f. */
struct SharpPoint {
  double tau = 0.0;
  TestFunction f;
};

/** Smeared argument psi (x) f of a Green functional. */
struct Argument {
  TimeProfile profile;
  TestFunction f;
};

/** Quasi-free model: mean functional plus the free thermal covariance.
 *
 * M(psi (x) f) = integral(psi) * spectral_pairing(mean, f, 1), absent mean
 * meaning M = 0.  The mean must be real in position space when Gram/PSD
 * machinery or the sampler is used on the model.
 */
struct QuasiFreeSpec {
  Dispersion disp;
  ThermalCircle circle;
  std::optional<TestFunction> mean;
};

/** Signed/weighted formal combination sum_k c_k psi_k (x) f_k.  Green
 * functionals extend to these multilinearly: the quadratic part is the
 * sesquilinear form sum_{k,l} conj(c_k) c_l B(arg_k, arg_l), which for the
 * unit coefficients of a plain argument reduces to B(arg, arg). */
struct WeightedArgument {
  cd coeff{1.0, 0.0};
  Argument arg;
};
using FormalCombination = std::vector<WeightedArgument>;

/** A Green functional exposed as two evaluation routes: formal combinations
 *  of smeared arguments, and lists of sharp points (multitime values). */
struct GreenFunctional {
  std::string name;
  std::function<cd(const FormalCombination&)> eval;
  std::function<cd(std::span<const SharpPoint>)> eval_points;
};

/** Linear (mean) part M(arg); zero when the spec carries no mean. */
cd mean_part(const QuasiFreeSpec& spec, const Argument& arg);

/** exp(i M(arg)) * exp(-1/2 B(arg, arg)); real and in (0, 1] without mean. */
cd quasifree_green(const QuasiFreeSpec& spec, const Argument& arg);

/** Quasi-free value of a formal combination (see FormalCombination). */
cd quasifree_eval(const QuasiFreeSpec& spec, const FormalCombination& x);

/** Multitime Green value at sharp points: the Gaussian characteristic
 *  function exp(i sum_i M_i) exp(-1/2 sum_{i,j} S_ij) with S_ij the sharp
 *  covariance matrix; the double sum runs over all ordered pairs. */
cd multitime_green(const QuasiFreeSpec& spec, std::span<const SharpPoint> points);

/** Convex mixture over the measure: sum_atoms w * quasifree value at mu.
 *  Distinct from the generalized-free functional exp(-1/2 B_P), which uses
 *  the mixed kernel inside a single Gaussian; both are exposed. */
cd mixture_green(const SpectralMeasure& measure, Dispersion::Kind kind,
                 const ThermalCircle& circle, const Argument& arg);
cd mixture_eval(const SpectralMeasure& measure, Dispersion::Kind kind,
                const ThermalCircle& circle, const FormalCombination& x);
cd mixture_multitime(const SpectralMeasure& measure, Dispersion::Kind kind,
                     const ThermalCircle& circle, std::span<const SharpPoint> points);

cd generalized_free_eval(const SpectralMeasure& measure, Dispersion::Kind kind,
                         const ThermalCircle& circle, const FormalCombination& x);
cd generalized_free_multitime(const SpectralMeasure& measure, Dispersion::Kind kind,
                              const ThermalCircle& circle, std::span<const SharpPoint> points);

GreenFunctional make_quasifree_functional(QuasiFreeSpec spec);
GreenFunctional make_generalized_free_functional(SpectralMeasure measure, Dispersion::Kind kind,
                                                 ThermalCircle circle);
GreenFunctional make_mixture_functional(SpectralMeasure measure, Dispersion::Kind kind,
                                        ThermalCircle circle);

/** Sharp covariance matrix S_ij = kernel_sharp(tau_i, f_i, tau_j, f_j). */
Eigen::MatrixXcd sharp_covariance(const Dispersion& disp, const ThermalCircle& circle,
                                  std::span<const SharpPoint> points);

/** Measure-averaged sharp covariance sum_atoms w * S^{(mu)}. */
Eigen::MatrixXcd sharp_covariance_mixed(const SpectralMeasure& measure, Dispersion::Kind kind,
                                        const ThermalCircle& circle,
                                        std::span<const SharpPoint> points);

/** Mean values M_i = M(delta_{tau_i} (x) f_i); zeros without a mean. */
Eigen::VectorXcd sharp_mean(const QuasiFreeSpec& spec, std::span<const SharpPoint> points);

/** Gaussian moment of the covariance matrix S: sum over perfect matchings of
 *  the products of paired entries.  Zero for odd size, 1 for empty S.
 *  Matchings are enumerated by mixed-radix index decoding (size <= 12). */
cd wick_sum(const Eigen::MatrixXcd& S);

/** Wick sum of the submatrix picked by the index list. */
cd wick_sum_indices(const Eigen::MatrixXcd& S, std::span<const int> idx);

/** (n)!! with (-1)!! = (0)!! = 1; n <= 19 (exact in double beyond that is
 *  not needed here). */
double double_factorial(int n);

/** n-point Schwinger moment at sharp points.  Mean absent: Wick sum of the
 *  sharp covariance (zero for odd n, n <= 12).  Mean present: sum over
 *  subsets carrying mean factors times Wick sums of the complements
 *  (n <= 10). */
cd schwinger_moment(const QuasiFreeSpec& spec, std::span<const SharpPoint> points);

/** Mixture moment: sum_atoms w * Gaussian moment at that atom. */
cd schwinger_moment(const SpectralMeasure& measure, Dispersion::Kind kind,
                    const ThermalCircle& circle, std::span<const SharpPoint> points);

/** Equal-argument Gaussian moment (order-1)!! * a^(order/2) for covariance
 *  diagonal value a; zero for odd order.  Valid for order <= 20. */
double equal_argument_moment(double a, int order);

} // namespace kmsgf
