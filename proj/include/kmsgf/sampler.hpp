#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kmsgf/greens.hpp"
#include "kmsgf/rng.hpp"

namespace kmsgf {

/** N draws of the n projected coordinates <zeta_{tau_i}, f_i>.  Fully
 *  determined by (seed, model, N); atom_index records the mixture component
 *  per draw and stays empty for pure Gaussian batches. */
struct SampleBatch {
  Eigen::MatrixXd draws;  // N x n
  std::uint64_t seed = 0;
  std::string model;
  std::vector<int> atom_index;
};

/** Mean-zero (or mean-shifted) Gaussian draws with covariance S_ij =
 *  kernel_sharp(i, j), via eigendecomposition of S.  Requires every test
 *  function (and the mean) to be real in position space so S is real.
 *  Negative eigenvalues within 1e-12 * lambda_max are clipped to zero;
 *  anything lower signals a kernel bug and throws. */
SampleBatch sample_gaussian(const QuasiFreeSpec& spec, std::span<const SharpPoint> points,
                            std::size_t N, std::uint64_t seed);

/** Hierarchical mixture draws: an atom picked by weight (its own counter
 *  stream), then one Gaussian draw at that atom's mu.  The normals stream is
 *  shared with sample_gaussian, so a single-atom mixture reproduces the
 *  Gaussian batch bit for bit.  Requires a normalized measure. */
SampleBatch sample_mixture(const SpectralMeasure& measure, Dispersion::Kind kind,
                           const ThermalCircle& circle, std::span<const SharpPoint> points,
                           std::size_t N, std::uint64_t seed);

struct Estimate {
  cd value{0.0, 0.0};
  double std_error = 0.0;
};

/** Mean and standard error of exp(i c . X) over the batch. */
Estimate empirical_green(const SampleBatch& batch, std::span<const double> coeffs);

/** Mean and standard error of the product of the listed columns (repeats
 *  allowed: {0,0,1,1} estimates E[x0^2 x1^2]). */
Estimate empirical_moment(const SampleBatch& batch, std::span<const int> columns);

/** Unbiased variance (second k-statistic). */
double kstat2(std::span<const double> xs);

/** Unbiased fourth-cumulant estimator (Fisher k-statistic), n >= 4. */
double kstat4(std::span<const double> xs);

/** k4 averaged over consecutive equal batches, with the spread-based
 *  standard error of the mean. */
struct CumulantEstimate {
  double k4 = 0.0;
  double std_error = 0.0;
  int batches = 0;
};

CumulantEstimate batched_k4(const SampleBatch& batch, int column, int n_batches);

/** Delimited text export: '#' header lines (model, seed, N, n), then one row
 *  of coordinates (and the atom index when present) per draw. */
void export_batch_text(std::ostream& os, const SampleBatch& batch);

} // namespace kmsgf
