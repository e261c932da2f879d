#include "kmsgf/sampler.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "kmsgf/reduce.hpp"

namespace kmsgf {

namespace {

void require_real_data(const QuasiFreeSpec& spec, std::span<const SharpPoint> points) {
  for (const auto& p : points)
    if (!p.f.real_in_position)
      throw std::invalid_argument(
          "sampler: test functions must be real in position space");
  if (spec.mean && !spec.mean->real_in_position)
    throw std::invalid_argument("sampler: mean must be real in position space");
}

Eigen::MatrixXd real_sharp_covariance(const QuasiFreeSpec& spec,
                                      std::span<const SharpPoint> points) {
  const Eigen::MatrixXcd S = sharp_covariance(spec.disp, spec.circle, points);
  double scale = 0.0;
  for (Eigen::Index i = 0; i < S.rows(); ++i)
    for (Eigen::Index j = 0; j < S.cols(); ++j)
      scale = std::max(scale, std::abs(S(i, j)));
  for (Eigen::Index i = 0; i < S.rows(); ++i)
    for (Eigen::Index j = 0; j < S.cols(); ++j)
      if (std::abs(S(i, j).imag()) > 1e-12 * std::max(1.0, scale))
        throw std::runtime_error("sampler: covariance has a non-real entry");
  return S.real();
}

// S = V diag(lambda) V^T -> factor A = V diag(sqrt(lambda)) with tiny
// negative eigenvalues clipped; larger ones mean the kernel is broken.
Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("sampler: covariance eigensolve failed");
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double lam_max = std::max(0.0, lam(lam.size() - 1));
  Eigen::VectorXd root(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < -1e-12 * std::max(1.0, lam_max))
      throw std::runtime_error("sampler: covariance indefinite beyond tolerance");
    root(i) = std::sqrt(std::max(0.0, lam(i)));
  }
  return es.eigenvectors() * root.asDiagonal();
}

Eigen::VectorXd real_mean(const QuasiFreeSpec& spec, std::span<const SharpPoint> points) {
  const Eigen::VectorXcd M = sharp_mean(spec, points);
  return M.real();
}

void fill_gaussian_row(Eigen::MatrixXd& draws, Eigen::Index d,
                       const Eigen::MatrixXd& A, const Eigen::VectorXd& mean,
                       const CounterRng& rng) {
  const Eigen::Index n = draws.cols();
  Eigen::VectorXd z(n);
  for (Eigen::Index j = 0; j < n; j += 2) {
    const auto [z0, z1] = rng.normal_pair(static_cast<std::uint64_t>(d),
                                          static_cast<std::uint32_t>(j / 2));
    z(j) = z0;
    if (j + 1 < n) z(j + 1) = z1;
  }
  draws.row(d) = (A * z + mean).transpose();
}

} // namespace

SampleBatch sample_gaussian(const QuasiFreeSpec& spec, std::span<const SharpPoint> points,
                            std::size_t N, std::uint64_t seed) {
  if (points.empty())
    throw std::invalid_argument("sample_gaussian: need at least one point");
  require_real_data(spec, points);

  const Eigen::MatrixXd A = covariance_factor(real_sharp_covariance(spec, points));
  const Eigen::VectorXd mean = real_mean(spec, points);
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());

  SampleBatch batch;
  batch.seed = seed;
  {
    std::ostringstream m;
    m.precision(17);
    m << "gaussian(beta=" << spec.circle.beta << ",kind="
      << (spec.disp.kind == Dispersion::Kind::nonrelativistic ? "nonrel" : "rel")
      << ",mu=" << spec.disp.mu << ",n=" << n << (spec.mean ? ",mean" : "") << ")";
    batch.model = m.str();
  }
  batch.draws.resize(static_cast<Eigen::Index>(N), n);

  const CounterRng rng{seed};
#ifdef KMSGF_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (execution_mode() == Exec::parallel)
#endif
  for (Eigen::Index d = 0; d < static_cast<Eigen::Index>(N); ++d)
    fill_gaussian_row(batch.draws, d, A, mean, rng);
  return batch;
}

SampleBatch sample_mixture(const SpectralMeasure& measure, Dispersion::Kind kind,
                           const ThermalCircle& circle, std::span<const SharpPoint> points,
                           std::size_t N, std::uint64_t seed) {
  if (points.empty())
    throw std::invalid_argument("sample_mixture: need at least one point");
  if (measure.atoms.empty())
    throw std::invalid_argument("sample_mixture: empty atom list");
  if (!measure.normalized)
    throw std::invalid_argument("sample_mixture: measure must be a probability measure");

  const std::size_t m = measure.atoms.size();
  std::vector<Eigen::MatrixXd> factors;
  factors.reserve(m);
  for (const auto& atom : measure.atoms) {
    QuasiFreeSpec spec{Dispersion(kind, atom.mu), circle, std::nullopt};
    require_real_data(spec, points);
    factors.push_back(covariance_factor(real_sharp_covariance(spec, points)));
  }
  std::vector<double> cum(m);
  double acc = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    acc += measure.atoms[a].weight;
    cum[a] = acc;
  }

  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  SampleBatch batch;
  batch.seed = seed;
  {
    std::ostringstream msg;
    msg.precision(17);
    msg << "mixture(beta=" << circle.beta << ",kind="
        << (kind == Dispersion::Kind::nonrelativistic ? "nonrel" : "rel")
        << ",atoms=" << m << ",n=" << n << ")";
    batch.model = msg.str();
  }
  batch.draws.resize(static_cast<Eigen::Index>(N), n);
  batch.atom_index.resize(N);

  const CounterRng rng{seed};
  const Eigen::VectorXd zero_mean = Eigen::VectorXd::Zero(n);
#ifdef KMSGF_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (execution_mode() == Exec::parallel)
#endif
  for (Eigen::Index d = 0; d < static_cast<Eigen::Index>(N); ++d) {
    const double u = rng.uniform(static_cast<std::uint64_t>(d), 0, stream_atoms);
    std::size_t a = 0;
    while (a + 1 < m && u > cum[a]) ++a;
    batch.atom_index[static_cast<std::size_t>(d)] = static_cast<int>(a);
    fill_gaussian_row(batch.draws, d, factors[a], zero_mean, rng);
  }
  return batch;
}

Estimate empirical_green(const SampleBatch& batch, std::span<const double> coeffs) {
  const Eigen::Index N = batch.draws.rows();
  const Eigen::Index n = batch.draws.cols();
  if (N == 0) throw std::invalid_argument("empirical_green: empty batch");
  if (static_cast<Eigen::Index>(coeffs.size()) != n)
    throw std::invalid_argument("empirical_green: coefficient length mismatch");

  auto phase = [&](std::size_t d) {
    double dot = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      dot += coeffs[static_cast<std::size_t>(j)] * batch.draws(static_cast<Eigen::Index>(d), j);
    return std::exp(cd{0.0, dot});
  };

  const cd mean = pairwise_sum<cd>(static_cast<std::size_t>(N), phase) / double(N);
  Estimate est;
  est.value = mean;
  if (N > 1) {
    const double ss = pairwise_sum<double>(static_cast<std::size_t>(N), [&](std::size_t d) {
      return std::norm(phase(d) - mean);
    });
    est.std_error = std::sqrt(ss / (double(N) * double(N - 1)));
  }
  return est;
}

Estimate empirical_moment(const SampleBatch& batch, std::span<const int> columns) {
  const Eigen::Index N = batch.draws.rows();
  const Eigen::Index n = batch.draws.cols();
  if (N == 0) throw std::invalid_argument("empirical_moment: empty batch");
  for (int c : columns)
    if (c < 0 || c >= n)
      throw std::invalid_argument("empirical_moment: column out of range");

  auto product = [&](std::size_t d) {
    double p = 1.0;
    for (int c : columns) p *= batch.draws(static_cast<Eigen::Index>(d), c);
    return p;
  };

  const double mean = pairwise_sum<double>(static_cast<std::size_t>(N), product) / double(N);
  Estimate est;
  est.value = cd{mean, 0.0};
  if (N > 1) {
    const double ss = pairwise_sum<double>(static_cast<std::size_t>(N), [&](std::size_t d) {
      const double r = product(d) - mean;
      return r * r;
    });
    est.std_error = std::sqrt(ss / (double(N) * double(N - 1)));
  }
  return est;
}

double kstat2(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 2) throw std::invalid_argument("kstat2: need n >= 2");
  long double s1 = 0.0L, s2 = 0.0L;
  for (double x : xs) {
    s1 += x;
    s2 += static_cast<long double>(x) * x;
  }
  const long double nn = static_cast<long double>(n);
  return static_cast<double>((nn * s2 - s1 * s1) / (nn * (nn - 1.0L)));
}

double kstat4(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 4) throw std::invalid_argument("kstat4: need n >= 4");
  long double s1 = 0.0L, s2 = 0.0L, s3 = 0.0L, s4 = 0.0L;
  for (double x : xs) {
    const long double v = x;
    const long double v2 = v * v;
    s1 += v;
    s2 += v2;
    s3 += v2 * v;
    s4 += v2 * v2;
  }
  const long double nn = static_cast<long double>(n);
  const long double num = -6.0L * s1 * s1 * s1 * s1 + 12.0L * nn * s1 * s1 * s2 -
                          3.0L * nn * (nn - 1.0L) * s2 * s2 -
                          4.0L * nn * (nn + 1.0L) * s1 * s3 +
                          nn * nn * (nn + 1.0L) * s4;
  const long double den = nn * (nn - 1.0L) * (nn - 2.0L) * (nn - 3.0L);
  return static_cast<double>(num / den);
}

CumulantEstimate batched_k4(const SampleBatch& batch, int column, int n_batches) {
  const Eigen::Index N = batch.draws.rows();
  if (column < 0 || column >= batch.draws.cols())
    throw std::invalid_argument("batched_k4: column out of range");
  if (n_batches < 2) throw std::invalid_argument("batched_k4: need >= 2 batches");
  const std::size_t chunk = static_cast<std::size_t>(N) / static_cast<std::size_t>(n_batches);
  if (chunk < 8)
    throw std::invalid_argument("batched_k4: fewer than 8 draws per batch");

  std::vector<double> xs(chunk), k4s(static_cast<std::size_t>(n_batches));
  for (int b = 0; b < n_batches; ++b) {
    for (std::size_t i = 0; i < chunk; ++i)
      xs[i] = batch.draws(static_cast<Eigen::Index>(b * chunk + i), column);
    k4s[static_cast<std::size_t>(b)] = kstat4(xs);
  }
  double mean = 0.0;
  for (double v : k4s) mean += v;
  mean /= double(n_batches);
  double var = 0.0;
  for (double v : k4s) var += (v - mean) * (v - mean);
  var /= double(n_batches - 1);

  CumulantEstimate est;
  est.k4 = mean;
  est.std_error = std::sqrt(var / double(n_batches));
  est.batches = n_batches;
  return est;
}

void export_batch_text(std::ostream& os, const SampleBatch& batch) {
  auto old = os.precision(17);
  os << "# kmsgf-batch/1\n";
  os << "# model = " << batch.model << "\n";
  os << "# seed = " << batch.seed << "\n";
  os << "# N = " << batch.draws.rows() << " n = " << batch.draws.cols() << "\n";
  const bool with_atoms = !batch.atom_index.empty();
  for (Eigen::Index d = 0; d < batch.draws.rows(); ++d) {
    for (Eigen::Index j = 0; j < batch.draws.cols(); ++j) {
      if (j) os << '\t';
      os << batch.draws(d, j);
    }
    if (with_atoms) os << '\t' << batch.atom_index[static_cast<std::size_t>(d)];
    os << '\n';
  }
  os.precision(old);
}

} // namespace kmsgf
