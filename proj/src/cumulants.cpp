#include "kmsgf/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kmsgf {

PartitionEnumerator::PartitionEnumerator(int n) : n_(n) {
  if (n < 1 || n > 12)
    throw std::invalid_argument("enumerate_partitions: n must be in 1..12");
  rgs_.assign(static_cast<std::size_t>(n), 0);
  maxp_.assign(static_cast<std::size_t>(n), 0);
}

void PartitionEnumerator::emit(SetPartition& out) const {
  const int k = maxp_[static_cast<std::size_t>(n_ - 1)] + 1;
  out.blocks.assign(static_cast<std::size_t>(k), {});
  for (int i = 0; i < n_; ++i)
    out.blocks[static_cast<std::size_t>(rgs_[static_cast<std::size_t>(i)])].push_back(i);
}

bool PartitionEnumerator::next(SetPartition& out) {
  if (done_) return false;
  if (first_) {
    first_ = false;
    emit(out);
    return true;
  }
  // Lexicographic successor: rightmost digit below its cap is bumped, the
  // tail resets to zero.  Digit i may reach maxp_[i-1] + 1.
  int i = n_ - 1;
  while (i >= 1 && rgs_[static_cast<std::size_t>(i)] > maxp_[static_cast<std::size_t>(i - 1)])
    --i;
  if (i < 1) {
    done_ = true;
    return false;
  }
  rgs_[static_cast<std::size_t>(i)] += 1;
  maxp_[static_cast<std::size_t>(i)] =
      std::max(maxp_[static_cast<std::size_t>(i - 1)], rgs_[static_cast<std::size_t>(i)]);
  for (int j = i + 1; j < n_; ++j) {
    rgs_[static_cast<std::size_t>(j)] = 0;
    maxp_[static_cast<std::size_t>(j)] = maxp_[static_cast<std::size_t>(j - 1)];
  }
  emit(out);
  return true;
}

void for_each_partition(int n, const std::function<void(const SetPartition&)>& fn) {
  PartitionEnumerator en(n);
  SetPartition p;
  while (en.next(p)) fn(p);
}

std::uint64_t partition_count(int n) {
  std::uint64_t c = 0;
  for_each_partition(n, [&](const SetPartition&) { ++c; });
  return c;
}

MomentFamily MomentFamily::make(int n) {
  if (n < 0 || n > 12)
    throw std::invalid_argument("MomentFamily: n must be in 0..12");
  MomentFamily f;
  f.n = n;
  f.values.assign(std::size_t{1} << n, cd{0.0, 0.0});
  f.values[0] = cd{1.0, 0.0};
  return f;
}

namespace {

void check_family(const MomentFamily& fam, int n) {
  if (n < 1 || n > 12)
    throw std::invalid_argument("truncate/untruncate: n must be in 1..12");
  if (fam.n != n || fam.values.size() != (std::size_t{1} << n))
    throw std::invalid_argument("truncate/untruncate: family does not cover all subsets of n points");
  for (const auto& v : fam.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("truncate/untruncate: non-finite family value");
}

unsigned block_mask(const std::vector<int>& block) {
  unsigned m = 0;
  for (int i : block) m |= 1u << i;
  return m;
}

// factorials through 11! (largest |pi| - 1 at n = 12), exact in double
double factorial(int k) {
  double p = 1.0;
  for (int i = 2; i <= k; ++i) p *= i;
  return p;
}

} // namespace

std::pair<cd, double> truncate_with_scale(const MomentFamily& moments, int n) {
  check_family(moments, n);
  // Long double accumulators: the alternating partition sum cancels heavily
  // for near-Gaussian input.
  std::complex<long double> total{0.0L, 0.0L};
  long double scale = 0.0L;
  for_each_partition(n, [&](const SetPartition& p) {
    const int k = static_cast<int>(p.blocks.size());
    const double coeff = (k % 2 == 1 ? 1.0 : -1.0) * factorial(k - 1);
    cd prod{1.0, 0.0};
    for (const auto& b : p.blocks) prod *= moments[block_mask(b)];
    const cd term = coeff * prod;
    total += std::complex<long double>(term.real(), term.imag());
    scale += std::abs(term);
  });
  return {cd{static_cast<double>(total.real()), static_cast<double>(total.imag())},
          static_cast<double>(scale)};
}

cd truncate(const MomentFamily& moments, int n) {
  return truncate_with_scale(moments, n).first;
}

cd untruncate(const MomentFamily& cumulants, int n) {
  check_family(cumulants, n);
  std::complex<long double> total{0.0L, 0.0L};
  for_each_partition(n, [&](const SetPartition& p) {
    cd prod{1.0, 0.0};
    for (const auto& b : p.blocks) prod *= cumulants[block_mask(b)];
    total += std::complex<long double>(prod.real(), prod.imag());
  });
  return cd{static_cast<double>(total.real()), static_cast<double>(total.imag())};
}

MomentFamily mixture_moment_family(const SpectralMeasure& measure, Dispersion::Kind kind,
                                   const ThermalCircle& circle,
                                   std::span<const SharpPoint> points) {
  const int n = static_cast<int>(points.size());
  if (n < 1 || n > 8)
    throw std::invalid_argument("mixture cumulant: n must be in 1..8");
  if (measure.atoms.empty())
    throw std::invalid_argument("mixture cumulant: empty atom list");

  // One sharp covariance per atom; every subset moment is a Wick sum over a
  // submatrix of it.
  std::vector<Eigen::MatrixXcd> S;
  S.reserve(measure.atoms.size());
  for (const auto& atom : measure.atoms)
    S.push_back(sharp_covariance(Dispersion(kind, atom.mu), circle, points));

  MomentFamily fam = MomentFamily::make(n);
  const unsigned full = (1u << n) - 1u;
  for (unsigned mask = 1; mask <= full; ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    cd value{0.0, 0.0};
    for (std::size_t a = 0; a < S.size(); ++a)
      value += measure.atoms[a].weight * wick_sum_indices(S[a], idx);
    fam[mask] = value;
  }
  return fam;
}

std::pair<cd, double> mixture_cumulant_with_scale(const SpectralMeasure& measure,
                                                  Dispersion::Kind kind,
                                                  const ThermalCircle& circle,
                                                  std::span<const SharpPoint> points) {
  const MomentFamily fam = mixture_moment_family(measure, kind, circle, points);
  return truncate_with_scale(fam, static_cast<int>(points.size()));
}

cd mixture_cumulant(const SpectralMeasure& measure, Dispersion::Kind kind,
                    const ThermalCircle& circle, std::span<const SharpPoint> points) {
  return mixture_cumulant_with_scale(measure, kind, circle, points).first;
}

} // namespace kmsgf
