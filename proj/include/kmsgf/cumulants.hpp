#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "kmsgf/greens.hpp"

namespace kmsgf {

/** Partition of {0..n-1}; blocks are sorted by least element and elements
 *  ascend within each block (the restricted-growth labelling gives this
 *  canonical order for free). */
struct SetPartition {
  std::vector<std::vector<int>> blocks;
};

/** Streams all partitions of {0..n-1} in restricted-growth-string order,
 *  1 <= n <= 12. */
class PartitionEnumerator {
 public:
  explicit PartitionEnumerator(int n);
  bool next(SetPartition& out);  // false once exhausted

 private:
  void emit(SetPartition& out) const;
  int n_;
  std::vector<int> rgs_;
  std::vector<int> maxp_;  // maxp_[i] = max(rgs_[0..i])
  bool first_ = true;
  bool done_ = false;
};

void for_each_partition(int n, const std::function<void(const SetPartition&)>& fn);

/** Number of partitions of an n-set, by enumeration. */
std::uint64_t partition_count(int n);

/** Moment (or cumulant) values on every nonempty subset of {0..n-1},
 *  indexed by bitmask; index 0 holds the empty-set convention value 1. */
struct MomentFamily {
  int n = 0;
  std::vector<cd> values;

  static MomentFamily make(int n);
  cd& operator[](unsigned mask) { return values[mask]; }
  const cd& operator[](unsigned mask) const { return values[mask]; }
};

/** Cumulant of order n from the moment family:
 *  sum over partitions of (|pi|-1)! (-1)^(|pi|-1) prod_blocks G(B). */
cd truncate(const MomentFamily& moments, int n);

/** Same value plus the conditioning scale sum |term| over partitions, the
 *  natural denominator for "relative" smallness of a vanishing cumulant. */
std::pair<cd, double> truncate_with_scale(const MomentFamily& moments, int n);

/** Moment of order n from the cumulant family: sum over partitions of
 *  prod_blocks K(B) (Moebius inverse of truncate). */
cd untruncate(const MomentFamily& cumulants, int n);

/** n-point cumulant of the mixture model at sharp points: builds the full
 *  subset moment family via per-atom Wick sums, then truncates.  n <= 8. */
cd mixture_cumulant(const SpectralMeasure& measure, Dispersion::Kind kind,
                    const ThermalCircle& circle, std::span<const SharpPoint> points);

std::pair<cd, double> mixture_cumulant_with_scale(const SpectralMeasure& measure,
                                                  Dispersion::Kind kind,
                                                  const ThermalCircle& circle,
                                                  std::span<const SharpPoint> points);

/** The full subset moment family of the mixture model (exposed for report
 *  output and cross-checks). */
MomentFamily mixture_moment_family(const SpectralMeasure& measure, Dispersion::Kind kind,
                                   const ThermalCircle& circle,
                                   std::span<const SharpPoint> points);

} // namespace kmsgf
