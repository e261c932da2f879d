#include "kmsgf/greens.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kmsgf/reduce.hpp"

namespace kmsgf {

cd mean_part(const QuasiFreeSpec& spec, const Argument& arg) {
  if (!spec.mean) return cd{0.0, 0.0};
  const double mass = profile_integral(arg.profile, spec.circle);
  if (mass == 0.0) return cd{0.0, 0.0};
  const cd pairing = spectral_pairing(
      *spec.mean, arg.f, [](double) { return 1.0; }, spec.disp);
  return mass * pairing;
}

namespace {

// Common Gaussian evaluation: exp(i L - Q/2) with L = sum c_k M_k and
// Q = sum conj(c_k) c_l B_kl.  B and M are supplied per model.
cd gaussian_eval(const FormalCombination& x,
                 const std::function<cd(const Argument&, const Argument&)>& B,
                 const std::function<cd(const Argument&)>& M) {
  const std::size_t m = x.size();
  cd L{0.0, 0.0};
  for (const auto& wa : x) L += wa.coeff * M(wa.arg);
  cd Q{0.0, 0.0};
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t l = 0; l < m; ++l)
      Q += std::conj(x[k].coeff) * x[l].coeff * B(x[k].arg, x[l].arg);
  return std::exp(cd{0.0, 1.0} * L - 0.5 * Q);
}

cd gaussian_points_eval(const Eigen::MatrixXcd& S, const Eigen::VectorXcd& M) {
  cd L{0.0, 0.0};
  for (Eigen::Index i = 0; i < M.size(); ++i) L += M(i);
  cd Q{0.0, 0.0};
  for (Eigen::Index i = 0; i < S.rows(); ++i)
    for (Eigen::Index j = 0; j < S.cols(); ++j) Q += S(i, j);
  return std::exp(cd{0.0, 1.0} * L - 0.5 * Q);
}

} // namespace

cd quasifree_green(const QuasiFreeSpec& spec, const Argument& arg) {
  const cd B = kernel_smeared(arg.profile, arg.f, arg.profile, arg.f,
                              spec.disp, spec.circle);
  const cd M = mean_part(spec, arg);
  return std::exp(cd{0.0, 1.0} * M - 0.5 * B);
}

cd quasifree_eval(const QuasiFreeSpec& spec, const FormalCombination& x) {
  return gaussian_eval(
      x,
      [&](const Argument& a, const Argument& b) {
        return kernel_smeared(a.profile, a.f, b.profile, b.f, spec.disp, spec.circle);
      },
      [&](const Argument& a) { return mean_part(spec, a); });
}

cd multitime_green(const QuasiFreeSpec& spec, std::span<const SharpPoint> points) {
  if (points.empty())
    throw std::invalid_argument("multitime_green: need at least one point");
  return gaussian_points_eval(sharp_covariance(spec.disp, spec.circle, points),
                              sharp_mean(spec, points));
}

cd mixture_green(const SpectralMeasure& measure, Dispersion::Kind kind,
                 const ThermalCircle& circle, const Argument& arg) {
  if (measure.atoms.empty())
    throw std::invalid_argument("mixture_green: empty atom list");
  return pairwise_sum<cd>(measure.atoms.size(), [&](std::size_t i) {
    const auto& atom = measure.atoms[i];
    QuasiFreeSpec spec{Dispersion(kind, atom.mu), circle, std::nullopt};
    return atom.weight * quasifree_green(spec, arg);
  });
}

cd mixture_eval(const SpectralMeasure& measure, Dispersion::Kind kind,
                const ThermalCircle& circle, const FormalCombination& x) {
  if (measure.atoms.empty())
    throw std::invalid_argument("mixture_eval: empty atom list");
  return pairwise_sum<cd>(measure.atoms.size(), [&](std::size_t i) {
    const auto& atom = measure.atoms[i];
    QuasiFreeSpec spec{Dispersion(kind, atom.mu), circle, std::nullopt};
    return atom.weight * quasifree_eval(spec, x);
  });
}

cd mixture_multitime(const SpectralMeasure& measure, Dispersion::Kind kind,
                     const ThermalCircle& circle, std::span<const SharpPoint> points) {
  if (measure.atoms.empty())
    throw std::invalid_argument("mixture_multitime: empty atom list");
  return pairwise_sum<cd>(measure.atoms.size(), [&](std::size_t i) {
    const auto& atom = measure.atoms[i];
    QuasiFreeSpec spec{Dispersion(kind, atom.mu), circle, std::nullopt};
    return atom.weight * multitime_green(spec, points);
  });
}

cd generalized_free_eval(const SpectralMeasure& measure, Dispersion::Kind kind,
                         const ThermalCircle& circle, const FormalCombination& x) {
  return gaussian_eval(
      x,
      [&](const Argument& a, const Argument& b) {
        return kernel_mixed(a.profile, a.f, b.profile, b.f, measure, kind, circle);
      },
      [](const Argument&) { return cd{0.0, 0.0}; });
}

cd generalized_free_multitime(const SpectralMeasure& measure, Dispersion::Kind kind,
                              const ThermalCircle& circle,
                              std::span<const SharpPoint> points) {
  if (points.empty())
    throw std::invalid_argument("generalized_free_multitime: need at least one point");
  return gaussian_points_eval(sharp_covariance_mixed(measure, kind, circle, points),
                              Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(points.size())));
}

GreenFunctional make_quasifree_functional(QuasiFreeSpec spec) {
  GreenFunctional g;
  g.name = "quasifree";
  g.eval = [spec](const FormalCombination& x) { return quasifree_eval(spec, x); };
  g.eval_points = [spec](std::span<const SharpPoint> pts) {
    return multitime_green(spec, pts);
  };
  return g;
}

GreenFunctional make_generalized_free_functional(SpectralMeasure measure,
                                                 Dispersion::Kind kind,
                                                 ThermalCircle circle) {
  GreenFunctional g;
  g.name = "generalized-free";
  g.eval = [measure, kind, circle](const FormalCombination& x) {
    return generalized_free_eval(measure, kind, circle, x);
  };
  g.eval_points = [measure, kind, circle](std::span<const SharpPoint> pts) {
    return generalized_free_multitime(measure, kind, circle, pts);
  };
  return g;
}

GreenFunctional make_mixture_functional(SpectralMeasure measure, Dispersion::Kind kind,
                                        ThermalCircle circle) {
  GreenFunctional g;
  g.name = "mixture";
  g.eval = [measure, kind, circle](const FormalCombination& x) {
    return mixture_eval(measure, kind, circle, x);
  };
  g.eval_points = [measure, kind, circle](std::span<const SharpPoint> pts) {
    return mixture_multitime(measure, kind, circle, pts);
  };
  return g;
}

Eigen::MatrixXcd sharp_covariance(const Dispersion& disp, const ThermalCircle& circle,
                                  std::span<const SharpPoint> points) {
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXcd S(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      S(i, j) = kernel_sharp(points[i].tau, points[i].f, points[j].tau, points[j].f,
                             disp, circle);
  return S;
}

Eigen::MatrixXcd sharp_covariance_mixed(const SpectralMeasure& measure, Dispersion::Kind kind,
                                        const ThermalCircle& circle,
                                        std::span<const SharpPoint> points) {
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& atom : measure.atoms)
    S += atom.weight * sharp_covariance(Dispersion(kind, atom.mu), circle, points);
  return S;
}

Eigen::VectorXcd sharp_mean(const QuasiFreeSpec& spec, std::span<const SharpPoint> points) {
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  Eigen::VectorXcd M = Eigen::VectorXcd::Zero(n);
  if (!spec.mean) return M;
  for (Eigen::Index i = 0; i < n; ++i) {
    // delta_tau has unit mass, so M_i is just the pairing with the mean.
    M(i) = spectral_pairing(
        *spec.mean, points[i].f, [](double) { return 1.0; }, spec.disp);
  }
  return M;
}

double double_factorial(int n) {
  if (n > 19) throw std::invalid_argument("double_factorial: n > 19 unsupported");
  double p = 1.0;
  for (int m = n; m >= 2; m -= 2) p *= m;
  return p;
}

namespace {

// Matching m of 2r indices, decoded mixed-radix: repeatedly pair the lowest
// remaining index with the one chosen by the next digit.
cd matching_product(const Eigen::MatrixXcd& S, const std::vector<int>& idx,
                    std::uint64_t m) {
  std::vector<int> rem = idx;
  cd prod{1.0, 0.0};
  while (!rem.empty()) {
    const std::size_t sz = rem.size();
    const std::uint64_t radix = sz - 1;
    const std::size_t c = static_cast<std::size_t>(m % radix);
    m /= radix;
    prod *= S(rem[0], rem[1 + c]);
    rem.erase(rem.begin() + static_cast<std::ptrdiff_t>(1 + c));
    rem.erase(rem.begin());
  }
  return prod;
}

} // namespace

cd wick_sum_indices(const Eigen::MatrixXcd& S, std::span<const int> idx) {
  const int n = static_cast<int>(idx.size());
  if (n == 0) return cd{1.0, 0.0};
  if (n % 2 != 0) return cd{0.0, 0.0};
  if (n > 12)
    throw std::invalid_argument("wick sum: more than 12 indices");
  const std::uint64_t count = static_cast<std::uint64_t>(double_factorial(n - 1));
  const std::vector<int> ids(idx.begin(), idx.end());
  return pairwise_sum<cd>(count, [&](std::size_t m) {
    return matching_product(S, ids, m);
  });
}

cd wick_sum(const Eigen::MatrixXcd& S) {
  std::vector<int> idx(static_cast<std::size_t>(S.rows()));
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  return wick_sum_indices(S, idx);
}

cd schwinger_moment(const QuasiFreeSpec& spec, std::span<const SharpPoint> points) {
  const int n = static_cast<int>(points.size());
  if (n < 1) throw std::invalid_argument("schwinger_moment: need at least one point");
  const Eigen::MatrixXcd S = sharp_covariance(spec.disp, spec.circle, points);

  if (!spec.mean) {
    if (n % 2 != 0) return cd{0.0, 0.0};
    return wick_sum(S);
  }

  if (n > 10)
    throw std::invalid_argument("schwinger_moment: n > 10 with mean present");
  const Eigen::VectorXcd M = sharp_mean(spec, points);

  // E prod (M_i + Y_i) expanded over which factors contribute their mean;
  // the complementary Gaussian factors must pair up completely.
  const unsigned full = (1u << n) - 1u;
  cd total{0.0, 0.0};
  for (unsigned mask = 0; mask <= full; ++mask) {
    const unsigned comp = full & ~mask;
    if (std::popcount(comp) % 2 != 0) continue;
    cd term{1.0, 0.0};
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) term *= M(i);
    std::vector<int> rest;
    for (int i = 0; i < n; ++i)
      if (comp & (1u << i)) rest.push_back(i);
    term *= wick_sum_indices(S, rest);
    total += term;
  }
  return total;
}

cd schwinger_moment(const SpectralMeasure& measure, Dispersion::Kind kind,
                    const ThermalCircle& circle, std::span<const SharpPoint> points) {
  if (measure.atoms.empty())
    throw std::invalid_argument("schwinger_moment: empty atom list");
  cd total{0.0, 0.0};
  for (const auto& atom : measure.atoms) {
    QuasiFreeSpec spec{Dispersion(kind, atom.mu), circle, std::nullopt};
    total += atom.weight * schwinger_moment(spec, points);
  }
  return total;
}

double equal_argument_moment(double a, int order) {
  if (order < 1 || order > 20)
    throw std::invalid_argument("equal_argument_moment: order must be in 1..20");
  if (order % 2 != 0) return 0.0;
  return double_factorial(order - 1) * std::pow(a, order / 2);
}

} // namespace kmsgf
