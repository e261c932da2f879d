#include "kmsgf/ref.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace kmsgf::ref {

cd spectral_pairing(const TestFunction& f, const TestFunction& g,
                    const std::function<double(double)>& phi, const Dispersion& disp) {
  if (!grid_compatible(f, g))
    throw std::invalid_argument("ref::spectral_pairing: incompatible grids");
  cd s{0.0, 0.0};
  for (std::size_t i = 0; i < f.nodes.size(); ++i) {
    const auto& a = f.nodes[i];
    const double ksq = a.k[0] * a.k[0] + a.k[1] * a.k[1] + a.k[2] * a.k[2];
    s += a.w * std::conj(a.v) * g.nodes[i].v * phi(disp.lambda_of_ksq(ksq));
  }
  return s;
}

cd kernel_smeared_combs(const DeltaComb& c1, const TestFunction& f1,
                        const DeltaComb& c2, const TestFunction& f2,
                        const Dispersion& disp, const ThermalCircle& circle) {
  cd s{0.0, 0.0};
  for (const auto& x : c1.atoms)
    for (const auto& y : c2.atoms) {
      const double dt = x.tau - y.tau;
      s += x.weight * y.weight *
           ref::spectral_pairing(
               f1, f2, [&](double lam) { return covariance_scalar(lam, dt, circle); },
               disp);
    }
  return s;
}

double matsubara_partial_sum(double h, double t, double beta, long n_modes) {
  double s = 2.0 / (beta * h);  // n = 0 term times 1/beta
  for (long n = 1; n <= n_modes; ++n) {
    const double omega = 2.0 * std::acos(-1.0) * double(n) / beta;
    s += (2.0 / beta) * matsubara_mode_weight(h, omega) * std::cos(omega * t);
  }
  return s;
}

namespace {

cd wick_recursive(const Eigen::MatrixXcd& S, std::vector<int>& idx) {
  if (idx.empty()) return cd{1.0, 0.0};
  const int first = idx.front();
  cd total{0.0, 0.0};
  for (std::size_t p = 1; p < idx.size(); ++p) {
    const int partner = idx[p];
    std::vector<int> rest;
    rest.reserve(idx.size() - 2);
    for (std::size_t q = 1; q < idx.size(); ++q)
      if (q != p) rest.push_back(idx[q]);
    total += S(first, partner) * wick_recursive(S, rest);
  }
  return total;
}

} // namespace

cd wick_sum(const Eigen::MatrixXcd& S) {
  const int n = static_cast<int>(S.rows());
  if (n % 2 != 0) return cd{0.0, 0.0};
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  return wick_recursive(S, idx);
}

} // namespace kmsgf::ref
