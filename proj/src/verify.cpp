#include "kmsgf/verify.hpp"

#include <cmath>
#include <stdexcept>

namespace kmsgf {

GramReport classify_gram(const Eigen::MatrixXcd& A, double tol) {
  if (A.rows() != A.cols() || A.rows() < 1)
    throw std::invalid_argument("classify_gram: need a nonempty square matrix");
  if (!(tol > 0.0) || !std::isfinite(tol))
    throw std::invalid_argument("classify_gram: tolerance must be finite and > 0");

  GramReport rep;
  rep.tolerance = tol;
  rep.asymmetry = (A - A.adjoint()).norm();
  const double scale = A.norm();
  if (rep.asymmetry > 1e-10 * scale)
    throw std::runtime_error("classify_gram: matrix asymmetry exceeds 1e-10 * ||A||");

  rep.matrix = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rep.matrix);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("classify_gram: eigenvalue solve failed");
  rep.eigenvalues = es.eigenvalues();
  rep.lambda_min = rep.eigenvalues(0);
  rep.lambda_max = rep.eigenvalues(rep.eigenvalues.size() - 1);
  if (rep.lambda_min >= -tol * std::max(1.0, rep.lambda_max)) {
    rep.verdict = GramReport::Verdict::psd;
  } else {
    rep.verdict = GramReport::Verdict::indefinite;
    rep.witness = es.eigenvectors().col(0);
  }
  return rep;
}

namespace {

// G(arg_a - arg_g) as a signed combination.
cd difference_value(const GreenFunctional& G, const Argument& a, const Argument& g) {
  FormalCombination x;
  x.push_back({cd{1.0, 0.0}, a});
  x.push_back({cd{-1.0, 0.0}, g});
  return G.eval(x);
}

} // namespace

GramReport s_positivity(const GreenFunctional& G, std::span<const Argument> family,
                        double tol) {
  if (family.empty())
    throw std::invalid_argument("s_positivity: empty family");
  const Eigen::Index m = static_cast<Eigen::Index>(family.size());
  Eigen::MatrixXcd M(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index g = 0; g < m; ++g)
      M(a, g) = difference_value(G, family[static_cast<std::size_t>(a)],
                                 family[static_cast<std::size_t>(g)]);
  return classify_gram(M, tol);
}

Argument reflect_argument(const Argument& arg, const ThermalCircle& circle) {
  return Argument{reflect(arg.profile, circle), arg.f};
}

void require_reflection_support(const Argument& arg, const ThermalCircle& circle) {
  const double half = circle.beta / 2.0;
  if (arg.profile.is_comb()) {
    for (const auto& a : arg.profile.comb().atoms)
      if (a.tau < 0.0 || a.tau > half)
        throw std::invalid_argument(
            "reflection positivity: comb atom outside [0, beta/2]");
    return;
  }
  const int n_samples = 1024;
  for (int j = 0; j < n_samples; ++j) {
    const double t = -half + circle.beta * double(j) / double(n_samples);
    if (t >= 0.0 && t <= half) continue;
    if (std::abs(profile_value(arg.profile, t, circle)) >= 1e-12)
      throw std::invalid_argument(
          "reflection positivity: series profile has support outside [0, beta/2]");
  }
}

GramReport reflection_positivity(const GreenFunctional& G, std::span<const Argument> family,
                                 const ThermalCircle& circle, double tol) {
  if (family.empty())
    throw std::invalid_argument("reflection_positivity: empty family");
  for (const auto& arg : family) require_reflection_support(arg, circle);

  const Eigen::Index m = static_cast<Eigen::Index>(family.size());
  Eigen::MatrixXcd M(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index g = 0; g < m; ++g)
      M(a, g) = difference_value(
          G, family[static_cast<std::size_t>(a)],
          reflect_argument(family[static_cast<std::size_t>(g)], circle));
  return classify_gram(M, tol);
}

KernelForm free_kernel_form(const Dispersion& disp, const ThermalCircle& circle) {
  return [disp, circle](const Argument& a, const Argument& b) {
    return kernel_smeared(a.profile, a.f, b.profile, b.f, disp, circle);
  };
}

KernelForm mixed_kernel_form(const SpectralMeasure& measure, Dispersion::Kind kind,
                             const ThermalCircle& circle) {
  return [measure, kind, circle](const Argument& a, const Argument& b) {
    return kernel_mixed(a.profile, a.f, b.profile, b.f, measure, kind, circle);
  };
}

GramReport kernel_positivity(const KernelForm& B, std::span<const Argument> family,
                             GramType type, const ThermalCircle& circle, double tol) {
  if (family.empty())
    throw std::invalid_argument("kernel_positivity: empty family");
  if (type == GramType::r_type)
    for (const auto& arg : family) require_reflection_support(arg, circle);

  const Eigen::Index m = static_cast<Eigen::Index>(family.size());
  Eigen::MatrixXcd M(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index g = 0; g < m; ++g) {
      const auto& lhs = family[static_cast<std::size_t>(a)];
      const auto& rhs = family[static_cast<std::size_t>(g)];
      M(a, g) = (type == GramType::s_type)
                    ? B(lhs, rhs)
                    : B(lhs, reflect_argument(rhs, circle));
    }
  }
  return classify_gram(M, tol);
}

InvarianceReport invariance_audit(const GreenFunctional& G,
                                  std::span<const SharpPoint> points,
                                  std::span<const double> shifts,
                                  const ThermalCircle& circle, double tol) {
  if (points.empty())
    throw std::invalid_argument("invariance_audit: empty point list");
  if (!(tol > 0.0) || !std::isfinite(tol))
    throw std::invalid_argument("invariance_audit: tolerance must be finite and > 0");

  const cd base = G.eval_points(points);
  std::vector<SharpPoint> moved(points.begin(), points.end());

  InvarianceReport rep;
  rep.tolerance = tol;

  for (double s : shifts) {
    for (std::size_t i = 0; i < moved.size(); ++i)
      moved[i].tau = circle.fold(points[i].tau + s);
    rep.shift_deviation =
        std::max(rep.shift_deviation, std::abs(G.eval_points(moved) - base));
  }

  for (std::size_t i = 0; i < moved.size(); ++i)
    moved[i].tau = circle.fold(-points[i].tau);
  rep.reflection_deviation = std::abs(G.eval_points(moved) - base);

  for (std::size_t i = 0; i < moved.size(); ++i)
    moved[i].tau = circle.fold(points[i].tau + circle.beta);
  rep.periodicity_deviation = std::abs(G.eval_points(moved) - base);

  rep.pass = rep.shift_deviation < tol && rep.reflection_deviation < tol &&
             rep.periodicity_deviation < tol;
  return rep;
}

double family_lambda_max(std::span<const TestFunction> family, const Dispersion& disp) {
  double lam = disp.floor();
  for (const auto& f : family)
    for (const auto& n : f.nodes) {
      const double ksq = n.k[0] * n.k[0] + n.k[1] * n.k[1] + n.k[2] * n.k[2];
      lam = std::max(lam, disp.lambda_of_ksq(ksq));
    }
  return lam;
}

double sharp_kernel_bound(const Dispersion& disp, const ThermalCircle& circle,
                          double lambda_family_max) {
  return lambda_family_max * covariance_scalar(disp.mu, 0.0, circle) * (1.0 + 1e-9);
}

BoundednessReport boundedness_probe(const KernelForm& B,
                                    std::span<const TestFunction> family,
                                    const Dispersion& disp, const ThermalCircle& circle,
                                    double bound) {
  if (family.empty())
    throw std::invalid_argument("boundedness_probe: empty family");

  std::vector<double> norms;
  norms.reserve(family.size());
  for (const auto& f : family) norms.push_back(sobolev_norm_minus1(f, disp));

  const TimeProfile sharp0 = make_delta(0.0, 1.0, circle);
  BoundednessReport rep;
  rep.bound = bound;
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = 0; j < family.size(); ++j) {
      ++rep.pairs;
      const double denom = norms[i] * norms[j];
      if (denom == 0.0) continue;  // zero-function convention: ratio 0
      const double num =
          std::abs(B(Argument{sharp0, family[i]}, Argument{sharp0, family[j]}));
      rep.sup_ratio = std::max(rep.sup_ratio, num / denom);
    }
  }
  rep.pass = rep.sup_ratio <= bound;
  return rep;
}

GrowthReport growth_estimate_probe(double a, int n_max, double gamma) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::invalid_argument("growth_estimate_probe: need a > 0");
  if (n_max < 4 || n_max > 20 || n_max % 2 != 0)
    throw std::invalid_argument("growth_estimate_probe: n_max must be even, in 4..20");
  if (!(gamma > 0.0))
    throw std::invalid_argument("growth_estimate_probe: gamma must be > 0");

  // Least squares of d_n = log S_n - gamma log n! against alpha + rho n over
  // even orders, then alpha lifted by the worst positive residual so the
  // bound S_n <= C (n!)^gamma R^n is tight at one probed order.
  std::vector<double> ns, ds;
  for (int n = 2; n <= n_max; n += 2) {
    const double Sn = equal_argument_moment(a, n);
    ns.push_back(double(n));
    ds.push_back(std::log(Sn) - gamma * std::lgamma(double(n) + 1.0));
  }
  const double m = double(ns.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    sx += ns[i];
    sy += ds[i];
    sxx += ns[i] * ns[i];
    sxy += ns[i] * ds[i];
  }
  const double det = m * sxx - sx * sx;
  const double rho = (m * sxy - sx * sy) / det;
  const double alpha = (sy - rho * sx) / m;

  double max_res = 0.0, max_pos = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double r = ds[i] - (alpha + rho * ns[i]);
    max_res = std::max(max_res, std::abs(r));
    max_pos = std::max(max_pos, r);
  }

  GrowthReport rep;
  rep.gamma = gamma;
  rep.n_max = n_max;
  rep.max_residual = max_res;
  rep.C = std::exp(alpha + max_pos);
  rep.R = std::exp(rho);
  rep.bound_holds = true;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double lhs = ds[i];
    const double rhs = std::log(rep.C) + rho * ns[i];
    if (lhs > rhs + 1e-12) rep.bound_holds = false;
  }
  return rep;
}

} // namespace kmsgf
