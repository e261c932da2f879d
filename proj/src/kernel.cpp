#include "kmsgf/kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "kmsgf/reduce.hpp"

namespace kmsgf {

ThermalCircle::ThermalCircle(double b) : beta(b) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("ThermalCircle: beta must be finite and > 0");
}

double ThermalCircle::fold(double t) const {
  if (!std::isfinite(t))
    throw std::invalid_argument("ThermalCircle::fold: non-finite time");
  const double half = beta / 2.0;
  if (t >= -half && t < half) return t;
  double u = t - beta * std::floor((t + half) / beta);
  if (u >= half) u -= beta;
  if (u < -half) u += beta;
  return u;
}

double ThermalCircle::matsubara(int n) const {
  return 2.0 * std::acos(-1.0) * double(n) / beta;
}

cd MatsubaraSeries::coeff(int n) const {
  if (n < -n_max || n > n_max) return cd{0.0, 0.0};
  return coeffs[static_cast<std::size_t>(n + n_max)];
}

TimeProfile make_delta_comb(std::vector<DeltaComb::Atom> atoms, const ThermalCircle& circle) {
  if (atoms.empty()) throw std::invalid_argument("delta comb: no atoms");
  for (auto& a : atoms) {
    if (!std::isfinite(a.tau) || !std::isfinite(a.weight))
      throw std::invalid_argument("delta comb: non-finite atom");
    a.tau = circle.fold(a.tau);
  }
  return TimeProfile{DeltaComb{std::move(atoms)}};
}

TimeProfile make_delta(double tau, double weight, const ThermalCircle& circle) {
  return make_delta_comb({{tau, weight}}, circle);
}

TimeProfile make_series(int n_max, std::vector<cd> coeffs) {
  if (n_max < 0)
    throw std::invalid_argument("matsubara series: n_max must be >= 0");
  if (coeffs.size() != static_cast<std::size_t>(2 * n_max + 1))
    throw std::invalid_argument("matsubara series: need 2*n_max + 1 coefficients");
  for (const auto& c : coeffs)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw std::invalid_argument("matsubara series: non-finite coefficient");
  for (int n = 0; n <= n_max; ++n) {
    const cd up = coeffs[static_cast<std::size_t>(n_max + n)];
    const cd dn = coeffs[static_cast<std::size_t>(n_max - n)];
    if (dn.real() != up.real() || dn.imag() != -up.imag())
      throw std::invalid_argument("matsubara series: c_{-n} = conj(c_n) violated");
  }
  return TimeProfile{MatsubaraSeries{n_max, std::move(coeffs)}};
}

TimeProfile reflect(const TimeProfile& p, const ThermalCircle& circle) {
  if (p.is_comb()) {
    auto atoms = p.comb().atoms;
    for (auto& a : atoms) a.tau = circle.fold(-a.tau);
    return TimeProfile{DeltaComb{std::move(atoms)}};
  }
  const auto& s = p.series();
  std::vector<cd> rev(s.coeffs.rbegin(), s.coeffs.rend());
  return TimeProfile{MatsubaraSeries{s.n_max, std::move(rev)}};
}

TimeProfile shift(const TimeProfile& p, double s, const ThermalCircle& circle) {
  if (!std::isfinite(s))
    throw std::invalid_argument("shift: non-finite shift");
  if (p.is_comb()) {
    auto atoms = p.comb().atoms;
    for (auto& a : atoms) a.tau = circle.fold(a.tau + s);
    return TimeProfile{DeltaComb{std::move(atoms)}};
  }
  // psi(t - s): c_n -> c_n e^{-i omega_n s}.  Phases are computed for n >= 0
  // and mirrored so the reality pairing stays bitwise exact.
  const auto& ser = p.series();
  std::vector<cd> out(ser.coeffs.size());
  for (int n = 0; n <= ser.n_max; ++n) {
    const double ph = circle.matsubara(n) * s;
    const cd rot{std::cos(ph), -std::sin(ph)};
    const cd up = ser.coeff(n) * rot;
    out[static_cast<std::size_t>(ser.n_max + n)] = up;
    out[static_cast<std::size_t>(ser.n_max - n)] = std::conj(up);
  }
  return TimeProfile{MatsubaraSeries{ser.n_max, std::move(out)}};
}

double profile_integral(const TimeProfile& p, const ThermalCircle& circle) {
  if (p.is_comb()) {
    double s = 0.0;
    for (const auto& a : p.comb().atoms) s += a.weight;
    return s;
  }
  return circle.beta * p.series().coeff(0).real();
}

double profile_value(const TimeProfile& p, double t, const ThermalCircle& circle) {
  const double tau = circle.fold(t);
  if (p.is_comb()) {
    double s = 0.0;
    for (const auto& a : p.comb().atoms)
      if (a.tau == tau) s += a.weight;
    return s;
  }
  const auto& ser = p.series();
  double s = ser.coeff(0).real();
  for (int n = 1; n <= ser.n_max; ++n) {
    const double ph = circle.matsubara(n) * tau;
    const cd c = ser.coeff(n);
    s += 2.0 * (c.real() * std::cos(ph) - c.imag() * std::sin(ph));
  }
  return s;
}

SpectralMeasure SpectralMeasure::make(double support_floor, std::vector<Atom> atoms,
                                      bool normalized) {
  if (!(support_floor > 0.0) || !std::isfinite(support_floor))
    throw std::invalid_argument("spectral measure: support floor must be finite and > 0");
  if (atoms.empty())
    throw std::invalid_argument("spectral measure: empty atom list");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!std::isfinite(a.mu) || !std::isfinite(a.weight))
      throw std::invalid_argument("spectral measure: non-finite atom");
    if (!(a.weight > 0.0))
      throw std::invalid_argument("spectral measure: atom weights must be > 0");
    if (a.mu < support_floor)
      throw std::invalid_argument("spectral measure: atom mu below support floor");
    total += a.weight;
  }
  if (normalized && std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("spectral measure: weights must sum to 1 (or pass normalized = false)");
  return SpectralMeasure{support_floor, std::move(atoms), normalized};
}

double covariance_scalar(double h, double t, const ThermalCircle& circle) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("covariance_scalar: h must be finite and > 0");
  const double beta = circle.beta;
  const double a = std::abs(circle.fold(t));  // |t| reduced, in [0, beta/2]
  const double bh = beta * h;
  if (bh <= 700.0) {
    return std::cosh(h * (beta / 2.0 - a)) / std::sinh(bh / 2.0);
  }
  // Large beta*h: cosh/sinh overflow; use the exponential form, whose terms
  // all lie in [0, 1].
  const double num = std::exp(-a * h) + std::exp(-(beta - a) * h);
  const double den = -std::expm1(-bh);
  return num / den;
}

double matsubara_mode_weight(double h, double omega) {
  return 2.0 * h / (h * h + omega * omega);
}

cd kernel_sharp(double t1, const TestFunction& f1, double t2, const TestFunction& f2,
                const Dispersion& disp, const ThermalCircle& circle) {
  const double dt = t1 - t2;
  return spectral_pairing(
      f1, f2, [&](double lam) { return covariance_scalar(lam, dt, circle); }, disp);
}

namespace {

// Fourier coefficient of a profile: stored for series, (1/beta) sum_a w_a
// e^{-i omega_n tau_a} for combs.
cd profile_coeff(const TimeProfile& p, int n, const ThermalCircle& circle) {
  if (!p.is_comb()) return p.series().coeff(n);
  const double omega = circle.matsubara(n);
  cd s{0.0, 0.0};
  for (const auto& a : p.comb().atoms) {
    const double ph = omega * a.tau;
    s += a.weight * cd{std::cos(ph), -std::sin(ph)};
  }
  return s / circle.beta;
}

} // namespace

cd kernel_smeared(const TimeProfile& p1, const TestFunction& f1,
                  const TimeProfile& p2, const TestFunction& f2,
                  const Dispersion& disp, const ThermalCircle& circle) {
  if (p1.is_comb() && p2.is_comb()) {
    const auto& a = p1.comb().atoms;
    const auto& b = p2.comb().atoms;
    if (a.empty() || b.empty()) return cd{0.0, 0.0};
    const std::size_t nb = b.size();
    return pairwise_sum<cd>(a.size() * nb, [&](std::size_t idx) {
      const auto& x = a[idx / nb];
      const auto& y = b[idx % nb];
      return x.weight * y.weight * kernel_sharp(x.tau, f1, y.tau, f2, disp, circle);
    });
  }

  // Frequency domain.  The truncation is set by the series profiles; a comb
  // has all modes, so it never restricts the range.
  int n_cut = -1;
  if (!p1.is_comb()) n_cut = p1.series().n_max;
  if (!p2.is_comb()) {
    const int m = p2.series().n_max;
    n_cut = (n_cut < 0) ? m : std::min(n_cut, m);
  }
  if (n_cut < 0) throw std::logic_error("kernel_smeared: unreachable profile dispatch");

  std::vector<cd> pairings(static_cast<std::size_t>(n_cut) + 1);
  for (int n = 0; n <= n_cut; ++n) {
    const double omega = circle.matsubara(n);
    pairings[static_cast<std::size_t>(n)] = spectral_pairing(
        f1, f2, [&](double lam) { return matsubara_mode_weight(lam, omega); }, disp);
  }

  const std::size_t terms = static_cast<std::size_t>(2 * n_cut + 1);
  cd total = pairwise_sum<cd>(terms, [&](std::size_t m) {
    const int n = static_cast<int>(m) - n_cut;
    const cd a1 = profile_coeff(p1, n, circle);
    const cd a2 = profile_coeff(p2, n, circle);
    return std::conj(a1) * a2 * pairings[static_cast<std::size_t>(std::abs(n))];
  });
  return circle.beta * total;
}

cd kernel_mixed(const TimeProfile& p1, const TestFunction& f1,
                const TimeProfile& p2, const TestFunction& f2,
                const SpectralMeasure& measure, Dispersion::Kind kind,
                const ThermalCircle& circle) {
  if (measure.atoms.empty())
    throw std::invalid_argument("kernel_mixed: empty atom list");
  return pairwise_sum<cd>(measure.atoms.size(), [&](std::size_t i) {
    const auto& atom = measure.atoms[i];
    return atom.weight *
           kernel_smeared(p1, f1, p2, f2, Dispersion(kind, atom.mu), circle);
  });
}

} // namespace kmsgf
