#include "kmsgf/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "kmsgf/reduce.hpp"

namespace kmsgf {

Dispersion::Dispersion(Kind k, double mu_) : kind(k), mu(mu_) {
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw std::invalid_argument("Dispersion: mu must be finite and > 0");
}

double Dispersion::lambda_of_ksq(double ksq) const {
  return kind == Kind::nonrelativistic ? ksq + mu : std::sqrt(ksq + mu * mu);
}

double TestFunction::norm2() const {
  double s = 0.0;
  for (const auto& n : nodes) s += n.w * std::norm(n.v);
  return s;
}

bool TestFunction::is_zero() const {
  return std::all_of(nodes.begin(), nodes.end(),
                     [](const Node& n) { return n.v == cd{0.0, 0.0}; });
}

namespace {

// Canonical momentum key: -0.0 folded onto +0.0 so a node and its mirror
// always hash to negatives of each other.
std::array<std::uint64_t, 3> momentum_key(const std::array<double, 3>& k) {
  std::array<std::uint64_t, 3> out{};
  for (int a = 0; a < 3; ++a) {
    double x = (k[a] == 0.0) ? 0.0 : k[a];
    out[a] = std::bit_cast<std::uint64_t>(x);
  }
  return out;
}

std::array<double, 3> negated(const std::array<double, 3>& k) {
  return {-k[0], -k[1], -k[2]};
}

} // namespace

void validate(const TestFunction& f) {
  if (f.dim < 1 || f.dim > 3)
    throw std::invalid_argument("TestFunction: dim must be 1, 2, or 3");
  if (f.nodes.empty())
    throw std::invalid_argument("TestFunction: node list is empty");
  for (const auto& n : f.nodes) {
    for (int a = 0; a < 3; ++a)
      if (!std::isfinite(n.k[a]))
        throw std::invalid_argument("TestFunction: non-finite momentum");
    if (!(n.w > 0.0) || !std::isfinite(n.w))
      throw std::invalid_argument("TestFunction: weights must be finite and > 0");
    if (!std::isfinite(n.v.real()) || !std::isfinite(n.v.imag()))
      throw std::invalid_argument("TestFunction: non-finite value");
    for (int a = f.dim; a < 3; ++a)
      if (n.k[a] != 0.0)
        throw std::invalid_argument("TestFunction: momentum component beyond dim");
  }

  std::map<std::array<std::uint64_t, 3>, std::size_t> index;
  for (std::size_t i = 0; i < f.nodes.size(); ++i) {
    auto [it, fresh] = index.emplace(momentum_key(f.nodes[i].k), i);
    if (!fresh)
      throw std::invalid_argument("TestFunction: duplicate node momentum");
  }

  if (f.real_in_position) {
    double scale = 0.0;
    for (const auto& n : f.nodes) scale = std::max(scale, std::abs(n.v));
    for (const auto& n : f.nodes) {
      auto it = index.find(momentum_key(negated(n.k)));
      if (it == index.end())
        throw std::invalid_argument("TestFunction: realness flag set but mirror node missing");
      const cd mirror = f.nodes[it->second].v;
      if (std::abs(mirror - std::conj(n.v)) > 1e-12 * (1.0 + scale))
        throw std::invalid_argument("TestFunction: realness flag set but values not conjugate-paired");
    }
  }
}

bool grid_compatible(const TestFunction& f, const TestFunction& g) {
  if (f.dim != g.dim || f.nodes.size() != g.nodes.size()) return false;
  for (std::size_t i = 0; i < f.nodes.size(); ++i) {
    if (f.nodes[i].k != g.nodes[i].k) return false;
    if (f.nodes[i].w != g.nodes[i].w) return false;
  }
  return true;
}

double default_cutoff(int dim, const std::array<double, 3>& center, double width) {
  double c2 = 0.0;
  for (int a = 0; a < dim; ++a) c2 += center[a] * center[a];
  return 8.0 * width + std::sqrt(c2);
}

TestFunction gaussian_packet(int dim, const std::array<double, 3>& center,
                             double width, int n_nodes, double cutoff) {
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("gaussian_packet: dim must be 1, 2, or 3");
  if (!(width > 0.0) || !std::isfinite(width))
    throw std::invalid_argument("gaussian_packet: width must be finite and > 0");
  if (n_nodes < 1)
    throw std::invalid_argument("gaussian_packet: n_nodes must be >= 1");
  if (!std::isfinite(cutoff) || cutoff < 0.0 || (n_nodes > 1 && cutoff == 0.0))
    throw std::invalid_argument("gaussian_packet: cutoff must be > 0 (or 0 with a single node)");
  for (int a = 0; a < dim; ++a)
    if (!std::isfinite(center[a]))
      throw std::invalid_argument("gaussian_packet: non-finite center");

  double total = std::pow(double(n_nodes), dim);
  if (total > 4.0e6)
    throw std::invalid_argument("gaussian_packet: grid exceeds 4e6 nodes");

  // Axis built from the outer edge inward and mirrored, so axis[j] is the
  // bitwise negation of axis[n-1-j] and the realness pairing is exact.
  std::vector<double> axis(n_nodes), wax(n_nodes);
  if (n_nodes == 1) {
    axis[0] = 0.0;
    wax[0] = 1.0;
  } else {
    const double h = 2.0 * cutoff / (n_nodes - 1);
    for (int i = 0; i < n_nodes / 2; ++i) {
      const double x = cutoff - i * h;
      axis[i] = -x;
      axis[n_nodes - 1 - i] = x;
      wax[i] = wax[n_nodes - 1 - i] = (i == 0) ? h / 2.0 : h;
    }
    if (n_nodes % 2 == 1) {
      axis[n_nodes / 2] = 0.0;
      wax[n_nodes / 2] = h;
    }
  }

  TestFunction f;
  f.dim = dim;
  f.nodes.reserve(static_cast<std::size_t>(total));
  const double inv4w2 = 1.0 / (4.0 * width * width);

  std::array<int, 3> idx{0, 0, 0};
  const std::size_t count = static_cast<std::size_t>(total);
  for (std::size_t flat = 0; flat < count; ++flat) {
    TestFunction::Node node;
    double q2 = 0.0;
    double w = 1.0;
    for (int a = 0; a < dim; ++a) {
      node.k[a] = axis[idx[a]];
      w *= wax[idx[a]];
      const double d = node.k[a] - center[a];
      q2 += d * d;
    }
    node.w = w;
    node.v = cd{std::exp(-q2 * inv4w2), 0.0};
    f.nodes.push_back(node);
    for (int a = dim - 1; a >= 0; --a) {
      if (++idx[a] < n_nodes) break;
      idx[a] = 0;
    }
  }

  double s = f.norm2();
  if (!(s > 0.0) || !std::isfinite(s))
    throw std::runtime_error("gaussian_packet: normalization sum degenerate");
  const double scale = 1.0 / std::sqrt(s);
  for (auto& n : f.nodes) n.v *= scale;

  f.real_in_position = true;
  for (int a = 0; a < dim; ++a)
    if (center[a] != 0.0) f.real_in_position = false;
  return f;
}

TestFunction linear_combination(cd a, const TestFunction& f, cd b, const TestFunction& g) {
  if (!grid_compatible(f, g))
    throw std::invalid_argument("linear_combination: incompatible grids");
  TestFunction out = f;
  for (std::size_t i = 0; i < out.nodes.size(); ++i)
    out.nodes[i].v = a * f.nodes[i].v + b * g.nodes[i].v;
  out.real_in_position = f.real_in_position && g.real_in_position &&
                         a.imag() == 0.0 && b.imag() == 0.0;
  return out;
}

TestFunction zero_like(const TestFunction& f) {
  TestFunction out = f;
  for (auto& n : out.nodes) n.v = cd{0.0, 0.0};
  return out;
}

cd spectral_pairing(const TestFunction& f, const TestFunction& g,
                    const std::function<double(double)>& phi,
                    const Dispersion& disp) {
  if (!grid_compatible(f, g))
    throw std::invalid_argument("spectral_pairing: incompatible grids");
  const auto& fn = f.nodes;
  const auto& gn = g.nodes;
  cd total = pairwise_sum<cd>(fn.size(), [&](std::size_t i) {
    const auto& a = fn[i];
    double ksq = a.k[0] * a.k[0] + a.k[1] * a.k[1] + a.k[2] * a.k[2];
    return a.w * std::conj(a.v) * gn[i].v * phi(disp.lambda_of_ksq(ksq));
  });
  if (!std::isfinite(total.real()) || !std::isfinite(total.imag())) {
    for (const auto& a : fn) {
      double ksq = a.k[0] * a.k[0] + a.k[1] * a.k[1] + a.k[2] * a.k[2];
      double lam = disp.lambda_of_ksq(ksq);
      if (!std::isfinite(phi(lam))) {
        std::ostringstream msg;
        msg << "spectral_pairing: phi non-finite at lambda = " << lam;
        throw std::runtime_error(msg.str());
      }
    }
    throw std::runtime_error("spectral_pairing: non-finite result");
  }
  return total;
}

double sobolev_norm_minus1(const TestFunction& f, const Dispersion& disp) {
  cd q = spectral_pairing(f, f, [](double lam) { return 1.0 / lam; }, disp);
  return std::sqrt(std::max(0.0, q.real()));
}

void write_text(std::ostream& os, const TestFunction& f) {
  auto old = os.precision(17);
  os << "testfunction dim " << f.dim << " nodes " << f.nodes.size()
     << " real " << (f.real_in_position ? 1 : 0) << "\n";
  for (const auto& n : f.nodes) {
    for (int a = 0; a < f.dim; ++a) os << n.k[a] << " ";
    os << n.w << " " << n.v.real() << " " << n.v.imag() << "\n";
  }
  os.precision(old);
}

TestFunction read_test_function_text(std::istream& is) {
  std::string tag, kw;
  TestFunction f;
  std::size_t count = 0;
  int real_flag = 0;
  is >> tag;
  if (tag != "testfunction")
    throw std::runtime_error("test function text: bad header tag");
  is >> kw >> f.dim >> kw >> count >> kw >> real_flag;
  if (!is) throw std::runtime_error("test function text: bad header");
  f.real_in_position = (real_flag != 0);
  f.nodes.resize(count);
  for (auto& n : f.nodes) {
    for (int a = 0; a < f.dim; ++a) is >> n.k[a];
    double re = 0.0, im = 0.0;
    is >> n.w >> re >> im;
    n.v = cd{re, im};
  }
  if (!is) throw std::runtime_error("test function text: truncated node list");
  validate(f);
  return f;
}

} // namespace kmsgf
