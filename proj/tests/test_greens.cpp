#include <doctest.h>

#include <cmath>
#include <vector>

#include "kmsgf/cumulants.hpp"
#include "kmsgf/greens.hpp"
#include "kmsgf/ref.hpp"
#include "oracles.hpp"

using kmsgf::Argument;
using kmsgf::cd;
using kmsgf::Dispersion;
using kmsgf::FormalCombination;
using kmsgf::QuasiFreeSpec;
using kmsgf::SharpPoint;
using kmsgf::SpectralMeasure;
using kmsgf::TestFunction;
using kmsgf::ThermalCircle;

namespace {

TestFunction node_fn(double k, double w, cd v) {
  TestFunction f;
  f.dim = 1;
  f.nodes.push_back({{k, 0.0, 0.0}, w, v});
  return f;
}

TestFunction unit_node() {
  TestFunction f = node_fn(0.0, 1.0, {1.0, 0.0});
  f.real_in_position = true;
  return f;
}

} // namespace

TEST_SUITE("greens") {

TEST_CASE("double factorial") {
  CHECK(kmsgf::double_factorial(-1) == 1.0);
  CHECK(kmsgf::double_factorial(0) == 1.0);
  CHECK(kmsgf::double_factorial(1) == 1.0);
  CHECK(kmsgf::double_factorial(5) == 15.0);
  CHECK(kmsgf::double_factorial(7) == 105.0);
  CHECK(kmsgf::double_factorial(11) == 10395.0);
  CHECK_THROWS(kmsgf::double_factorial(20));
}

TEST_CASE("wick sum against the recursive reference") {
  for (int n : {2, 4, 6, 8}) {
    Eigen::MatrixXcd S(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        S(i, j) = cd{1.0 / (1.0 + std::abs(i - j)), 0.1 * (i - j)};
    // symmetric (not hermitian): S_ij = S_ji as a bilinear pairing matrix
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) S(i, j) = S(j, i);

    const cd lib = kmsgf::wick_sum(S);
    const cd ref = kmsgf::ref::wick_sum(S);
    CHECK(std::abs(lib - ref) <= 1e-12 * std::abs(ref));
  }

  Eigen::MatrixXcd odd(3, 3);
  odd.setOnes();
  CHECK(kmsgf::wick_sum(odd) == cd{0.0, 0.0});
  CHECK(kmsgf::wick_sum(Eigen::MatrixXcd(0, 0)) == cd{1.0, 0.0});

  Eigen::MatrixXcd S2(2, 2);
  S2 << cd{1.0, 0.0}, cd{0.7, 0.2}, cd{0.7, 0.2}, cd{2.0, 0.0};
  CHECK(kmsgf::wick_sum(S2) == S2(0, 1));

  Eigen::MatrixXcd big(14, 14);
  big.setIdentity();
  CHECK_THROWS(kmsgf::wick_sum(big));
}

TEST_CASE("wick sum on index lists handles repeats") {
  Eigen::MatrixXcd S(3, 3);
  S << cd{2.0, 0}, cd{0.5, 0}, cd{0.3, 0},
       cd{0.5, 0}, cd{1.5, 0}, cd{0.2, 0},
       cd{0.3, 0}, cd{0.2, 0}, cd{1.0, 0};
  const std::vector<int> idx{0, 0, 1, 1};
  // pairings of (0,0,1,1): S00*S11 + 2*S01^2
  const cd expect = S(0, 0) * S(1, 1) + 2.0 * S(0, 1) * S(0, 1);
  CHECK(std::abs(kmsgf::wick_sum_indices(S, idx) - expect) < 1e-14);

  const std::vector<int> empty;
  CHECK(kmsgf::wick_sum_indices(S, empty) == cd{1.0, 0.0});
}

TEST_CASE("equal argument moments") {
  const double a = 1.7;
  CHECK_THROWS(kmsgf::equal_argument_moment(a, 0));
  CHECK(kmsgf::equal_argument_moment(a, 1) == 0.0);
  CHECK(kmsgf::equal_argument_moment(a, 2) == doctest::Approx(a).epsilon(1e-15));
  CHECK(kmsgf::equal_argument_moment(a, 4) == doctest::Approx(3.0 * a * a).epsilon(1e-15));
  CHECK(kmsgf::equal_argument_moment(a, 16) ==
        doctest::Approx(2027025.0 * std::pow(a, 8)).epsilon(1e-13));
  CHECK_THROWS(kmsgf::equal_argument_moment(a, 21));
}

TEST_CASE("quasi-free value of a single argument") {
  const ThermalCircle circle(2.0);
  const QuasiFreeSpec spec{Dispersion(Dispersion::Kind::nonrelativistic, 1.0), circle,
                           std::nullopt};
  const Argument arg{kmsgf::make_delta(0.0, 1.0, circle), unit_node()};
  // exp(-coth(1)/2), frozen
  const cd val = kmsgf::quasifree_green(spec, arg);
  CHECK(val.real() == doctest::Approx(0.51865433300413080956).epsilon(1e-14));
  CHECK(val.imag() == 0.0);
}

TEST_CASE("multitime green equals the unit-coefficient combination") {
  const ThermalCircle circle(2.0);
  const QuasiFreeSpec spec{Dispersion(Dispersion::Kind::nonrelativistic, 1.3), circle,
                           std::nullopt};
  const TestFunction f = kmsgf::gaussian_packet(1, {0, 0, 0}, 1.0, 33, 6.0);
  std::vector<SharpPoint> pts{{0.2, f}, {0.9, f}, {1.5, f}};

  FormalCombination x;
  for (const auto& p : pts)
    x.push_back({cd{1.0, 0.0}, Argument{kmsgf::make_delta(p.tau, 1.0, circle), p.f}});

  const cd a = kmsgf::multitime_green(spec, pts);
  const cd b = kmsgf::quasifree_eval(spec, x);
  CHECK(std::abs(a - b) <= 1e-13 * std::abs(a));
  CHECK_THROWS(kmsgf::multitime_green(spec, {}));
}

TEST_CASE("mean part shifts the phase only") {
  const ThermalCircle circle(2.0);
  QuasiFreeSpec spec{Dispersion(Dispersion::Kind::nonrelativistic, 1.0), circle,
                     std::nullopt};
  const Argument arg{kmsgf::make_delta(0.3, 1.0, circle), unit_node()};
  const cd bare = kmsgf::quasifree_green(spec, arg);

  spec.mean = node_fn(0.0, 1.0, {0.7, 0.0});
  spec.mean->real_in_position = true;
  const cd with_mean = kmsgf::quasifree_green(spec, arg);
  // M = integral(psi) * pairing(mean, f, 1) = 1 * 0.7
  CHECK(std::abs(with_mean) == doctest::Approx(std::abs(bare)).epsilon(1e-14));
  CHECK(std::arg(with_mean) == doctest::Approx(0.7).epsilon(1e-13));

  const Eigen::VectorXcd m = kmsgf::sharp_mean(spec, std::vector<SharpPoint>{{0.1, unit_node()}});
  CHECK(m(0).real() == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("schwinger moments match finite differences of the functional") {
  const ThermalCircle circle(2.0);
  const Dispersion disp(Dispersion::Kind::nonrelativistic, 1.0);
  QuasiFreeSpec spec{disp, circle, std::nullopt};
  spec.mean = node_fn(0.0, 1.0, {0.4, 0.0});
  spec.mean->real_in_position = true;

  // real node values keep the covariance matrix real symmetric, so the
  // real-direction finite differences see the same kernel as the Wick sum
  const TestFunction f = unit_node();
  const TestFunction g = node_fn(0.0, 1.0, {0.6, 0.0});
  std::vector<SharpPoint> pts{{0.1, f}, {0.7, g}, {1.3, f}, {1.8, g}};

  const Eigen::MatrixXcd S = kmsgf::sharp_covariance(disp, circle, pts);
  const Eigen::VectorXcd M = kmsgf::sharp_mean(spec, pts);
  std::vector<std::vector<oracle::cld>> S_ld(4, std::vector<oracle::cld>(4));
  std::vector<oracle::cld> M_ld(4);
  for (int i = 0; i < 4; ++i) {
    M_ld[i] = oracle::cld{M(i).real(), M(i).imag()};
    for (int j = 0; j < 4; ++j) S_ld[i][j] = oracle::cld{S(i, j).real(), S(i, j).imag()};
  }

  for (int n = 1; n <= 4; ++n) {
    const cd lib = kmsgf::schwinger_moment(spec, std::span<const SharpPoint>(pts.data(), n));
    const auto fd = oracle::gaussian_moment_fd(S_ld, M_ld, n, 0.05L);
    const cd fd_d{(double)fd.real(), (double)fd.imag()};
    CHECK(std::abs(lib - fd_d) <= 1e-6 * (1.0 + std::abs(lib)));
  }
}

TEST_CASE("odd moments vanish without a mean") {
  const ThermalCircle circle(2.0);
  const QuasiFreeSpec spec{Dispersion(Dispersion::Kind::relativistic, 1.0), circle,
                           std::nullopt};
  const TestFunction f = unit_node();
  std::vector<SharpPoint> pts{{0.1, f}, {0.7, f}, {1.3, f}};
  CHECK(kmsgf::schwinger_moment(spec, pts) == cd{0.0, 0.0});
}

TEST_CASE("mixture green is the weighted atom sum") {
  const ThermalCircle circle(2.0);
  const auto measure = SpectralMeasure::make(1.0, {{1.0, 0.5}, {2.0, 0.5}});
  const Argument arg{kmsgf::make_delta(0.0, 1.0, circle), unit_node()};

  const cd mix = kmsgf::mixture_green(measure, Dispersion::Kind::nonrelativistic,
                                      circle, arg);
  // (exp(-coth(1)/2) + exp(-coth(2)/2))/2, frozen
  CHECK(mix.real() == doctest::Approx(0.55698682196599562495).epsilon(1e-14));
  CHECK(mix.imag() == 0.0);

  // strictly above the generalized-free value at the same argument (strict
  // convexity of exp on distinct atom exponents)
  const cd gf = kmsgf::generalized_free_eval(measure, Dispersion::Kind::nonrelativistic,
                                             circle, {{cd{1.0, 0.0}, arg}});
  // exp(-(coth 1 + coth 2)/4), frozen
  CHECK(gf.real() == doctest::Approx(0.55566621287763053850).epsilon(1e-13));
  CHECK(mix.real() > gf.real() + 1e-4);
}

TEST_CASE("mixture and generalized-free share all moments up to order 2") {
  // Both models have the same covariance; they diverge first at order 4.
  const ThermalCircle circle(2.0);
  const auto measure = SpectralMeasure::make(1.0, {{1.0, 0.3}, {2.5, 0.7}});
  const TestFunction f = unit_node();
  std::vector<SharpPoint> p2{{0.2, f}, {1.1, f}};

  const cd mix2 = kmsgf::schwinger_moment(measure, Dispersion::Kind::nonrelativistic,
                                          circle, p2);
  const Eigen::MatrixXcd Smix = kmsgf::sharp_covariance_mixed(
      measure, Dispersion::Kind::nonrelativistic, circle, p2);
  CHECK(std::abs(mix2 - Smix(0, 1)) < 1e-14);

  std::vector<SharpPoint> p4{{0.2, f}, {1.1, f}, {0.2, f}, {1.1, f}};
  const cd mix4 = kmsgf::schwinger_moment(measure, Dispersion::Kind::nonrelativistic,
                                          circle, p4);
  const cd gf4 = kmsgf::wick_sum(kmsgf::sharp_covariance_mixed(
      measure, Dispersion::Kind::nonrelativistic, circle, p4));
  CHECK(std::abs(mix4 - gf4) > 1e-4);  // distinct at fourth order
}

TEST_CASE("functional wrappers agree with the direct routines") {
  const ThermalCircle circle(2.0);
  const auto measure = SpectralMeasure::make(1.0, {{1.0, 0.5}, {2.0, 0.5}});
  const QuasiFreeSpec spec{Dispersion(Dispersion::Kind::nonrelativistic, 1.0), circle,
                           std::nullopt};
  const TestFunction f = unit_node();
  std::vector<SharpPoint> pts{{0.0, f}, {0.8, f}};
  const FormalCombination x{{cd{0.5, -0.2}, Argument{kmsgf::make_delta(0.3, 1.0, circle), f}},
                            {cd{-1.0, 0.0}, Argument{kmsgf::make_delta(0.9, 0.7, circle), f}}};

  const auto qf = kmsgf::make_quasifree_functional(spec);
  CHECK(qf.name == "quasifree");
  CHECK(qf.eval(x) == kmsgf::quasifree_eval(spec, x));
  CHECK(qf.eval_points(pts) == kmsgf::multitime_green(spec, pts));

  const auto mx = kmsgf::make_mixture_functional(measure, Dispersion::Kind::nonrelativistic, circle);
  CHECK(mx.name == "mixture");
  CHECK(mx.eval(x) == kmsgf::mixture_eval(measure, Dispersion::Kind::nonrelativistic, circle, x));
  CHECK(mx.eval_points(pts) ==
        kmsgf::mixture_multitime(measure, Dispersion::Kind::nonrelativistic, circle, pts));

  const auto gf = kmsgf::make_generalized_free_functional(
      measure, Dispersion::Kind::nonrelativistic, circle);
  CHECK(gf.name == "generalized-free");
  CHECK(gf.eval(x) ==
        kmsgf::generalized_free_eval(measure, Dispersion::Kind::nonrelativistic, circle, x));
  CHECK(gf.eval_points(pts) ==
        kmsgf::generalized_free_multitime(measure, Dispersion::Kind::nonrelativistic, circle, pts));
}

TEST_CASE("single atom mixture collapses to the quasi-free functional") {
  const ThermalCircle circle(2.0);
  const auto dirac = SpectralMeasure::make(1.2, {{1.2, 1.0}});
  const QuasiFreeSpec spec{Dispersion(Dispersion::Kind::nonrelativistic, 1.2), circle,
                           std::nullopt};
  const TestFunction f = kmsgf::gaussian_packet(1, {0, 0, 0}, 0.9, 33, 6.0);
  std::vector<SharpPoint> pts{{0.2, f}, {0.9, f}, {1.4, f}, {0.5, f}};

  const cd a = kmsgf::mixture_multitime(dirac, Dispersion::Kind::nonrelativistic, circle, pts);
  const cd b = kmsgf::generalized_free_multitime(dirac, Dispersion::Kind::nonrelativistic,
                                                 circle, pts);
  const cd c = kmsgf::multitime_green(spec, pts);
  CHECK(std::abs(a - c) <= 1e-14 * std::abs(c));
  CHECK(std::abs(b - c) <= 1e-14 * std::abs(c));
}

} // TEST_SUITE
