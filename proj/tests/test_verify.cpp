#include <doctest.h>

#include <cmath>
#include <vector>

#include "kmsgf/verify.hpp"

using kmsgf::Argument;
using kmsgf::cd;
using kmsgf::Dispersion;
using kmsgf::GramReport;
using kmsgf::QuasiFreeSpec;
using kmsgf::SpectralMeasure;
using kmsgf::TestFunction;
using kmsgf::ThermalCircle;

namespace {

TestFunction node_fn(cd v) {
  TestFunction f;
  f.dim = 1;
  f.nodes.push_back({{0.0, 0.0, 0.0}, 1.0, v});
  return f;
}

// Deterministic value stream in [0, 1).
struct Lcg {
  std::uint64_t s = 88172645463325252ull;
  double next() {
    s = s * 6364136223846793005ull + 1442695040888963407ull;
    return double(s >> 11) * 0x1.0p-53;
  }
  double range(double lo, double hi) { return lo + (hi - lo) * next(); }
};

std::vector<Argument> random_family(Lcg& rng, const ThermalCircle& circle, int size,
                                    bool half_circle) {
  std::vector<Argument> fam;
  for (int i = 0; i < size; ++i) {
    const int n_atoms = 1 + int(rng.next() * 2.0);
    std::vector<kmsgf::DeltaComb::Atom> atoms;
    for (int a = 0; a < n_atoms; ++a) {
      const double tau = half_circle ? rng.range(0.0, circle.beta / 2.0)
                                     : rng.range(-circle.beta / 2.0, circle.beta / 2.0);
      atoms.push_back({tau, rng.range(-1.0, 1.0)});
    }
    fam.push_back({kmsgf::make_delta_comb(std::move(atoms), circle),
                   node_fn(cd{rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)})});
  }
  return fam;
}

} // namespace

TEST_SUITE("verify") {

TEST_CASE("classify_gram verdicts and guards") {
  Eigen::MatrixXcd I3 = Eigen::MatrixXcd::Identity(3, 3);
  const GramReport ok = kmsgf::classify_gram(I3, 1e-10);
  CHECK(ok.verdict == GramReport::Verdict::psd);
  CHECK(ok.lambda_min == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ok.asymmetry == 0.0);

  // indefinite 3x3: all-ones Gram with one flipped off-diagonal pair
  Eigen::MatrixXcd flip = Eigen::MatrixXcd::Ones(3, 3);
  flip(0, 1) = flip(1, 0) = cd{-1.0, 0.0};
  const GramReport bad = kmsgf::classify_gram(flip, 1e-10);
  CHECK(bad.verdict == GramReport::Verdict::indefinite);
  CHECK(bad.lambda_min < -0.5);
  REQUIRE(bad.witness.size() == 3);
  // witness certifies negativity: x* A x < 0
  const cd q = (bad.witness.adjoint() * bad.matrix * bad.witness)(0, 0);
  CHECK(q.real() < -0.5);

  // tiny negative within tolerance stays psd
  Eigen::MatrixXcd near = I3;
  near(2, 2) = cd{-1e-12, 0.0};
  CHECK(kmsgf::classify_gram(near, 1e-10).verdict == GramReport::Verdict::psd);

  // gross asymmetry is an input error, not a verdict
  Eigen::MatrixXcd asym = I3;
  asym(0, 1) = cd{0.5, 0.0};
  CHECK_THROWS(kmsgf::classify_gram(asym, 1e-10));
  CHECK_THROWS(kmsgf::classify_gram(I3, 0.0));
  CHECK_THROWS(kmsgf::classify_gram(Eigen::MatrixXcd(0, 0), 1e-10));
}

TEST_CASE("s positivity over random families and all three models") {
  const ThermalCircle circle(2.0);
  const auto measure = SpectralMeasure::make(1.0, {{1.0, 0.4}, {2.5, 0.6}});
  const QuasiFreeSpec spec{Dispersion(Dispersion::Kind::nonrelativistic, 1.0), circle,
                           std::nullopt};
  const std::vector<kmsgf::GreenFunctional> models{
      kmsgf::make_quasifree_functional(spec),
      kmsgf::make_mixture_functional(measure, Dispersion::Kind::nonrelativistic, circle),
      kmsgf::make_generalized_free_functional(measure, Dispersion::Kind::nonrelativistic,
                                              circle)};

  Lcg rng;
  for (int trial = 0; trial < 6; ++trial) {
    const auto fam = random_family(rng, circle, 2 + trial % 4, false);
    for (const auto& G : models) {
      const GramReport rep = kmsgf::s_positivity(G, fam, 1e-10);
      CHECK(rep.verdict == GramReport::Verdict::psd);
    }
  }
}

TEST_CASE("reflection positivity requires half-circle support") {
  const ThermalCircle circle(2.0);
  const QuasiFreeSpec spec{Dispersion(Dispersion::Kind::nonrelativistic, 1.0), circle,
                           std::nullopt};
  const auto G = kmsgf::make_quasifree_functional(spec);

  Lcg rng;
  for (int trial = 0; trial < 6; ++trial) {
    const auto fam = random_family(rng, circle, 2 + trial % 3, true);
    const GramReport rep = kmsgf::reflection_positivity(G, fam, circle, 1e-10);
    CHECK(rep.verdict == GramReport::Verdict::psd);
  }

  // an atom on the negative half circle is rejected
  std::vector<Argument> bad{{kmsgf::make_delta(-0.3, 1.0, circle), node_fn({1.0, 0.0})}};
  CHECK_THROWS(kmsgf::reflection_positivity(G, bad, circle, 1e-10));
}

TEST_CASE("reflect_argument flips comb atoms") {
  const ThermalCircle circle(2.0);
  const Argument arg{kmsgf::make_delta(0.4, 1.0, circle), node_fn({1.0, 0.0})};
  const Argument ref = kmsgf::reflect_argument(arg, circle);
  CHECK(ref.profile.comb().atoms[0].tau == -0.4);
  CHECK_NOTHROW(kmsgf::require_reflection_support(arg, circle));
  CHECK_THROWS(kmsgf::require_reflection_support(ref, circle));

  // series supported everywhere fails the support check
  const Argument smooth{kmsgf::make_series(1, {{0.25, 0.0}, {0.5, 0.0}, {0.25, 0.0}}),
                        node_fn({1.0, 0.0})};
  CHECK_THROWS(kmsgf::require_reflection_support(smooth, circle));
}

TEST_CASE("kernel positivity in s and r types") {
  const ThermalCircle circle(2.0);
  const auto measure = SpectralMeasure::make(1.0, {{1.0, 0.4}, {2.5, 0.6}});
  const auto Bfree = kmsgf::free_kernel_form(
      Dispersion(Dispersion::Kind::nonrelativistic, 1.0), circle);
  const auto Bmix = kmsgf::mixed_kernel_form(measure, Dispersion::Kind::relativistic, circle);

  Lcg rng;
  for (int trial = 0; trial < 6; ++trial) {
    const auto s_fam = random_family(rng, circle, 2 + trial % 4, false);
    const auto r_fam = random_family(rng, circle, 2 + trial % 4, true);
    for (const auto& B : {Bfree, Bmix}) {
      CHECK(kmsgf::kernel_positivity(B, s_fam, kmsgf::GramType::s_type, circle, 1e-10)
                .verdict == GramReport::Verdict::psd);
      CHECK(kmsgf::kernel_positivity(B, r_fam, kmsgf::GramType::r_type, circle, 1e-10)
                .verdict == GramReport::Verdict::psd);
    }
  }
}

TEST_CASE("corrupted kernel is flagged indefinite") {
  const ThermalCircle circle(2.0);
  const auto Bfree = kmsgf::free_kernel_form(
      Dispersion(Dispersion::Kind::nonrelativistic, 1.0), circle);
  // family of three identical arguments with sign-flipped off-diagonal
  // entries: x = (1, 1, -1) drives the quadratic form negative
  const Argument arg{kmsgf::make_delta(0.2, 1.0, circle), node_fn({1.0, 0.0})};
  std::vector<Argument> fam{arg, arg, arg};
  Eigen::MatrixXcd M(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const cd v = Bfree(fam[std::size_t(i)], fam[std::size_t(j)]);
      M(i, j) = (i == j) ? v : -v;
    }
  const GramReport rep = kmsgf::classify_gram(M, 1e-10);
  CHECK(rep.verdict == GramReport::Verdict::indefinite);
  CHECK(rep.lambda_min < -1e-6);
}

TEST_CASE("invariance audit passes on the free model and sees violations") {
  const ThermalCircle circle(2.0);
  const QuasiFreeSpec spec{Dispersion(Dispersion::Kind::nonrelativistic, 1.0), circle,
                           std::nullopt};
  const auto G = kmsgf::make_quasifree_functional(spec);
  const TestFunction f = node_fn({1.0, 0.0});
  std::vector<kmsgf::SharpPoint> pts{{0.1, f}, {0.6, f}, {1.5, f}};
  std::vector<double> shifts{0.3, -0.9, 1.4, 0.77};

  const auto rep = kmsgf::invariance_audit(G, pts, shifts, circle, 1e-11);
  CHECK(rep.pass);
  CHECK(rep.shift_deviation < 1e-11);
  CHECK(rep.reflection_deviation < 1e-11);
  CHECK(rep.periodicity_deviation < 1e-11);

  // a non-invariant functional trips the audit
  kmsgf::GreenFunctional broken = G;
  broken.eval_points = [&](std::span<const kmsgf::SharpPoint> p) {
    cd v = kmsgf::multitime_green(spec, p);
    return v + cd{0.001 * p[0].tau, 0.0};
  };
  const auto bad = kmsgf::invariance_audit(broken, pts, shifts, circle, 1e-11);
  CHECK_FALSE(bad.pass);
}

TEST_CASE("boundedness probe stays under the sharp kernel envelope") {
  const ThermalCircle circle(2.0);
  const Dispersion disp(Dispersion::Kind::nonrelativistic, 1.0);
  const auto B = kmsgf::free_kernel_form(disp, circle);

  std::vector<TestFunction> fam;
  fam.push_back(kmsgf::gaussian_packet(1, {0, 0, 0}, 1.0, 65, 7.0));
  fam.push_back(kmsgf::gaussian_packet(1, {0.5, 0, 0}, 0.8, 65, 7.0));
  fam.push_back(kmsgf::gaussian_packet(1, {-1.0, 0, 0}, 1.3, 65, 7.0));
  fam.push_back(kmsgf::zero_like(fam[0]));

  const double lam_max = kmsgf::family_lambda_max(fam, disp);
  CHECK(lam_max >= 1.0 + 49.0);  // cutoff node at |k| = 7
  const double bound = kmsgf::sharp_kernel_bound(disp, circle, lam_max);
  const auto rep = kmsgf::boundedness_probe(B, fam, disp, circle, bound);
  CHECK(rep.pass);
  CHECK(rep.sup_ratio <= bound);
  CHECK(rep.sup_ratio > 0.0);
  CHECK(rep.pairs == 16);
}

TEST_CASE("growth probe fits factorial-power envelopes") {
  const auto rep = kmsgf::growth_estimate_probe(1.7, 16, 0.6);
  CHECK(rep.bound_holds);
  CHECK(rep.C > 0.0);
  CHECK(rep.R > 0.0);
  CHECK(rep.max_residual < 0.5);
  CHECK(rep.n_max == 16);
  CHECK(rep.gamma == 0.6);

  // the bound must actually dominate the probed moments
  for (int n = 2; n <= 16; n += 2) {
    const double sn = kmsgf::equal_argument_moment(1.7, n);
    const double env = rep.C * std::pow(std::tgamma(n + 1.0), 0.6) * std::pow(rep.R, n);
    CHECK(sn <= env * (1.0 + 1e-9));
  }

  CHECK_THROWS(kmsgf::growth_estimate_probe(1.0, 3, 0.6));   // odd n_max
  CHECK_THROWS(kmsgf::growth_estimate_probe(-1.0, 8, 0.6));  // negative variance
}

} // TEST_SUITE
