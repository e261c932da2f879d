// Benchmark of the parallel kernel paths against the plain serial reference
// implementations. Each workload is timed three ways: the left-to-right
// reference, the pairwise tree in serial mode, and the pairwise tree with
// OpenMP enabled. Serial and parallel tree results must agree bit for bit;
// the reference must agree to 1e-12 relative. Exit is nonzero on any
// agreement failure, so the benchmark doubles as a consistency check.

#include <kmsgf/kernel.hpp>
#include <kmsgf/greens.hpp>
#include <kmsgf/reduce.hpp>
#include <kmsgf/ref.hpp>
#include <kmsgf/spectral.hpp>

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <vector>

namespace {

using cd = std::complex<double>;

cd g_sink{0.0, 0.0};  // keeps the timed calls observable

double best_ms(int reps, const std::function<cd()>& work) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    g_sink += work();
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    if (ms < best) best = ms;
  }
  return best;
}

bool bit_equal(cd a, cd b) {
  return std::bit_cast<std::uint64_t>(a.real()) == std::bit_cast<std::uint64_t>(b.real()) &&
         std::bit_cast<std::uint64_t>(a.imag()) == std::bit_cast<std::uint64_t>(b.imag());
}

struct Row {
  const char* name;
  std::function<cd()> reference;
  std::function<cd()> tree;
  int reps;
};

} // namespace

int main() {
  using kmsgf::Dispersion;
  using kmsgf::TestFunction;
  using kmsgf::ThermalCircle;

  const ThermalCircle circle(2.0);
  const Dispersion disp(Dispersion::Kind::nonrelativistic, 1.0);

  // spectral pairing over two wide packets on a shared 400001-node grid
  const TestFunction pa = kmsgf::gaussian_packet(1, {0.0, 0.0, 0.0}, 1.0, 400001, 10.0);
  const TestFunction pb = kmsgf::gaussian_packet(1, {0.3, 0.0, 0.0}, 0.7, 400001, 10.0);
  const auto phi = [&](double lambda) { return kmsgf::covariance_scalar(lambda, 0.4, circle); };

  // comb kernel with 500 x 500 time-atom pairs on single-node functions
  TestFunction fnode;
  fnode.dim = 1;
  fnode.nodes.push_back({{0.0, 0.0, 0.0}, 1.0, {1.0, 0.0}});
  fnode.real_in_position = true;
  std::vector<kmsgf::DeltaComb::Atom> atoms_a, atoms_b;
  for (int i = 0; i < 500; ++i) {
    atoms_a.push_back({-0.95 + 1.9 * i / 499.0, std::cos(0.1 * i)});
    atoms_b.push_back({-0.90 + 1.8 * i / 499.0, std::sin(0.07 * i + 0.3)});
  }
  const kmsgf::TimeProfile comb_a = kmsgf::make_delta_comb(atoms_a, circle);
  const kmsgf::TimeProfile comb_b = kmsgf::make_delta_comb(atoms_b, circle);
  const kmsgf::DeltaComb& raw_a = std::get<kmsgf::DeltaComb>(comb_a.value);
  const kmsgf::DeltaComb& raw_b = std::get<kmsgf::DeltaComb>(comb_b.value);

  // Wick sum over the 10395 pair matchings of 12 points
  Eigen::MatrixXcd S(12, 12);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) {
      const cd v{1.0 / (1.0 + std::abs(i - j)), 0.03 * (j - i)};
      S(i, j) = v;
    }

  // truncated Matsubara sum with 2 million modes per side
  const long n_modes = 2000000;
  const double h = 1.7, t = 0.6;
  const auto matsubara_tree = [&]() {
    const std::size_t count = std::size_t(2 * n_modes + 1);
    const double sum = kmsgf::pairwise_sum<double>(count, [&](std::size_t i) {
      const double omega = circle.matsubara(int(long(i) - n_modes));
      return kmsgf::matsubara_mode_weight(h, omega) * std::cos(omega * t) / circle.beta;
    });
    return cd{sum, 0.0};
  };

  Row rows[] = {
      {"spectral pairing, 400001 nodes",
       [&] { return kmsgf::ref::spectral_pairing(pa, pb, phi, disp); },
       [&] { return kmsgf::spectral_pairing(pa, pb, phi, disp); }, 10},
      {"comb kernel, 500 x 500 atoms",
       [&] { return kmsgf::ref::kernel_smeared_combs(raw_a, fnode, raw_b, fnode, disp, circle); },
       [&] { return kmsgf::kernel_smeared(comb_a, fnode, comb_b, fnode, disp, circle); }, 5},
      {"wick sum, 12 points",
       [&] { return kmsgf::ref::wick_sum(S); },
       [&] { return kmsgf::wick_sum(S); }, 10},
      {"matsubara sum, 4000001 modes",
       [&] { return cd{kmsgf::ref::matsubara_partial_sum(h, t, circle.beta, n_modes), 0.0}; },
       matsubara_tree, 5},
  };

  std::printf("%-32s %10s %10s %10s %9s %12s %5s\n", "workload", "ref ms", "serial ms",
              "openmp ms", "speedup", "ref rel dev", "bits");
  bool ok = true;
  for (const auto& row : rows) {
    kmsgf::set_execution_mode(kmsgf::Exec::serial);
    const cd v_serial = row.tree();
    const double ms_serial = best_ms(row.reps, row.tree);

    kmsgf::set_execution_mode(kmsgf::Exec::parallel);
    const cd v_parallel = row.tree();
    const double ms_parallel = best_ms(row.reps, row.tree);

    const cd v_ref = row.reference();
    const double ms_ref = best_ms(row.reps, row.reference);

    const bool bits = bit_equal(v_serial, v_parallel);
    const double rel = std::abs(v_ref - v_serial) / std::abs(v_serial);
    ok = ok && bits && rel < 1e-12;

    std::printf("%-32s %10.3f %10.3f %10.3f %8.2fx %12.2e %5s\n", row.name, ms_ref,
                ms_serial, ms_parallel, ms_serial / ms_parallel, rel,
                bits ? "same" : "DIFF");
  }
  kmsgf::set_execution_mode(kmsgf::Exec::parallel);

  if (!ok) {
    std::printf("benchmark consistency FAILED\n");
    return 1;
  }
  return 0;
}
