#pragma once

#include "kmsgf/greens.hpp"

/** Plain serial reference implementations.
 *
 * Each routine mirrors a library operation with the most literal algorithm
 * available: left-to-right accumulation, recursive matching enumeration, no
 * pairwise tree, no OpenMP.  Tests compare the main implementations against
 * these, and the benchmark measures both.
 */
namespace kmsgf::ref {

/** Left-to-right weighted spectral sum (same contract as kmsgf::spectral_pairing). */
cd spectral_pairing(const TestFunction& f, const TestFunction& g,
                    const std::function<double(double)>& phi, const Dispersion& disp);

/** Double time sum over comb atoms, plainly nested. */
cd kernel_smeared_combs(const DeltaComb& c1, const TestFunction& f1,
                        const DeltaComb& c2, const TestFunction& f2,
                        const Dispersion& disp, const ThermalCircle& circle);

/** Truncated Matsubara sum (1/beta) sum_{|n| <= n_modes} 2h/(h^2 + omega_n^2)
 *  e^{i omega_n t}, accumulated in ascending n, plain double. */
double matsubara_partial_sum(double h, double t, double beta, long n_modes);

/** Recursive Wick sum: pair the first index with each partner in turn. */
cd wick_sum(const Eigen::MatrixXcd& S);

} // namespace kmsgf::ref
