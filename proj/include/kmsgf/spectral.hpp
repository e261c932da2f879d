#pragma once

#include <array>
#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace kmsgf {

using cd = std::complex<double>;

/** One-particle dispersion relation.
 *
 * nonrelativistic: lambda(k) = |k|^2 + mu
 * relativistic:    lambda(k) = sqrt(|k|^2 + mu^2)
 * Both satisfy lambda(k) >= mu > 0, so 1/lambda and thermal occupation
 * factors are finite on the whole grid.
 */
struct Dispersion {
  enum class Kind { nonrelativistic, relativistic };

  Kind kind = Kind::nonrelativistic;
  double mu = 1.0;

  Dispersion() = default;
  Dispersion(Kind k, double mu_);

  /** Spectral value at squared momentum |k|^2. */
  double lambda_of_ksq(double ksq) const;

  /** Lower edge of the spectrum; equals mu for both kinds. */
  double floor() const { return mu; }
};

/** Momentum-space test function on a fixed quadrature grid.
 *
 * Nodes hold (k, w, v) with w the quadrature weight and v = fhat(k).  All
 * pairings reduce to weighted sums over the grid, so two functions can only
 * be paired when they share the same node layout (no resampling).
 *
 * real_in_position marks functions whose position-space counterpart is real:
 * for every node k there is a node -k carrying conj(v).  Construction keeps
 * mirrored nodes bitwise negated so the check is exact for packets.
 */
struct TestFunction {
  struct Node {
    std::array<double, 3> k{0.0, 0.0, 0.0};
    double w = 0.0;
    cd v{0.0, 0.0};
  };

  int dim = 1;
  std::vector<Node> nodes;
  bool real_in_position = false;

  double norm2() const;  // sum of w*|v|^2
  bool is_zero() const;  // all values exactly zero
};

/** Throws std::invalid_argument when weights, dimensions, finiteness,
 *  node distinctness, or the flagged realness pairing are violated. */
void validate(const TestFunction& f);

/** True when f and g share dim and the identical node layout (k and w
 *  compared bitwise, order included). */
bool grid_compatible(const TestFunction& f, const TestFunction& g);

/** Gaussian packet fhat(k) = exp(-|k - center|^2 / (4 width^2)) sampled on a
 * symmetric trapezoid grid over [-cutoff, cutoff]^dim with n_nodes points per
 * axis, then normalized to norm2() == 1.
 *
 * Reasonable defaults when the caller has no preference: cutoff = 8*width +
 * |center|, n_nodes = 129 per axis in dim 1 (see default_cutoff below); they
 * are not baked in here.  cutoff may be 0 only in the degenerate n_nodes == 1
 * case (single node at k = 0).  The grid is mirrored exactly, so the realness
 * flag is set whenever center == 0.
 */
TestFunction gaussian_packet(int dim, const std::array<double, 3>& center,
                             double width, int n_nodes, double cutoff);

double default_cutoff(int dim, const std::array<double, 3>& center, double width);
inline constexpr int default_nodes_per_axis = 129;

/** a*f + b*g on the shared grid; realness survives only for real a, b. */
TestFunction linear_combination(cd a, const TestFunction& f, cd b, const TestFunction& g);

/** Same grid as f with all values zero. */
TestFunction zero_like(const TestFunction& f);

/** Weighted spectral sum  sum_k w_k conj(fhat(k)) ghat(k) phi(lambda(k)).
 *
 * Sesquilinear: conjugate on f, linear in g.  For f == g and phi >= 0 on
 * [mu, inf) the value is real and nonnegative.  Throws on incompatible grids
 * or a non-finite phi value.
 */
cd spectral_pairing(const TestFunction& f, const TestFunction& g,
                    const std::function<double(double)>& phi,
                    const Dispersion& disp);

/** Negative-index Sobolev norm  sqrt( <f, (1/lambda) f> ). */
double sobolev_norm_minus1(const TestFunction& f, const Dispersion& disp);

/** Plain text serialization: header line "testfunction dim <d> nodes <n>
 *  real <0|1>", then one "k... w re im" line per node. */
void write_text(std::ostream& os, const TestFunction& f);
TestFunction read_test_function_text(std::istream& is);

} // namespace kmsgf
