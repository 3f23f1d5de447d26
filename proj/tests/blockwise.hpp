// Blockwise assembly of the large-n solution from the 3x3 block propagators,
// written independently of analytic_state for cross-checks.

#ifndef DICKE2P_TESTS_BLOCKWISE_HPP
#define DICKE2P_TESTS_BLOCKWISE_HPP

#include "dicke2p/dynamics.hpp"

#include <cmath>

namespace blockwise {

using namespace dicke2p;

inline Eigen::Index gg(const FockCutoff& c, int n) { return 0 * c.dim() + n; }
inline Eigen::Index ge(const FockCutoff& c, int n) { return 1 * c.dim() + n; }
inline Eigen::Index eg(const FockCutoff& c, int n) { return 2 * c.dim() + n; }
inline Eigen::Index ee(const FockCutoff& c, int n) { return 3 * c.dim() + n; }

// Blockwise assembly through block_propagator applied to the initial triples.
inline Vector blockwise_state(const AtomCoeffs& c, Complex alpha, Real g, Real t, const FockCutoff& cut)
{
  const Vector p = coherent_state(alpha, cut).amplitudes();
  const int nm = cut.n_max();
  auto amp = [&](int n) -> Complex { return n >= 0 && n <= nm ? p[n] : Complex{}; };
  Vector out = Vector::Zero(4 * cut.dim());
  const Real r = 1.0 / std::sqrt(2.0);
  for (int m = 0; m <= nm; ++m) {
    out[ge(cut, m)] += r * c.c_minus * p[m];
    out[eg(cut, m)] -= r * c.c_minus * p[m];
  }
  out[gg(cut, 0)] += c.c_g * p[0];
  out[gg(cut, 1)] += c.c_g * p[1];
  for (int n = 2; n <= nm + 4; ++n) {
    const Eigen::Vector3cd in(c.c_g * amp(n), c.c_plus * amp(n - 2), n >= 4 ? c.c_e * amp(n - 4) : Complex{});
    const Eigen::Vector3cd v = block_propagator(g, n, t).m * in;
    if (n <= nm)
      out[gg(cut, n)] += v[0];
    if (n - 2 <= nm) {
      out[ge(cut, n - 2)] += r * v[1];
      out[eg(cut, n - 2)] += r * v[1];
    }
    if (n >= 4 && n - 4 <= nm)
      out[ee(cut, n - 4)] += v[2];
  }
  return out / out.norm();
}

}  // namespace blockwise

#endif
