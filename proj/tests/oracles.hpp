// Independent reference computations for the unit and acceptance tests.
// Nothing here reuses the library's algorithms: propagation goes through the
// matrix exponential, Wigner values through explicit displacement operators.

#ifndef DICKE2P_TESTS_ORACLES_HPP
#define DICKE2P_TESTS_ORACLES_HPP

#include "dicke2p/hilbert.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

using dicke2p::Complex;
using dicke2p::kI;
using dicke2p::kPi;
using dicke2p::Matrix;
using dicke2p::Matrix4;
using dicke2p::Real;
using dicke2p::Vector;

/// exp(-i h t) psi by the Pade matrix exponential.
inline Vector propagate(const Matrix& h, const Vector& psi, Real t)
{
  const Matrix u = (Complex(0.0, -t) * h).exp();
  return u * psi;
}

/// Coherent amplitudes from the Poisson recurrence p_n = p_{n-1} alpha / sqrt(n), normalized.
inline Vector coherent(Complex alpha, int dim)
{
  Vector p(dim);
  p[0] = 1.0;
  for (int n = 1; n < dim; ++n)
    p[n] = p[n - 1] * alpha / std::sqrt(Real(n));
  return p / p.norm();
}

/// W(beta) = (2/pi) Tr[D(-beta) rho D(beta) Pi] with D built as exp(beta a^dag - beta* a)
/// on a Fock space padded by `pad` levels.
inline Real wigner(const Matrix& rho, Complex beta, int pad = 60)
{
  const int d = static_cast<int>(rho.rows());
  const int big = d + pad;
  Matrix a = Matrix::Zero(big, big);
  for (int n = 1; n < big; ++n)
    a(n - 1, n) = std::sqrt(Real(n));
  const Matrix gen = beta * a.adjoint() - std::conj(beta) * a;
  const Matrix disp = gen.exp();
  Matrix r = Matrix::Zero(big, big);
  r.topLeftCorner(d, d) = rho;
  const Matrix shifted = disp.adjoint() * r * disp;
  Complex w = 0.0;
  for (int n = 0; n < big; ++n)
    w += (n % 2 == 0 ? 1.0 : -1.0) * shifted(n, n);
  return 2.0 / kPi * w.real();
}

/// Wootters concurrence of a two-qubit density matrix (product basis gg, ge, eg, ee).
inline Real concurrence(const Matrix4& rho)
{
  Matrix4 yy = Matrix4::Zero();
  yy(0, 3) = -1.0;
  yy(3, 0) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  const Matrix4 tilde = yy * rho.conjugate() * yy;
  Eigen::ComplexEigenSolver<Matrix4> es(rho * tilde);
  std::vector<Real> l;
  for (int k = 0; k < 4; ++k)
    l.push_back(std::sqrt(std::max(0.0, es.eigenvalues()[k].real())));
  std::sort(l.begin(), l.end(), std::greater<>());
  return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline Real ks_statistic(std::vector<Real> a, std::vector<Real> b)
{
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  Real d = 0.0;
  while (i < a.size() && j < b.size()) {
    const Real x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x)
      ++i;
    while (j < b.size() && b[j] <= x)
      ++j;
    d = std::max(d, std::abs(Real(i) / a.size() - Real(j) / b.size()));
  }
  return d;
}

/// Critical KS value at significance 1% for sample sizes n and m.
inline Real ks_critical_1pct(std::size_t n, std::size_t m)
{
  return 1.628 * std::sqrt(Real(n + m) / Real(n * m));
}

/// Composite Simpson rule on [a, b] with an even number of intervals.
template <typename F>
Real simpson(F&& f, Real a, Real b, int intervals)
{
  const Real h = (b - a) / intervals;
  Real s = f(a) + f(b);
  for (int k = 1; k < intervals; ++k)
    s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

}  // namespace oracle

#endif
