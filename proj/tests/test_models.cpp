#include "dicke2p/dynamics.hpp"
#include "dicke2p/models.hpp"

#include <Eigen/Eigenvalues>

#include <doctest.h>

#include <algorithm>

using namespace dicke2p;

namespace {

FullModelParams full_params(int n_max, Real delta = 500.0, Real gg = 1.0, Real ge = 1.0, Real omega = 0.0)
{
  FullModelParams p;
  p.omega = omega;
  p.delta = delta;
  p.g_g = gg;
  p.g_e = ge;
  p.cutoff = FockCutoff(n_max);
  return p;
}

// Index of |mu, nu, n> in the atoms (x) field ordering.
Eigen::Index idx(int mu, int nu, int n, int levels, const FockCutoff& c)
{
  return (mu * levels + nu) * c.dim() + n;
}

}  // namespace

TEST_CASE("full Hamiltonian")
{
  const FullModelParams p = full_params(6, 500.0, 1.0, 1.3, 0.7);
  const Operator h = full_hamiltonian(p);
  const FockCutoff& c = p.cutoff;
  CHECK(h.dim() == 9 * c.dim());
  CHECK(h.is_hermitian());
  CHECK(max_abs(Matrix(h.matrix() - h.matrix().adjoint())) < 1e-12);
  CHECK(std::abs(h.matrix()(idx(0, 0, 0, 3, c), idx(0, 0, 0, 3, c))) == 0.0);
  const Complex ii0 = h.matrix()(idx(1, 1, 0, 3, c), idx(1, 1, 0, 3, c));
  CHECK(std::abs(ii0 - 2.0 * (p.omega + p.delta)) < 1e-12);
}

TEST_CASE("constant of motion commutes with both Hamiltonians")
{
  const FullModelParams p = full_params(12, 40.0, 1.0, 1.7, 0.3);
  const Matrix i3 = constant_of_motion(p.cutoff, 3).matrix();
  CHECK(max_abs(commutator(i3, full_hamiltonian(p).matrix())) < 1e-10);

  const EffectiveModelParams e{0.8, FockCutoff(12)};
  const Matrix i2 = constant_of_motion(e.cutoff, 2).matrix();
  CHECK(max_abs(commutator(i2, two_photon_w(e).matrix())) < 1e-12);

  const FockCutoff& c = e.cutoff;
  CHECK(std::abs(i2(idx(1, 1, 6, 2, c), idx(1, 1, 6, 2, c)) - 10.0) < 1e-14);  // |ee, n-4> with n = 10
  CHECK(std::abs(i2(idx(0, 0, 7, 2, c), idx(0, 0, 7, 2, c)) - 7.0) < 1e-14);
}

TEST_CASE("two-photon interaction W")
{
  const EffectiveModelParams e{1.0, FockCutoff(12)};
  const Matrix w = two_photon_w(e).matrix();
  const FockCutoff& c = e.cutoff;
  const Eigen::Index d = c.dim();

  // <Psi+, n-2| W |gg, n> at n = 4
  const int n = 4;
  Vector gg(4 * d), psi_plus(4 * d);
  gg.setZero();
  psi_plus.setZero();
  gg[idx(0, 0, n, 2, c)] = 1.0;
  psi_plus[idx(0, 1, n - 2, 2, c)] = 1.0 / std::sqrt(2.0);
  psi_plus[idx(1, 0, n - 2, 2, c)] = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(psi_plus.dot(w * gg) - std::sqrt(2.0) * std::sqrt(12.0)) < 1e-12);

  for (int m = 0; m < d; ++m) {
    Vector dark = Vector::Zero(4 * d);
    dark[idx(0, 1, m, 2, c)] = 1.0 / std::sqrt(2.0);
    dark[idx(1, 0, m, 2, c)] = -1.0 / std::sqrt(2.0);
    CHECK(max_abs(Vector(w * dark)) < 1e-14);
  }
  for (int m : {0, 1}) {
    Vector v = Vector::Zero(4 * d);
    v[idx(0, 0, m, 2, c)] = 1.0;
    CHECK(max_abs(Vector(w * v)) < 1e-14);
  }
}

TEST_CASE("W is assembled exactly from its 3x3 blocks")
{
  const Real g = 0.7;
  const EffectiveModelParams e{g, FockCutoff(30)};
  const Matrix w = two_photon_w(e).matrix();
  const FockCutoff& c = e.cutoff;
  const Eigen::Index d = c.dim();

  Matrix assembled = Matrix::Zero(4 * d, 4 * d);
  for (int n = 2; n <= c.n_max(); ++n) {
    // basis vectors |gg,n>, |Psi+,n-2>, |ee,n-4> in the product basis
    std::array<Vector, 3> basis;
    for (auto& b : basis)
      b = Vector::Zero(4 * d);
    basis[0][idx(0, 0, n, 2, c)] = 1.0;
    basis[1][idx(0, 1, n - 2, 2, c)] = 1.0 / std::sqrt(2.0);
    basis[1][idx(1, 0, n - 2, 2, c)] = 1.0 / std::sqrt(2.0);
    const bool has_ee = n >= 4;
    if (has_ee)
      basis[2][idx(1, 1, n - 4, 2, c)] = 1.0;
    const BlockMatrix3 b = block_w_n(g, n);
    const int k = has_ee ? 3 : 2;
    for (int r = 0; r < k; ++r)
      for (int s = 0; s < k; ++s)
        assembled += b.m(r, s) * basis[static_cast<std::size_t>(r)] * basis[static_cast<std::size_t>(s)].adjoint();
  }
  // the top photon numbers are coupled by W but have no |gg, n> partner inside the cutoff
  Matrix restricted = w;
  for (int n = c.n_max() - 1; n <= c.n_max(); ++n)
    for (int a = 0; a < 4; ++a) {
      restricted.row(a * d + n).setZero();
      restricted.col(a * d + n).setZero();
      assembled.row(a * d + n).setZero();
      assembled.col(a * d + n).setZero();
    }
  CHECK(max_abs(Matrix(restricted - assembled)) < 1e-12);
}

TEST_CASE("Stark shift operator")
{
  SUBCASE("equal couplings remove the photon-dependent term")
  {
    const FullModelParams p = full_params(10, 500.0, 1.0, 1.0);
    const Matrix s = stark_shift(p).matrix();
    const Matrix expected = (-2.0 / p.delta) * constant_of_motion(p.cutoff, 2).matrix() +
                            (3.0 / p.delta) * on_atoms(collective_op(Level::e, Level::e, 2), p.cutoff).matrix();
    CHECK(max_abs(Matrix(s - expected)) < 1e-14);
  }
  SUBCASE("diagonal element on |gg, n> and Hermiticity")
  {
    const FullModelParams p = full_params(10, 300.0, 0.9, 1.4);
    const Matrix s = stark_shift(p).matrix();
    for (int n = 0; n <= 10; ++n)
      CHECK(std::abs(s(idx(0, 0, n, 2, p.cutoff), idx(0, 0, n, 2, p.cutoff)) + 2.0 * 0.81 / 300.0 * n) < 1e-14);
    CHECK(max_abs(Matrix(s - s.adjoint())) < 1e-12);
  }
}

TEST_CASE("adiabatic elimination: full spectrum against S + W per sector")
{
  // At the level of each constant-of-motion sector, the eigenvalues of the
  // three-level Hamiltonian that continue the {g, e} states must follow
  // S + W up to the next order of the elimination, ~ g_e^4 n^2 / Delta^3.
  const Real delta = 500.0;
  const FullModelParams p = full_params(40, delta);
  const Matrix h = full_hamiltonian(p).matrix();
  const Matrix i3 = constant_of_motion(p.cutoff, 3).matrix();
  const EffectiveModelParams ep{effective_coupling(p.g_g, p.g_e, delta), p.cutoff};
  const Matrix heff = stark_shift(p).matrix() + two_photon_w(ep).matrix();
  const Matrix i2 = constant_of_motion(p.cutoff, 2).matrix();

  for (int sector = 4; sector <= 30; ++sector) {
    auto pick = [&](const Matrix& op, const Matrix& q) {
      std::vector<Eigen::Index> k;
      for (Eigen::Index r = 0; r < q.rows(); ++r)
        if (std::abs(q(r, r).real() - sector) < 1e-9)
          k.push_back(r);
      Matrix b(k.size(), k.size());
      for (std::size_t r = 0; r < k.size(); ++r)
        for (std::size_t s = 0; s < k.size(); ++s)
          b(Eigen::Index(r), Eigen::Index(s)) = op(k[r], k[s]);
      return Eigen::SelfAdjointEigenSolver<Matrix>(b).eigenvalues().eval();
    };
    const Eigen::VectorXd full = pick(h, i3);
    const Eigen::VectorXd eff = pick(heff, i2);
    // Two-level-like eigenvalues sit far below the Delta-shifted intermediate ones.
    std::vector<Real> low;
    for (Eigen::Index k = 0; k < full.size(); ++k)
      if (full[k] < 0.5 * delta)
        low.push_back(full[k]);
    REQUIRE(low.size() == static_cast<std::size_t>(eff.size()));
    std::sort(low.begin(), low.end());
    const Real tol = 10.0 * std::pow(p.g_e, 4) * sector * sector / std::pow(delta, 3);
    for (Eigen::Index k = 0; k < eff.size(); ++k)
      CHECK(std::abs(low[static_cast<std::size_t>(k)] - eff[k]) < tol);
  }
}

TEST_CASE("effective coupling")
{
  CHECK(effective_coupling(1.0, 1.0, 500.0) == doctest::Approx(-0.002));
  CHECK(effective_coupling(0.7, 1.9, 30.0) < 0.0);
  CHECK(effective_coupling(0.7, 1.9, 30.0) == effective_coupling(1.9, 0.7, 30.0));
  CHECK_THROWS_AS(effective_coupling(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("trapped-ion coupling")
{
  const Real g = trapped_ion_coupling(2.0 * kPi * 1e3, 1e-2);
  CHECK(std::abs(g) == doctest::Approx(2.0 * kPi * 1e3 * 1e-4 / 2.0));
  CHECK(std::abs(g) == doctest::Approx(0.314159).epsilon(1e-5));
  CHECK(trapped_ion_coupling(2.0 * kPi * 1e3, 0.0) == 0.0);
  // protocol time for |g_eff| = 100 Hz is of order 10 ms
  const Real t = kPi / (2.0 * 100.0);
  CHECK(t > 1e-3);
  CHECK(t < 1e-1);
}

TEST_CASE("validity report")
{
  const FullModelParams equal = full_params(4, 500.0, 1.0, 1.0);
  CHECK(validity_report(equal, 50.0).stark_closeness_ok);
  CHECK_FALSE(validity_report(equal, 50.0).revival_reachable_ok);
  CHECK(validity_report(equal, 0.1).revival_reachable_ok);
  CHECK(validity_report(equal, 100.0).time_horizon == doctest::Approx(0.5 * validity_report(equal, 50.0).time_horizon));
  CHECK(validity_report(equal, 50.0).time_horizon == doctest::Approx(0.1 * 500.0 * 500.0 / 50.0));
  CHECK_THROWS_AS(validity_report(equal, 0.0), std::invalid_argument);

  const FullModelParams unequal = full_params(4, 500.0, 1.0, 1.2);
  CHECK_FALSE(validity_report(unequal, 1.0).stark_closeness_ok);
}

TEST_CASE("embedding between two- and three-level spaces")
{
  const FockCutoff c(5);
  Vector v = Vector::Random(4 * c.dim());
  const Vector up = embed_two_level(v, c);
  CHECK(up.size() == 9 * c.dim());
  CHECK(max_abs(Vector(project_two_level(up, c) - v)) == 0.0);
  CHECK(up.norm() == doctest::Approx(v.norm()));
}
