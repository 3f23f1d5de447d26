#include "dicke2p/analysis.hpp"
#include "dicke2p/dynamics.hpp"

#include "blockwise.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace dicke2p;
using blockwise::ee;
using blockwise::eg;
using blockwise::ge;
using blockwise::blockwise_state;

namespace {

Eigen::Vector3d sorted_eigenvalues(const BlockMatrix3& b)
{
  Eigen::Vector3d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd>(b.m).eigenvalues();
  std::sort(ev.data(), ev.data() + 3);
  return ev;
}

}  // namespace

TEST_CASE("exact propagation")
{
  const FockCutoff c(22);
  const Operator w = two_photon_w({1.0, c});
  std::mt19937_64 rng = stream_rng(5, 0);
  const AtomCoeffs atoms = haar_random_two_qubit(rng);
  const StateVector psi0 = tensor(atoms.state(), coherent_state(1.5, c));

  SUBCASE("t = 0 returns the input")
  {
    CHECK(max_abs(Vector(evolve_exact(w, psi0, 0.0).amplitudes() - psi0.amplitudes())) == 0.0);
  }
  SUBCASE("agrees with the matrix exponential")
  {
    for (Real t : {0.3, 1.7, kPi}) {
      const Vector ref = oracle::propagate(w.matrix(), psi0.amplitudes(), t);
      CHECK(max_abs(Vector(evolve_exact(w, psi0, t).amplitudes() - ref)) < 1e-10);
    }
  }
  SUBCASE("norm and constant of motion are conserved")
  {
    const Matrix i2 = constant_of_motion(c, 2).matrix();
    const Real i0 = psi0.amplitudes().dot(i2 * psi0.amplitudes()).real();
    for (Real t : {0.5, 2.0, kPi}) {
      const Vector v = Propagator(w).evolve(psi0.amplitudes(), t);
      CHECK(std::abs(v.norm() - 1.0) < 1e-10);
      CHECK(std::abs(v.dot(i2 * v).real() - i0) < 1e-9);
    }
  }
  SUBCASE("sector decomposition agrees with the dense one")
  {
    const Propagator dense(w);
    const Propagator split(w, constant_of_motion(c, 2));
    CHECK(split.sector_count() > 1);
    for (Real t : {0.4, 2.9})
      CHECK(max_abs(Vector(dense.evolve(psi0.amplitudes(), t) - split.evolve(psi0.amplitudes(), t))) < 1e-10);
  }
  SUBCASE("non-Hermitian generators are rejected")
  {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 1) = 1.0;
    const Operator bad(m, SpaceTag::two_qubits());
    CHECK_THROWS_AS(evolve_exact(bad, bell_state(BellKind::psi_plus), 1.0), std::invalid_argument);
  }
  SUBCASE("a conserved quantity that does not commute is rejected")
  {
    CHECK_THROWS_AS(Propagator(w, on_field(number_op(c), 2)), std::invalid_argument);
  }
  SUBCASE("batch evaluation keeps input order")
  {
    const Propagator u(w);
    std::vector<std::pair<Vector, Real>> jobs;
    for (int k = 0; k < 7; ++k)
      jobs.emplace_back(psi0.amplitudes(), 0.3 * k);
    const auto out = evolve_batch(u, jobs);
    for (int k = 0; k < 7; ++k)
      CHECK(max_abs(Vector(out[std::size_t(k)] - u.evolve(psi0.amplitudes(), 0.3 * k))) == 0.0);
  }
}

TEST_CASE("W blocks")
{
  CHECK(block_w_n(1.0, 2).m(1, 2) == Complex(0.0));
  CHECK(block_w_n(1.0, 3).m(1, 2) == Complex(0.0));
  const BlockMatrix3 b10 = block_w_n(1.0, 10);
  CHECK(b10.m(0, 1).real() == doctest::Approx(std::sqrt(2.0) * std::sqrt(90.0)));
  CHECK(b10.m(1, 2).real() == doctest::Approx(std::sqrt(2.0) * std::sqrt(56.0)));
  CHECK_THROWS_AS(block_w_n(1.0, 1), std::invalid_argument);

  // the same couplings appear in the full W matrix
  const FockCutoff c(12);
  const Matrix w = two_photon_w({1.0, c}).matrix();
  Vector psi_plus = Vector::Zero(4 * c.dim());
  psi_plus[ge(c, 8)] = psi_plus[eg(c, 8)] = 1.0 / std::sqrt(2.0);
  Vector ee6 = Vector::Zero(4 * c.dim());
  ee6[ee(c, 6)] = 1.0;
  CHECK(std::abs(psi_plus.dot(w * ee6) - b10.m(1, 2)) < 1e-12);
}

TEST_CASE("block eigenvalues")
{
  const auto e4 = block_eigenvalues_exact(1.0, 4);
  CHECK(e4[2] == doctest::Approx(std::sqrt(28.0)));
  const Eigen::Vector3d n4 = sorted_eigenvalues(block_w_n(1.0, 4));
  CHECK(std::abs(n4[2] - std::sqrt(28.0)) < 1e-12);
  CHECK(std::abs(n4[1]) < 1e-12);

  const auto e50 = block_eigenvalues_exact(1.0, 50);
  CHECK(e50[2] == doctest::Approx(97.01546).epsilon(1e-7));
  CHECK(std::abs(sorted_eigenvalues(block_w_n(1.0, 50))[2] - e50[2]) < 1e-12 * e50[2]);
  CHECK_THROWS_AS(block_eigenvalues_exact(1.0, 3), std::invalid_argument);

  // approximation quality
  const Real rel50 = (e50[2] - block_eigenvalues_approx(1.0, 50)[2]) / e50[2];
  CHECK(rel50 == doctest::Approx(1.0 - 1.0 / std::sqrt(1.0 + 3.0 / (97.0 * 97.0))).epsilon(1e-6));
  CHECK(rel50 == doctest::Approx(1.6e-4).epsilon(0.02));
  Real prev = 1.0;
  for (int n = 4; n <= 300; ++n) {
    const Real x = 2.0 * n - 3.0;
    const Real err = (block_eigenvalues_exact(1.0, n)[2] - block_eigenvalues_approx(1.0, n)[2]) / x;
    CHECK(err <= 3.0 / (2.0 * x * x));
    CHECK(err < prev);
    prev = err;
  }
  CHECK(block_eigenvalues_approx(0.5, 2)[2] == doctest::Approx(0.5));
}

TEST_CASE("fixed block diagonalizer")
{
  const Eigen::Matrix3d o = block_diagonalizer();
  CHECK(max_abs(Eigen::Matrix3d(o.transpose() * o - Eigen::Matrix3d::Identity())) < 1e-14);
  for (int n = 4; n <= 300; ++n) {
    const Real wt = 2.0 * n - 3.0;
    const Eigen::Matrix3cd d = o.transpose().cast<Complex>() * block_w_n(1.0, n).m * o.cast<Complex>();
    Eigen::Matrix3cd target = Eigen::Matrix3cd::Zero();
    target(1, 1) = -wt;
    target(2, 2) = wt;
    // error relative to the block scale falls like 1/n
    CHECK(max_abs(Eigen::Matrix3cd(d - target)) / wt < 5.0 / n);
  }
}

TEST_CASE("block propagator")
{
  const Real g = 1.0;
  CHECK(max_abs(Eigen::Matrix3cd(block_propagator(g, 10, 0.0).m - Eigen::Matrix3cd::Identity())) < 1e-15);

  const int n = 10;
  const Real w = g * (2.0 * n - 3.0);
  Eigen::Matrix3cd swap;
  swap << 0.0, 0.0, -1.0, 0.0, -1.0, 0.0, -1.0, 0.0, 0.0;
  CHECK(max_abs(Eigen::Matrix3cd(block_propagator(g, n, kPi / w).m - swap)) < 1e-14);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<Real> u(0.0, 10.0);
  for (int k = 0; k < 20; ++k) {
    const int m = 2 + k * 7;
    const Eigen::Matrix3cd um = block_propagator(g, m, u(rng)).m;
    CHECK(max_abs(Eigen::Matrix3cd(um * um.adjoint() - Eigen::Matrix3cd::Identity())) < 1e-12);
  }

  // independent route: exponential of the large-n generator O diag(0, -w, w) O^T
  const Eigen::Matrix3d o = block_diagonalizer();
  for (int m : {4, 17, 90}) {
    const Real wm = g * (2.0 * m - 3.0);
    const Eigen::Matrix3d gen = o * Eigen::Vector3d(0.0, -wm, wm).asDiagonal() * o.transpose();
    const Real t = 0.37;
    const Matrix ref = (Complex(0.0, -t) * Matrix(gen.cast<Complex>())).exp();
    CHECK(max_abs(Matrix(Matrix(block_propagator(g, m, t).m) - ref)) < 1e-12);
  }
}

TEST_CASE("analytic state")
{
  const FockCutoff c = FockCutoff::for_mean_photon_number(50.0);
  const Complex alpha = std::polar(std::sqrt(50.0), 0.9);

  SUBCASE("|Psi-> is frozen")
  {
    AtomCoeffs a;
    a.c_g = 0.0;
    a.c_minus = 1.0;
    const Vector ref = kron(bell_vector(BellKind::psi_minus), coherent_state(alpha, c).amplitudes());
    for (Real t : {0.0, 0.7, 2.5})
      CHECK(max_abs(Vector(analytic_state(a, alpha, 1.0, t, c).amplitudes() - ref)) < 1e-12);
  }
  SUBCASE("t = 0 reproduces the input")
  {
    const AtomCoeffs a = draw_sample(9, 0).atoms;
    const Vector ref = kron(a.product_amplitudes(), coherent_state(alpha, c).amplitudes());
    CHECK(max_abs(Vector(analytic_state(a, alpha, 1.0, 0.0, c).amplitudes() - ref)) < 1e-10);
  }
  SUBCASE("matches the blockwise assembly")
  {
    for (std::size_t k = 0; k < 10; ++k) {
      const AtomCoeffs a = draw_sample(21, k).atoms;
      const Real t = 0.31 * Real(k);
      const Vector mine = analytic_state(a, alpha, -0.8, t, c).amplitudes();
      CHECK((mine - blockwise_state(a, alpha, -0.8, t, c)).norm() < 1e-10);
    }
  }
}

TEST_CASE("analytic state follows the exact effective dynamics at large nbar")
{
  const Real nbar = 100.0;
  const FockCutoff c = FockCutoff::for_mean_photon_number(nbar);
  const Propagator u(two_photon_w({1.0, c}), constant_of_motion(c, 2));
  const auto stats = ensemble_average(
      [&](const EnsembleSample& s) {
        const Complex alpha = std::polar(std::sqrt(nbar), s.phi);
        const Vector psi0 = kron(s.atoms.product_amplitudes(), coherent_state(alpha, c).amplitudes());
        std::vector<Real> f;
        for (int k = 0; k <= 10; ++k) {
          const Real t = kPi * k / 10.0;
          f.push_back(std::norm(analytic_state(s.atoms, alpha, 1.0, t, c).amplitudes().dot(u.evolve(psi0, t))));
        }
        return f;
      },
      20, 4);
  for (Real m : stats.mean)
    CHECK(m >= 0.999);
}

TEST_CASE("coherent-state form")
{
  const Real nbar = 50.0;
  const FockCutoff c = FockCutoff::for_mean_photon_number(nbar);
  const Complex alpha = std::polar(std::sqrt(nbar), 0.6);
  const Real phi = std::arg(alpha);
  const Real g = 1.0;

  SUBCASE("t = 0")
  {
    const AtomCoeffs a = draw_sample(2, 3).atoms;
    const Vector ref = kron(a.product_amplitudes(), coherent_state(alpha, c).amplitudes());
    CHECK(max_abs(Vector(coherent_branch_state(a, alpha, g, 0.0).amplitudes(c) - ref)) < 1e-10);
  }
  SUBCASE("half revival")
  {
    const AtomCoeffs a = draw_sample(2, 4).atoms;
    const Complex dp = a.d_plus(2.0 * phi);
    const Complex dm = a.d_minus(2.0 * phi);
    const Vector4 left = a.c_minus * bell_vector(BellKind::psi_minus) + dm * bell_vector(BellKind::phi_minus, 2.0 * phi);
    const Vector4 right = a.c_plus * bell_vector(BellKind::phi_plus, 2.0 * phi) + dp * bell_vector(BellKind::psi_plus);
    const Vector ref = kron(left, coherent_state(alpha, c).amplitudes()) -
                       kI * kron(right, coherent_state(-alpha, c).amplitudes());
    const Vector got = coherent_branch_state(a, alpha, g, kPi / (2.0 * g)).amplitudes(c);
    CHECK(max_abs(Vector(got - ref)) < 1e-10);
  }
  SUBCASE("ensemble fidelity against the exact effective dynamics")
  {
    // The coherent form neglects the photon-number dependence of the block
    // amplitudes; the residual falls with nbar.
    auto mean_fidelity = [&](Real nb) {
      const FockCutoff cut = FockCutoff::for_mean_photon_number(nb);
      const Propagator u(two_photon_w({g, cut}), constant_of_motion(cut, 2));
      const auto st = ensemble_average(
          [&](const EnsembleSample& s) {
            const Complex a0 = std::polar(std::sqrt(nb), s.phi);
            const Vector psi0 = kron(s.atoms.product_amplitudes(), coherent_state(a0, cut).amplitudes());
            Real worst = 1.0;
            for (int k = 0; k <= 8; ++k) {
              const Real t = kPi * k / 8.0;
              const Vector b = coherent_branch_state(s.atoms, a0, g, t).amplitudes(cut);
              worst = std::min(worst, std::norm(b.dot(u.evolve(psi0, t))) / b.squaredNorm());
            }
            return std::vector<Real>{worst};
          },
          20, 8);
      return st.mean[0];
    };
    const Real f50 = mean_fidelity(50.0);
    const Real f200 = mean_fidelity(200.0);
    CHECK(f50 >= 0.93);
    CHECK(f200 > f50);
  }
}

TEST_CASE("Rabi revival")
{
  const Complex alpha = std::sqrt(50.0);
  CHECK(rabi_see_analytic(alpha, 1.0, 0.0) == doctest::Approx(2.0));
  CHECK(rabi_see_analytic(alpha, 1.0, kPi) == doctest::Approx(0.0).epsilon(1e-12));
  for (Real gt : {0.8, 1.2, 1.6, 2.0})
    CHECK(std::abs(rabi_see_analytic(alpha, 1.0, gt) - 1.0) < 1e-6);

  // against the exact effective model
  const FockCutoff c = FockCutoff::for_mean_photon_number(50.0);
  const Propagator u(two_photon_w({1.0, c}), constant_of_motion(c, 2));
  const Vector psi0 = kron(Vector4(Vector4::Unit(3)), coherent_state(alpha, c).amplitudes());
  const Eigen::Index d = c.dim();
  Real ss = 0.0;
  const int steps = 200;
  for (int k = 0; k <= steps; ++k) {
    const Real t = kPi * k / steps;
    const Vector v = u.evolve(psi0, t);
    const Real see = v.segment(d, d).squaredNorm() + v.segment(2 * d, d).squaredNorm() + 2.0 * v.segment(3 * d, d).squaredNorm();
    ss += std::pow(see - rabi_see_analytic(alpha, 1.0, t), 2);
  }
  CHECK(std::sqrt(ss / (steps + 1)) < 0.02);
}

TEST_CASE("revival time")
{
  CHECK(revival_time(1.0) == doctest::Approx(kPi));
  CHECK(revival_time(-0.002) == doctest::Approx(1570.796).epsilon(1e-6));
  CHECK_THROWS_AS(revival_time(0.0), std::invalid_argument);
}

TEST_CASE("engines")
{
  CHECK(parse_engine("exact") == Engine::effective);
  CHECK(parse_engine("full") == Engine::full);
  CHECK(std::string(engine_name(Engine::analytic)) == "analytic");
  CHECK_THROWS_AS(parse_engine("magic"), std::invalid_argument);

  ModelSpec full;
  full.engine = Engine::full;
  full.g_g = 1.0;
  full.g_e = 1.0;
  full.delta = 500.0;
  CHECK(full.coupling() == doctest::Approx(-0.002));

  // every engine is linear in the atomic amplitudes
  const FockCutoff c = FockCutoff::for_mean_photon_number(20.0);
  const Complex alpha = std::polar(std::sqrt(20.0), 0.2);
  for (Engine e : {Engine::effective, Engine::block, Engine::analytic}) {
    ModelSpec s;
    s.engine = e;
    const Evolver ev(s, c);
    const Vector4 a = draw_sample(1, 0).atoms.product_amplitudes();
    const Vector4 b = draw_sample(1, 1).atoms.product_amplitudes();
    const Complex z(0.3, -0.8);
    const Real t = 0.9;
    const Vector lhs = ev.evolve_product(a + z * b, alpha, t);
    const Vector rhs = ev.evolve_product(a, alpha, t) + z * ev.evolve_product(b, alpha, t);
    CHECK(max_abs(Vector(lhs - rhs)) < 1e-12);
  }
}
