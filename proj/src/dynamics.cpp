#include "dicke2p/dynamics.hpp"

#include "dicke2p/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <atomic>
#include <cmath>
#include <iostream>
#include <map>
#include <stdexcept>

namespace dicke2p {

namespace {

const Real kSqrt2 = std::sqrt(2.0);
const Real kInvSqrt2 = 1.0 / std::sqrt(2.0);

void require_hermitian(const Operator& h)
{
  if (h.is_hermitian())
    return;
  if (max_abs(h.matrix() - h.matrix().adjoint()) > kInvariantTol)
    throw std::invalid_argument("propagator: operator is not Hermitian");
}

}  // namespace

//------------------------------------------------------------------------------

Propagator::Propagator(const Operator& h) : tag_(h.tag()), dim_(h.dim())
{
  require_hermitian(h);
  std::vector<Eigen::Index> all(static_cast<std::size_t>(dim_));
  for (Eigen::Index k = 0; k < dim_; ++k)
    all[static_cast<std::size_t>(k)] = k;
  add_sector(h.matrix(), std::move(all));
}

Propagator::Propagator(const Operator& h, const Operator& conserved) : tag_(h.tag()), dim_(h.dim())
{
  require_hermitian(h);
  if (!(conserved.tag() == h.tag()))
    throw std::invalid_argument("Propagator: conserved quantity lives on a different space");
  const Matrix& q = conserved.matrix();
  if (max_abs(Matrix(q.diagonal().asDiagonal()) - q) > 0.0)
    throw std::invalid_argument("Propagator: conserved quantity must be diagonal");

  std::map<long long, std::vector<Eigen::Index>> groups;
  for (Eigen::Index k = 0; k < dim_; ++k)
    groups[std::llround(q(k, k).real() * 1e6)].push_back(k);

  // Couplings between sectors must vanish for the split to be exact.
  const Matrix& m = h.matrix();
  const Real scale = std::max(max_abs(m), Real(1));
  std::vector<long long> key(static_cast<std::size_t>(dim_));
  for (const auto& [k, idx] : groups)
    for (auto i : idx)
      key[static_cast<std::size_t>(i)] = k;
  for (Eigen::Index c = 0; c < dim_; ++c)
    for (Eigen::Index r = 0; r < dim_; ++r)
      if (key[static_cast<std::size_t>(r)] != key[static_cast<std::size_t>(c)] &&
          std::abs(m(r, c)) > 1e-12 * scale)
        throw std::invalid_argument("Propagator: operator does not commute with the conserved quantity");

  for (auto& [k, idx] : groups)
    add_sector(m, std::move(idx));
}

void Propagator::add_sector(const Matrix& h, std::vector<Eigen::Index> indices)
{
  const auto n = static_cast<Eigen::Index>(indices.size());
  Matrix block(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      block(r, c) = h(indices[static_cast<std::size_t>(r)], indices[static_cast<std::size_t>(c)]);
  Eigen::SelfAdjointEigenSolver<Matrix> es(block);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("Propagator: eigendecomposition failed");
  sectors_.push_back(Sector{std::move(indices), es.eigenvalues(), es.eigenvectors()});
}

Vector Propagator::evolve(const Vector& psi0, Real t) const
{
  if (psi0.size() != dim_)
    throw std::invalid_argument("Propagator::evolve: dimension mismatch");
  if (t == 0.0)
    return psi0;
  Vector out(dim_);
  for (const auto& s : sectors_) {
    const auto n = static_cast<Eigen::Index>(s.indices.size());
    Vector local(n);
    for (Eigen::Index k = 0; k < n; ++k)
      local[k] = psi0[s.indices[static_cast<std::size_t>(k)]];
    Vector coeff = s.vectors.adjoint() * local;
    for (Eigen::Index k = 0; k < n; ++k)
      coeff[k] *= std::polar(1.0, -s.energies[k] * t);
    local.noalias() = s.vectors * coeff;
    for (Eigen::Index k = 0; k < n; ++k)
      out[s.indices[static_cast<std::size_t>(k)]] = local[k];
  }
  return out;
}

StateVector Propagator::evolve(const StateVector& psi0, Real t) const
{
  if (!(psi0.tag() == tag_))
    throw std::invalid_argument("Propagator::evolve: incompatible spaces");
  return StateVector::normalized(evolve(psi0.amplitudes(), t), tag_);
}

Eigen::VectorXd Propagator::eigenvalues() const
{
  Eigen::VectorXd all(dim_);
  Eigen::Index pos = 0;
  for (const auto& s : sectors_) {
    all.segment(pos, s.energies.size()) = s.energies;
    pos += s.energies.size();
  }
  return all;
}

std::shared_ptr<const Propagator> PropagatorCache::get(const Operator& h)
{
  {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(h.id()); it != entries_.end())
      return it->second;
  }
  auto built = std::make_shared<const Propagator>(h);
  std::lock_guard lock(mutex_);
  if (auto it = entries_.find(h.id()); it != entries_.end())
    return it->second;
  if (capacity_ > 0 && order_.size() >= capacity_) {
    entries_.erase(order_.front());
    order_.erase(order_.begin());
  }
  entries_.emplace(h.id(), built);
  order_.push_back(h.id());
  return built;
}

std::size_t PropagatorCache::size() const
{
  std::lock_guard lock(mutex_);
  return entries_.size();
}

PropagatorCache& PropagatorCache::global()
{
  static PropagatorCache cache;
  return cache;
}

StateVector evolve_exact(const Operator& h, const StateVector& psi0, Real t)
{
  require_hermitian(h);
  if (!(psi0.tag() == h.tag()))
    throw std::invalid_argument("evolve_exact: incompatible spaces");
  if (t == 0.0)
    return psi0;
  return PropagatorCache::global().get(h)->evolve(psi0, t);
}

std::vector<Vector> evolve_batch(const Propagator& u, std::span<const std::pair<Vector, Real>> jobs)
{
  std::vector<Vector> out(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t k) { out[k] = u.evolve(jobs[k].first, jobs[k].second); });
  return out;
}

//------------------------------------------------------------------------------

BlockMatrix3 block_w_n(Real g, int n)
{
  if (n < 2)
    throw std::invalid_argument("block_w_n: n must be >= 2");
  BlockMatrix3 b;
  b.n = n;
  const Real nn = n;
  const Real upper = g * kSqrt2 * std::sqrt(nn * nn - nn);
  const Real lower = n >= 4 ? g * kSqrt2 * std::sqrt(nn * nn - 5.0 * nn + 6.0) : 0.0;
  b.m(0, 1) = b.m(1, 0) = upper;
  b.m(1, 2) = b.m(2, 1) = lower;
  return b;
}

std::array<Real, 3> block_eigenvalues_exact(Real g, int n)
{
  if (n < 4)
    throw std::invalid_argument("block_eigenvalues_exact: n must be >= 4");
  const Real x = 2.0 * n - 3.0;
  const Real w = g * std::sqrt(x * x + 3.0);
  return {0.0, -w, w};
}

std::array<Real, 3> block_eigenvalues_approx(Real g, int n)
{
  if (n < 2)
    throw std::invalid_argument("block_eigenvalues_approx: n must be >= 2");
  const Real w = g * (2.0 * n - 3.0);
  return {0.0, -w, w};
}

Eigen::Matrix3d block_diagonalizer()
{
  Eigen::Matrix3d o;
  o << -kSqrt2, 1.0, 1.0,
       0.0, -kSqrt2, kSqrt2,
       kSqrt2, 1.0, 1.0;
  return 0.5 * o;
}

BlockMatrix3 block_propagator(Real g, int n, Real t)
{
  if (n < 2)
    throw std::invalid_argument("block_propagator: n must be >= 2");
  const Real w = g * (2.0 * n - 3.0);
  BlockMatrix3 u;
  u.n = n;
  if (n >= 4) {
    const Real c2 = std::pow(std::cos(0.5 * w * t), 2);
    const Real s2 = std::pow(std::sin(0.5 * w * t), 2);
    const Complex flip = -kI * std::sin(w * t) * kInvSqrt2;
    u.m << c2, flip, -s2,
           flip, std::cos(w * t), flip,
           -s2, flip, c2;
  } else {
    // The large-n generator is (w/sqrt2) * tridiag(1, 0, 1); keep its 2x2 corner.
    const Real theta = w * t * kInvSqrt2;
    u.m << std::cos(theta), -kI * std::sin(theta), 0.0,
           -kI * std::sin(theta), std::cos(theta), 0.0,
           0.0, 0.0, 1.0;
  }
  return u;
}

namespace {

// Offsets of the two-level product basis {gg, ge, eg, ee} in atoms (x) field.
struct Layout
{
  Eigen::Index d;
  Eigen::Index gg(int n) const { return 0 * d + n; }
  Eigen::Index ge(int n) const { return 1 * d + n; }
  Eigen::Index eg(int n) const { return 2 * d + n; }
  Eigen::Index ee(int n) const { return 3 * d + n; }
};

}  // namespace

Vector analytic_amplitudes(const AtomCoeffs& c, Complex alpha, Real g, Real t, const FockCutoff& cutoff)
{
  const Vector p = coherent_state(alpha, cutoff).amplitudes();
  const int n_max = cutoff.n_max();
  const Layout at{cutoff.dim()};
  Vector out = Vector::Zero(4 * cutoff.dim());

  auto amp = [&](int n) -> Complex { return (n >= 0 && n <= n_max) ? p[n] : Complex{}; };
  auto add_psi_plus = [&](int m, Complex b) {
    out[at.ge(m)] += kInvSqrt2 * b;
    out[at.eg(m)] += kInvSqrt2 * b;
  };

  // |Psi-> (x) |alpha> is stationary.
  for (int m = 0; m <= n_max; ++m) {
    out[at.ge(m)] += kInvSqrt2 * c.c_minus * p[m];
    out[at.eg(m)] -= kInvSqrt2 * c.c_minus * p[m];
  }
  // a^2 annihilates |0>, |1>: |gg,0>, |gg,1> decouple.
  out[at.gg(0)] += c.c_g * p[0];
  out[at.gg(1)] += c.c_g * p[1];

  for (int n = 2; n <= n_max + 4; ++n) {
    const Complex a0 = c.c_g * amp(n);
    const Complex b0 = c.c_plus * amp(n - 2);
    const Complex c0 = n >= 4 ? c.c_e * amp(n - 4) : Complex{};
    const Real w = g * (2.0 * n - 3.0);

    Complex a, b, cc;
    if (n >= 4) {
      // Amplitudes of the block states |Phi^+->-like combinations of gg and ee.
      const Complex dp = kInvSqrt2 * (a0 + c0);
      const Complex dm = kInvSqrt2 * (a0 - c0);
      const Complex down = 0.5 * (b0 + dp) * std::polar(1.0, -w * t);
      const Complex up = 0.5 * (b0 - dp) * std::polar(1.0, w * t);
      a = kInvSqrt2 * (down - up + dm);
      b = down + up;
      cc = kInvSqrt2 * (down - up - dm);
    } else {
      const Real theta = w * t * kInvSqrt2;
      a = std::cos(theta) * a0 - kI * std::sin(theta) * b0;
      b = -kI * std::sin(theta) * a0 + std::cos(theta) * b0;
    }
    if (n <= n_max)
      out[at.gg(n)] += a;
    if (n - 2 <= n_max)
      add_psi_plus(n - 2, b);
    if (n >= 4 && n - 4 <= n_max)
      out[at.ee(n - 4)] += cc;
  }
  return out;
}

StateVector analytic_state(const AtomCoeffs& c, Complex alpha, Real g, Real t, const FockCutoff& cutoff)
{
  return StateVector::normalized(analytic_amplitudes(c, alpha, g, t, cutoff), SpaceTag::atoms_and_field(2, cutoff));
}

//------------------------------------------------------------------------------

Vector CoherentBranchState::amplitudes(const FockCutoff& cutoff) const
{
  Vector out = Vector::Zero(4 * cutoff.dim());
  for (const auto& b : branches) {
    if (b.weight == Complex{} || b.atoms.isZero(0.0))
      continue;
    out += b.weight * kron(b.atoms, coherent_state(b.label, cutoff).amplitudes());
  }
  return out;
}

StateVector CoherentBranchState::state(const FockCutoff& cutoff) const
{
  return StateVector::normalized(amplitudes(cutoff), SpaceTag::atoms_and_field(2, cutoff));
}

CoherentBranchState coherent_branch_state(const AtomCoeffs& c, Complex alpha, Real g, Real t)
{
  static std::atomic<bool> warned{false};
  if (std::norm(alpha) < 10.0 && !warned.exchange(true))
    std::cerr << "warning: coherent-state form used with |alpha|^2 = " << std::norm(alpha)
              << " < 10; expect visible deviations\n";

  const Real phi = std::arg(alpha);
  const Complex dp = c.d_plus(2.0 * phi);
  const Complex dm = c.d_minus(2.0 * phi);
  const Vector4 psi_plus = bell_vector(BellKind::psi_plus);

  CoherentBranchState s;
  s.branches[0] = {c.c_minus * bell_vector(BellKind::psi_minus) + dm * bell_vector(BellKind::phi_minus, 2.0 * phi),
                   alpha, 1.0};
  s.branches[1] = {psi_plus + bell_vector(BellKind::phi_plus, 2.0 * phi - 4.0 * g * t),
                   std::polar(1.0, -2.0 * g * t) * alpha, 0.5 * (c.c_plus + dp) * std::polar(1.0, -g * t)};
  s.branches[2] = {psi_plus - bell_vector(BellKind::phi_plus, 2.0 * phi + 4.0 * g * t),
                   std::polar(1.0, 2.0 * g * t) * alpha, 0.5 * (c.c_plus - dp) * std::polar(1.0, g * t)};
  return s;
}

Real rabi_see_analytic(Complex alpha, Real g, Real t)
{
  // |ee, m> sits in the block n = m + 4 where <S_ee> = 1 + cos(g (2m + 5) t);
  // the Poisson sum over m gives the phase 5gt.
  const Real n = std::norm(alpha);
  const Complex z = -n * (1.0 - std::polar(1.0, 2.0 * g * t)) + kI * 5.0 * g * t;
  return 1.0 + std::exp(z).real();
}

Real revival_time(Real g)
{
  if (g == 0.0)
    throw std::invalid_argument("revival_time: g must be nonzero");
  return kPi / std::abs(g);
}

//------------------------------------------------------------------------------

const char* engine_name(Engine e)
{
  switch (e) {
  case Engine::full:
    return "full";
  case Engine::effective:
    return "effective";
  case Engine::block:
    return "block";
  case Engine::analytic:
    return "analytic";
  }
  return "?";
}

Engine parse_engine(const std::string& name)
{
  if (name == "full")
    return Engine::full;
  if (name == "effective" || name == "exact")
    return Engine::effective;
  if (name == "block")
    return Engine::block;
  if (name == "analytic")
    return Engine::analytic;
  throw std::invalid_argument("unknown engine '" + name + "'");
}

Real ModelSpec::coupling() const
{
  return engine == Engine::full ? effective_coupling(g_g, g_e, delta) : g;
}

Evolver::Evolver(ModelSpec spec, FockCutoff cutoff) : spec_(spec), cutoff_(cutoff)
{
  switch (spec_.engine) {
  case Engine::full: {
    FullModelParams p;
    p.delta = spec_.delta;
    p.g_g = spec_.g_g;
    p.g_e = spec_.g_e;
    p.cutoff = cutoff_;
    propagator_ = std::make_shared<const Propagator>(full_hamiltonian_effective_frame(p), constant_of_motion(cutoff_, 3));
    break;
  }
  case Engine::effective:
    propagator_ = std::make_shared<const Propagator>(two_photon_w({spec_.g, cutoff_}), constant_of_motion(cutoff_, 2));
    break;
  case Engine::block:
  case Engine::analytic:
    if (spec_.g == 0.0)
      throw std::invalid_argument("Evolver: g must be nonzero");
    break;
  }
}

Vector Evolver::evolve_product(const Vector4& atoms, Complex beta, Real t) const
{
  switch (spec_.engine) {
  case Engine::full: {
    const Vector psi0 = kron(atoms, coherent_state(beta, cutoff_).amplitudes());
    return project_two_level(propagator_->evolve(embed_two_level(psi0, cutoff_), t), cutoff_);
  }
  case Engine::effective:
    return propagator_->evolve(Vector(kron(atoms, coherent_state(beta, cutoff_).amplitudes())), t);
  case Engine::block:
    return analytic_amplitudes(AtomCoeffs::from_product_amplitudes(atoms), beta, spec_.g, t, cutoff_);
  case Engine::analytic:
    return coherent_branch_state(AtomCoeffs::from_product_amplitudes(atoms), beta, spec_.g, t).amplitudes(cutoff_);
  }
  throw std::logic_error("unreachable");
}

}  // namespace dicke2p
