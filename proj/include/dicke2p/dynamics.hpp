#ifndef DICKE2P_DYNAMICS_HPP
#define DICKE2P_DYNAMICS_HPP

#include "dicke2p/hilbert.hpp"
#include "dicke2p/models.hpp"

#include <array>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dicke2p {

//------------------------------------------------------------------------------
// Exact propagation

/// Spectral decomposition of a Hermitian operator, applied as
/// psi(t) = V exp(-i E t) V^dag psi(0).
///
/// The two-argument form splits the space into the eigenspaces of a diagonal
/// conserved quantity (the constant of motion) and diagonalizes each sector on
/// its own; the one-argument form diagonalizes the whole matrix.
class Propagator
{
public:
  explicit Propagator(const Operator& h);
  Propagator(const Operator& h, const Operator& conserved);

  Vector evolve(const Vector& psi0, Real t) const;
  StateVector evolve(const StateVector& psi0, Real t) const;

  /// All eigenvalues, sector by sector.
  Eigen::VectorXd eigenvalues() const;
  std::size_t sector_count() const { return sectors_.size(); }
  const SpaceTag& tag() const { return tag_; }

private:
  struct Sector
  {
    std::vector<Eigen::Index> indices;
    Eigen::VectorXd energies;
    Matrix vectors;
  };

  void add_sector(const Matrix& h, std::vector<Eigen::Index> indices);

  SpaceTag tag_;
  Eigen::Index dim_ = 0;
  std::vector<Sector> sectors_;
};

/// Shared cache of dense decompositions keyed by Operator::id().
class PropagatorCache
{
public:
  explicit PropagatorCache(std::size_t capacity = 8) : capacity_(capacity) {}

  std::shared_ptr<const Propagator> get(const Operator& h);
  std::size_t size() const;

  static PropagatorCache& global();

private:
  mutable std::mutex mutex_;
  std::size_t capacity_;
  std::vector<std::uint64_t> order_;
  std::unordered_map<std::uint64_t, std::shared_ptr<const Propagator>> entries_;
};

/// e^{-i h t} psi0 through the dense eigendecomposition of h (cached).
/// Throws std::invalid_argument for a non-Hermitian h.
StateVector evolve_exact(const Operator& h, const StateVector& psi0, Real t);

/// Evaluates every (state, time) pair; result k belongs to input k.
std::vector<Vector> evolve_batch(const Propagator& u, std::span<const std::pair<Vector, Real>> jobs);

//------------------------------------------------------------------------------
// Three-state blocks {|gg,n>, |Psi+,n-2>, |ee,n-4>}

struct BlockMatrix3
{
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  int n = 4;

  /// 3 for n >= 4; n = 2, 3 only populate the upper-left 2x2 corner.
  int active_dim() const { return n >= 4 ? 3 : 2; }
};

/// Block of W: off-diagonals g sqrt2 sqrt(n^2-n) and g sqrt2 sqrt(n^2-5n+6).
BlockMatrix3 block_w_n(Real g, int n);

/// (0, -w_n, +w_n) with w_n = g sqrt((2n-3)^2 + 3); requires n >= 4.
std::array<Real, 3> block_eigenvalues_exact(Real g, int n);

/// (0, -g(2n-3), +g(2n-3)); requires n >= 2.
std::array<Real, 3> block_eigenvalues_approx(Real g, int n);

/// Fixed orthogonal matrix whose columns approximately diagonalize every
/// W_n with eigenvalues (0, -g(2n-3), g(2n-3)).
Eigen::Matrix3d block_diagonalizer();

/// Large-n block propagator with w = g(2n-3):
///   [ cos^2(wt/2)      sin(wt)/(i sqrt2)   -sin^2(wt/2) ]
///   [ sin(wt)/(i sqrt2) cos(wt)             sin(wt)/(i sqrt2) ]
///   [ -sin^2(wt/2)     sin(wt)/(i sqrt2)    cos^2(wt/2) ]
/// For n = 2, 3 the 2x2 corner of the same generator is used and the third
/// diagonal entry is 1.
BlockMatrix3 block_propagator(Real g, int n, Real t);

/// Unnormalized amplitudes of the blockwise large-n solution for |psi>|alpha>.
Vector analytic_amplitudes(const AtomCoeffs& c, Complex alpha, Real g, Real t, const FockCutoff& cutoff);

/// Large-n solution for the initial state |psi>|alpha>: the |Psi-> part and
/// the stationary |gg,0>, |gg,1> components are frozen, every other block
/// evolves with w = g(2n-3). Renormalized on the truncated space.
StateVector analytic_state(const AtomCoeffs& c, Complex alpha, Real g, Real t, const FockCutoff& cutoff);

//------------------------------------------------------------------------------
// Coherent-state form

struct CoherentBranch
{
  Vector4 atoms;       ///< two-qubit amplitudes (product basis), not normalized
  Complex label;       ///< coherent amplitude of the field
  Complex weight;      ///< scalar prefactor including the time phase
};

/// Three coherent branches: the frozen one at alpha and two rotating ones at
/// e^{-+ 2igt} alpha.
struct CoherentBranchState
{
  std::array<CoherentBranch, 3> branches;

  /// sum_k weight_k atoms_k (x) |label_k> with renormalized truncated coherent states.
  Vector amplitudes(const FockCutoff& cutoff) const;
  StateVector state(const FockCutoff& cutoff) const;
};

/// Large-mean-photon-number form of the evolved state |psi>|alpha>. Emits a
/// warning on stderr when |alpha|^2 < 10.
CoherentBranchState coherent_branch_state(const AtomCoeffs& c, Complex alpha, Real g, Real t);

/// <S_ee>(t) for |ee>|alpha>: 1 + Re exp(-|alpha|^2 (1 - e^{2igt}) + 5igt).
Real rabi_see_analytic(Complex alpha, Real g, Real t);

/// t_r = pi / |g|.
Real revival_time(Real g);

//------------------------------------------------------------------------------
// Engines

enum class Engine
{
  full,       ///< exact numerics of the three-level Hamiltonian
  effective,  ///< exact numerics of W
  block,      ///< blockwise large-n solution
  analytic,   ///< coherent-state form
};

const char* engine_name(Engine e);
Engine parse_engine(const std::string& name);

struct ModelSpec
{
  Engine engine = Engine::effective;
  Real g = 1.0;  ///< two-photon coupling for effective / block / analytic
  Real g_g = 1.0;
  Real g_e = 1.0;
  Real delta = 500.0;

  /// Two-photon coupling seen by the dynamics (derived for the full model).
  Real coupling() const;
};

/// Propagates product inputs |atoms>|beta> with the selected engine and
/// returns two-level-atom (x) field amplitudes. The map is linear in the
/// atomic amplitudes for every engine. For the full model the intermediate
/// level is dropped from the output.
class Evolver
{
public:
  Evolver(ModelSpec spec, FockCutoff cutoff);

  Vector evolve_product(const Vector4& atoms, Complex beta, Real t) const;

  const ModelSpec& spec() const { return spec_; }
  const FockCutoff& cutoff() const { return cutoff_; }
  Real coupling() const { return spec_.coupling(); }
  Real half_revival_time() const { return 0.5 * revival_time(coupling()); }

private:
  ModelSpec spec_;
  FockCutoff cutoff_;
  std::shared_ptr<const Propagator> propagator_;
};

}  // namespace dicke2p

#endif
