#include "dicke2p/hilbert.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dicke2p {

namespace {

std::uint64_t next_operator_id()
{
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

void require(bool cond, const char* what)
{
  if (!cond)
    throw std::invalid_argument(what);
}

const Real kInvSqrt2 = 1.0 / std::sqrt(2.0);

}  // namespace

//------------------------------------------------------------------------------

FockCutoff::FockCutoff(int n_max) : n_max_(n_max)
{
  require(n_max >= 1, "FockCutoff: n_max must be >= 1");
}

FockCutoff FockCutoff::for_mean_photon_number(Real nbar)
{
  require(nbar >= 0.0, "FockCutoff: negative mean photon number");
  const int core = static_cast<int>(std::ceil(nbar + 8.0 * std::sqrt(nbar)));
  return FockCutoff(std::max(core, 1) + 4);
}

Eigen::Index SpaceTag::atom_dim() const
{
  Eigen::Index d = 1;
  for (int k = 0; k < atoms; ++k)
    d *= levels;
  return d;
}

std::string SpaceTag::describe() const
{
  std::ostringstream os;
  os << "atoms=" << atoms << " levels=" << levels << " fock_dim=" << fock_dim;
  return os.str();
}

int level_index(Level level, int levels_per_atom)
{
  require(levels_per_atom == 2 || levels_per_atom == 3, "levels per atom must be 2 or 3");
  switch (level) {
  case Level::g:
    return 0;
  case Level::i:
    require(levels_per_atom == 3, "intermediate level requires three-level atoms");
    return 1;
  case Level::e:
    return levels_per_atom - 1;
  }
  throw std::invalid_argument("unknown level");
}

//------------------------------------------------------------------------------

StateVector::StateVector(Vector amplitudes, SpaceTag tag) : amps_(std::move(amplitudes)), tag_(tag)
{
  require(amps_.size() == tag_.dim(), "StateVector: dimension does not match space tag");
  require(std::abs(amps_.norm() - 1.0) <= kInvariantTol, "StateVector: amplitudes are not normalized");
}

StateVector StateVector::normalized(Vector amplitudes, SpaceTag tag)
{
  const Real n = amplitudes.norm();
  require(n > 0.0 && std::isfinite(n), "StateVector: cannot normalize a zero vector");
  amplitudes /= n;
  return StateVector(std::move(amplitudes), tag);
}

Complex StateVector::inner(const StateVector& other) const
{
  require(tag_ == other.tag_, "StateVector::inner: incompatible spaces");
  return amps_.dot(other.amps_);
}

//------------------------------------------------------------------------------

Operator::Operator(Matrix matrix, SpaceTag tag, OperatorFlags flags)
    : m_(std::move(matrix)), tag_(tag), flags_(flags), id_(next_operator_id())
{
  require(m_.rows() == m_.cols(), "Operator: matrix must be square");
  require(m_.rows() == tag_.dim(), "Operator: dimension does not match space tag");
  if (flags_.hermitian)
    require(max_abs(m_ - m_.adjoint()) <= kInvariantTol, "Operator: hermitian flag violated");
  if (flags_.unitary)
    require(max_abs(m_ * m_.adjoint() - Matrix::Identity(m_.rows(), m_.cols())) <= kInvariantTol,
            "Operator: unitary flag violated");
}

Operator::Operator(Matrix matrix, SpaceTag tag, OperatorFlags flags, Exact)
    : m_(std::move(matrix)), tag_(tag), flags_(flags), id_(next_operator_id())
{
  require(m_.rows() == m_.cols(), "Operator: matrix must be square");
  require(m_.rows() == tag_.dim(), "Operator: dimension does not match space tag");
}

Operator Operator::adjoint() const
{
  return Operator(m_.adjoint(), tag_, flags_, Exact{});
}

Vector Operator::apply(const Vector& v) const
{
  require(v.size() == m_.cols(), "Operator::apply: dimension mismatch");
  return m_ * v;
}

Operator operator*(const Operator& a, const Operator& b)
{
  require(a.tag() == b.tag(), "Operator product: incompatible spaces");
  return Operator(a.matrix() * b.matrix(), a.tag(),
                  {false, a.is_unitary() && b.is_unitary()});
}

Operator operator+(const Operator& a, const Operator& b)
{
  require(a.tag() == b.tag(), "Operator sum: incompatible spaces");
  return Operator(a.matrix() + b.matrix(), a.tag(),
                  {a.is_hermitian() && b.is_hermitian(), false});
}

Operator operator-(const Operator& a, const Operator& b)
{
  require(a.tag() == b.tag(), "Operator difference: incompatible spaces");
  return Operator(a.matrix() - b.matrix(), a.tag(),
                  {a.is_hermitian() && b.is_hermitian(), false});
}

Operator operator*(Complex s, const Operator& a)
{
  const bool real_scale = s.imag() == 0.0;
  return Operator(s * a.matrix(), a.tag(),
                  {a.is_hermitian() && real_scale, a.is_unitary() && std::abs(s) == 1.0});
}

//------------------------------------------------------------------------------

Vector4 AtomCoeffs::product_amplitudes() const
{
  // |Psi+-> = (|ge> +- |eg>)/sqrt2 with |ge> = |g>_A |e>_B
  Vector4 v;
  v << c_g, kInvSqrt2 * (c_plus + c_minus), kInvSqrt2 * (c_plus - c_minus), c_e;
  return v;
}

AtomCoeffs AtomCoeffs::from_product_amplitudes(const Vector4& v)
{
  AtomCoeffs c;
  c.c_g = v[0];
  c.c_plus = kInvSqrt2 * (v[1] + v[2]);
  c.c_minus = kInvSqrt2 * (v[1] - v[2]);
  c.c_e = v[3];
  return c;
}

Real AtomCoeffs::norm_squared() const
{
  return std::norm(c_g) + std::norm(c_minus) + std::norm(c_plus) + std::norm(c_e);
}

Complex AtomCoeffs::d_plus(Real phi) const
{
  return kInvSqrt2 * (c_g * std::polar(1.0, phi) + c_e * std::polar(1.0, -phi));
}

Complex AtomCoeffs::d_minus(Real phi) const
{
  return kInvSqrt2 * (c_g * std::polar(1.0, phi) - c_e * std::polar(1.0, -phi));
}

StateVector AtomCoeffs::state() const
{
  return StateVector(product_amplitudes(), SpaceTag::two_qubits());
}

//------------------------------------------------------------------------------

Operator identity(SpaceTag tag)
{
  return Operator(Matrix::Identity(tag.dim(), tag.dim()), tag, {true, true}, Operator::Exact{});
}

Operator annihilation_op(const FockCutoff& cutoff)
{
  return Operator(annihilation_matrix<Complex>(cutoff.n_max()), SpaceTag::field(cutoff));
}

Operator number_op(const FockCutoff& cutoff)
{
  Matrix n = Matrix::Zero(cutoff.dim(), cutoff.dim());
  for (int k = 0; k < cutoff.dim(); ++k)
    n(k, k) = Real(k);
  return Operator(std::move(n), SpaceTag::field(cutoff), {true, false});
}

Operator parity_op(const FockCutoff& cutoff)
{
  Matrix p = Matrix::Zero(cutoff.dim(), cutoff.dim());
  for (int k = 0; k < cutoff.dim(); ++k)
    p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return Operator(std::move(p), SpaceTag::field(cutoff), {true, true});
}

Operator single_atom_op(Level mu, Level nu, int levels_per_atom)
{
  const int r = level_index(mu, levels_per_atom);
  const int c = level_index(nu, levels_per_atom);
  Matrix m = Matrix::Zero(levels_per_atom, levels_per_atom);
  m(r, c) = 1.0;
  return Operator(std::move(m), SpaceTag{1, levels_per_atom, 0}, {r == c, false});
}

Operator collective_op(Level mu, Level nu, int levels_per_atom)
{
  const Matrix one = single_atom_op(mu, nu, levels_per_atom).matrix();
  const Matrix id = Matrix::Identity(levels_per_atom, levels_per_atom);
  return Operator(kron(one, id) + kron(id, one), SpaceTag{2, levels_per_atom, 0}, {mu == nu, false});
}

Vector coherent_amplitudes(Complex alpha, int dim)
{
  Vector p(dim);
  const Real r = std::abs(alpha);
  const Real phase = std::arg(alpha);
  for (int n = 0; n < dim; ++n) {
    if (r == 0.0) {
      p[n] = (n == 0) ? 1.0 : 0.0;
      continue;
    }
    // log |p_n| = -r^2/2 + n log r - log(n!)/2
    const Real log_mag = -0.5 * r * r + n * std::log(r) - 0.5 * std::lgamma(n + 1.0);
    p[n] = std::polar(std::exp(log_mag), n * phase);
  }
  return p;
}

StateVector coherent_state(Complex alpha, const FockCutoff& cutoff)
{
  Vector p = coherent_amplitudes(alpha, cutoff.dim());
  if (p.squaredNorm() < 1.0 - kInvariantTol)
    throw std::domain_error("coherent_state: Fock cutoff too small for the requested amplitude");
  return StateVector::normalized(std::move(p), SpaceTag::field(cutoff));
}

StateVector cat_state(Complex alpha, int parity, const FockCutoff& cutoff)
{
  require(parity == 1 || parity == -1, "cat_state: parity must be +1 or -1");
  const Vector plus = coherent_state(alpha, cutoff).amplitudes();
  const Vector minus = coherent_state(-alpha, cutoff).amplitudes();
  Vector v = plus + Real(parity) * minus;
  if (v.norm() < 1e-12)
    throw std::domain_error("cat_state: odd cat state of zero amplitude is the zero vector");
  return StateVector::normalized(std::move(v), SpaceTag::field(cutoff));
}

Vector4 bell_vector(BellKind kind, Real phi)
{
  Vector4 v = Vector4::Zero();
  switch (kind) {
  case BellKind::psi_plus:
    v[1] = kInvSqrt2;
    v[2] = kInvSqrt2;
    break;
  case BellKind::psi_minus:
    v[1] = kInvSqrt2;
    v[2] = -kInvSqrt2;
    break;
  case BellKind::phi_plus:
    v[0] = kInvSqrt2 * std::polar(1.0, -phi);
    v[3] = kInvSqrt2 * std::polar(1.0, phi);
    break;
  case BellKind::phi_minus:
    v[0] = kInvSqrt2 * std::polar(1.0, -phi);
    v[3] = -kInvSqrt2 * std::polar(1.0, phi);
    break;
  }
  return v;
}

StateVector bell_state(BellKind kind, Real phi)
{
  return StateVector(bell_vector(kind, phi), SpaceTag::two_qubits());
}

StateVector fock_state(int n, const FockCutoff& cutoff)
{
  require(n >= 0 && n <= cutoff.n_max(), "fock_state: n outside the truncated space");
  Vector v = Vector::Zero(cutoff.dim());
  v[n] = 1.0;
  return StateVector(std::move(v), SpaceTag::field(cutoff));
}

StateVector atom_basis_state(Level level, int levels_per_atom)
{
  Vector v = Vector::Zero(levels_per_atom);
  v[level_index(level, levels_per_atom)] = 1.0;
  return StateVector(std::move(v), SpaceTag{1, levels_per_atom, 0});
}

namespace {

SpaceTag concat(const SpaceTag& a, const SpaceTag& b)
{
  require(!a.has_field() || (b.atoms == 0 && !b.has_field()),
          "tensor: factor ordering must be atom A, atom B, field");
  require(!(a.has_field() && b.has_field()), "tensor: only one field factor is supported");
  require(a.atoms == 0 || b.atoms == 0 || a.levels == b.levels,
          "tensor: atoms must share the number of levels");
  require(a.atoms + b.atoms <= 2, "tensor: at most two atoms");
  SpaceTag t;
  t.atoms = a.atoms + b.atoms;
  t.levels = a.atoms > 0 ? a.levels : b.levels;
  t.fock_dim = a.has_field() ? a.fock_dim : b.fock_dim;
  return t;
}

}  // namespace

StateVector tensor(const StateVector& a, const StateVector& b)
{
  const SpaceTag t = concat(a.tag(), b.tag());
  Vector v = kron(a.amplitudes(), b.amplitudes());
  return StateVector::normalized(std::move(v), t);
}

Operator tensor(const Operator& a, const Operator& b)
{
  const SpaceTag t = concat(a.tag(), b.tag());
  return Operator(kron(a.matrix(), b.matrix()), t,
                  {a.is_hermitian() && b.is_hermitian(), a.is_unitary() && b.is_unitary()},
                  Operator::Exact{});
}

Operator on_atoms(const Operator& atoms, const FockCutoff& cutoff)
{
  require(atoms.tag().atoms == 2 && !atoms.tag().has_field(), "on_atoms: expected a two-atom operator");
  return tensor(atoms, identity(SpaceTag::field(cutoff)));
}

Operator on_field(const Operator& field, int levels_per_atom)
{
  require(field.tag().atoms == 0 && field.tag().has_field(), "on_field: expected a field operator");
  return tensor(identity(SpaceTag{2, levels_per_atom, 0}), field);
}

}  // namespace dicke2p
