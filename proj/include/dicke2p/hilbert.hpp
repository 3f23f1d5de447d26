#ifndef DICKE2P_HILBERT_HPP
#define DICKE2P_HILBERT_HPP

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <array>
#include <complex>
#include <cstdint>
#include <string>

namespace dicke2p {

using Real = double;
using Complex = std::complex<Real>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Matrix4 = Eigen::Matrix4cd;
using Vector4 = Eigen::Vector4cd;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr Real kPi = 3.14159265358979323846;

/// Tolerance used by every normalization / flag invariant of this module.
inline constexpr Real kInvariantTol = 1e-10;

//------------------------------------------------------------------------------
// Generic Eigen helpers

/// Kronecker product evaluated into a plain dense matrix.
template <typename A, typename B>
Eigen::Matrix<typename A::Scalar, Eigen::Dynamic, Eigen::Dynamic>
kron(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b)
{
  return Eigen::kroneckerProduct(a.derived(), b.derived()).eval();
}

template <typename A, typename B>
Eigen::Matrix<typename A::Scalar, Eigen::Dynamic, Eigen::Dynamic>
commutator(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b)
{
  return (a * b - b * a).eval();
}

template <typename A>
Real max_abs(const Eigen::MatrixBase<A>& a)
{
  return a.size() == 0 ? Real(0) : a.cwiseAbs().maxCoeff();
}

/// Truncated annihilation operator on the Fock space {|0>, ..., |n_max>}.
template <typename Scalar = Complex>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> annihilation_matrix(int n_max)
{
  using std::sqrt;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n)
    a(n - 1, n) = Scalar(sqrt(static_cast<typename Eigen::NumTraits<Scalar>::Real>(n)));
  return a;
}

//------------------------------------------------------------------------------
// Spaces

class FockCutoff
{
public:
  /// Fock space {|0>, ..., |n_max>}; n_max >= 1.
  explicit FockCutoff(int n_max);

  /// Default truncation for a coherent state of mean photon number nbar:
  /// n_max = ceil(nbar + 8 sqrt(nbar)) + 4.
  static FockCutoff for_mean_photon_number(Real nbar);

  int n_max() const { return n_max_; }
  int dim() const { return n_max_ + 1; }

  friend bool operator==(const FockCutoff&, const FockCutoff&) = default;

private:
  int n_max_;
};

/// Tensor factorization descriptor. The global ordering is
/// atom A (x) atom B (x) field; absent factors have size 0.
struct SpaceTag
{
  int atoms = 0;     ///< 0, 1 or 2
  int levels = 2;    ///< levels per atom: 2 ({g,e}) or 3 ({g,i,e})
  int fock_dim = 0;  ///< 0 when there is no field factor

  Eigen::Index atom_dim() const;
  Eigen::Index dim() const { return atom_dim() * (fock_dim > 0 ? fock_dim : 1); }
  bool has_field() const { return fock_dim > 0; }

  static SpaceTag two_qubits() { return {2, 2, 0}; }
  static SpaceTag field(const FockCutoff& c) { return {0, 2, c.dim()}; }
  static SpaceTag atoms_and_field(int levels, const FockCutoff& c) { return {2, levels, c.dim()}; }

  std::string describe() const;

  friend bool operator==(const SpaceTag&, const SpaceTag&) = default;
};

enum class Level { g, i, e };

/// Index of `level` in the single-atom basis. Two-level atoms use
/// {g=0, e=1}; three-level atoms use {g=0, i=1, e=2}.
int level_index(Level level, int levels_per_atom);

//------------------------------------------------------------------------------
// States and operators

class StateVector
{
public:
  /// Wraps `amplitudes`, which must already have unit norm (within 1e-10).
  StateVector(Vector amplitudes, SpaceTag tag);

  /// Rescales `amplitudes` to unit norm. Throws on a zero vector.
  static StateVector normalized(Vector amplitudes, SpaceTag tag);

  const Vector& amplitudes() const { return amps_; }
  const SpaceTag& tag() const { return tag_; }
  Eigen::Index dim() const { return amps_.size(); }
  Complex operator[](Eigen::Index k) const { return amps_[k]; }

  Complex inner(const StateVector& other) const;  ///< <this|other>

private:
  Vector amps_;
  SpaceTag tag_;
};

struct OperatorFlags
{
  bool hermitian = false;
  bool unitary = false;
};

class Operator
{
public:
  /// Flags, when set, are verified in max-norm to 1e-10.
  Operator(Matrix matrix, SpaceTag tag, OperatorFlags flags = {});

  /// Skips flag verification; for constructions whose flags hold exactly
  /// (identities, Kronecker products of verified factors).
  struct Exact {};
  Operator(Matrix matrix, SpaceTag tag, OperatorFlags flags, Exact);

  const Matrix& matrix() const { return m_; }
  const SpaceTag& tag() const { return tag_; }
  bool is_hermitian() const { return flags_.hermitian; }
  bool is_unitary() const { return flags_.unitary; }
  Eigen::Index dim() const { return m_.rows(); }

  /// Identity key: equal for copies, distinct for independently built operators.
  std::uint64_t id() const { return id_; }

  Operator adjoint() const;
  Vector apply(const Vector& v) const;
  Vector apply(const StateVector& v) const { return apply(v.amplitudes()); }

private:
  Matrix m_;
  SpaceTag tag_;
  OperatorFlags flags_;
  std::uint64_t id_;
};

Operator operator*(const Operator& a, const Operator& b);
Operator operator+(const Operator& a, const Operator& b);
Operator operator-(const Operator& a, const Operator& b);
Operator operator*(Complex s, const Operator& a);

/// Amplitudes (c_g, c_-, c_+, c_e) in the basis {|gg>, |Psi->, |Psi+>, |ee>}.
struct AtomCoeffs
{
  Complex c_g{1.0, 0.0};
  Complex c_minus{};
  Complex c_plus{};
  Complex c_e{};

  /// Amplitudes in the product basis {|gg>, |ge>, |eg>, |ee>}.
  Vector4 product_amplitudes() const;
  static AtomCoeffs from_product_amplitudes(const Vector4& v);

  Real norm_squared() const;
  /// d^{+-}_phi = (c_g e^{i phi} +- c_e e^{-i phi}) / sqrt 2
  Complex d_plus(Real phi) const;
  Complex d_minus(Real phi) const;

  StateVector state() const;
};

enum class BellKind { psi_plus, psi_minus, phi_plus, phi_minus };

//------------------------------------------------------------------------------
// Builders

Operator identity(SpaceTag tag);
Operator annihilation_op(const FockCutoff& cutoff);
Operator number_op(const FockCutoff& cutoff);
Operator parity_op(const FockCutoff& cutoff);

/// S_{mu nu} = |mu><nu|_A (x) 1_B + 1_A (x) |mu><nu|_B on two atoms.
Operator collective_op(Level mu, Level nu, int levels_per_atom);

/// |mu><nu| for one atom.
Operator single_atom_op(Level mu, Level nu, int levels_per_atom);

/// Truncated coherent state, renormalized. Throws when the cutoff keeps less
/// than 1 - 1e-10 of the norm.
StateVector coherent_state(Complex alpha, const FockCutoff& cutoff);

/// Raw truncated coherent amplitudes p_n (no renormalization, no checks).
Vector coherent_amplitudes(Complex alpha, int dim);

/// Normalized (|alpha> + parity |-alpha>); parity is +1 or -1.
StateVector cat_state(Complex alpha, int parity, const FockCutoff& cutoff);

/// |Psi+->  = (|ge> +- |eg>)/sqrt2,  |Phi_phi+-> = (e^{-i phi}|gg> +- e^{i phi}|ee>)/sqrt2.
StateVector bell_state(BellKind kind, Real phi = 0.0);
Vector4 bell_vector(BellKind kind, Real phi = 0.0);

StateVector fock_state(int n, const FockCutoff& cutoff);
StateVector atom_basis_state(Level level, int levels_per_atom);

StateVector tensor(const StateVector& a, const StateVector& b);
Operator tensor(const Operator& a, const Operator& b);

/// Two-atom operator lifted to atoms (x) field.
Operator on_atoms(const Operator& atoms, const FockCutoff& cutoff);
/// Field operator lifted to atoms (x) field.
Operator on_field(const Operator& field, int levels_per_atom);

}  // namespace dicke2p

#endif
