#include "dicke2p/models.hpp"

#include <cmath>
#include <stdexcept>

namespace dicke2p {

void FullModelParams::validate() const
{
  if (!(delta > 0.0))
    throw std::invalid_argument("FullModelParams: delta must be positive");
  if (!(g_g > 0.0) || !(g_e > 0.0))
    throw std::invalid_argument("FullModelParams: couplings must be positive");
}

void EffectiveModelParams::validate() const
{
  if (g == 0.0 || !std::isfinite(g))
    throw std::invalid_argument("EffectiveModelParams: g must be nonzero");
}

namespace {

Matrix coll(Level mu, Level nu, int levels)
{
  return collective_op(mu, nu, levels).matrix();
}

Matrix atom_identity(int levels)
{
  return Matrix::Identity(levels * levels, levels * levels);
}

// atoms (x) field, built factor by factor.
Matrix lifted(const Matrix& atoms, const Matrix& field)
{
  return kron(atoms, field);
}

}  // namespace

Operator full_hamiltonian(const FullModelParams& p)
{
  p.validate();
  const FockCutoff& c = p.cutoff;
  const Matrix a = annihilation_op(c).matrix();
  const Matrix n = number_op(c).matrix();
  const Matrix id_f = Matrix::Identity(c.dim(), c.dim());

  Matrix h = p.omega * lifted(atom_identity(3), n) + 2.0 * p.omega * lifted(coll(Level::e, Level::e, 3), id_f) +
             (p.omega + p.delta) * lifted(coll(Level::i, Level::i, 3), id_f);
  const Matrix v = p.g_g * lifted(coll(Level::i, Level::g, 3), a) + p.g_e * lifted(coll(Level::e, Level::i, 3), a);
  h += v + v.adjoint();
  return Operator(std::move(h), SpaceTag::atoms_and_field(3, c), {true, false});
}

Operator full_hamiltonian_effective_frame(const FullModelParams& p)
{
  const Real frame = p.omega - 2.0 * p.g_g * p.g_g / p.delta;
  const Operator h = full_hamiltonian(p);
  const Operator i3 = constant_of_motion(p.cutoff, 3);
  return Operator(h.matrix() - frame * i3.matrix(), h.tag(), {true, false});
}

Operator two_photon_w(const EffectiveModelParams& p)
{
  p.validate();
  const FockCutoff& c = p.cutoff;
  const Matrix a = annihilation_op(c).matrix();
  const Matrix term = p.g * lifted(coll(Level::e, Level::g, 2), a * a);
  return Operator(term + term.adjoint(), SpaceTag::atoms_and_field(2, c), {true, false});
}

Operator stark_shift(const FullModelParams& p)
{
  p.validate();
  const FockCutoff& c = p.cutoff;
  const Real gg2 = p.g_g * p.g_g / p.delta;
  const Real diff = (p.g_e * p.g_e - p.g_g * p.g_g) / p.delta;
  const Matrix a = annihilation_op(c).matrix();
  const Matrix see = coll(Level::e, Level::e, 2);
  const Matrix id_f = Matrix::Identity(c.dim(), c.dim());
  Matrix s = -2.0 * gg2 * constant_of_motion(c, 2).matrix() - diff * lifted(see, a * a.adjoint()) +
             3.0 * gg2 * lifted(see, id_f);
  return Operator(std::move(s), SpaceTag::atoms_and_field(2, c), {true, false});
}

Operator constant_of_motion(const FockCutoff& cutoff, int levels_per_atom)
{
  const Matrix id_f = Matrix::Identity(cutoff.dim(), cutoff.dim());
  Matrix atoms = 2.0 * coll(Level::e, Level::e, levels_per_atom);
  if (levels_per_atom == 3)
    atoms += coll(Level::i, Level::i, 3);
  Matrix m = lifted(atom_identity(levels_per_atom), number_op(cutoff).matrix()) + lifted(atoms, id_f);
  return Operator(std::move(m), SpaceTag::atoms_and_field(levels_per_atom, cutoff), {true, false});
}

Real effective_coupling(Real g_g, Real g_e, Real delta)
{
  if (delta == 0.0)
    throw std::invalid_argument("effective_coupling: delta must be nonzero");
  return -g_g * g_e / delta;
}

Real trapped_ion_coupling(Real rabi_frequency, Real lamb_dicke)
{
  if (rabi_frequency < 0.0 || lamb_dicke < 0.0)
    throw std::invalid_argument("trapped_ion_coupling: inputs must be non-negative");
  return -rabi_frequency * lamb_dicke * lamb_dicke / 2.0;
}

ValidityReport validity_report(const FullModelParams& p, Real nbar)
{
  p.validate();
  if (!(nbar > 0.0))
    throw std::invalid_argument("validity_report: nbar must be positive");
  ValidityReport r;
  const Real ge3 = p.g_e * p.g_e * p.g_e;
  r.time_horizon = kValidityMargin * p.delta * p.delta / (ge3 * nbar);
  r.stark_closeness_ok = std::abs(p.g_e * p.g_e - p.g_g * p.g_g) < ge3 / p.delta;
  r.revival_reachable_ok = p.g_e * nbar * kPi < kValidityMargin * p.delta;
  return r;
}

namespace {

// Two-level atom index {g=0, e=1} -> three-level index {g=0, e=2}.
int lift(int k) { return k == 0 ? 0 : 2; }

}  // namespace

Vector embed_two_level(const Vector& two_level, const FockCutoff& cutoff)
{
  const int d = cutoff.dim();
  if (two_level.size() != 4 * d)
    throw std::invalid_argument("embed_two_level: dimension mismatch");
  Vector out = Vector::Zero(9 * d);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      out.segment((lift(a) * 3 + lift(b)) * d, d) = two_level.segment((a * 2 + b) * d, d);
  return out;
}

Vector project_two_level(const Vector& three_level, const FockCutoff& cutoff)
{
  const int d = cutoff.dim();
  if (three_level.size() != 9 * d)
    throw std::invalid_argument("project_two_level: dimension mismatch");
  Vector out(4 * d);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      out.segment((a * 2 + b) * d, d) = three_level.segment((lift(a) * 3 + lift(b)) * d, d);
  return out;
}

}  // namespace dicke2p
