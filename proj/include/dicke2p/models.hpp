#ifndef DICKE2P_MODELS_HPP
#define DICKE2P_MODELS_HPP

#include "dicke2p/hilbert.hpp"

namespace dicke2p {

/// Two three-level atoms (g, i, e) coupled to one mode at two-photon
/// resonance. `omega` defaults to zero: the pipeline works in the frame
/// rotating with the constant of motion.
struct FullModelParams
{
  Real omega = 0.0;
  Real delta = 500.0;  ///< detuning of the intermediate level
  Real g_g = 1.0;      ///< g <-> i coupling
  Real g_e = 1.0;      ///< i <-> e coupling
  FockCutoff cutoff{1};

  /// Throws std::invalid_argument unless delta, g_g, g_e > 0.
  void validate() const;
};

struct EffectiveModelParams
{
  Real g = 1.0;  ///< two-photon coupling, nonzero
  FockCutoff cutoff{1};

  void validate() const;
};

struct ValidityReport
{
  Real time_horizon = 0.0;            ///< 0.1 Delta^2 / (g_e^3 nbar)
  bool stark_closeness_ok = false;    ///< |g_e^2 - g_g^2| < g_e^3 / Delta
  bool revival_reachable_ok = false;  ///< g_e nbar pi < 0.1 Delta

  bool all_ok() const { return stark_closeness_ok && revival_reachable_ok; }
};

/// Margin used to read the "much smaller than" conditions.
inline constexpr Real kValidityMargin = 0.1;

/// H = w a^dag a + 2w S_ee + (w + Delta) S_ii + g_g (a S_ig + h.c.) + g_e (a S_ei + h.c.)
/// on three-level atoms (x) field.
Operator full_hamiltonian(const FullModelParams& p);

/// Full Hamiltonian with the constant-of-motion phase (w - 2 g_g^2/Delta) I removed,
/// i.e. the frame in which the effective dynamics is generated by W alone.
Operator full_hamiltonian_effective_frame(const FullModelParams& p);

/// W = g (a^2 S_eg + a^dag^2 S_ge) on two-level atoms (x) field.
Operator two_photon_w(const EffectiveModelParams& p);

/// S = -2 (g_g^2/Delta) I - ((g_e^2 - g_g^2)/Delta) a a^dag S_ee + 3 (g_g^2/Delta) S_ee
/// on two-level atoms (x) field.
Operator stark_shift(const FullModelParams& p);

/// I = a^dag a + 2 S_ee, plus S_ii for three-level atoms.
Operator constant_of_motion(const FockCutoff& cutoff, int levels_per_atom);

/// g = -g_g g_e / Delta.
Real effective_coupling(Real g_g, Real g_e, Real delta);

/// Two-phonon coupling of two trapped ions driven on the second red sideband:
/// g_eff = -Omega eta^2 / 2.
Real trapped_ion_coupling(Real rabi_frequency, Real lamb_dicke);

ValidityReport validity_report(const FullModelParams& p, Real nbar);

/// Maps two-level-atom amplitudes into the three-level space (i unpopulated).
Vector embed_two_level(const Vector& two_level, const FockCutoff& cutoff);
/// Drops every component with an atom in the intermediate level.
Vector project_two_level(const Vector& three_level, const FockCutoff& cutoff);

}  // namespace dicke2p

#endif
