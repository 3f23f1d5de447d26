#ifndef DICKE2P_PROTOCOLS_HPP
#define DICKE2P_PROTOCOLS_HPP

#include "dicke2p/dynamics.hpp"
#include "dicke2p/homodyne.hpp"

#include <array>
#include <random>
#include <string>
#include <vector>

namespace dicke2p {

//------------------------------------------------------------------------------
// GHZ generation

struct GhzInput
{
  AtomCoeffs coeffs;
  Eigen::Vector2cd single_atom;  ///< e^{i pi/4} (e^{-i phi}|g> - i e^{i phi}|e>) / sqrt2
  Vector4 product;               ///< single_atom (x) single_atom
};

GhzInput ghz_input(Real phi);

/// i/sqrt2 (|Phi-_{2phi}>|alpha> - s |Phi+_{2phi}>|-alpha>) with phi = arg(alpha)
/// and s = coupling_sign. The sign of the second term follows the sign of the
/// two-photon coupling: the half-revival state picks up -i for g > 0 and +i
/// for g < 0 on its |-alpha> branch.
StateVector ghz_target(Complex alpha, const FockCutoff& cutoff, int coupling_sign = 1);

/// Cat-state form for arg(alpha) = pi/4:
///   g > 0: (|gg>|alpha,-> + |ee>|alpha,+>)/sqrt2
///   g < 0: (|gg>|alpha,+> + |ee>|alpha,->)/sqrt2
/// with normalized cats |alpha,+-> ~ |alpha> +- |-alpha>.
StateVector ghz_cat_form(Complex alpha, const FockCutoff& cutoff, int coupling_sign = 1);

/// |<GHZ|Psi(t_r/2)>|^2 for ghz_input (x) |alpha>. For the full model the
/// intermediate-level population counts as infidelity.
Real run_ghz(Complex alpha, const Evolver& evolver);

//------------------------------------------------------------------------------
// Bell measurement

/// Detector outcomes: d1 for cavity 1 (+ <-> |alpha>), d2 for cavity 2
/// (+ <-> |e^{i pi/4} alpha>).
struct OutcomeLabel
{
  int d1 = 1;
  int d2 = 1;

  std::size_t index() const;  ///< (+,+)=0, (+,-)=1, (-,+)=2, (-,-)=3 in (d1, d2) order
  static OutcomeLabel from_index(std::size_t k);
  /// "d1,d2" with signs, e.g. "+,-".
  std::string str() const;

  friend bool operator==(const OutcomeLabel&, const OutcomeLabel&) = default;
};

/// M+_phi = |Psi-><Psi-| + |Phi-_{2phi}><Phi-_{2phi}|,
/// M-_phi = -i(|Phi+_{2phi}><Psi+| + |Psi+><Phi+_{2phi}|).
Operator measurement_operator(Real phi, int sign);

/// M^{s2 s1} = M^{s2}_{phi+pi/4} M^{s1}_phi: s1 is the cavity-1 result.
Operator composed_measurement(Real phi, int s1, int s2);

/// Bell state selected by an outcome and the gate that maps it back:
///   (d1,d2) = (+,+): |Psi->,        1
///   (d1,d2) = (-,+): |Psi+>,        i sigma_{2phi}
///   (d1,d2) = (+,-): |Phi-_{2phi}>, sigma_{2phi} sigma_z
///   (d1,d2) = (-,-): |Phi+_{2phi}>, i sigma_z
/// Gates act on atom A; sigma_phi = e^{i phi}|e><g| + e^{-i phi}|g><e|,
/// sigma_z = |e><e| - |g><g|.
Operator correction_gate(const OutcomeLabel& outcome, Real phi);
BellKind bell_target(const OutcomeLabel& outcome);
Vector4 bell_target_vector(const OutcomeLabel& outcome, Real phi);
const char* bell_name(BellKind kind);

struct ProtocolResult
{
  OutcomeLabel outcome;
  Real probability = 0.0;
  Matrix4 post_state = Matrix4::Zero();  ///< after the correction gate; zero when undefined
  BellKind target = BellKind::psi_minus;
  Real fidelity = 0.0;  ///< NaN when probability < kUndefinedProbability
};

inline constexpr Real kUndefinedProbability = 1e-12;

struct BellReport
{
  std::array<ProtocolResult, 4> outcomes;
  /// Total weight captured by the detection model before renormalization
  /// (below 1 by the non-orthogonality of |alpha>, |-alpha> for ideal
  /// projections, and by grid truncation for homodyne detection).
  Real detection_mass = 1.0;
};

enum class Detection { ideal, homodyne };

/// Two-cavity protocol for a fixed field amplitude. Cavity 1 starts in
/// |alpha>, cavity 2 in a fresh |e^{i pi/4} alpha>; both interactions use the
/// same model. The atom-to-(atom (x) field) response of each cavity is computed
/// once, so every input state costs only small matrix products.
class BellMeasurement
{
public:
  /// Interaction time t_r/2 in both cavities.
  BellMeasurement(const Evolver& evolver, Complex alpha);
  BellMeasurement(const Evolver& evolver, Complex alpha, Real t1, Real t2);

  Real phi() const { return phi_; }
  Complex amplitude(int cavity) const { return cavity == 1 ? alpha_ : beta_; }
  /// Columns: the evolved atoms (x) field state for each product-basis atom input.
  const Matrix& response(int cavity) const { return cavity == 1 ? r1_ : r2_; }

  /// Atomic operator implemented by projecting cavity `cavity` onto |sign * amplitude>.
  Matrix4 kraus(int cavity, int sign) const;

  BellReport ideal(const AtomCoeffs& c) const;
  /// Averages over the record distribution; cfg.lo_phase is the cavity-1
  /// local oscillator and cavity 2 uses cfg.lo_phase + pi/4.
  BellReport homodyne(const AtomCoeffs& c, const HomodyneConfig& cfg) const;

  /// Sequential single-shot runs: sample cavity 1, collapse, then cavity 2.
  ProtocolResult sample_ideal(const AtomCoeffs& c, std::mt19937_64& rng) const;
  ProtocolResult sample_homodyne(const AtomCoeffs& c, const HomodyneConfig& cfg, std::mt19937_64& rng) const;

private:
  ProtocolResult finish(const OutcomeLabel& o, Real probability, const Matrix4& rho_raw) const;

  Complex alpha_;
  Complex beta_;
  Real phi_;
  int dim_;
  Matrix r1_;
  Matrix r2_;
};

/// Single protocol run with an RNG stream derived from `seed`.
ProtocolResult run_bell_protocol(const AtomCoeffs& c, Complex alpha, const Evolver& evolver, Detection detection,
                                 const HomodyneConfig& cfg, std::uint64_t seed);

struct TimingCurve
{
  std::vector<Real> times;
  std::array<std::vector<Real>, 4> fidelity;     ///< per outcome, indexed by OutcomeLabel::index()
  std::array<std::vector<Real>, 4> probability;
};

/// Per-outcome fidelity with both interaction times set to each entry of `times`.
TimingCurve timing_sensitivity(const AtomCoeffs& c, Complex alpha, const Evolver& evolver,
                               const std::vector<Real>& times);

/// Angular frequency of a sampled oscillation, read from the spacing of the
/// crossings of its mean value (successive crossings are half a period apart).
/// NaN with fewer than two crossings.
Real oscillation_frequency(const std::vector<Real>& t, const std::vector<Real>& f);

}  // namespace dicke2p

#endif
