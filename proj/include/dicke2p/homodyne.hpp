#ifndef DICKE2P_HOMODYNE_HPP
#define DICKE2P_HOMODYNE_HPP

#include "dicke2p/hilbert.hpp"

#include <random>
#include <vector>

namespace dicke2p {

/// Quadrature x_theta = (a^dag e^{i theta} + a e^{-i theta}) / 2, so a coherent
/// state |alpha> has <x_theta> = Re(alpha e^{-i theta}) and variance 1/4.

/// h(k, n) = <x_k, theta=0 | n> = 2^{1/4} psi_n(sqrt2 x_k) with psi_n the
/// Hermite functions. Stable three-term recurrence with running rescaling.
Eigen::MatrixXd quadrature_wavefunctions(const Eigen::VectorXd& x, int dim);

/// <x, theta| as a row over the Fock basis: e^{-i n theta} h_n(x).
Eigen::RowVectorXcd quadrature_bra(Real x, Real theta, int dim);

/// |<x|s|alpha|>| for a coherent state on the measured axis, s = +1 or -1:
/// (2/pi)^{1/4} exp[-(x - s|alpha|)^2]. Sign s is the label that the rule
/// x > 0 -> "+" assigns to the state.
Real quadrature_overlap(Real x, Real alpha_abs, int sign);

/// Delta_eps^2 = (1 - eps) / (4 eps); eps in (0, 1].
Real homodyne_noise_variance(Real efficiency);

/// Efficiency below which the smeared peaks of |+-alpha> overlap: 4 / |alpha|^2.
Real efficiency_threshold(Real alpha_abs);

struct HomodyneConfig
{
  Real lo_phase = 0.0;    ///< theta_L; the optimal choice is the phase of the measured amplitude
  Real efficiency = 1.0;  ///< eps in (0, 1]
  Real step = 0.02;       ///< quadrature grid spacing
  Real padding = 4.0;     ///< grid margin beyond the Fock-space support, in units of the vacuum width

  void validate() const;
};

/// Uniform midpoint grid on [-L, L] wide enough for a Fock space of size `dim`
/// plus the noise tail of `cfg`. Never contains x = 0.
Eigen::VectorXd quadrature_grid(int dim, const HomodyneConfig& cfg);

struct HomodyneRecord
{
  Real x = 0.0;  ///< recorded (noisy) quadrature value
  int sign = 1;  ///< +1 for x > 0, -1 otherwise
  Vector4 atoms = Vector4::Zero();  ///< normalized atomic state after the collapse
};

/// One balanced-homodyne measurement of the field of a two-qubit (x) field
/// state (amplitudes of length 4 * dim). The ideal record is drawn from
/// Tr[rho_f |x,theta><x,theta|], Gaussian noise of variance Delta_eps^2 is
/// added, and the atoms are collapsed with the ideal projector at the recorded x.
HomodyneRecord homodyne_measure(const Vector& joint, int fock_dim, const HomodyneConfig& cfg, std::mt19937_64& rng);

/// Repeated homodyne_measure on one state; the record distribution is built once.
class HomodyneSampler
{
public:
  HomodyneSampler(const Vector& joint, int fock_dim, const HomodyneConfig& cfg);
  HomodyneRecord draw(std::mt19937_64& rng) const;

private:
  Matrix fields_;
  HomodyneConfig cfg_;
  Eigen::VectorXd x_;
  std::vector<Real> cdf_;
};

}  // namespace dicke2p

#endif
