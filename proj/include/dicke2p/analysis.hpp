#ifndef DICKE2P_ANALYSIS_HPP
#define DICKE2P_ANALYSIS_HPP

#include "dicke2p/hilbert.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace dicke2p {

/// Hermitian, unit-trace, positive semidefinite matrix (checked on construction).
class DensityMatrix
{
public:
  DensityMatrix(Matrix rho, SpaceTag tag);

  static DensityMatrix from_pure(const StateVector& psi);

  const Matrix& matrix() const { return rho_; }
  const SpaceTag& tag() const { return tag_; }
  Eigen::Index dim() const { return rho_.rows(); }

  Real trace() const { return rho_.trace().real(); }
  Real purity() const;

private:
  Matrix rho_;
  SpaceTag tag_;
};

/// |<b|a>|^2.
Real fidelity(const StateVector& a, const StateVector& b);
/// <b|a|b>.
Real fidelity(const DensityMatrix& a, const StateVector& b);

enum class Keep { atoms, field };

/// Reduced state of the atoms or of the field for an atoms (x) field state.
DensityMatrix partial_trace(const StateVector& psi, Keep keep);
DensityMatrix partial_trace(const DensityMatrix& rho, Keep keep);

//------------------------------------------------------------------------------
// Wigner function

struct WignerSpec
{
  Complex center{};
  Real half_width = 5.0;  ///< square window |Re, Im (beta - center)| <= half_width
  int points = 201;

  /// Default window for a field of amplitude alpha: centered at 0, half width |alpha| + 5.
  static WignerSpec around(Complex alpha);
};

struct WignerGrid
{
  Eigen::VectorXd beta_re;
  Eigen::VectorXd beta_im;
  Eigen::MatrixXd values;  ///< values(i, j) = W(beta_re[i] + i beta_im[j])
  bool coarse = false;     ///< step exceeds the fringe period of the state

  Real cell_area() const;
  /// Riemann sum of W over the grid.
  Real integral() const;
};

/// W(beta) = (2/pi) Tr[D(-beta) rho D(beta) Pi] evaluated at one point.
Real wigner_at(const Matrix& rho, Complex beta);

/// Wigner function of a single-mode state on a uniform grid. Warns on stderr
/// when the grid step exceeds the width of the narrowest Fock-space feature.
WignerGrid wigner(const DensityMatrix& rho_f, const WignerSpec& spec);

/// max |W| along the perpendicular bisector of the segment from `a` to `b`
/// (half length |b - a| / 2, `samples` points), divided by max(W(a), W(b)).
/// Small for an incoherent pair of lobes at a and b, of order one with fringes.
Real wigner_midline_ratio(const DensityMatrix& rho_f, Complex a, Complex b, int samples = 201);

//------------------------------------------------------------------------------
// Random states and ensembles

/// Independent generator for sample `index` of a run seeded with `master_seed`.
std::mt19937_64 stream_rng(std::uint64_t master_seed, std::uint64_t index);

/// First column of a Haar-random U(4) matrix (QR of a complex Ginibre matrix
/// with the phase ambiguity of R removed).
AtomCoeffs haar_random_two_qubit(std::mt19937_64& rng);

/// Haar-random atoms plus a uniform coherent phase, drawn from one stream.
struct EnsembleSample
{
  std::size_t index = 0;
  AtomCoeffs atoms;
  Real phi = 0.0;
};

EnsembleSample draw_sample(std::uint64_t master_seed, std::size_t index);

struct EnsembleStats
{
  std::vector<Real> mean;
  std::vector<Real> stderr_of_mean;
  std::vector<std::size_t> count;  ///< finite contributions per column
};

/// Runs `task` on samples 0..n-1 in parallel and averages each column of the
/// returned vectors. NaN entries are left out of their column. The reduction
/// runs in index order, so the result depends only on the seed.
EnsembleStats ensemble_average(const std::function<std::vector<Real>(const EnsembleSample&)>& task,
                               std::size_t n_samples, std::uint64_t master_seed);

struct MeanStderr
{
  Real mean = 0.0;
  Real stderr_of_mean = 0.0;
};

MeanStderr ensemble_average(const std::function<Real(const EnsembleSample&)>& task, std::size_t n_samples,
                            std::uint64_t master_seed);

}  // namespace dicke2p

#endif
