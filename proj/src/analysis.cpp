#include "dicke2p/analysis.hpp"

#include "dicke2p/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace dicke2p {

DensityMatrix::DensityMatrix(Matrix rho, SpaceTag tag) : rho_(std::move(rho)), tag_(tag)
{
  if (rho_.rows() != rho_.cols() || rho_.rows() != tag_.dim())
    throw std::invalid_argument("DensityMatrix: dimension does not match the space tag");
  if (max_abs(rho_ - rho_.adjoint()) > kInvariantTol)
    throw std::invalid_argument("DensityMatrix: not Hermitian");
  if (std::abs(rho_.trace() - Complex(1.0)) > kInvariantTol)
    throw std::invalid_argument("DensityMatrix: trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9)
    throw std::invalid_argument("DensityMatrix: negative eigenvalue");
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi)
{
  const Vector& v = psi.amplitudes();
  return DensityMatrix(v * v.adjoint(), psi.tag());
}

Real DensityMatrix::purity() const
{
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return rho_.squaredNorm();
}

Real fidelity(const StateVector& a, const StateVector& b)
{
  if (a.dim() != b.dim())
    throw std::invalid_argument("fidelity: dimension mismatch");
  return std::norm(b.amplitudes().dot(a.amplitudes()));
}

Real fidelity(const DensityMatrix& a, const StateVector& b)
{
  if (a.dim() != b.dim())
    throw std::invalid_argument("fidelity: dimension mismatch");
  const Vector& v = b.amplitudes();
  return v.dot(a.matrix() * v).real();
}

namespace {

void require_tripartite(const SpaceTag& tag)
{
  if (tag.atoms != 2 || !tag.has_field())
    throw std::invalid_argument("partial_trace: expected an atoms (x) field space, got " + tag.describe());
}

SpaceTag kept_tag(const SpaceTag& tag, Keep keep)
{
  if (keep == Keep::field)
    return SpaceTag{0, tag.levels, tag.fock_dim};
  return SpaceTag{2, tag.levels, 0};
}

}  // namespace

DensityMatrix partial_trace(const StateVector& psi, Keep keep)
{
  const SpaceTag& tag = psi.tag();
  require_tripartite(tag);
  const Eigen::Index d = tag.fock_dim;
  const Eigen::Index na = tag.atom_dim();
  // m(n, a) = psi[a d + n]
  const Eigen::Map<const Matrix> m(psi.amplitudes().data(), d, na);
  Matrix rho = keep == Keep::field ? Matrix(m * m.adjoint()) : Matrix((m.adjoint() * m).transpose());
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(std::move(rho), kept_tag(tag, keep));
}

DensityMatrix partial_trace(const DensityMatrix& rho, Keep keep)
{
  const SpaceTag& tag = rho.tag();
  require_tripartite(tag);
  const Eigen::Index d = tag.fock_dim;
  const Eigen::Index na = tag.atom_dim();
  const Matrix& r = rho.matrix();
  Matrix out;
  if (keep == Keep::field) {
    out = Matrix::Zero(d, d);
    for (Eigen::Index a = 0; a < na; ++a)
      out += r.block(a * d, a * d, d, d);
  } else {
    out = Matrix::Zero(na, na);
    for (Eigen::Index a = 0; a < na; ++a)
      for (Eigen::Index b = 0; b < na; ++b)
        out(a, b) = r.block(a * d, b * d, d, d).trace();
  }
  return DensityMatrix(std::move(out), kept_tag(tag, keep));
}

//------------------------------------------------------------------------------

WignerSpec WignerSpec::around(Complex alpha)
{
  WignerSpec s;
  s.half_width = std::abs(alpha) + 5.0;
  return s;
}

Real WignerGrid::cell_area() const
{
  const Real dx = beta_re.size() > 1 ? beta_re[1] - beta_re[0] : 0.0;
  const Real dy = beta_im.size() > 1 ? beta_im[1] - beta_im[0] : 0.0;
  return dx * dy;
}

Real WignerGrid::integral() const
{
  return values.sum() * cell_area();
}

namespace {

// Clenshaw evaluation of W(beta) = (2/pi) e^{-2|beta|^2} sum_L (2 beta)^L / sqrt(L!) * c_L(4|beta|^2),
// where c_L is a series in normalized associated Laguerre polynomials over the
// L-th diagonal of rho. Intermediate values grow like e^{2|beta|^2}, so the
// sums run in long double.
class WignerEvaluator
{
public:
  explicit WignerEvaluator(const Matrix& rho) : m_(rho.rows())
  {
    diag_re_.resize(static_cast<std::size_t>(m_));
    diag_im_.resize(static_cast<std::size_t>(m_));
    a_.resize(static_cast<std::size_t>(m_));
    b_.resize(static_cast<std::size_t>(m_));
    for (Eigen::Index l = 0; l < m_; ++l) {
      const auto len = static_cast<std::size_t>(m_ - l);
      auto& re = diag_re_[static_cast<std::size_t>(l)];
      auto& im = diag_im_[static_cast<std::size_t>(l)];
      re.resize(len);
      im.resize(len);
      const long double weight = l == 0 ? 1.0L : 2.0L;
      for (std::size_t i = 0; i < len; ++i) {
        const Complex v = rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i) + l);
        re[i] = weight * v.real();
        im[i] = weight * v.imag();
      }
      auto& a = a_[static_cast<std::size_t>(l)];
      auto& b = b_[static_cast<std::size_t>(l)];
      a.assign(len + 1, 0.0L);
      b.assign(len + 1, 0.0L);
      for (std::size_t k = 1; k <= len; ++k) {
        const long double lk = static_cast<long double>(l) + k;
        a[k] = std::sqrt((k - 1.0L) * (lk - 1.0L) / (lk * k));
        b[k] = 1.0L / std::sqrt(lk * k);
      }
    }
  }

  Real operator()(Complex beta) const
  {
    const long double ar = 2.0L * beta.real();
    const long double ai = 2.0L * beta.imag();
    const long double x = ar * ar + ai * ai;
    long double wr = 0.0L;
    long double wi = 0.0L;
    for (Eigen::Index l = m_ - 1; l >= 0; --l) {
      long double cr = 0.0L;
      long double ci = 0.0L;
      laguerre(static_cast<std::size_t>(l), x, cr, ci);
      const long double s = 1.0L / std::sqrt(static_cast<long double>(l + 1));
      const long double nr = cr + (wr * ar - wi * ai) * s;
      const long double ni = ci + (wr * ai + wi * ar) * s;
      wr = nr;
      wi = ni;
    }
    return static_cast<Real>(wr * std::exp(-0.5L * x) * (2.0L / static_cast<long double>(kPi)));
  }

private:
  void laguerre(std::size_t l, long double x, long double& out_r, long double& out_i) const
  {
    const auto& cr = diag_re_[l];
    const auto& ci = diag_im_[l];
    const auto& a = a_[l];
    const auto& b = b_[l];
    const std::size_t len = cr.size();
    long double y0r = cr[0], y0i = ci[0], y1r = 0.0L, y1i = 0.0L;
    if (len == 2) {
      y1r = cr[1];
      y1i = ci[1];
    } else if (len > 2) {
      std::size_t k = len;
      y0r = cr[len - 2];
      y0i = ci[len - 2];
      y1r = cr[len - 1];
      y1i = ci[len - 1];
      for (std::size_t i = 3; i <= len; ++i) {
        --k;
        const long double f = (static_cast<long double>(l) + 2.0L * k - 1.0L - x) * b[k];
        const long double t0r = cr[len - i] - y1r * a[k];
        const long double t0i = ci[len - i] - y1i * a[k];
        y1r = y0r - y1r * f;
        y1i = y0i - y1i * f;
        y0r = t0r;
        y0i = t0i;
      }
    }
    const long double f = (static_cast<long double>(l) + 1.0L - x) / std::sqrt(static_cast<long double>(l) + 1.0L);
    out_r = y0r - y1r * f;
    out_i = y0i - y1i * f;
  }

  Eigen::Index m_;
  std::vector<std::vector<long double>> diag_re_, diag_im_, a_, b_;
};

}  // namespace

Real wigner_at(const Matrix& rho, Complex beta)
{
  return WignerEvaluator(rho)(beta);
}

WignerGrid wigner(const DensityMatrix& rho_f, const WignerSpec& spec)
{
  const SpaceTag& tag = rho_f.tag();
  if (tag.atoms != 0 || !tag.has_field())
    throw std::invalid_argument("wigner: expected a single-mode field state");
  if (spec.points < 2 || !(spec.half_width > 0.0))
    throw std::invalid_argument("wigner: invalid grid");

  WignerGrid grid;
  grid.beta_re = Eigen::VectorXd::LinSpaced(spec.points, spec.center.real() - spec.half_width,
                                            spec.center.real() + spec.half_width);
  grid.beta_im = Eigen::VectorXd::LinSpaced(spec.points, spec.center.imag() - spec.half_width,
                                            spec.center.imag() + spec.half_width);

  // Interference between the farthest-separated components oscillates with
  // period pi / (2 sqrt<n>) in beta.
  const Matrix& rho = rho_f.matrix();
  Real mean_n = 0.0;
  for (Eigen::Index n = 0; n < rho.rows(); ++n)
    mean_n += Real(n) * rho(n, n).real();
  const Real step = grid.beta_re[1] - grid.beta_re[0];
  grid.coarse = mean_n > 0.0 && step > kPi / (2.0 * std::sqrt(mean_n));
  if (grid.coarse)
    std::cerr << "warning: Wigner grid step " << step << " is coarser than the fringe period\n";

  grid.values.resize(spec.points, spec.points);
  const WignerEvaluator eval(rho);
  parallel_for(static_cast<std::size_t>(spec.points), [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < spec.points; ++j)
      grid.values(r, j) = eval(Complex(grid.beta_re[r], grid.beta_im[j]));
  });
  return grid;
}

Real wigner_midline_ratio(const DensityMatrix& rho_f, Complex a, Complex b, int samples)
{
  if (samples < 2 || a == b)
    throw std::invalid_argument("wigner_midline_ratio: need two distinct lobes and >= 2 samples");
  const WignerEvaluator eval(rho_f.matrix());
  const Complex mid = 0.5 * (a + b);
  const Complex dir = kI * (b - a) / std::abs(b - a);
  const Real half = 0.5 * std::abs(b - a);
  Real edge = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Real s = -half + 2.0 * half * Real(k) / Real(samples - 1);
    edge = std::max(edge, std::abs(eval(mid + s * dir)));
  }
  return edge / std::max(eval(a), eval(b));
}

//------------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t& state)
{
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::mt19937_64 stream_rng(std::uint64_t master_seed, std::uint64_t index)
{
  std::uint64_t state = master_seed;
  const std::uint64_t a = splitmix64(state);
  state = a ^ (index * 0xD1B54A32D192ED03ull);
  const std::uint64_t b = splitmix64(state);
  const std::uint64_t c = splitmix64(state);
  std::seed_seq seq{static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
  return std::mt19937_64(seq);
}

AtomCoeffs haar_random_two_qubit(std::mt19937_64& rng)
{
  std::normal_distribution<Real> normal(0.0, 1.0);
  Matrix4 z;
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 4; ++r)
      z(r, c) = Complex(normal(rng), normal(rng)) / std::sqrt(2.0);
  Eigen::HouseholderQR<Matrix4> qr(z);
  const Matrix4 q = qr.householderQ();
  const Complex r00 = qr.matrixQR()(0, 0);
  const Complex phase = std::abs(r00) > 0.0 ? r00 / std::abs(r00) : Complex(1.0);
  Vector4 column = q.col(0) * phase;
  column.normalize();
  return AtomCoeffs::from_product_amplitudes(column);
}

EnsembleSample draw_sample(std::uint64_t master_seed, std::size_t index)
{
  auto rng = stream_rng(master_seed, index);
  EnsembleSample s;
  s.index = index;
  s.atoms = haar_random_two_qubit(rng);
  s.phi = std::uniform_real_distribution<Real>(0.0, 2.0 * kPi)(rng);
  return s;
}

EnsembleStats ensemble_average(const std::function<std::vector<Real>(const EnsembleSample&)>& task,
                               std::size_t n_samples, std::uint64_t master_seed)
{
  if (n_samples == 0)
    throw std::invalid_argument("ensemble_average: n_samples must be >= 1");
  std::vector<std::vector<Real>> results(n_samples);
  parallel_for(n_samples, [&](std::size_t k) { results[k] = task(draw_sample(master_seed, k)); });

  const std::size_t width = results.front().size();
  for (const auto& r : results)
    if (r.size() != width)
      throw std::runtime_error("ensemble_average: task returned vectors of different length");

  EnsembleStats s;
  s.mean.assign(width, 0.0);
  s.stderr_of_mean.assign(width, 0.0);
  s.count.assign(width, 0);
  for (std::size_t c = 0; c < width; ++c) {
    Real sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : results)
      if (std::isfinite(r[c])) {
        sum += r[c];
        ++n;
      }
    s.count[c] = n;
    if (n == 0) {
      s.mean[c] = s.stderr_of_mean[c] = std::numeric_limits<Real>::quiet_NaN();
      continue;
    }
    const Real mean = sum / Real(n);
    Real ss = 0.0;
    for (const auto& r : results)
      if (std::isfinite(r[c]))
        ss += (r[c] - mean) * (r[c] - mean);
    s.mean[c] = mean;
    s.stderr_of_mean[c] = n > 1 ? std::sqrt(ss / Real(n - 1) / Real(n)) : 0.0;
  }
  return s;
}

MeanStderr ensemble_average(const std::function<Real(const EnsembleSample&)>& task, std::size_t n_samples,
                            std::uint64_t master_seed)
{
  const auto s = ensemble_average(
      [&](const EnsembleSample& x) { return std::vector<Real>{task(x)}; }, n_samples, master_seed);
  return {s.mean[0], s.stderr_of_mean[0]};
}

}  // namespace dicke2p
