#include "dicke2p/homodyne.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace dicke2p {

Eigen::MatrixXd quadrature_wavefunctions(const Eigen::VectorXd& x, int dim)
{
  if (dim < 1)
    throw std::invalid_argument("quadrature_wavefunctions: dim must be >= 1");
  Eigen::MatrixXd h(x.size(), dim);
  const Real norm0 = std::pow(2.0, 0.25) * std::pow(kPi, -0.25);
  std::vector<Real> up(static_cast<std::size_t>(dim)), down(static_cast<std::size_t>(dim));
  for (int n = 1; n < dim; ++n) {
    up[static_cast<std::size_t>(n)] = std::sqrt(2.0 / n);
    down[static_cast<std::size_t>(n)] = std::sqrt((n - 1.0) / n);
  }
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const Real q = std::sqrt(2.0) * x[k];
    // psi_n = s * exp(log_scale); the scale absorbs exp(-q^2/2) and any growth.
    Real log_scale = -0.5 * q * q;
    Real scale = norm0 * std::exp(log_scale);
    Real prev = 0.0;
    Real cur = 1.0;
    h(k, 0) = scale;
    for (int n = 1; n < dim; ++n) {
      const auto i = static_cast<std::size_t>(n);
      const Real next = up[i] * q * cur - down[i] * prev;
      prev = cur;
      cur = next;
      if (std::abs(cur) > 1e100) {
        cur *= 1e-100;
        prev *= 1e-100;
        log_scale += 100.0 * std::log(10.0);
        scale = norm0 * std::exp(log_scale);
      }
      h(k, n) = cur * scale;
    }
  }
  return h;
}

Eigen::RowVectorXcd quadrature_bra(Real x, Real theta, int dim)
{
  const Eigen::MatrixXd h = quadrature_wavefunctions(Eigen::VectorXd::Constant(1, x), dim);
  Eigen::RowVectorXcd bra(dim);
  for (int n = 0; n < dim; ++n)
    bra[n] = std::polar(h(0, n), -n * theta);
  return bra;
}

Real quadrature_overlap(Real x, Real alpha_abs, int sign)
{
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("quadrature_overlap: sign must be +1 or -1");
  const Real d = x - sign * alpha_abs;
  return std::pow(2.0 / kPi, 0.25) * std::exp(-d * d);
}

Real homodyne_noise_variance(Real efficiency)
{
  if (!(efficiency > 0.0) || efficiency > 1.0)
    throw std::invalid_argument("homodyne: efficiency must lie in (0, 1]");
  return (1.0 - efficiency) / (4.0 * efficiency);
}

Real efficiency_threshold(Real alpha_abs)
{
  if (!(alpha_abs > 0.0))
    throw std::invalid_argument("efficiency_threshold: |alpha| must be positive");
  return 4.0 / (alpha_abs * alpha_abs);
}

void HomodyneConfig::validate() const
{
  homodyne_noise_variance(efficiency);
  if (!(step > 0.0) || !(padding >= 0.0))
    throw std::invalid_argument("HomodyneConfig: invalid grid settings");
}

Eigen::VectorXd quadrature_grid(int dim, const HomodyneConfig& cfg)
{
  cfg.validate();
  const Real sigma = std::sqrt(homodyne_noise_variance(cfg.efficiency));
  const Real half = std::sqrt(dim + 0.5) + 0.5 * cfg.padding + 6.0 * sigma;
  const auto cells = static_cast<Eigen::Index>(std::ceil(half / cfg.step));
  Eigen::VectorXd x(2 * cells);
  for (Eigen::Index k = 0; k < 2 * cells; ++k)
    x[k] = -Real(cells) * cfg.step + (Real(k) + 0.5) * cfg.step;
  return x;
}

namespace {

// Repeated single-shot measurements reuse the same grid; keep the last table.
std::shared_ptr<const Eigen::MatrixXd> cached_wavefunctions(const Eigen::VectorXd& x, int dim)
{
  static std::mutex mutex;
  static Eigen::VectorXd key;
  static std::shared_ptr<const Eigen::MatrixXd> table;
  std::lock_guard lock(mutex);
  if (!table || table->cols() != dim || key.size() != x.size() || key != x) {
    table = std::make_shared<const Eigen::MatrixXd>(quadrature_wavefunctions(x, dim));
    key = x;
  }
  return table;
}

}  // namespace

HomodyneSampler::HomodyneSampler(const Vector& joint, int fock_dim, const HomodyneConfig& cfg) : cfg_(cfg)
{
  cfg.validate();
  if (joint.size() != 4 * fock_dim)
    throw std::invalid_argument("homodyne_measure: expected two-qubit (x) field amplitudes");

  x_ = quadrature_grid(fock_dim, cfg);
  const auto h = cached_wavefunctions(x_, fock_dim);

  // amp(k, a) = <x_k, theta| psi_a> = sum_n h(k, n) e^{-i n theta} psi_a(n)
  fields_ = Eigen::Map<const Matrix>(joint.data(), fock_dim, 4);
  Matrix rotated = fields_;
  for (int n = 0; n < fock_dim; ++n)
    rotated.row(n) *= std::polar(1.0, -n * cfg.lo_phase);
  const Eigen::MatrixXd re = *h * rotated.real();
  const Eigen::MatrixXd im = *h * rotated.imag();
  const Eigen::VectorXd density = re.rowwise().squaredNorm() + im.rowwise().squaredNorm();

  cdf_.resize(static_cast<std::size_t>(x_.size()));
  Real acc = 0.0;
  for (Eigen::Index k = 0; k < x_.size(); ++k)
    cdf_[static_cast<std::size_t>(k)] = acc += density[k];
  if (!(acc > 0.0))
    throw std::runtime_error("homodyne_measure: state has no weight on the quadrature grid");
}

HomodyneRecord HomodyneSampler::draw(std::mt19937_64& rng) const
{
  const auto dim = static_cast<int>(fields_.rows());
  std::uniform_real_distribution<Real> uniform(0.0, 1.0);
  std::normal_distribution<Real> noise(0.0, std::sqrt(homodyne_noise_variance(cfg_.efficiency)));
  for (int attempt = 0; attempt < 64; ++attempt) {
    const Real u = uniform(rng) * cdf_.back();
    const auto k =
        std::min<std::size_t>(std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin(), cdf_.size() - 1);
    Real value = x_[static_cast<Eigen::Index>(k)] + (uniform(rng) - 0.5) * cfg_.step;
    if (cfg_.efficiency < 1.0)
      value += noise(rng);

    const Eigen::RowVectorXcd bra = quadrature_bra(value, cfg_.lo_phase, dim);
    Vector4 atoms = (bra * fields_).transpose();
    const Real norm = atoms.norm();
    if (!(norm > 1e-150))
      continue;  // record in a numerically empty tail; draw again
    HomodyneRecord r;
    r.x = value;
    r.sign = value > 0.0 ? 1 : -1;
    r.atoms = atoms / norm;
    return r;
  }
  throw std::runtime_error("homodyne_measure: repeated zero-probability records");
}

HomodyneRecord homodyne_measure(const Vector& joint, int fock_dim, const HomodyneConfig& cfg, std::mt19937_64& rng)
{
  return HomodyneSampler(joint, fock_dim, cfg).draw(rng);
}

}  // namespace dicke2p
