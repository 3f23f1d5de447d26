#include "dicke2p/protocols.hpp"

#include "dicke2p/analysis.hpp"
#include "dicke2p/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dicke2p {

namespace {

const Real kNaN = std::numeric_limits<Real>::quiet_NaN();

void require_sign(int s, const char* what)
{
  if (s != 1 && s != -1)
    throw std::invalid_argument(std::string(what) + ": sign must be +1 or -1");
}

Matrix4 projector(const Vector4& v)
{
  return v * v.adjoint();
}

Matrix4 ketbra(const Vector4& a, const Vector4& b)
{
  return a * b.adjoint();
}

Eigen::Matrix2cd sigma_phi(Real phi)
{
  Eigen::Matrix2cd s;
  s << 0.0, std::polar(1.0, -phi),
       std::polar(1.0, phi), 0.0;
  return s;
}

Eigen::Matrix2cd sigma_z()
{
  Eigen::Matrix2cd s;
  s << -1.0, 0.0,
       0.0, 1.0;
  return s;
}

}  // namespace

//------------------------------------------------------------------------------

GhzInput ghz_input(Real phi)
{
  GhzInput in;
  const Complex pre = std::polar(1.0 / std::sqrt(2.0), kPi / 4.0);
  in.single_atom << pre * std::polar(1.0, -phi), pre * -kI * std::polar(1.0, phi);
  in.product = kron(in.single_atom, in.single_atom);
  in.coeffs = AtomCoeffs::from_product_amplitudes(in.product);
  return in;
}

StateVector ghz_target(Complex alpha, const FockCutoff& cutoff, int coupling_sign)
{
  require_sign(coupling_sign, "ghz_target");
  const Real phi = std::arg(alpha);
  const Vector v = kron(bell_vector(BellKind::phi_minus, 2.0 * phi), coherent_state(alpha, cutoff).amplitudes()) -
                   Real(coupling_sign) *
                       kron(bell_vector(BellKind::phi_plus, 2.0 * phi), coherent_state(-alpha, cutoff).amplitudes());
  return StateVector::normalized(kI / std::sqrt(2.0) * v, SpaceTag::atoms_and_field(2, cutoff));
}

StateVector ghz_cat_form(Complex alpha, const FockCutoff& cutoff, int coupling_sign)
{
  require_sign(coupling_sign, "ghz_cat_form");
  const Vector4 gg = Vector4::Unit(0);
  const Vector4 ee = Vector4::Unit(3);
  const Vector cat_plus = cat_state(alpha, 1, cutoff).amplitudes();
  const Vector cat_minus = cat_state(alpha, -1, cutoff).amplitudes();
  const Vector v = coupling_sign > 0 ? Vector(kron(gg, cat_minus) + kron(ee, cat_plus))
                                     : Vector(kron(gg, cat_plus) + kron(ee, cat_minus));
  return StateVector::normalized(v / std::sqrt(2.0), SpaceTag::atoms_and_field(2, cutoff));
}

Real run_ghz(Complex alpha, const Evolver& evolver)
{
  const GhzInput in = ghz_input(std::arg(alpha));
  const Vector psi = evolver.evolve_product(in.product, alpha, evolver.half_revival_time());
  const int sign = evolver.coupling() > 0.0 ? 1 : -1;
  const StateVector target = ghz_target(alpha, evolver.cutoff(), sign);
  const Real overlap = std::norm(target.amplitudes().dot(psi));
  // Exact engines are unitary on the two-level space (or leak into the
  // intermediate level); approximate ones are compared after renormalization.
  switch (evolver.spec().engine) {
  case Engine::full:
  case Engine::effective:
    return overlap;
  case Engine::block:
  case Engine::analytic:
    return overlap / psi.squaredNorm();
  }
  return overlap;
}

//------------------------------------------------------------------------------

std::size_t OutcomeLabel::index() const
{
  return (d1 > 0 ? 0u : 2u) + (d2 > 0 ? 0u : 1u);
}

OutcomeLabel OutcomeLabel::from_index(std::size_t k)
{
  if (k > 3)
    throw std::out_of_range("OutcomeLabel::from_index");
  return {k < 2 ? 1 : -1, k % 2 == 0 ? 1 : -1};
}

std::string OutcomeLabel::str() const
{
  return std::string(d1 > 0 ? "+" : "-") + "," + (d2 > 0 ? "+" : "-");
}

Operator measurement_operator(Real phi, int sign)
{
  require_sign(sign, "measurement_operator");
  const Vector4 psi_m = bell_vector(BellKind::psi_minus);
  const Vector4 psi_p = bell_vector(BellKind::psi_plus);
  const Vector4 phi_m = bell_vector(BellKind::phi_minus, 2.0 * phi);
  const Vector4 phi_p = bell_vector(BellKind::phi_plus, 2.0 * phi);
  if (sign > 0)
    return Operator(projector(psi_m) + projector(phi_m), SpaceTag::two_qubits(), {true, false});
  return Operator(-kI * (ketbra(phi_p, psi_p) + ketbra(psi_p, phi_p)), SpaceTag::two_qubits());
}

Operator composed_measurement(Real phi, int s1, int s2)
{
  return measurement_operator(phi + kPi / 4.0, s2) * measurement_operator(phi, s1);
}

Operator correction_gate(const OutcomeLabel& o, Real phi)
{
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  if (o.d1 < 0 && o.d2 > 0)
    u = kI * sigma_phi(2.0 * phi);
  else if (o.d1 > 0 && o.d2 < 0)
    u = sigma_phi(2.0 * phi) * sigma_z();
  else if (o.d1 < 0 && o.d2 < 0)
    u = kI * sigma_z();
  return Operator(kron(u, Eigen::Matrix2cd::Identity()), SpaceTag::two_qubits(), {false, true});
}

BellKind bell_target(const OutcomeLabel& o)
{
  if (o.d1 > 0)
    return o.d2 > 0 ? BellKind::psi_minus : BellKind::phi_minus;
  return o.d2 > 0 ? BellKind::psi_plus : BellKind::phi_plus;
}

Vector4 bell_target_vector(const OutcomeLabel& o, Real phi)
{
  return bell_vector(bell_target(o), 2.0 * phi);
}

const char* bell_name(BellKind kind)
{
  switch (kind) {
  case BellKind::psi_plus:
    return "Psi+";
  case BellKind::psi_minus:
    return "Psi-";
  case BellKind::phi_plus:
    return "Phi+";
  case BellKind::phi_minus:
    return "Phi-";
  }
  return "?";
}

//------------------------------------------------------------------------------

namespace {

Matrix response_matrix(const Evolver& evolver, Complex beta, Real t)
{
  const Eigen::Index d = evolver.cutoff().dim();
  Matrix r(4 * d, 4);
  for (int j = 0; j < 4; ++j)
    r.col(j) = evolver.evolve_product(Vector4::Unit(j), beta, t);
  return r;
}

// k(a, b) = bra . r.block(a d, b) for every atom output a.
Matrix4 contract(const Eigen::RowVectorXcd& bra, const Matrix& r, Eigen::Index d)
{
  Matrix4 k;
  for (int a = 0; a < 4; ++a)
    k.row(a) = bra * r.middleRows(a * d, d);
  return k;
}

// Atomic Kraus operators <x_k, theta| R for every grid point x_k.
std::vector<Matrix4> quadrature_kraus(const Matrix& r, const Eigen::MatrixXd& h, Real theta)
{
  const Eigen::Index d = h.cols();
  Eigen::MatrixXcd bras(h.rows(), d);
  for (Eigen::Index n = 0; n < d; ++n)
    bras.col(n) = h.col(n).cast<Complex>() * std::polar(1.0, -Real(n) * theta);
  std::vector<Matrix4> out(static_cast<std::size_t>(h.rows()));
  for (int a = 0; a < 4; ++a) {
    const Matrix block = bras * r.middleRows(a * d, d);
    for (Eigen::Index k = 0; k < h.rows(); ++k)
      out[static_cast<std::size_t>(k)].row(a) = block.row(k);
  }
  return out;
}

// POVM density of the recorded value: step * sum_x G(y - x) K(x)^dag K(x).
std::vector<Matrix4> record_effects(const std::vector<Matrix4>& kraus, const Eigen::VectorXd& x, Real step,
                                    Real variance)
{
  const std::size_t n = kraus.size();
  std::vector<Matrix4> ideal(n);
  for (std::size_t k = 0; k < n; ++k)
    ideal[k] = step * kraus[k].adjoint() * kraus[k];
  if (variance <= 0.0)
    return ideal;
  // the grid is uniform, so the Gaussian kernel depends only on |i - k|
  const Real norm = step / std::sqrt(2.0 * kPi * variance);
  std::vector<Real> kernel;
  for (std::size_t m = 0; m < n; ++m) {
    const Real d = x[static_cast<Eigen::Index>(m)] - x[0];
    const Real w = norm * std::exp(-0.5 * d * d / variance);
    if (!(w > 1e-300))
      break;
    kernel.push_back(w);
  }
  std::vector<Matrix4> smeared(n, Matrix4::Zero());
  parallel_for(n, [&](std::size_t i) {
    const std::size_t reach = kernel.size() - 1;
    const std::size_t lo = i > reach ? i - reach : 0;
    const std::size_t hi = std::min(n - 1, i + reach);
    for (std::size_t k = lo; k <= hi; ++k)
      smeared[i] += kernel[i > k ? i - k : k - i] * ideal[k];
  });
  return smeared;
}

}  // namespace

BellMeasurement::BellMeasurement(const Evolver& evolver, Complex alpha)
    : BellMeasurement(evolver, alpha, evolver.half_revival_time(), evolver.half_revival_time())
{
}

BellMeasurement::BellMeasurement(const Evolver& evolver, Complex alpha, Real t1, Real t2)
    : alpha_(alpha),
      beta_(std::polar(1.0, kPi / 4.0) * alpha),
      phi_(std::arg(alpha)),
      dim_(evolver.cutoff().dim()),
      r1_(response_matrix(evolver, alpha_, t1)),
      r2_(response_matrix(evolver, beta_, t2))
{
}

Matrix4 BellMeasurement::kraus(int cavity, int sign) const
{
  require_sign(sign, "BellMeasurement::kraus");
  const FockCutoff cutoff(dim_ - 1);
  const Eigen::RowVectorXcd bra = coherent_state(Real(sign) * amplitude(cavity), cutoff).amplitudes().adjoint();
  return contract(bra, response(cavity), dim_);
}

ProtocolResult BellMeasurement::finish(const OutcomeLabel& o, Real probability, const Matrix4& rho_raw) const
{
  ProtocolResult r;
  r.outcome = o;
  r.probability = probability;
  r.target = bell_target(o);
  const Real tr = rho_raw.trace().real();
  if (!(probability >= kUndefinedProbability) || !(tr > 0.0)) {
    r.fidelity = kNaN;
    return r;
  }
  const Matrix u = correction_gate(o, phi_).matrix();
  Matrix4 rho = u * (rho_raw / tr) * u.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  r.post_state = rho;
  const Vector4 b = bell_target_vector(o, phi_);
  r.fidelity = b.dot(rho * b).real();
  return r;
}

BellReport BellMeasurement::ideal(const AtomCoeffs& c) const
{
  const Vector4 psi = c.product_amplitudes();
  std::array<Vector4, 4> v;
  Real mass = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const OutcomeLabel o = OutcomeLabel::from_index(k);
    v[k] = kraus(2, o.d2) * (kraus(1, o.d1) * psi);
    mass += v[k].squaredNorm();
  }
  BellReport report;
  report.detection_mass = mass;
  for (std::size_t k = 0; k < 4; ++k)
    report.outcomes[k] = finish(OutcomeLabel::from_index(k), v[k].squaredNorm() / mass, projector(v[k]));
  return report;
}

BellReport BellMeasurement::homodyne(const AtomCoeffs& c, const HomodyneConfig& cfg) const
{
  cfg.validate();
  const Vector4 psi = c.product_amplitudes();
  const Eigen::VectorXd x = quadrature_grid(dim_, cfg);
  const Eigen::MatrixXd h = quadrature_wavefunctions(x, dim_);
  const Real variance = homodyne_noise_variance(cfg.efficiency);

  const auto k1 = quadrature_kraus(r1_, h, cfg.lo_phase);
  const auto k2 = quadrature_kraus(r2_, h, cfg.lo_phase + kPi / 4.0);
  const auto e1 = record_effects(k1, x, cfg.step, variance);
  const auto e2 = record_effects(k2, x, cfg.step, variance);

  // Sum over records y1 (cavity 1) and y2 (cavity 2) of
  // p(y1) p(y2 | y1) |post><post|, split by the signs of y1, y2.
  const std::size_t n = k1.size();
  std::vector<std::array<Matrix4, 4>> partial(n);
  std::vector<std::array<Real, 4>> partial_p(n);
  parallel_for(n, [&](std::size_t i) {
    partial[i].fill(Matrix4::Zero());
    partial_p[i].fill(0.0);
    const Real p1 = psi.dot(e1[i] * psi).real();
    Vector4 a1 = k1[i] * psi;
    const Real n1 = a1.squaredNorm();
    if (!(p1 > 1e-300) || !(n1 > 1e-300))
      return;
    a1 /= std::sqrt(n1);
    const int d1 = x[static_cast<Eigen::Index>(i)] > 0.0 ? 1 : -1;
    for (std::size_t j = 0; j < n; ++j) {
      const Real p2 = a1.dot(e2[j] * a1).real();
      const Vector4 v = k2[j] * a1;
      const Real nv = v.squaredNorm();
      if (!(p2 > 1e-300) || !(nv > 1e-300))
        continue;
      const int d2 = x[static_cast<Eigen::Index>(j)] > 0.0 ? 1 : -1;
      const std::size_t o = OutcomeLabel{d1, d2}.index();
      partial[i][o] += (p1 * p2 / nv) * projector(v);
      partial_p[i][o] += p1 * p2;
    }
  });

  std::array<Matrix4, 4> rho;
  rho.fill(Matrix4::Zero());
  std::array<Real, 4> p{};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t o = 0; o < 4; ++o) {
      rho[o] += partial[i][o];
      p[o] += partial_p[i][o];
    }
  const Real mass = p[0] + p[1] + p[2] + p[3];
  BellReport report;
  report.detection_mass = mass;
  for (std::size_t o = 0; o < 4; ++o)
    report.outcomes[o] = finish(OutcomeLabel::from_index(o), p[o] / mass, rho[o]);
  return report;
}

namespace {

int draw_sign(Real w_plus, Real w_minus, std::mt19937_64& rng)
{
  const Real total = w_plus + w_minus;
  if (!(total > 0.0))
    throw std::runtime_error("Bell protocol: both detector outcomes have zero weight");
  return std::uniform_real_distribution<Real>(0.0, total)(rng) < w_plus ? 1 : -1;
}

}  // namespace

ProtocolResult BellMeasurement::sample_ideal(const AtomCoeffs& c, std::mt19937_64& rng) const
{
  const Vector4 psi = c.product_amplitudes();
  const Vector4 plus1 = kraus(1, 1) * psi;
  const Vector4 minus1 = kraus(1, -1) * psi;
  const Real wp1 = plus1.squaredNorm();
  const Real wm1 = minus1.squaredNorm();
  const int d1 = draw_sign(wp1, wm1, rng);
  const Vector4 a1 = (d1 > 0 ? plus1 : minus1).normalized();

  const Vector4 plus2 = kraus(2, 1) * a1;
  const Vector4 minus2 = kraus(2, -1) * a1;
  const Real wp2 = plus2.squaredNorm();
  const Real wm2 = minus2.squaredNorm();
  const int d2 = draw_sign(wp2, wm2, rng);

  const Real p = (d1 > 0 ? wp1 : wm1) / (wp1 + wm1) * (d2 > 0 ? wp2 : wm2) / (wp2 + wm2);
  return finish({d1, d2}, p, projector(d2 > 0 ? plus2 : minus2));
}

ProtocolResult BellMeasurement::sample_homodyne(const AtomCoeffs& c, const HomodyneConfig& cfg,
                                                std::mt19937_64& rng) const
{
  const Vector joint1 = r1_ * c.product_amplitudes();
  const HomodyneRecord rec1 = homodyne_measure(joint1, dim_, cfg, rng);
  HomodyneConfig cfg2 = cfg;
  cfg2.lo_phase += kPi / 4.0;
  const Vector joint2 = r2_ * rec1.atoms;
  const HomodyneRecord rec2 = homodyne_measure(joint2, dim_, cfg2, rng);
  // A single record carries no outcome probability.
  ProtocolResult r = finish({rec1.sign, rec2.sign}, 1.0, projector(rec2.atoms));
  r.probability = kNaN;
  return r;
}

ProtocolResult run_bell_protocol(const AtomCoeffs& c, Complex alpha, const Evolver& evolver, Detection detection,
                                 const HomodyneConfig& cfg, std::uint64_t seed)
{
  const BellMeasurement m(evolver, alpha);
  auto rng = stream_rng(seed, 0);
  return detection == Detection::ideal ? m.sample_ideal(c, rng) : m.sample_homodyne(c, cfg, rng);
}

TimingCurve timing_sensitivity(const AtomCoeffs& c, Complex alpha, const Evolver& evolver,
                               const std::vector<Real>& times)
{
  TimingCurve curve;
  curve.times = times;
  for (auto& f : curve.fidelity)
    f.assign(times.size(), kNaN);
  for (auto& p : curve.probability)
    p.assign(times.size(), 0.0);
  parallel_for(times.size(), [&](std::size_t k) {
    const BellReport r = BellMeasurement(evolver, alpha, times[k], times[k]).ideal(c);
    for (std::size_t o = 0; o < 4; ++o) {
      curve.fidelity[o][k] = r.outcomes[o].fidelity;
      curve.probability[o][k] = r.outcomes[o].probability;
    }
  });
  return curve;
}

Real oscillation_frequency(const std::vector<Real>& t, const std::vector<Real>& f)
{
  if (t.size() != f.size())
    throw std::invalid_argument("oscillation_frequency: size mismatch");
  if (f.size() < 3)
    return kNaN;
  Real mean = 0.0;
  for (Real v : f)
    mean += v;
  mean /= Real(f.size());
  std::vector<Real> crossings;
  for (std::size_t k = 1; k < f.size(); ++k) {
    const Real a = f[k - 1] - mean;
    const Real b = f[k] - mean;
    if ((a < 0.0) != (b < 0.0))
      crossings.push_back(t[k - 1] + (t[k] - t[k - 1]) * a / (a - b));
  }
  if (crossings.size() < 2)
    return kNaN;
  return kPi * Real(crossings.size() - 1) / (crossings.back() - crossings.front());
}

}  // namespace dicke2p
