#include "dicke2p/commands.hpp"

#include "dicke2p/analysis.hpp"
#include "dicke2p/parallel.hpp"
#include "dicke2p/protocols.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#ifndef DICKE2P_VERSION
#define DICKE2P_VERSION "0.0.0"
#endif

namespace dicke2p {

namespace {

using nlohmann::json;

std::string cell(Real x)
{
  return std::isfinite(x) ? format_real(x) : std::string("nan");
}

std::string cell(std::size_t x)
{
  return std::to_string(x);
}

json number_or_null(Real x)
{
  return std::isfinite(x) ? json(x) : json(nullptr);
}

Complex amplitude(Real nbar, Real phi)
{
  return std::polar(std::sqrt(nbar), phi);
}

ModelSpec model_spec(const RunConfig& c)
{
  ModelSpec s;
  s.engine = c.engine;
  s.g = c.g;
  s.g_g = c.gg;
  s.g_e = c.ge;
  s.delta = c.delta;
  return s;
}

std::string outcome_tag(const OutcomeLabel& o)
{
  return std::string(o.d1 > 0 ? "p" : "m") + (o.d2 > 0 ? "p" : "m");
}

const char* gate_name(const OutcomeLabel& o)
{
  if (o.d1 > 0)
    return o.d2 > 0 ? "1" : "sigma_2phi sigma_z";
  return o.d2 > 0 ? "i sigma_2phi" : "i sigma_z";
}

Real excitations(const Vector& v, Eigen::Index d)
{
  // <S_ee> over the product basis gg, ge, eg, ee
  return v.segment(d, d).squaredNorm() + v.segment(2 * d, d).squaredNorm() + 2.0 * v.segment(3 * d, d).squaredNorm();
}

bool nondecreasing(const std::vector<Real>& v)
{
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] < v[k - 1])
      return false;
  return true;
}

//------------------------------------------------------------------------------

CommandResult fidelity_scan(const RunConfig& c)
{
  constexpr int steps = 100;  // gt/pi in [0, 1] with step 0.01
  constexpr int half = steps / 2;
  CommandResult r;
  Table t{"", {"nbar", "quantity", "gt_over_pi", "mean_F", "stderr", "count"}, {}};
  const Real g = effective_coupling(c.gg, c.ge, c.delta);
  std::vector<Real> fw_half;
  json per_nbar = json::array();

  for (Real nbar : c.nbar) {
    const FockCutoff cutoff = FockCutoff::for_mean_photon_number(nbar);
    FullModelParams p;
    p.delta = c.delta;
    p.g_g = c.gg;
    p.g_e = c.ge;
    p.cutoff = cutoff;
    const ValidityReport v = validity_report(p, nbar);
    if (!v.stark_closeness_ok)
      r.warnings.push_back("nbar=" + cell(nbar) + ": |g_e^2 - g_g^2| is not small against g_e^3/delta");
    if (!v.revival_reachable_ok)
      r.warnings.push_back("nbar=" + cell(nbar) + ": g_e nbar pi is not small against delta; the adiabatic " +
                           "elimination holds only up to t = " + cell(v.time_horizon));

    ModelSpec full = model_spec(c);
    full.engine = Engine::full;
    ModelSpec eff;
    eff.engine = Engine::effective;
    eff.g = g;
    ModelSpec ana = eff;
    ana.engine = Engine::analytic;
    const Evolver ev_full(full, cutoff);
    const Evolver ev_eff(eff, cutoff);
    const Evolver ev_ana(ana, cutoff);
    const Real tr = revival_time(g);

    const auto task = [&](const EnsembleSample& s) {
      const Complex alpha = amplitude(nbar, c.phi.value_or(s.phi));
      const Vector4 psi = s.atoms.product_amplitudes();
      std::vector<Real> out(2 * (steps + 1));
      for (int k = 0; k <= steps; ++k) {
        const Real time = tr * Real(k) / steps;
        const Vector a = ev_full.evolve_product(psi, alpha, time);
        const Vector b = ev_eff.evolve_product(psi, alpha, time);
        const Vector e = ev_ana.evolve_product(psi, alpha, time);
        out[static_cast<std::size_t>(k)] = std::norm(b.dot(a)) / b.squaredNorm();
        out[static_cast<std::size_t>(steps + 1 + k)] = std::norm(e.dot(a)) / e.squaredNorm();
      }
      return out;
    };
    const EnsembleStats st = ensemble_average(task, c.ensemble, c.seed);

    Real min_f = std::numeric_limits<Real>::infinity();
    for (int q = 0; q < 2; ++q)
      for (int k = 0; k <= steps; ++k) {
        const auto i = static_cast<std::size_t>(q * (steps + 1) + k);
        t.rows.push_back({cell(nbar), q == 0 ? "F_W" : "F", cell(Real(k) / steps), cell(st.mean[i]),
                          cell(st.stderr_of_mean[i]), cell(st.count[i])});
        if (q == 1)
          min_f = std::min(min_f, st.mean[i]);
      }
    fw_half.push_back(st.mean[half]);
    per_nbar.push_back({{"nbar", nbar},
                        {"mean_F_W_at_half", number_or_null(st.mean[half])},
                        {"stderr_F_W_at_half", number_or_null(st.stderr_of_mean[half])},
                        {"min_mean_F", number_or_null(min_f)}});
  }
  r.summary["per_nbar"] = per_nbar;
  r.summary["F_W_nondecreasing_in_nbar_at_half"] = nondecreasing(fw_half);
  r.summary["effective_coupling"] = g;
  r.tables.push_back(std::move(t));
  return r;
}

CommandResult rabi(const RunConfig& c)
{
  constexpr int per_pi = 200;  // step 0.005 in gt/pi
  constexpr int steps = 300;   // window gt/pi in [0, 1.5]
  const Real nbar = c.nbar.front();
  const FockCutoff cutoff = FockCutoff::for_mean_photon_number(nbar);
  const Evolver ev(model_spec(c), cutoff);
  const Real g = ev.coupling();
  const Complex alpha = amplitude(nbar, c.phi.value_or(0.0));
  const Eigen::Index d = cutoff.dim();

  std::vector<Real> numeric(steps + 1);
  std::vector<Real> analytic(steps + 1);
  parallel_for(steps + 1, [&](std::size_t k) {
    const Real time = revival_time(g) * Real(k) / per_pi;
    numeric[k] = excitations(ev.evolve_product(Vector4::Unit(3), alpha, time), d);
    analytic[k] = rabi_see_analytic(alpha, g, time);
  });

  CommandResult r;
  Table t{"", {"gt_over_pi", "see_numeric", "see_analytic"}, {}};
  Real ss = 0.0;
  for (int k = 0; k <= steps; ++k) {
    const auto i = static_cast<std::size_t>(k);
    t.rows.push_back({cell(Real(k) / per_pi), cell(numeric[i]), cell(analytic[i])});
    if (k <= per_pi)
      ss += std::pow(numeric[i] - analytic[i], 2);
  }
  r.summary["rms_numeric_minus_analytic_0_to_pi"] = std::sqrt(ss / (per_pi + 1));
  r.summary["see_at_revival"] = numeric[per_pi];
  r.summary["see_at_zero"] = numeric[0];
  if (nbar < 10.0 && c.engine == Engine::analytic)
    r.warnings.push_back("coherent-state form used with nbar < 10");
  r.tables.push_back(std::move(t));
  return r;
}

CommandResult wigner_cmd(const RunConfig& c)
{
  const Real nbar = c.nbar.front();
  const FockCutoff cutoff = FockCutoff::for_mean_photon_number(nbar);
  const Evolver ev(model_spec(c), cutoff);
  const Complex alpha = amplitude(nbar, c.phi.value_or(0.0));
  const Real tr = revival_time(ev.coupling());
  const std::array<std::pair<const char*, Real>, 3> panels{{{"t0", 0.0}, {"tr4", tr / 4.0}, {"tr2", tr / 2.0}}};

  CommandResult r;
  for (const auto& [name, time] : panels) {
    const StateVector psi =
        StateVector::normalized(ev.evolve_product(Vector4::Unit(3), alpha, time), SpaceTag::atoms_and_field(2, cutoff));
    const DensityMatrix rho_f = partial_trace(psi, Keep::field);
    const WignerGrid grid = wigner(rho_f, WignerSpec::around(alpha));
    if (grid.coarse)
      r.warnings.push_back(std::string("panel ") + name + ": grid step is coarser than the fringe period");
    Table t{name, {"beta_re", "beta_im", "W"}, {}};
    for (Eigen::Index i = 0; i < grid.beta_re.size(); ++i)
      for (Eigen::Index j = 0; j < grid.beta_im.size(); ++j)
        t.rows.push_back({cell(grid.beta_re[i]), cell(grid.beta_im[j]), cell(grid.values(i, j))});
    r.summary[name] = {{"time", time},
                       {"integral", grid.integral()},
                       {"min", grid.values.minCoeff()},
                       {"max", grid.values.maxCoeff()},
                       {"midline_ratio_alpha_minus_alpha", wigner_midline_ratio(rho_f, alpha, -alpha)}};
    r.tables.push_back(std::move(t));
  }
  return r;
}

CommandResult ghz(const RunConfig& c)
{
  CommandResult r;
  Table t{"", {"nbar", "F_GHZ"}, {}};
  std::vector<Real> f;
  for (Real nbar : c.nbar) {
    const Evolver ev(model_spec(c), FockCutoff::for_mean_photon_number(nbar));
    f.push_back(run_ghz(amplitude(nbar, c.phi.value_or(kPi / 4.0)), ev));
    t.rows.push_back({cell(nbar), cell(f.back())});
  }
  r.summary["nondecreasing_in_nbar"] = nondecreasing(f);
  r.summary["F_GHZ_at_largest_nbar"] = f.back();
  r.tables.push_back(std::move(t));
  return r;
}

CommandResult bell(const RunConfig& c)
{
  CommandResult r;
  Table t{"",
          {"nbar", "outcome", "bell_state", "gate", "mean_F", "stderr", "count", "outcome_rate", "rate_stderr",
           "detection_mass"},
          {}};
  json per_nbar = json::array();
  for (Real nbar : c.nbar) {
    const FockCutoff cutoff = FockCutoff::for_mean_photon_number(nbar);
    const Evolver ev(model_spec(c), cutoff);
    if (c.efficiency && *c.efficiency < efficiency_threshold(std::sqrt(nbar)))
      r.warnings.push_back("nbar=" + cell(nbar) + ": efficiency " + cell(*c.efficiency) +
                           " is below 4/|alpha|^2 = " + cell(efficiency_threshold(std::sqrt(nbar))) +
                           "; the detector cannot separate |alpha> from |-alpha>");

    const auto task = [&](const EnsembleSample& s) {
      const Real phi = c.phi.value_or(s.phi);
      const BellMeasurement m(ev, amplitude(nbar, phi));
      BellReport rep;
      if (c.efficiency) {
        HomodyneConfig h;
        h.lo_phase = phi + c.lo_phase;
        h.efficiency = *c.efficiency;
        rep = m.homodyne(s.atoms, h);
      } else {
        rep = m.ideal(s.atoms);
      }
      std::vector<Real> out(9);
      for (std::size_t o = 0; o < 4; ++o) {
        out[o] = rep.outcomes[o].fidelity;
        out[4 + o] = rep.outcomes[o].probability;
      }
      out[8] = rep.detection_mass;
      return out;
    };
    const EnsembleStats st = ensemble_average(task, c.ensemble, c.seed);
    Real min_f = std::numeric_limits<Real>::infinity();
    for (std::size_t o = 0; o < 4; ++o) {
      const OutcomeLabel label = OutcomeLabel::from_index(o);
      t.rows.push_back({cell(nbar), outcome_tag(label), bell_name(bell_target(label)), gate_name(label),
                        cell(st.mean[o]), cell(st.stderr_of_mean[o]), cell(st.count[o]), cell(st.mean[4 + o]),
                        cell(st.stderr_of_mean[4 + o]), cell(st.mean[8])});
      min_f = std::min(min_f, st.mean[o]);
    }
    per_nbar.push_back({{"nbar", nbar}, {"min_mean_F", number_or_null(min_f)}, {"detection_mass", st.mean[8]}});
  }
  r.summary["per_nbar"] = per_nbar;
  r.summary["detection"] = c.efficiency ? "homodyne" : "ideal";
  r.tables.push_back(std::move(t));
  return r;
}

CommandResult bell_timing(const RunConfig& c)
{
  constexpr int steps = 200;  // eps = gt - pi/2 in [-0.1, 0.1]
  constexpr Real span = 0.1;
  const Real nbar = c.nbar.front();
  const FockCutoff cutoff = FockCutoff::for_mean_photon_number(nbar);
  const Evolver ev(model_spec(c), cutoff);
  const Real g = ev.coupling();
  const Complex alpha = amplitude(nbar, c.phi.value_or(0.0));

  std::vector<Real> eps(steps + 1);
  std::vector<Real> times(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    eps[static_cast<std::size_t>(k)] = -span + 2.0 * span * Real(k) / steps;
    times[static_cast<std::size_t>(k)] = (0.5 * kPi + eps[static_cast<std::size_t>(k)]) / std::abs(g);
  }
  std::vector<BellMeasurement> setups;
  setups.reserve(times.size());
  for (Real time : times)
    setups.emplace_back(ev, alpha, time, time);

  const std::size_t n = times.size();
  const auto task = [&](const EnsembleSample& s) {
    std::vector<Real> out(4 * n);
    for (std::size_t k = 0; k < n; ++k) {
      const BellReport rep = setups[k].ideal(s.atoms);
      for (std::size_t o = 0; o < 4; ++o)
        out[o * n + k] = rep.outcomes[o].fidelity;
    }
    return out;
  };
  const EnsembleStats st = ensemble_average(task, c.ensemble, c.seed);

  AtomCoeffs psi_minus;
  psi_minus.c_g = 0.0;
  psi_minus.c_minus = 1.0;
  std::vector<Real> flat(n);
  for (std::size_t k = 0; k < n; ++k)
    flat[k] = setups[k].ideal(psi_minus).outcomes[0].fidelity;

  CommandResult r;
  Table t{"", {"gt", "eps"}, {}};
  for (std::size_t o = 0; o < 4; ++o) {
    const std::string tag = outcome_tag(OutcomeLabel::from_index(o));
    t.columns.push_back("F_" + tag);
    t.columns.push_back("stderr_" + tag);
  }
  t.columns.push_back("F_psi_minus_input");
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<std::string> row{cell(0.5 * kPi + eps[k]), cell(eps[k])};
    for (std::size_t o = 0; o < 4; ++o) {
      row.push_back(cell(st.mean[o * n + k]));
      row.push_back(cell(st.stderr_of_mean[o * n + k]));
    }
    row.push_back(cell(flat[k]));
    t.rows.push_back(std::move(row));
  }

  json outcomes = json::object();
  for (std::size_t o = 0; o < 4; ++o) {
    const OutcomeLabel label = OutcomeLabel::from_index(o);
    const std::vector<Real> curve(st.mean.begin() + std::ptrdiff_t(o * n), st.mean.begin() + std::ptrdiff_t((o + 1) * n));
    outcomes[outcome_tag(label)] = {{"bell_state", bell_name(bell_target(label))},
                                    {"min_F", *std::min_element(curve.begin(), curve.end())},
                                    {"angular_frequency_in_gt", number_or_null(oscillation_frequency(eps, curve))}};
  }
  r.summary["outcomes"] = outcomes;
  r.summary["psi_minus_input_min_F"] = *std::min_element(flat.begin(), flat.end());
  r.summary["reference_g_nbar_plus_1"] = nbar + 1.0;
  r.tables.push_back(std::move(t));
  return r;
}

void write_csv(const std::string& path, const Table& t, const std::vector<std::string>& header)
{
  std::ofstream os(path);
  if (!os)
    throw std::runtime_error("cannot write '" + path + "'");
  for (const auto& line : header)
    os << "# " << line << '\n';
  for (std::size_t k = 0; k < t.columns.size(); ++k)
    os << (k ? "," : "") << t.columns[k];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k)
      os << (k ? "," : "") << row[k];
    os << '\n';
  }
}

json cell_json(const std::string& s)
{
  if (s == "nan")
    return nullptr;
  double x = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (ec == std::errc() && ptr == end)
    return x;
  return s;
}

}  // namespace

//------------------------------------------------------------------------------

const char* version_string()
{
  return DICKE2P_VERSION;
}

CommandResult run_command(const RunConfig& cfg)
{
  validate(cfg);
  if (cfg.command == "fidelity-scan")
    return fidelity_scan(cfg);
  if (cfg.command == "rabi")
    return rabi(cfg);
  if (cfg.command == "wigner")
    return wigner_cmd(cfg);
  if (cfg.command == "ghz")
    return ghz(cfg);
  if (cfg.command == "bell")
    return bell(cfg);
  return bell_timing(cfg);
}

std::string panel_path(const std::string& out, const std::string& name)
{
  if (name.empty())
    return out;
  const std::filesystem::path p(out);
  return (p.parent_path() / (p.stem().string() + "_" + name + p.extension().string())).string();
}

json metadata(const RunConfig& cfg, const CommandResult& result, double wall_seconds,
              const std::vector<std::string>& files)
{
  json params = json::object();
  for (const auto& [k, v] : parse_key_values(emit(cfg)))
    params[k] = v;
  json columns = json::object();
  for (const auto& t : result.tables)
    columns[t.name.empty() ? "main" : t.name] = t.columns;
  return {{"tool", "dicke2p"},
          {"version", version_string()},
          {"command", cfg.command},
          {"seed", cfg.seed},
          {"parameters", params},
          {"wall_time_s", wall_seconds},
          {"files", files},
          {"columns", columns},
          {"summary", result.summary},
          {"warnings", result.warnings}};
}

std::vector<std::string> write_outputs(const RunConfig& cfg, const CommandResult& result, double wall_seconds)
{
  std::vector<std::string> files;
  if (cfg.format == OutputFormat::json) {
    files.push_back(cfg.out);
  } else {
    for (const auto& t : result.tables)
      files.push_back(panel_path(cfg.out, t.name));
  }
  const json meta = metadata(cfg, result, wall_seconds, files);

  if (cfg.format == OutputFormat::json) {
    json tables = json::array();
    for (const auto& t : result.tables) {
      json rows = json::array();
      for (const auto& row : t.rows) {
        json r = json::array();
        for (const auto& s : row)
          r.push_back(cell_json(s));
        rows.push_back(std::move(r));
      }
      tables.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", std::move(rows)}});
    }
    std::ofstream os(cfg.out);
    if (!os)
      throw std::runtime_error("cannot write '" + cfg.out + "'");
    os << json{{"meta", meta}, {"tables", tables}}.dump(1) << '\n';
  } else {
    std::vector<std::string> header{std::string("dicke2p ") + version_string()};
    std::istringstream params(emit(cfg));
    for (std::string line; std::getline(params, line);)
      header.push_back(line);
    header.push_back("wall_time_s = " + format_real(wall_seconds));
    header.push_back("summary = " + result.summary.dump());
    for (const auto& w : result.warnings)
      header.push_back("warning: " + w);
    for (std::size_t k = 0; k < result.tables.size(); ++k)
      write_csv(files[k], result.tables[k], header);
  }

  const std::string sidecar = cfg.out + ".meta.json";
  std::ofstream os(sidecar);
  if (!os)
    throw std::runtime_error("cannot write '" + sidecar + "'");
  os << meta.dump(2) << '\n';
  files.push_back(sidecar);
  return files;
}

int execute(const RunConfig& cfg, std::ostream& log)
{
  const auto start = std::chrono::steady_clock::now();
  const CommandResult result = run_command(cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto files = write_outputs(cfg, result, wall);
  for (const auto& w : result.warnings)
    log << "warning: " << w << '\n';
  for (const auto& f : files)
    log << "wrote " << f << '\n';
  return cfg.strict && !result.warnings.empty() ? 3 : 0;
}

}  // namespace dicke2p
