#include "degen/runner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <set>

#include "degen/basis.hpp"
#include "degen/biorthogonal.hpp"
#include "degen/errors.hpp"
#include "degen/io.hpp"
#include "degen/moment_control.hpp"
#include "degen/nonlinear_control.hpp"
#include "degen/simulator.hpp"
#include "degen/spaces.hpp"
#include "degen/spectrum.hpp"
#include "degen/staged_control.hpp"
#include "json.hpp"

namespace degen {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

const std::set<std::string> kScenarios = {"spectral-report", "biorth-report", "linear-null",
                                          "cost-scan",       "nonhomogeneous", "nonlinear"};

double get_number(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return io::parse_double(v.get<std::string>());
    } catch (const std::invalid_argument&) {
    }
  }
  throw UsageError(std::string("config: '") + key + "' must be a number");
}

std::uint64_t get_count(const json& j, const char* key) {
  const double x = get_number(j, key);
  if (!(x >= 0.0) || x != std::floor(x) || x > 9.0e15)
    throw UsageError(std::string("config: '") + key + "' must be a nonnegative integer");
  return static_cast<std::uint64_t>(x);
}

std::string num(double x) { return io::fmt(x); }

double read_num(const json& j, const char* key) {
  if (!j.contains(key)) throw UsageError(std::string("summary: missing '") + key + "'");
  const auto& v = j.at(key);
  if (v.is_string()) return io::parse_double(v.get<std::string>());
  if (v.is_number()) return v.get<double>();
  if (v.is_boolean()) return v.get<bool>() ? 1.0 : 0.0;
  throw UsageError(std::string("summary: bad value for '") + key + "'");
}

json read_json(const fs::path& p) {
  try {
    return json::parse(io::read_text(p));
  } catch (const json::exception& e) {
    throw UsageError(p.string() + ": " + e.what());
  }
}

void write_json(const fs::path& p, const json& j) { io::write_text(p, j.dump(1) + "\n"); }

std::size_t steps_for(double T, double dt) {
  return std::max<std::size_t>(4, static_cast<std::size_t>(std::llround(T / dt)));
}

SynthesisOptions synth_opts(const RunConfig& c) {
  SynthesisOptions o;
  o.precision_bits = c.precision_bits;
  o.max_bits = std::max(1024, c.precision_bits);
  return o;
}

json stage_certificates(const StagedRun& run) {
  json arr = json::array();
  for (const auto& c : run.stages) {
    arr.push_back({{"k", c.k},
                   {"t0", num(c.t0)},
                   {"t1", num(c.t1)},
                   {"skipped", c.skipped},
                   {"precision_bits", c.precision_bits},
                   {"log10_condition", num(c.log10_condition)},
                   {"start_hm1", num(c.start_hm1)},
                   {"end_hm1", num(c.end_hm1)},
                   {"continuity", num(c.continuity)},
                   {"moment_defect", num(c.moment_defect)},
                   {"correction_ratio", num(c.correction_ratio)},
                   {"control_l2", num(c.control_l2)},
                   {"state_l2", num(c.state_l2)},
                   {"source_weighted", num(c.source_weighted)}});
  }
  return arr;
}

// Largest ||Y(T_{k+1})|| / ||Y(T_k)|| over k >= 2 with a nonzero denominator.
double decay_after_stage2(const StagedRun& run) {
  double worst = 0.0;
  for (std::size_t k = 2; k + 1 < run.node_hm1.size(); ++k) {
    if (run.node_hm1[k] > 0.0) worst = std::max(worst, run.node_hm1[k + 1] / run.node_hm1[k]);
  }
  return worst;
}

void write_staged_artifacts(const fs::path& dir, const StagedRun& run, json& summary) {
  json plan = {{"T", num(run.plan.T)},
               {"q", num(run.plan.q)},
               {"dt", num(run.plan.dt)},
               {"K", run.plan.K},
               {"p", num(run.weights.p)},
               {"M", num(run.weights.M)}};
  json times = json::array();
  for (double t : run.plan.times) times.push_back(num(t));
  plan["times"] = std::move(times);
  write_json(dir / "plan.json", plan);
  fs::create_directories(dir / "stages");
  for (std::size_t k = 0; k < run.pieces.size(); ++k)
    io::write_trajectory_csv(dir / "stages" / (std::to_string(k) + ".csv"), run.pieces[k]);
  {
    std::string text = "t,v\n";
    for (const auto& v : run.controls)
      for (std::size_t j = 0; j < v.values.size(); ++j) text += num(v.grid.at(j)) + "," + num(v.values[j]) + "\n";
    io::write_text(dir / "control.csv", text);
  }
  write_json(dir / "certificates.json", stage_certificates(run));
  summary["K"] = run.plan.K;
  summary["scale"] = num(run.scale);
  summary["terminal_hm1"] = num(run.terminal_hm1);
  // The one-pass replay is the stricter terminal value (the stage loop restarts from a_k exactly).
  const double term = std::max(run.terminal_hm1, run.replay_terminal_hm1);
  summary["terminal_ratio"] = num(run.scale > 0.0 ? term / run.scale : term);
  summary["replay_terminal_hm1"] = num(run.replay_terminal_hm1);
  summary["max_continuity"] = num(run.max_continuity);
  summary["link_residual"] = num(run.link_residual);
  summary["decay_ratio"] = num(decay_after_stage2(run));
  summary["tail_bound"] = num(run.tail_bound);
  summary["norm_F"] = num(run.norm_F);
  summary["norm_V"] = num(run.norm_V);
  summary["norm_H0"] = num(run.norm_H0);
  summary["norm_H"] = num(run.norm_H);
}

// Cost-scan fit of M unless the config fixes it.
double resolve_M(const RunConfig& c, const SystemModel& model, std::size_t jobs, json& summary) {
  if (c.M > 0.0) {
    summary["M_source"] = "config";
    return c.M;
  }
  std::vector<ModalState> ens;
  for (std::size_t i = 0; i < std::max<std::size_t>(1, c.ensemble); ++i) ens.push_back(random_state(c.N, c.seed + i));
  const CostScan scan =
      control_cost_scan(model, {0.125, 0.25, 0.5, 1.0}, ens, 400, synth_opts(c), std::max<std::size_t>(1, jobs));
  if (!(scan.M > 0.0)) throw InternalError("cost fit gave a nonpositive M");
  summary["M_source"] = "cost-scan";
  summary["M_fit_r2"] = num(scan.r2);
  return scan.M;
}

StagedOptions staged_opts(const RunConfig& c, double M) {
  StagedOptions o;
  o.p = c.p;
  o.q = c.q;
  o.M = M;
  o.dt = c.dt;
  o.steps_per_stage = c.steps_per_stage;
  o.synthesis = synth_opts(c);
  return o;
}

void run_spectral(const RunConfig& c, const fs::path& dir, json& s) {
  const SystemModel model = make_model(c.alpha, c.a1, c.a2, c.N);
  std::string text = "n,zero,lambda,flux\n";
  for (std::size_t n = 0; n < c.N; ++n) {
    text += std::to_string(n + 1) + "," + num(model.spectrum.zeros[n]) + "," + num(model.spectrum.lambda[n]) + "," +
            num(model.spectrum.flux[n]) + "\n";
  }
  io::write_text(dir / "spectrum.csv", text);
  text = "k,re,im,mode,branch\n";
  const auto merged = lambda_sequence_unchecked(model);
  for (std::size_t k = 0; k < merged.size(); ++k) {
    text += std::to_string(k + 1) + "," + num(merged[k].value.real()) + "," + num(merged[k].value.imag()) + "," +
            std::to_string(merged[k].mode + 1) + "," + std::to_string(merged[k].branch) + "\n";
  }
  io::write_text(dir / "merged.csv", text);
  const AdmissibilityReport a = admissibility(c.alpha, c.a1, c.a2, c.N);
  s["mu1"] = {num(model.coupling.mu1.real()), num(model.coupling.mu1.imag())};
  s["mu2"] = {num(model.coupling.mu2.real()), num(model.coupling.mu2.imag())};
  s["kalman_ok"] = a.kalman_ok;
  s["spectral_ok"] = a.spectral_ok;
  s["collisions"] = a.collisions.size();
  s["distinct"] = a.distinct;
  s["positive_real"] = a.positive_real;
  s["modulus_sorted"] = a.modulus_sorted;
  s["imag_delta"] = num(a.imag_delta);
  s["min_gap"] = num(a.min_gap);
  s["gap_rho"] = num(a.gap_rho);
  s["counting_p"] = num(a.counting_p);
  s["counting_s"] = num(a.counting_s);
  s["admissible"] = a.ok();
  s["violations"] = a.violations;
}

void run_biorth(const RunConfig& c, const fs::path& dir, json& s) {
  const SystemModel model = make_model(c.alpha, c.a1, c.a2, c.N);
  auto ex = exponent_values(lambda_sequence(model));
  ex.resize(c.N);
  const BiorthFamily fam = build_biorthogonal_escalating(ex, c.T, c.precision_bits, std::max(1024, c.precision_bits));
  const FamilyReport rep = verify_family(fam);
  io::write_text(dir / "family.json", io::family_json(fam));
  std::string text = "n,re,im,norm\n";
  for (std::size_t n = 0; n < fam.size(); ++n) {
    text += std::to_string(n + 1) + "," + num(ex[n].real()) + "," + num(ex[n].imag()) + "," + num(rep.norms[n]) +
            "\n";
  }
  io::write_text(dir / "norms.csv", text);
  s["biorth_residual"] = num(rep.residual);
  s["precision_bits"] = fam.precision_bits;
  s["log10_condition"] = num(fam.log10_condition);
  s["growth_slope"] = num(rep.growth.slope);
  s["growth_r2"] = num(rep.growth.r2);
}

void run_linear(const RunConfig& c, const fs::path& dir, json& s) {
  const SystemModel model = make_model(c.alpha, c.a1, c.a2, c.N);
  const std::size_t steps = steps_for(c.T, c.dt);
  const ModalState y0 = random_state(c.N, c.seed);
  const MomentController ctl(model, c.T, steps, synth_opts(c));
  const SynthesisResult res = ctl.synthesize(y0);
  const TimeGrid grid(0.0, c.T, steps);
  const Trajectory tr = forward_solve(model, y0, &res.control, nullptr, grid);
  const auto& lam = model.spectrum.lambda;
  const double ratio = hm1_norm(tr.final_state(), lam) / hm1_norm(y0, lam);
  const ModalState phi0 = random_state(c.N, c.seed + 1);
  const double dual = duality_residual(model, y0, res.control, phi0, grid).relative();

  // Linearity: v(2 y0 + z) against 2 v(y0) + v(z).
  const ModalState z = random_state(c.N, c.seed + 2);
  ModalState comb(c.N);
  for (std::size_t n = 0; n < c.N; ++n) comb[n] = {2.0 * y0[n][0] + z[n][0], 2.0 * y0[n][1] + z[n][1]};
  const auto vz = ctl.synthesize(z).control.values;
  const auto vc = ctl.synthesize(comb).control.values;
  double lin = 0.0, vmax = 0.0;
  for (std::size_t j = 0; j < vc.size(); ++j) {
    lin = std::max(lin, std::fabs(vc[j] - 2.0 * res.control.values[j] - vz[j]));
    vmax = std::max(vmax, std::fabs(vc[j]));
  }

  io::write_control_csv(dir / "control.csv", res.control);
  io::write_trajectory_csv(dir / "trajectory.csv", tr);
  io::write_state_csv(dir / "initial_state.csv", y0);
  io::write_text(dir / "family.json", io::family_json(ctl.family()));
  s["steps"] = steps;
  s["terminal_ratio"] = num(ratio);
  s["duality_relative"] = num(dual);
  s["biorth_residual"] = num(res.biorth_residual);
  s["precision_bits"] = res.precision_bits;
  s["log10_condition"] = num(res.log10_condition);
  s["moment_defect"] = num(res.moment_defect);
  s["moment_defect_rel"] = num(res.moment_defect_rel);
  s["moment_defect_raw"] = num(res.moment_defect_raw);
  s["correction_ratio"] = num(res.correction_ratio);
  s["imag_ratio"] = num(res.imag_ratio);
  s["tail_bound"] = num(res.tail_bound);
  s["control_l2"] = num(control_l2(res.control));
  s["linearity_defect"] = num(vmax > 0.0 ? lin / vmax : lin);
}

void run_cost(const RunConfig& c, const fs::path& dir, json& s, std::size_t jobs) {
  const SystemModel model = make_model(c.alpha, c.a1, c.a2, c.N);
  std::vector<double> hs = c.horizons;
  if (hs.empty()) hs = {0.125, 0.25, 0.5, 1.0};
  std::vector<ModalState> ens;
  for (std::size_t i = 0; i < std::max<std::size_t>(1, c.ensemble); ++i) ens.push_back(random_state(c.N, c.seed + i));
  const double hmax = *std::max_element(hs.begin(), hs.end());
  const CostScan scan = control_cost_scan(model, hs, ens, steps_for(hmax, c.dt), synth_opts(c), jobs);
  std::string text = "T,K,precision_bits,log10_condition,max_terminal_ratio\n";
  double worst_terminal = 0.0;
  for (const auto& r : scan.rows) {
    text += num(r.T) + "," + num(r.K) + "," + std::to_string(r.precision_bits) + "," + num(r.log10_condition) + "," +
            num(r.max_terminal_ratio) + "\n";
    worst_terminal = std::max(worst_terminal, r.max_terminal_ratio);
  }
  io::write_text(dir / "cost_table.csv", text);
  auto rows = scan.rows;
  std::sort(rows.begin(), rows.end(), [](const CostRow& a, const CostRow& b) { return a.T < b.T; });
  bool mono = true;
  for (std::size_t i = 1; i < rows.size(); ++i) mono = mono && rows[i - 1].K > rows[i].K;
  s["C0"] = num(scan.C0);
  s["M"] = num(scan.M);
  s["r2"] = num(scan.r2);
  s["monotone"] = mono;
  s["max_terminal_ratio"] = num(worst_terminal);
}

void run_nonhomogeneous(const RunConfig& c, const fs::path& dir, json& s, std::size_t jobs) {
  const SystemModel model = make_model(c.alpha, c.a1, c.a2, c.N);
  const double M = resolve_M(c, model, jobs, s);
  const StagedOptions o = staged_opts(c, M);
  const WeightSpec ws{c.T, c.p, c.q, M};
  ModalState profile = random_state(c.N, c.seed + 100);
  for (auto& v : profile) v = {c.amplitude * v[0], c.amplitude * v[1]};
  const StageSource src = stage_source(weighted_bump_source(ws, profile));
  const ModalState y0 = random_state(c.N, c.seed);
  const Basis basis(model.spectrum);
  const StagedRun run = nonhomogeneous_null_control(model, y0, &src, c.T, o, &basis);
  io::write_state_csv(dir / "initial_state.csv", y0);
  s["M"] = num(M);
  write_staged_artifacts(dir, run, s);
}

void run_nonlinear(const RunConfig& c, const fs::path& dir, json& s, std::size_t jobs) {
  const SystemModel model = make_model(c.alpha, c.a1, c.a2, c.N);
  const double M = resolve_M(c, model, jobs, s);
  FixedPointOptions o;
  o.staged = staged_opts(c, M);
  o.delta = c.delta;
  o.maxit = c.maxit;
  ModalState y0 = random_state(c.N, c.seed);
  const auto& lam = model.spectrum.lambda;
  const double sm = component_norms(y0, lam, 0).hm1 + component_norms(y0, lam, 1).h1;
  for (auto& v : y0) v = {v[0] * c.delta / sm, v[1] * c.delta / sm};
  const Basis basis(model.spectrum);
  const FixedPointResult r = fixed_point_control(model, basis, y0, quadratic_nonlinearity(c.c1, c.c2), c.T, o);
  io::write_state_csv(dir / "initial_state.csv", y0);
  io::write_trace_csv(dir / "trace.csv", r.trace);
  s["M"] = num(M);
  write_staged_artifacts(dir, r.run, s);
  double rmax = 0.0;
  for (double x : r.trace.ratios) rmax = std::max(rmax, x);
  s["iterations"] = r.trace.iterations;
  s["converged"] = r.trace.converged;
  s["max_ratio"] = num(rmax);
  s["ball_ok"] = r.trace.ball_ok;
  s["delta_F"] = num(r.trace.delta_F);
  s["smallness"] = num(r.trace.smallness);
  s["final_residual"] = num(r.trace.final_residual);
}

// linear-null: terminal ratio and duality recomputed from the CSV artifacts.
void recheck_linear(const json& cfg, const fs::path& dir, std::vector<ReportLine>& out) {
  const RunConfig c = parse_config(cfg.dump());
  const SystemModel model = make_model(c.alpha, c.a1, c.a2, c.N);
  double ratio = std::numeric_limits<double>::infinity(), dual = ratio;
  try {
    const ControlSignal v = io::read_control_csv(dir / "control.csv");
    const ModalState y0 = io::read_state_csv(dir / "initial_state.csv");
    if (y0.size() != c.N) throw std::runtime_error("initial state size");
    const Trajectory tr = forward_solve(model, y0, &v, nullptr, v.grid);
    const auto& lam = model.spectrum.lambda;
    ratio = hm1_norm(tr.final_state(), lam) / hm1_norm(y0, lam);
    dual = duality_residual(model, y0, v, random_state(c.N, c.seed + 1), v.grid).relative();
  } catch (const std::exception&) {
  }
  if (!std::isfinite(ratio)) ratio = std::numeric_limits<double>::infinity();
  out.push_back({"terminal_ratio", ratio, 1e-6, ratio <= 1e-6});
  out.push_back({"duality", dual, 1e-6, dual <= 1e-6});
}

void check_le(std::vector<ReportLine>& out, const json& s, const char* key, double thr, const char* name = nullptr) {
  const double v = read_num(s, key);
  out.push_back({name ? name : key, v, thr, v <= thr});
}

void check_ge(std::vector<ReportLine>& out, const json& s, const char* key, double thr) {
  const double v = read_num(s, key);
  out.push_back({key, v, thr, v >= thr});
}

void check_true(std::vector<ReportLine>& out, const json& s, const char* key) {
  const double v = read_num(s, key);
  out.push_back({key, v, 1.0, v == 1.0});
}

}  // namespace

ModalState random_state(std::size_t N, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ModalState s(N);
  for (std::size_t n = 0; n < N; ++n) {
    const double k2 = static_cast<double>((n + 1) * (n + 1));
    // Explicit map from 53 random bits keeps runs identical across standard libraries.
    auto u = [&] { return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0; };
    const double a = u();
    const double b = u();
    s[n] = {a / k2, b / k2};
  }
  return s;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  static const std::set<std::string> known = {
      "scenario", "alpha", "a1",      "a2",       "T",  "N",  "dt",    "p",         "q",
      "delta",    "precision_bits",   "seed",     "output_dir",        "M", "horizons", "ensemble",
      "steps_per_stage", "c1", "c2", "maxit", "amplitude"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw UsageError("config: unknown key '" + k + "'");

  RunConfig c;
  if (!j.contains("scenario") || !j["scenario"].is_string()) throw UsageError("config: 'scenario' is required");
  c.scenario = j["scenario"].get<std::string>();
  if (!kScenarios.count(c.scenario)) throw UsageError("config: unknown scenario '" + c.scenario + "'");
  for (const char* k : {"alpha", "a1", "a2", "N"})
    if (!j.contains(k)) throw UsageError(std::string("config: '") + k + "' is required");
  const bool needs_T = c.scenario != "spectral-report" && c.scenario != "cost-scan";
  if (needs_T && !j.contains("T")) throw UsageError("config: 'T' is required for " + c.scenario);
  if (c.scenario == "nonlinear" && !j.contains("delta")) throw UsageError("config: 'delta' is required for nonlinear");

  c.alpha = get_number(j, "alpha");
  c.a1 = get_number(j, "a1");
  c.a2 = get_number(j, "a2");
  c.N = get_count(j, "N");
  if (j.contains("T")) c.T = get_number(j, "T");
  if (j.contains("dt")) c.dt = get_number(j, "dt");
  if (j.contains("p")) c.p = get_number(j, "p");
  if (j.contains("q")) c.q = get_number(j, "q");
  if (j.contains("delta")) c.delta = get_number(j, "delta");
  if (j.contains("precision_bits")) c.precision_bits = static_cast<int>(get_count(j, "precision_bits"));
  if (j.contains("seed")) c.seed = get_count(j, "seed");
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) throw UsageError("config: 'output_dir' must be a string");
    c.output_dir = j["output_dir"].get<std::string>();
  }
  if (j.contains("M")) c.M = get_number(j, "M");
  if (j.contains("horizons")) {
    if (!j["horizons"].is_array()) throw UsageError("config: 'horizons' must be an array");
    for (std::size_t i = 0; i < j["horizons"].size(); ++i) {
      const json one = {{"h", j["horizons"][i]}};
      c.horizons.push_back(get_number(one, "h"));
    }
  }
  if (j.contains("ensemble")) c.ensemble = get_count(j, "ensemble");
  if (j.contains("steps_per_stage")) c.steps_per_stage = get_count(j, "steps_per_stage");
  if (j.contains("c1")) c.c1 = get_number(j, "c1");
  if (j.contains("c2")) c.c2 = get_number(j, "c2");
  if (j.contains("maxit")) c.maxit = get_count(j, "maxit");
  if (j.contains("amplitude")) c.amplitude = get_number(j, "amplitude");

  if (!(c.alpha >= 0.0 && c.alpha < 2.0)) throw UsageError("config: alpha must lie in [0, 2)");
  if (c.N < 1 || c.N > 400) throw UsageError("config: N must lie in [1, 400]");
  if (!(c.T > 0.0) || !std::isfinite(c.T)) throw UsageError("config: T must be positive");
  if (!(c.dt > 0.0) || !(c.dt < c.T)) throw UsageError("config: dt must lie in (0, T)");
  if (c.precision_bits < 53 || c.precision_bits > 65536) throw UsageError("config: precision_bits out of range");
  if (!(c.q > 1.0) || !(c.p > 0.0)) throw UsageError("config: need q > 1 and p > 0");
  if (c.M < 0.0) throw UsageError("config: M must be nonnegative");
  for (double h : c.horizons)
    if (!(h > 0.0)) throw UsageError("config: horizons must be positive");
  if (c.scenario == "nonlinear" && !(c.delta > 0.0)) throw UsageError("config: delta must be positive");
  if (c.scenario == "biorth-report" && c.N < 2) throw UsageError("config: biorth-report needs N >= 2");
  if (c.scenario == "cost-scan" && !c.horizons.empty() && c.horizons.size() < 2)
    throw UsageError("config: cost-scan needs at least two horizons");
  return c;
}

std::string config_json(const RunConfig& c) {
  json j = {{"scenario", c.scenario},
            {"alpha", num(c.alpha)},
            {"a1", num(c.a1)},
            {"a2", num(c.a2)},
            {"T", num(c.T)},
            {"N", c.N},
            {"dt", num(c.dt)},
            {"p", num(c.p)},
            {"q", num(c.q)},
            {"delta", num(c.delta)},
            {"precision_bits", c.precision_bits},
            {"seed", c.seed},
            {"output_dir", c.output_dir},
            {"M", num(c.M)},
            {"ensemble", c.ensemble},
            {"steps_per_stage", c.steps_per_stage},
            {"c1", num(c.c1)},
            {"c2", num(c.c2)},
            {"maxit", c.maxit},
            {"amplitude", num(c.amplitude)}};
  json h = json::array();
  for (double x : c.horizons) h.push_back(num(x));
  j["horizons"] = std::move(h);
  return j.dump(1);
}

void run_scenario(const RunConfig& c, const fs::path& dir, std::size_t jobs) {
  fs::create_directories(dir);
  json manifest = {{"library", "degen"}, {"version", kLibraryVersion}, {"config", json::parse(config_json(c))}};
  write_json(dir / "manifest.json", manifest);
  json s = {{"scenario", c.scenario}};
  jobs = std::max<std::size_t>(1, jobs);
  if (c.scenario == "spectral-report") run_spectral(c, dir, s);
  else if (c.scenario == "biorth-report") run_biorth(c, dir, s);
  else if (c.scenario == "linear-null") run_linear(c, dir, s);
  else if (c.scenario == "cost-scan") run_cost(c, dir, s, jobs);
  else if (c.scenario == "nonhomogeneous") run_nonhomogeneous(c, dir, s, jobs);
  else if (c.scenario == "nonlinear") run_nonlinear(c, dir, s, jobs);
  else throw UsageError("unknown scenario '" + c.scenario + "'");
  write_json(dir / "summary.json", s);
}

std::string error_json(const std::exception& e) {
  json j;
  if (const auto* d = dynamic_cast<const Error*>(&e)) {
    j["error"] = d->kind();
    if (const auto* p = dynamic_cast<const PrecisionExhausted*>(&e)) {
      j["precision_bits"] = p->precision_bits;
      j["suggested_bits"] = p->suggested_bits;
      if (p->stage >= 0) j["stage"] = p->stage;
    } else if (const auto* st = dynamic_cast<const StageTooShort*>(&e)) {
      j["stage"] = st->stage;
    } else if (const auto* nc = dynamic_cast<const NotContractive*>(&e)) {
      j["delta"] = num(nc->delta);
      j["ratio"] = num(nc->ratio);
    }
  } else if (dynamic_cast<const std::invalid_argument*>(&e)) {
    j["error"] = "InvalidArgument";
  } else {
    j["error"] = "RuntimeError";
  }
  j["message"] = e.what();
  return j.dump();
}

std::vector<ReportLine> report_run(const fs::path& dir) {
  if (!fs::is_regular_file(dir / "manifest.json")) throw UsageError("no manifest.json in " + dir.string());
  const json manifest = read_json(dir / "manifest.json");
  if (!manifest.contains("config")) throw UsageError("manifest.json has no config");
  std::vector<ReportLine> out;
  if (!fs::is_regular_file(dir / "summary.json")) {
    out.push_back({"summary_present", 0.0, 1.0, false});
    return out;
  }
  const json s = read_json(dir / "summary.json");
  const std::string sc = manifest["config"].value("scenario", "");
  if (sc == "spectral-report") {
    check_true(out, s, "admissible");
  } else if (sc == "biorth-report") {
    check_le(out, s, "biorth_residual", kBiorthResidualTol, "biorthogonality");
  } else if (sc == "linear-null") {
    recheck_linear(manifest["config"], dir, out);
    check_le(out, s, "biorth_residual", kBiorthResidualTol, "biorthogonality");
    check_le(out, s, "moment_defect_rel", 1e-8, "moment_defect");
    check_le(out, s, "linearity_defect", 1e-10, "linearity");
  } else if (sc == "cost-scan") {
    check_true(out, s, "monotone");
    check_ge(out, s, "r2", 0.95);
    check_le(out, s, "max_terminal_ratio", 1e-6);
  } else if (sc == "nonhomogeneous" || sc == "nonlinear") {
    check_le(out, s, "max_continuity", 1e-8, "stage_continuity");
    check_le(out, s, "terminal_ratio", 1e-5);
    check_le(out, s, "link_residual", 1e-12);
    if (sc == "nonhomogeneous") check_le(out, s, "decay_ratio", 0.8);
    if (sc == "nonlinear") {
      check_true(out, s, "converged");
      check_le(out, s, "max_ratio", 1.0 - 1e-12, "contraction");
      check_true(out, s, "ball_ok");
    }
  } else {
    throw UsageError("manifest names unknown scenario '" + sc + "'");
  }
  return out;
}

void print_report(std::ostream& os, const std::vector<ReportLine>& lines) {
  for (const auto& l : lines) {
    os << (l.pass ? "PASS " : "FAIL ") << l.name << " value=" << io::fmt(l.value) << " threshold=" << io::fmt(l.threshold)
       << '\n';
  }
}

}  // namespace degen
