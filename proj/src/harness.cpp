#include "ksb/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "ksb/flow.hpp"
#include "ksb/kernels.hpp"
#include "ksb/spectral.hpp"

namespace ksb {

namespace {

std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail_at(const std::string& name, int line, const std::string& msg) {
  throw std::invalid_argument(name + ":" + std::to_string(line) + ": " + msg);
}

double parse_number(const std::string& name, int line, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0' || !std::isfinite(x))
    fail_at(name, line, "expected a number, got '" + v + "'");
  return x;
}

int parse_int(const std::string& name, int line, const std::string& v) {
  const double x = parse_number(name, line, v);
  if (x != std::floor(x) || std::abs(x) > 1e9)
    fail_at(name, line, "expected an integer, got '" + v + "'");
  return static_cast<int>(x);
}

bool parse_bool(const std::string& name, int line, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  fail_at(name, line, "expected true or false, got '" + v + "'");
}

std::string parse_string(const std::string& name, int line, const std::string& v) {
  if (v.size() < 2 || v.front() != '"' || v.back() != '"')
    fail_at(name, line, "expected a quoted string, got '" + v + "'");
  const std::string body = v.substr(1, v.size() - 2);
  if (body.find('"') != std::string::npos)
    fail_at(name, line, "nested quotes are not supported");
  return body;
}

std::vector<double> parse_number_array(const std::string& name, int line,
                                       const std::string& v) {
  if (v.size() < 2 || v.front() != '[' || v.back() != ']')
    fail_at(name, line, "expected [a, b, ...], got '" + v + "'");
  std::vector<double> out;
  const std::string body = trim(v.substr(1, v.size() - 2));
  if (body.empty()) return out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(parse_number(name, line, trim(item)));
  return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& name) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line;
    bool in_str = false;
    for (char ch : raw) {
      if (ch == '"') in_str = !in_str;
      if (ch == '#' && !in_str) break;
      line.push_back(ch);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[')
      fail_at(name, lineno, "sections are not supported; use flat keys");
    const size_t eq = line.find('=');
    if (eq == std::string::npos) fail_at(name, lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) fail_at(name, lineno, "missing key");
    if (val.empty()) fail_at(name, lineno, "missing value for '" + key + "'");

    if (key == "lx") cfg.Lx = parse_number(name, lineno, val);
    else if (key == "ly") cfg.Ly = parse_number(name, lineno, val);
    else if (key == "nx") cfg.nx = parse_int(name, lineno, val);
    else if (key == "ny") cfg.ny = parse_int(name, lineno, val);
    else if (key == "backend") cfg.backend = parse_string(name, lineno, val);
    else if (key == "n_modes") cfg.n_modes = parse_int(name, lineno, val);
    else if (key == "m_modes") cfg.m_modes = parse_int(name, lineno, val);
    else if (key == "rho0_family") cfg.rho0_family = parse_string(name, lineno, val);
    else if (key == "mass") cfg.mass = parse_number(name, lineno, val);
    else if (key == "x0") cfg.x0 = parse_number(name, lineno, val);
    else if (key == "y0") cfg.y0 = parse_number(name, lineno, val);
    else if (key == "sigma") cfg.sigma = parse_number(name, lineno, val);
    else if (key == "psi0_family") cfg.psi0_family = parse_string(name, lineno, val);
    else if (key == "psi0_amp") cfg.psi0_amp = parse_number(name, lineno, val);
    else if (key == "g") cfg.g = parse_number(name, lineno, val);
    else if (key == "g_list") cfg.g_list = parse_number_array(name, lineno, val);
    else if (key == "t_end") cfg.t_end = parse_number(name, lineno, val);
    else if (key == "dt_target") cfg.dt_target = parse_number(name, lineno, val);
    else if (key == "cfl") cfg.cfl = parse_number(name, lineno, val);
    else if (key == "snapshot_stride") cfg.snapshot_stride = parse_int(name, lineno, val);
    else if (key == "linf_ceiling") cfg.linf_ceiling = parse_number(name, lineno, val);
    else if (key == "eps_quench") cfg.eps_quench = parse_number(name, lineno, val);
    else if (key == "chemotaxis") cfg.chemotaxis = parse_bool(name, lineno, val);
    else if (key == "advection") cfg.advection = parse_bool(name, lineno, val);
    else if (key == "frozen_rho") cfg.frozen_rho = parse_bool(name, lineno, val);
    else if (key == "dump_fields") cfg.dump_fields = parse_bool(name, lineno, val);
    else if (key == "out_dir") cfg.out_dir = parse_string(name, lineno, val);
    else fail_at(name, lineno, "unknown key '" + key + "'");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

GalerkinContext make_galerkin_context(const RunConfig& cfg, const std::string& cache_path) {
  GalerkinContext ctx;
  const Grid gg = galerkin_grid_from_config(cfg);
  ctx.basis = build_galerkin_basis(gg, cfg.n_modes, cfg.m_modes);
  bool loaded = false;
  if (!cache_path.empty())
    loaded = load_tensors(cache_path, gg, cfg.n_modes, cfg.m_modes, ctx.tensors);
  if (!loaded) {
    ctx.tensors = assemble_tensors(ctx.basis);
    if (!cache_path.empty()) save_tensors(cache_path, ctx.tensors, gg);
  }
  return ctx;
}

namespace {

void finish_outcome(RunOutcome& out, const RunConfig& cfg, bool suspected) {
  out.fit = fit_quench_rate(out.records, cfg.eps_quench);
  if (suspected) {
    out.verdict = "blowup-suspected";
    return;
  }
  bool all_zero = true;
  for (const DiagnosticsRecord& r : out.records) all_zero = all_zero && r.l2_rho == 0.0;
  const DiagnosticsRecord& last = out.records.back();
  const bool small = last.l2_rho * last.l2_rho < cfg.eps_quench;
  out.verdict = (small && (out.fit.valid || all_zero)) ? "quenched" : "inconclusive";
}

RunOutcome run_fd(const RunConfig& cfg, bool keep_states) {
  const Grid grid = grid_from_config(cfg);
  CoupledState s = make_coupled_state(initial_rho(cfg, grid), initial_psi(cfg, grid));
  StepOptions opt;
  opt.cfl = cfg.cfl;
  opt.chemotaxis = cfg.chemotaxis;
  opt.advection = cfg.advection;
  opt.linf_ceiling = cfg.linf_ceiling;
  BlowupCeilings ceilings;
  ceilings.linf_ceiling = cfg.linf_ceiling;

  RunOutcome out;
  out.records.push_back(snapshot(s, cfg.g, nullptr, nullptr));
  CoupledState prev_snap = s;
  if (keep_states) out.states.push_back(s);

  bool suspected = false;
  long step = 0;
  while (s.t < cfg.t_end - 1e-12) {
    double dt = std::min(cfg.dt_target, cfg.t_end - s.t);
    if (cfg.frozen_rho) dt = std::min(dt, flow_stable_dt(grid));
    try {
      if (cfg.frozen_rho) {
        s.flow = step_flow(s.flow, s.density.rho, cfg.g, dt);
        s.t = s.flow.t;
      } else {
        s = step_coupled(s, cfg.g, dt, opt);
      }
    } catch (const blowup_error&) {
      suspected = true;
      break;
    }
    ++step;
    const bool last = s.t >= cfg.t_end - 1e-12;
    if (step % cfg.snapshot_stride == 0 || last) {
      out.records.push_back(snapshot(s, cfg.g, &out.records.back(), &prev_snap));
      prev_snap = s;
      if (keep_states) out.states.push_back(s);
      if (detect_blowup(out.records, ceilings) == BlowupVerdict::suspected) {
        suspected = true;
        break;
      }
    }
  }
  finish_outcome(out, cfg, suspected);
  return out;
}

RunOutcome run_galerkin(const RunConfig& cfg, bool keep_states, const GalerkinContext* ctx) {
  GalerkinContext local;
  if (!ctx) {
    local = make_galerkin_context(cfg);
    ctx = &local;
  }
  const Grid& gg = ctx->basis.grid;
  const GalerkinState s0 =
      project_initial_data(initial_rho(cfg, gg), initial_psi(cfg, gg), ctx->basis);
  const double dt = std::min(cfg.dt_target, galerkin_stable_dt(ctx->tensors));
  const GalerkinTrajectory traj =
      integrate_galerkin(s0, ctx->tensors, cfg.g, cfg.t_end, dt, cfg.snapshot_stride);

  RunOutcome out;
  CoupledState prev_snap;
  for (const GalerkinState& gs : traj.samples) {
    CoupledState cs;
    VectorField unused;
    reconstruct(gs, ctx->basis, cs.density.rho, unused);
    ScalarField psi(gg);
    for (int j = 0; j < ctx->basis.m(); ++j) {
      const double a = gs.u_modes[j];
      if (a == 0.0) continue;
      const double* src = ctx->basis.stokes[j].psi.data();
      for (int p = 0; p < gg.size(); ++p) psi.values[p] += a * src[p];
    }
    cs.flow = flow_state_from_psi(psi);
    cs.density.c = solve_poisson(cs.density.rho);
    cs.density.t = gs.t;
    cs.flow.t = gs.t;
    cs.t = gs.t;
    const bool first = out.records.empty();
    out.records.push_back(snapshot(cs, cfg.g, first ? nullptr : &out.records.back(),
                                   first ? nullptr : &prev_snap));
    prev_snap = std::move(cs);
    if (keep_states) out.states.push_back(prev_snap);
  }
  finish_outcome(out, cfg, traj.blowup_suspected);
  return out;
}

}  // namespace

RunOutcome run_core(const RunConfig& cfg, bool keep_states, const GalerkinContext* ctx) {
  validate_config(cfg);
  if (cfg.backend == "galerkin") return run_galerkin(cfg, keep_states, ctx);
  return run_fd(cfg, keep_states);
}

namespace {

double trapezoid(const std::vector<DiagnosticsRecord>& rec,
                 double (*value)(const DiagnosticsRecord&)) {
  double acc = 0.0;
  for (size_t k = 1; k < rec.size(); ++k)
    acc += 0.5 * (value(rec[k - 1]) + value(rec[k])) * (rec[k].t - rec[k - 1].t);
  return acc;
}

nlohmann::json fit_to_json(const QuenchFit& f) {
  return {{"entered", f.entered}, {"t_enter", f.t_enter}, {"rate", f.rate},
          {"r2", f.r2},           {"samples", f.samples}, {"valid", f.valid}};
}

QuenchFit fit_from_json(const nlohmann::json& j) {
  QuenchFit f;
  f.entered = j.at("entered").get<bool>();
  f.t_enter = j.at("t_enter").get<double>();
  f.rate = j.at("rate").get<double>();
  f.r2 = j.at("r2").get<double>();
  f.samples = j.at("samples").get<int>();
  f.valid = j.at("valid").get<bool>();
  return f;
}

nlohmann::json record_to_json(const DiagnosticsRecord& r) {
  return {{"t", r.t},
          {"mass", r.mass},
          {"l2_rho", r.l2_rho},
          {"h1_rho", r.h1_rho},
          {"linf_rho", r.linf_rho},
          {"min_rho", r.min_rho},
          {"l2_u", r.l2_u},
          {"h1_u", r.h1_u},
          {"flux", r.flux},
          {"moment", r.moment},
          {"energy_residual", r.energy_residual},
          {"criterion_integral", r.criterion_integral}};
}

DiagnosticsRecord record_from_json(const nlohmann::json& j) {
  DiagnosticsRecord r;
  r.t = j.at("t").get<double>();
  r.mass = j.at("mass").get<double>();
  r.l2_rho = j.at("l2_rho").get<double>();
  r.h1_rho = j.at("h1_rho").get<double>();
  r.linf_rho = j.at("linf_rho").get<double>();
  r.min_rho = j.at("min_rho").get<double>();
  r.l2_u = j.at("l2_u").get<double>();
  r.h1_u = j.at("h1_u").get<double>();
  r.flux = j.at("flux").get<double>();
  r.moment = j.at("moment").get<double>();
  r.energy_residual = j.at("energy_residual").get<double>();
  r.criterion_integral = j.at("criterion_integral").get<double>();
  return r;
}

}  // namespace

std::string run_result_to_json(const RunResult& r) {
  nlohmann::json j;
  j["verdict"] = r.verdict;
  j["final"] = record_to_json(r.final_record);
  j["quench_fit"] = fit_to_json(r.fit);
  j["wall_time_s"] = r.wall_time_s;
  j["g"] = r.g;
  j["mass"] = r.mass;
  j["int_l2u2"] = r.int_l2u2;
  j["int_h1u2"] = r.int_h1u2;
  return j.dump(2);
}

RunResult run_result_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  RunResult r;
  r.verdict = j.at("verdict").get<std::string>();
  r.final_record = record_from_json(j.at("final"));
  r.fit = fit_from_json(j.at("quench_fit"));
  r.wall_time_s = j.at("wall_time_s").get<double>();
  r.g = j.at("g").get<double>();
  r.mass = j.at("mass").get<double>();
  r.int_l2u2 = j.at("int_l2u2").get<double>();
  r.int_h1u2 = j.at("int_h1u2").get<double>();
  return r;
}

RunResult run(const RunConfig& cfg, const GalerkinContext* ctx) {
  validate_config(cfg);
  namespace fs = std::filesystem;
  const fs::path out_dir(cfg.out_dir);
  fs::create_directories(out_dir);
  if (cfg.dump_fields) fs::create_directories(out_dir / "fields");

  const auto t0 = std::chrono::steady_clock::now();
  GalerkinContext local;
  if (cfg.backend == "galerkin" && !ctx) {
    local = make_galerkin_context(cfg, (out_dir / "tensors.galten").string());
    ctx = &local;
  }
  const RunOutcome oc = run_core(cfg, cfg.dump_fields, ctx);
  const auto t1 = std::chrono::steady_clock::now();

  {
    std::ofstream csv(out_dir / "diag.csv");
    if (!csv) throw std::runtime_error("cannot write " + (out_dir / "diag.csv").string());
    write_csv(csv, oc.records);
  }
  if (cfg.dump_fields) {
    char name[32];
    for (size_t k = 0; k < oc.states.size(); ++k) {
      std::snprintf(name, sizeof(name), "rho_%04zu.dump", k);
      std::ofstream os(out_dir / "fields" / name);
      dump_field(os, oc.states[k].density.rho, oc.states[k].t, "rho");
    }
  }

  RunResult res;
  res.verdict = oc.verdict;
  res.final_record = oc.records.back();
  res.fit = oc.fit;
  res.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
  res.g = cfg.g;
  res.mass = cfg.mass;
  res.int_l2u2 = trapezoid(oc.records, [](const DiagnosticsRecord& r) { return r.l2_u * r.l2_u; });
  res.int_h1u2 = trapezoid(oc.records, [](const DiagnosticsRecord& r) { return r.h1_u * r.h1_u; });
  {
    std::ofstream js(out_dir / "summary.json");
    if (!js) throw std::runtime_error("cannot write " + (out_dir / "summary.json").string());
    js << run_result_to_json(res) << '\n';
  }
  return res;
}

SweepResult sweep_g(const RunConfig& base, const std::vector<double>& g_list, int workers) {
  validate_config(base);
  if (g_list.empty()) throw std::invalid_argument("sweep_g: empty g list");
  if (workers < 1) throw std::invalid_argument("sweep_g: workers must be positive");

  GalerkinContext shared;
  const GalerkinContext* ctx = nullptr;
  if (base.backend == "galerkin") {
    shared = make_galerkin_context(base);
    ctx = &shared;
  }

  SweepResult sweep;
  sweep.runs.resize(g_list.size());
  std::atomic<size_t> next{0};
  std::vector<std::string> errors(g_list.size());
  const auto worker = [&] {
    for (size_t k = next.fetch_add(1); k < g_list.size(); k = next.fetch_add(1)) {
      try {
        RunConfig c = base;
        c.g = g_list[k];
        char tag[48];
        std::snprintf(tag, sizeof(tag), "g_%.6g", g_list[k]);
        c.out_dir = (std::filesystem::path(base.out_dir) / tag).string();
        sweep.runs[k] = run(c, ctx);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  const int nthreads = std::min<int>(workers, static_cast<int>(g_list.size()));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < nthreads; ++k) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (size_t k = 0; k < g_list.size(); ++k)
    if (!errors[k].empty())
      throw std::runtime_error("sweep_g: run at g = " + std::to_string(g_list[k]) +
                               " failed: " + errors[k]);

  std::vector<GScalingPoint> points;
  for (const RunResult& r : sweep.runs)
    points.push_back({r.g, r.int_l2u2, r.int_h1u2});
  try {
    sweep.scaling = g_scaling_report(points);
    sweep.scaling_valid = true;
  } catch (const std::invalid_argument&) {
    sweep.scaling_valid = false;
  }
  return sweep;
}

namespace {

BisectResult bisect(const RunConfig& base, double lo, double hi, int iters,
                    const char* who, bool (*hit)(const RunResult&),
                    void (*set)(RunConfig&, double)) {
  if (!(lo > 0.0) || !(hi > lo))
    throw std::invalid_argument(std::string(who) + ": need 0 < lo < hi");
  if (iters < 0) throw std::invalid_argument(std::string(who) + ": negative iteration count");

  GalerkinContext shared;
  const GalerkinContext* ctx = nullptr;
  if (base.backend == "galerkin") {
    shared = make_galerkin_context(base);
    ctx = &shared;
  }
  int evals = 0;
  const auto probe = [&](double v) {
    RunConfig c = base;
    set(c, v);
    validate_config(c);
    ++evals;
    const RunOutcome oc = run_core(c, false, ctx);
    RunResult r;
    r.verdict = oc.verdict;
    r.final_record = oc.records.back();
    r.fit = oc.fit;
    return hit(r);
  };
  if (probe(lo))
    throw std::invalid_argument(std::string(who) + ": lo endpoint already past the transition");
  if (!probe(hi))
    throw std::invalid_argument(std::string(who) + ": hi endpoint does not reach the transition");
  for (int k = 0; k < iters; ++k) {
    const double mid = std::sqrt(lo * hi);
    if (!(mid > lo && mid < hi)) break;
    if (probe(mid)) hi = mid;
    else lo = mid;
  }
  return {lo, hi, evals};
}

}  // namespace

BisectResult find_gstar(const RunConfig& base, double g_lo, double g_hi, int iters) {
  return bisect(
      base, g_lo, g_hi, iters, "find_gstar",
      [](const RunResult& r) { return r.verdict == "quenched"; },
      [](RunConfig& c, double v) { c.g = v; });
}

BisectResult find_mass_threshold(const RunConfig& base, double m_lo, double m_hi, int iters) {
  return bisect(
      base, m_lo, m_hi, iters, "find_mass_threshold",
      [](const RunResult& r) { return r.verdict == "blowup-suspected"; },
      [](RunConfig& c, double v) { c.mass = v; });
}

}  // namespace ksb
