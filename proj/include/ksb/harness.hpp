#pragma once

/// @file harness.hpp
/// @brief Experiment driver: config parsing, single runs with on-disk outputs,
///        parameter sweeps, and bisection searches over g and mass.

#include <string>
#include <vector>

#include "ksb/chemotaxis.hpp"
#include "ksb/config.hpp"
#include "ksb/diagnostics.hpp"
#include "ksb/galerkin.hpp"

namespace ksb {

/// Parses a flat key = value config (a TOML subset: strings, booleans, numbers
/// and number arrays; # comments). Sections are rejected. Bad input raises
/// std::invalid_argument with a <name>:<line>: prefix. The result is not
/// validated here.
RunConfig parse_config_text(const std::string& text, const std::string& name = "config");
RunConfig load_config(const std::string& path);

/// Basis and tensors for the galerkin backend, reusable across runs that share
/// a grid and mode count (g and the initial data do not enter the assembly).
struct GalerkinContext {
  GalerkinBasis basis;
  CoefficientTensors tensors;
};

/// Builds the context for cfg's galerkin grid. When cache_path is nonempty the
/// tensors are loaded from it if compatible, and written to it otherwise.
GalerkinContext make_galerkin_context(const RunConfig& cfg,
                                      const std::string& cache_path = "");

struct RunOutcome {
  std::string verdict;  // quenched | blowup-suspected | inconclusive
  std::vector<DiagnosticsRecord> records;
  QuenchFit fit;
  std::vector<CoupledState> states;  // filled only when requested
};

/// Executes one experiment without touching the filesystem. States are kept at
/// snapshot cadence when keep_states is set. A prebuilt context may be passed
/// for the galerkin backend; fd runs ignore it.
RunOutcome run_core(const RunConfig& cfg, bool keep_states = false,
                    const GalerkinContext* ctx = nullptr);

struct RunResult {
  std::string verdict;
  DiagnosticsRecord final_record;
  QuenchFit fit;
  double wall_time_s = 0.0;
  double g = 0.0;
  double mass = 0.0;
  double int_l2u2 = 0.0;  // trapezoid of l2_u^2 over the snapshots
  double int_h1u2 = 0.0;
};

std::string run_result_to_json(const RunResult& r);
RunResult run_result_from_json(const std::string& text);

/// run_core plus outputs under cfg.out_dir: diag.csv, summary.json, optional
/// fields/*.dump, and tensors.galten for the galerkin backend.
RunResult run(const RunConfig& cfg, const GalerkinContext* ctx = nullptr);

struct SweepResult {
  std::vector<RunResult> runs;  // same order as g_list
  GScalingReport scaling;
  bool scaling_valid = false;
};

/// Runs base at each g in g_list (out dirs <out>/g_<value>), optionally on a
/// thread pool, and fits the velocity-scaling slopes when the points allow it.
SweepResult sweep_g(const RunConfig& base, const std::vector<double>& g_list,
                    int workers = 1);

struct BisectResult {
  double lo = 0.0;  // largest value seen on the lo side of the transition
  double hi = 0.0;  // smallest value seen on the hi side
  int evaluations = 0;
};

/// Geometric bisection for the smallest g whose run quenches. Requires a
/// straddling bracket: lo must not quench and hi must. iters = 0 only
/// validates the endpoints.
BisectResult find_gstar(const RunConfig& base, double g_lo, double g_hi, int iters);

/// Geometric bisection for the smallest mass whose run is blowup-suspected.
/// lo must stay regular and hi must trigger.
BisectResult find_mass_threshold(const RunConfig& base, double m_lo, double m_hi,
                                 int iters);

}  // namespace ksb
