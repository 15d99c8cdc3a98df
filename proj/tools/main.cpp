/// @file main.cpp
/// @brief Command-line front end: run, sweep, find-gstar, find-mass, compare,
///        moser.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ksb/diagnostics.hpp"
#include "ksb/galerkin.hpp"
#include "ksb/harness.hpp"

namespace {

struct Overrides {
  std::string config_path;
  double g = 0.0;
  double t_end = 0.0;
  double dt_target = 0.0;
  double cfl = 0.0;
  double mass = 0.0;
  double sigma = 0.0;
  double eps_quench = 0.0;
  double linf_ceiling = 0.0;
  int grid = 0;
  int n_modes = 0;
  int m_modes = 0;
  std::string backend;
  std::string out;
  bool dump_fields = false;
};

// Flags apply on top of the config file only when actually given.
void add_common_options(CLI::App* app, Overrides& ov) {
  app->add_option("--config", ov.config_path, "Config file (flat TOML)");
  app->add_option("--g", ov.g, "Buoyancy coupling strength");
  app->add_option("--t-end", ov.t_end, "Final time");
  app->add_option("--dt-target", ov.dt_target, "Target macro step");
  app->add_option("--cfl", ov.cfl, "Advective CFL number");
  app->add_option("--mass", ov.mass, "Initial total mass");
  app->add_option("--sigma", ov.sigma, "Initial bump width");
  app->add_option("--eps-quench", ov.eps_quench, "Quench entry threshold on |rho|_2^2");
  app->add_option("--linf-ceiling", ov.linf_ceiling, "Density ceiling for the blowup guard");
  app->add_option("--grid", ov.grid, "Interior nodes per axis (square grid)");
  app->add_option("--n-modes", ov.n_modes, "Laplacian modes (galerkin backend)");
  app->add_option("--m-modes", ov.m_modes, "Stokes modes (galerkin backend)");
  app->add_option("--backend", ov.backend, "fd or galerkin");
  app->add_option("--out", ov.out, "Output directory");
  app->add_flag("--dump-fields", ov.dump_fields, "Write density snapshots under out/fields");
}

ksb::RunConfig build_config(const CLI::App* app, const Overrides& ov) {
  ksb::RunConfig cfg;
  if (app->count("--config") > 0) cfg = ksb::load_config(ov.config_path);
  if (app->count("--g") > 0) cfg.g = ov.g;
  if (app->count("--t-end") > 0) cfg.t_end = ov.t_end;
  if (app->count("--dt-target") > 0) cfg.dt_target = ov.dt_target;
  if (app->count("--cfl") > 0) cfg.cfl = ov.cfl;
  if (app->count("--mass") > 0) cfg.mass = ov.mass;
  if (app->count("--sigma") > 0) cfg.sigma = ov.sigma;
  if (app->count("--eps-quench") > 0) cfg.eps_quench = ov.eps_quench;
  if (app->count("--linf-ceiling") > 0) cfg.linf_ceiling = ov.linf_ceiling;
  if (app->count("--grid") > 0) cfg.nx = cfg.ny = ov.grid;
  if (app->count("--n-modes") > 0) cfg.n_modes = ov.n_modes;
  if (app->count("--m-modes") > 0) cfg.m_modes = ov.m_modes;
  if (app->count("--backend") > 0) cfg.backend = ov.backend;
  if (app->count("--out") > 0) cfg.out_dir = ov.out;
  if (app->count("--dump-fields") > 0) cfg.dump_fields = ov.dump_fields;
  return cfg;
}

void print_result(const ksb::RunResult& r) {
  std::printf("verdict: %s\n", r.verdict.c_str());
  std::printf("t_final: %.6g  mass: %.6g  |rho|_2: %.6g  |rho|_inf: %.6g\n",
              r.final_record.t, r.final_record.mass, r.final_record.l2_rho,
              r.final_record.linf_rho);
  if (r.fit.entered)
    std::printf("quench fit: rate %.4g  r2 %.6g  samples %d  valid %s\n", r.fit.rate,
                r.fit.r2, r.fit.samples, r.fit.valid ? "yes" : "no");
  std::printf("wall time: %.2f s\n", r.wall_time_s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chemotaxis in a buoyancy-driven Stokes flow"};
  app.require_subcommand(1);

  Overrides ov;
  std::vector<double> cli_g_list;
  int workers = 1;
  double lo = 0.0, hi = 0.0;
  int iters = 8;
  int moser_n = 10, moser_d = 2;

  CLI::App* c_run = app.add_subcommand("run", "Single experiment");
  add_common_options(c_run, ov);

  CLI::App* c_sweep = app.add_subcommand("sweep", "Run a list of g values");
  add_common_options(c_sweep, ov);
  c_sweep->add_option("--g-list", cli_g_list, "g values (comma separated)")->delimiter(',');
  c_sweep->add_option("--workers", workers, "Worker threads");

  CLI::App* c_gstar = app.add_subcommand("find-gstar", "Bisect the quenching threshold in g");
  add_common_options(c_gstar, ov);
  c_gstar->add_option("--lo", lo, "Bracket low end")->required();
  c_gstar->add_option("--hi", hi, "Bracket high end")->required();
  c_gstar->add_option("--iters", iters, "Bisection iterations");

  CLI::App* c_mass = app.add_subcommand("find-mass", "Bisect the blowup threshold in mass");
  add_common_options(c_mass, ov);
  c_mass->add_option("--lo", lo, "Bracket low end")->required();
  c_mass->add_option("--hi", hi, "Bracket high end")->required();
  c_mass->add_option("--iters", iters, "Bisection iterations");

  CLI::App* c_cmp = app.add_subcommand("compare", "Cross-validate fd against galerkin");
  add_common_options(c_cmp, ov);

  CLI::App* c_moser = app.add_subcommand("moser", "Evaluate the iteration constant");
  c_moser->add_option("--n", moser_n, "Partial-product length");
  c_moser->add_option("--d", moser_d, "Dimension (2 or 3)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_run->parsed()) {
      print_result(ksb::run(build_config(c_run, ov)));
    } else if (c_sweep->parsed()) {
      ksb::RunConfig base = build_config(c_sweep, ov);
      std::vector<double> gs = cli_g_list.empty() ? base.g_list : cli_g_list;
      if (gs.empty()) {
        std::fprintf(stderr, "sweep: no g values (use --g-list or g_list in the config)\n");
        return 2;
      }
      const ksb::SweepResult sw = ksb::sweep_g(base, gs, workers);
      for (size_t k = 0; k < gs.size(); ++k)
        std::printf("g = %-10.6g verdict: %-17s int |u|^2 dt: %.6g\n", gs[k],
                    sw.runs[k].verdict.c_str(), sw.runs[k].int_l2u2);
      if (sw.scaling_valid)
        std::printf("scaling slopes: d log int|u|^2 / d log g = %.4f, gradient %.4f (%d points)\n",
                    sw.scaling.slope_l2, sw.scaling.slope_h1, sw.scaling.points_used);
      else
        std::printf("scaling slopes: not fit (need >= 4 positive points over two decades)\n");
    } else if (c_gstar->parsed()) {
      const ksb::BisectResult b = ksb::find_gstar(build_config(c_gstar, ov), lo, hi, iters);
      std::printf("g* bracket: (%.8g, %.8g] after %d runs\n", b.lo, b.hi, b.evaluations);
    } else if (c_mass->parsed()) {
      const ksb::BisectResult b =
          ksb::find_mass_threshold(build_config(c_mass, ov), lo, hi, iters);
      std::printf("mass threshold bracket: (%.8g, %.8g] after %d runs\n", b.lo, b.hi,
                  b.evaluations);
    } else if (c_cmp->parsed()) {
      const ksb::CompareReport rep = ksb::compare_backends(build_config(c_cmp, ov));
      std::printf("t = %.6g  rel L2 rho: %.6g  rel L2 u: %.6g  verdict: %s\n", rep.t,
                  rep.rel_l2_rho, rep.rel_l2_u, rep.verdict.c_str());
    } else if (c_moser->parsed()) {
      std::printf("product(n=%d, d=%d) = %.17g\nclosed form      = %.17g\n", moser_n,
                  moser_d, ksb::moser_partial_product(moser_n, moser_d),
                  ksb::moser_closed_form(moser_n, moser_d));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
