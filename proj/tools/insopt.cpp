// insopt: optimal boundary insulation lab for the Robin eigenvalue
// problem. Subcommands: solve, sweep, reference, gamma, mesh-info.
// Options may come from a flat key=value config file (--config); command
// line flags win over the file.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "insopt/runner.hpp"

namespace {

struct FlagSet {
  std::string config_path;
  std::optional<std::string> domain;
  std::optional<double> beta;
  std::optional<double> mass;
  std::optional<double> mesh_h;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> beta_grid;
  std::optional<std::string> m_grid;
  std::optional<double> h_const;
  std::optional<std::string> eps_list;
};

void add_common_flags(CLI::App* cmd, FlagSet& f) {
  cmd->add_option("--config", f.config_path, "flat key=value config file; flags override it");
  cmd->add_option("--domain", f.domain, "domain: disk:R, regular_polygon:N:R or rectangle:W:H");
  cmd->add_option("--beta", f.beta, "convection coefficient beta > 0");
  cmd->add_option("--mass", f.mass, "insulation mass m >= 0");
  cmd->add_option("--mesh-h", f.mesh_h, "target mesh diameter");
  cmd->add_option("--tol", f.tol, "stopping tolerance of the alternating scheme");
  cmd->add_option("--max-iter", f.max_iter, "alternation cap per start");
  cmd->add_option("--jobs", f.jobs, "worker threads for sweeps");
  cmd->add_option("--seed", f.seed, "seed recorded in outputs");
  cmd->add_option("--out", f.out, "output path prefix (default: stdout)");
  cmd->add_option("--beta-grid", f.beta_grid, "comma-separated beta values for sweep");
  cmd->add_option("--m-grid", f.m_grid, "comma-separated mass values for sweep");
  cmd->add_option("--h-const", f.h_const, "uniform profile height for gamma");
  cmd->add_option("--eps-list", f.eps_list, "comma-separated decreasing layer scales for gamma");
}

insopt::RunConfig build_config(const FlagSet& f) {
  insopt::RunConfig cfg;
  if (!f.config_path.empty()) insopt::load_config_file(cfg, f.config_path);
  if (f.domain) cfg.domain = *f.domain;
  if (f.beta) cfg.beta = *f.beta;
  if (f.mass) cfg.mass = *f.mass;
  if (f.mesh_h) cfg.mesh_h = *f.mesh_h;
  if (f.tol) cfg.tol = *f.tol;
  if (f.max_iter) cfg.max_iter = *f.max_iter;
  if (f.jobs) cfg.jobs = *f.jobs;
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.out = *f.out;
  if (f.beta_grid) insopt::apply_config_entry(cfg, "beta_grid", *f.beta_grid);
  if (f.m_grid) insopt::apply_config_entry(cfg, "m_grid", *f.m_grid);
  if (f.h_const) cfg.h_const = *f.h_const;
  if (f.eps_list) insopt::apply_config_entry(cfg, "eps_list", *f.eps_list);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal boundary insulation lab for the Robin eigenvalue problem"};
  app.require_subcommand(1);

  FlagSet flags;
  std::string write_mesh_path;
  CLI::App* solve = app.add_subcommand("solve", "minimize lambda over profiles of mass m");
  CLI::App* sweep = app.add_subcommand("sweep", "phase diagram over a (beta, m) grid");
  CLI::App* reference = app.add_subcommand("reference", "FEM vs oracle eigenvalue table");
  CLI::App* gamma = app.add_subcommand("gamma", "thick-layer eigenvalue sweep against its limit");
  CLI::App* mesh_info = app.add_subcommand("mesh-info", "mesh counts, perimeter and area");
  for (CLI::App* cmd : {solve, sweep, reference, gamma, mesh_info}) add_common_flags(cmd, flags);
  mesh_info->add_option("--write-mesh", write_mesh_path, "dump the mesh in the text format");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const insopt::RunConfig cfg = build_config(flags);
    if (solve->parsed()) return insopt::run_solve(cfg);
    if (sweep->parsed()) return insopt::run_sweep(cfg);
    if (reference->parsed()) return insopt::run_reference(cfg);
    if (gamma->parsed()) return insopt::run_gamma(cfg);
    if (mesh_info->parsed()) return insopt::run_mesh_info(cfg, write_mesh_path);
    std::cerr << "insopt: no subcommand given\n";
    return 1;
  } catch (const insopt::ConfigError& e) {
    std::cerr << "insopt: " << e.what() << "\n";
    return 1;
  } catch (const insopt::MeshError& e) {
    std::cerr << "insopt: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "insopt: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "insopt: numerical failure: " << e.what() << "\n";
    return 2;
  }
}
