// Experiment drivers behind the command-line tool: flat key=value config
// with flag overrides, deterministic CSV/JSON writers (17 significant
// digits, '.' decimal, LF endings), the (beta, m) sweep with its per-mesh
// radiality tolerance, and the reference/gamma tables.
#pragma once

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "insopt/insulation.hpp"
#include "insopt/layered.hpp"
#include "insopt/mesh.hpp"
#include "insopt/spectra.hpp"

namespace insopt {

inline constexpr int kSchemaVersion = 1;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Locale-independent "%.17g"-style formatting.
inline std::string fmt_g17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[48];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::string join_list(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    s += fmt_g17(xs[i]);
  }
  return s;
}

struct RunConfig {
  std::string domain = "disk:1";
  double beta = 1.0;
  double mass = 1.0;
  double mesh_h = 0.1;
  double tol = 1e-10;
  int max_iter = 500;
  int jobs = 1;
  std::uint64_t seed = 0;
  std::string out;  // output path prefix; empty writes to stdout
  std::vector<double> beta_grid;
  std::vector<double> m_grid;
  double h_const = 1.0;
  std::vector<double> eps_list = {0.1, 0.05, 0.025, 0.0125, 0.00625};

  void check() const {
    if (!(beta > 0.0)) throw ConfigError("config: beta must be positive");
    if (mass < 0.0) throw ConfigError("config: mass must be nonnegative");
    if (!(mesh_h > 0.0)) throw ConfigError("config: mesh_h must be positive");
    if (!(tol > 0.0)) throw ConfigError("config: tol must be positive");
    if (max_iter < 1) throw ConfigError("config: max_iter must be at least 1");
    if (jobs < 1) throw ConfigError("config: jobs must be at least 1");
  }

  // canonical echo, fixed key order
  std::string echo() const {
    std::ostringstream os;
    os << "beta=" << fmt_g17(beta) << " beta_grid=" << join_list(beta_grid) << " domain=" << domain
       << " eps_list=" << join_list(eps_list) << " h_const=" << fmt_g17(h_const) << " jobs=" << jobs
       << " m_grid=" << join_list(m_grid) << " mass=" << fmt_g17(mass) << " max_iter=" << max_iter
       << " mesh_h=" << fmt_g17(mesh_h) << " seed=" << seed << " tol=" << fmt_g17(tol);
    return os.str();
  }

  nlohmann::ordered_json echo_json() const {
    nlohmann::ordered_json j;
    j["beta"] = beta;
    j["beta_grid"] = beta_grid;
    j["domain"] = domain;
    j["eps_list"] = eps_list;
    j["h_const"] = h_const;
    j["jobs"] = jobs;
    j["m_grid"] = m_grid;
    j["mass"] = mass;
    j["max_iter"] = max_iter;
    j["mesh_h"] = mesh_h;
    j["seed"] = seed;
    j["tol"] = tol;
    return j;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number '" + s + "' for key '" + key + "'");
  }
}

inline std::vector<double> parse_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(parse_double(cur, key));
  }
  return out;
}

}  // namespace detail

inline void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
  using detail::parse_double;
  using detail::parse_list;
  if (key == "domain")
    cfg.domain = value;
  else if (key == "beta")
    cfg.beta = parse_double(value, key);
  else if (key == "mass")
    cfg.mass = parse_double(value, key);
  else if (key == "mesh_h")
    cfg.mesh_h = parse_double(value, key);
  else if (key == "tol")
    cfg.tol = parse_double(value, key);
  else if (key == "max_iter")
    cfg.max_iter = static_cast<int>(parse_double(value, key));
  else if (key == "jobs")
    cfg.jobs = static_cast<int>(parse_double(value, key));
  else if (key == "seed")
    cfg.seed = static_cast<std::uint64_t>(parse_double(value, key));
  else if (key == "out")
    cfg.out = value;
  else if (key == "beta_grid")
    cfg.beta_grid = parse_list(value, key);
  else if (key == "m_grid")
    cfg.m_grid = parse_list(value, key);
  else if (key == "h_const")
    cfg.h_const = parse_double(value, key);
  else if (key == "eps_list")
    cfg.eps_list = parse_list(value, key);
  else
    throw ConfigError("config: unknown key '" + key + "'");
}

inline void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: missing '=' at " + path + ":" + std::to_string(lineno));
    apply_config_entry(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
}

// --- output ---------------------------------------------------------------

namespace detail {

inline void csv_preamble(std::ostream& os, const RunConfig& cfg) {
  os << "# insopt csv schema " << kSchemaVersion << "\n";
  os << "# config: " << cfg.echo() << "\n";
}

struct OutputTarget {
  std::ofstream file;
  std::ostream* os = nullptr;

  OutputTarget(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      os = &fallback;
    } else {
      file.open(path, std::ios::binary);  // binary keeps LF endings everywhere
      if (!file) throw ConfigError("cannot open output file '" + path + "'");
      os = &file;
    }
  }
};

}  // namespace detail

inline nlohmann::ordered_json solve_result_json(const RunConfig& cfg, const SolveResult& res) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = cfg.echo_json();
  j["domain"] = cfg.domain;
  j["mesh_h"] = cfg.mesh_h;
  j["beta"] = cfg.beta;
  j["m"] = cfg.mass;
  j["lambda_m"] = res.lambda_m;
  j["c_u"] = res.c_u;
  j["radiality"] = res.radiality;
  j["iterations"] = res.iterations;
  j["converged"] = res.converged;
  j["restart_gap"] = res.restart_gap;
  j["multistart_flag"] = res.multistart_flag;
  j["near_degenerate"] = res.near_degenerate;
  return j;
}

// Boundary profile rows "arclength,h,trace_u" at every node of the
// profile partition (each vertex once; breakpoints included).
inline void write_profile_csv(std::ostream& os, const RunConfig& cfg, const TriMesh& mesh,
                              const SolveResult& res) {
  detail::csv_preamble(os, cfg);
  os << "arclength,h,trace_u\n";
  const TraceField tr = TraceField::from_nodal(mesh, res.u);
  double arc = 0.0;
  for (std::size_t i = 0; i < res.h.n_edges(); ++i) {
    const auto& prof = res.h.edges()[i];
    const auto& te = tr.edges[i];
    for (const auto& node : prof.nodes) {
      if (node.t >= 1.0) break;  // the next edge emits this point
      const double v = te.va + (te.vb - te.va) * node.t;
      os << fmt_g17(arc + node.t * prof.len) << ',' << fmt_g17(node.value) << ',' << fmt_g17(v)
         << "\n";
    }
    arc += prof.len;
  }
}

// exit codes: 0 converged, 2 not converged (outputs still written)
inline int run_solve(const RunConfig& cfg, std::ostream& stdout_stream = std::cout) {
  cfg.check();
  const DomainSpec spec = DomainSpec::parse(cfg.domain, cfg.mesh_h);
  const TriMesh mesh = build_mesh(spec);
  const SolveResult res = minimize_lambda_m(mesh, cfg.beta, cfg.mass, cfg.tol, cfg.max_iter);

  const nlohmann::ordered_json j = solve_result_json(cfg, res);
  if (cfg.out.empty()) {
    stdout_stream << j.dump(2) << "\n";
  } else {
    detail::OutputTarget json_out(cfg.out + ".json", stdout_stream);
    *json_out.os << j.dump(2) << "\n";
    detail::OutputTarget csv_out(cfg.out + "_profile.csv", stdout_stream);
    write_profile_csv(*csv_out.os, cfg, mesh, res);
  }
  return res.converged ? 0 : 2;
}

// Radiality tolerance calibrated per mesh and beta: twice the indicator of
// the (radial) pure-Robin eigenfunction, plus a floor. Mesh anisotropy
// pollutes the indicator, so a known-radial solve sets the scale.
inline double radiality_tolerance(const TriMesh& mesh, const SparseSymMatrix& k,
                                  const SparseSymMatrix& m, double beta) {
  const std::vector<double> w(mesh.boundary_edges.size(), beta);
  const SparseSymMatrix b = assemble_boundary_mass(mesh, w);
  const EigenPair ep = smallest_eigenpair(SparseSymMatrix::weighted_sum(1.0, k, 1.0, b), m);
  return 2.0 * radiality_indicator(mesh, ep.u) + 1e-12;
}

inline int run_sweep(const RunConfig& cfg, std::ostream& stdout_stream = std::cout) {
  cfg.check();
  const std::vector<double> betas = cfg.beta_grid.empty() ? std::vector<double>{cfg.beta} : cfg.beta_grid;
  const std::vector<double> masses = cfg.m_grid.empty() ? std::vector<double>{cfg.mass} : cfg.m_grid;
  if (betas.empty() || masses.empty()) throw ConfigError("sweep: empty grid");

  const DomainSpec spec = DomainSpec::parse(cfg.domain, cfg.mesh_h);
  const TriMesh mesh = build_mesh(spec);
  const SparseSymMatrix k = assemble_stiffness(mesh);
  const SparseSymMatrix m = assemble_mass(mesh);

  std::map<double, double> tau;  // per-beta radiality tolerance
  for (double b : betas)
    if (!tau.count(b)) tau.emplace(b, radiality_tolerance(mesh, k, m, b));

  struct Row {
    double beta = 0.0, mass = 0.0, lambda = 0.0, radiality = 0.0;
    bool radial = false, failed = false;
  };
  std::vector<Row> rows(betas.size() * masses.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= rows.size()) return;
      Row& row = rows[idx];
      row.beta = betas[idx / masses.size()];
      row.mass = masses[idx % masses.size()];
      try {
        const SolveResult res = minimize_lambda_m(mesh, row.beta, row.mass, cfg.tol, cfg.max_iter);
        row.lambda = res.lambda_m;
        row.radiality = res.radiality;
        row.radial = res.radiality < tau.at(row.beta);
        row.failed = !res.converged;
      } catch (const std::exception&) {
        row.lambda = std::nan("");
        row.radiality = std::nan("");
        row.failed = true;
      }
    }
  };
  if (cfg.jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < cfg.jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  detail::OutputTarget out(cfg.out.empty() ? "" : cfg.out + ".csv", stdout_stream);
  detail::csv_preamble(*out.os, cfg);
  *out.os << "beta,m,lambda_m,radiality,is_radial\n";
  bool any_failed = false;
  for (const auto& row : rows) {
    any_failed = any_failed || row.failed;
    *out.os << fmt_g17(row.beta) << ',' << fmt_g17(row.mass) << ',' << fmt_g17(row.lambda) << ','
            << fmt_g17(row.radiality) << ','
            << (row.failed ? "failed" : (row.radial ? "1" : "0")) << "\n";
  }
  return any_failed ? 2 : 0;
}

inline int run_reference(const RunConfig& cfg, std::ostream& stdout_stream = std::cout) {
  cfg.check();
  const DomainSpec spec = DomainSpec::parse(cfg.domain, cfg.mesh_h);
  const TriMesh mesh = build_mesh(spec);
  const bool disk = spec.kind == DomainSpec::Kind::Disk;

  struct Entry {
    std::string name;
    double fem, oracle;
  };
  std::vector<Entry> entries;
  const double nan = std::nan("");
  entries.push_back({"lambda_D", fem_dirichlet_lambda(mesh),
                     disk ? disk_dirichlet_oracle(spec.radius).lambda : nan});
  entries.push_back(
      {"lambda_N", fem_neumann_lambda(mesh), disk ? disk_neumann_oracle(spec.radius).lambda : nan});
  entries.push_back({"lambda_R", fem_robin_lambda(mesh, cfg.beta),
                     disk ? disk_robin_oracle(cfg.beta, spec.radius).lambda : nan});
  entries.push_back({"beta_star", beta_star_fem(mesh, 1e-7), disk ? beta_star_disk(spec.radius) : nan});

  detail::OutputTarget out(cfg.out.empty() ? "" : cfg.out + ".csv", stdout_stream);
  detail::csv_preamble(*out.os, cfg);
  *out.os << "quantity,fem,oracle,rel_gap\n";
  for (const auto& e : entries) {
    const double gap = std::isnan(e.oracle) ? nan : std::abs(e.fem - e.oracle) / std::abs(e.oracle);
    *out.os << e.name << ',' << fmt_g17(e.fem) << ',' << fmt_g17(e.oracle) << ',' << fmt_g17(gap)
            << "\n";
  }
  return 0;
}

inline int run_gamma(const RunConfig& cfg, std::ostream& stdout_stream = std::cout) {
  cfg.check();
  const DomainSpec spec = DomainSpec::parse(cfg.domain, cfg.mesh_h);
  if (spec.kind != DomainSpec::Kind::Disk) throw ConfigError("gamma: only disk domains are supported");
  const auto rows = gamma_limit_report(cfg.beta, cfg.h_const, cfg.eps_list, spec.radius);

  detail::OutputTarget out(cfg.out.empty() ? "" : cfg.out + ".csv", stdout_stream);
  detail::csv_preamble(*out.os, cfg);
  *out.os << "eps,lambda_eps,gap\n";
  for (const auto& r : rows)
    *out.os << fmt_g17(r.eps) << ',' << fmt_g17(r.lambda_eps) << ',' << fmt_g17(r.gap) << "\n";
  return 0;
}

inline int run_mesh_info(const RunConfig& cfg, const std::string& write_mesh_path,
                         std::ostream& stdout_stream = std::cout) {
  cfg.check();
  const DomainSpec spec = DomainSpec::parse(cfg.domain, cfg.mesh_h);
  const TriMesh mesh = build_mesh(spec);
  detail::OutputTarget out(cfg.out.empty() ? "" : cfg.out + ".csv", stdout_stream);
  detail::csv_preamble(*out.os, cfg);
  *out.os << "nv,nt,nb,perimeter,area\n";
  *out.os << mesh.n_vertices() << ',' << mesh.n_triangles() << ',' << mesh.n_boundary() << ','
          << fmt_g17(boundary_measure(mesh)) << ',' << fmt_g17(mesh_area(mesh)) << "\n";
  if (!write_mesh_path.empty()) {
    std::ofstream f(write_mesh_path, std::ios::binary);
    if (!f) throw ConfigError("mesh-info: cannot open '" + write_mesh_path + "'");
    write_mesh(f, mesh);
  }
  return 0;
}

}  // namespace insopt
