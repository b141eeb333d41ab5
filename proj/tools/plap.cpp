// Command-line front end: grid generation, saddle-point flow runs, spectral
// sweeps, eigenpair verification, and finite-difference check suites.
//
// Exit codes: 0 success, 1 verification or runtime failure, 2 non-convergence,
// 64 usage error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "plap/analysis.hpp"
#include "plap/energy.hpp"
#include "plap/flow.hpp"
#include "plap/graph.hpp"
#include "plap/operators.hpp"

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "plap 0.2.0";
constexpr int kExitVerifyFail = 1;
constexpr int kExitNoConverge = 2;
constexpr int kExitUsage = 64;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw plap::Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw plap::Error("cannot write " + path.string());
  out << content;
}

plap::Graph load_graph_file(const std::string& path) {
  return plap::Graph::from_json(read_file(path));
}

void warn_about_graph(const plap::Graph& g) {
  if (g.boundary().empty())
    std::cerr << "warning: graph has empty boundary; first-eigenpair guarantees do not apply\n";
  if (!g.is_connected())
    std::cerr << "warning: interior-induced subgraph is not connected\n";
}

std::string json_opt(const std::optional<int>& v) {
  return v ? std::to_string(*v) : "null";
}

std::string report_json(const plap::EigenReport& r, const plap::FlowConfig& cfg) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"lambda_p\": " << fmt17(r.lambda_p) << ",\n";
  os << "  \"lambda_lin\": " << fmt17(r.lambda_lin) << ",\n";
  os << "  \"residual\": " << (std::isfinite(r.residual) ? fmt17(r.residual) : "null") << ",\n";
  os << "  \"linear_index\": " << json_opt(r.linear_index) << ",\n";
  os << "  \"multiplicity\": " << json_opt(r.multiplicity) << ",\n";
  os << "  \"morse_R\": " << json_opt(r.morse_R) << ",\n";
  os << "  \"morse_negR\": " << json_opt(r.morse_negR) << ",\n";
  os << "  \"converged\": " << (r.converged ? "true" : "false") << ",\n";
  os << "  \"iters\": " << r.iters << ",\n";
  os << "  \"osc_count\": " << r.osc_count << ",\n";
  os << "  \"p\": " << fmt17(cfg.p) << ",\n";
  os << "  \"k\": " << cfg.k << ",\n";
  os << "  \"tau\": " << fmt17(cfg.tau) << ",\n";
  os << "  \"delta\": " << fmt17(cfg.delta) << "\n";
  os << "}\n";
  return os.str();
}

std::string trace_csv(const plap::FlowTrace& trace) {
  std::ostringstream os;
  os << "iter,lambda,err_mu,err_nu,err,residual\n";
  for (const plap::TraceRow& row : trace.rows) {
    os << row.iter << ',' << fmt17(row.lambda) << ',' << fmt17(row.err_mu) << ','
       << fmt17(row.err_nu) << ',' << fmt17(row.err) << ',' << fmt17(row.residual) << '\n';
  }
  return os.str();
}

std::string eigenfunction_csv(const plap::Graph& g, const plap::NodeFunction& f) {
  std::ostringstream os;
  os << "node_id,value\n";
  for (int i = 0; i < g.num_interior(); ++i)
    os << g.interior()[i] << ',' << fmt17(f[i]) << '\n';
  return os.str();
}

plap::NodeFunction read_eigenfunction_csv(const plap::Graph& g, const std::string& text) {
  plap::NodeFunction f = plap::NodeFunction::Zero(g.num_interior());
  std::vector<char> seen(g.num_interior(), 0);
  std::istringstream in(text);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "node_id,value") continue;
    std::istringstream ls(line);
    long node = -1;
    double value = 0.0;
    char comma = 0;
    if (!(ls >> node >> comma >> value) || comma != ',')
      throw plap::Error("eigenfunction file: malformed line '" + line + "'");
    if (node < 0 || node >= g.num_nodes() || g.is_boundary(static_cast<int>(node)))
      throw plap::Error("eigenfunction file: node " + std::to_string(node) +
                        " is not an interior node");
    const int idx = g.interior_index(static_cast<int>(node));
    if (seen[idx]) throw plap::Error("eigenfunction file: duplicate node " + std::to_string(node));
    seen[idx] = 1;
    f[idx] = value;
    ++rows;
  }
  if (rows != g.num_interior())
    throw plap::Error("eigenfunction file: " + std::to_string(rows) + " values for " +
                      std::to_string(g.num_interior()) + " interior nodes");
  return f;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const std::string& graph_source, const plap::FlowConfig& cfg,
                    double wall_seconds, const std::vector<std::string>& outputs) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"command\": " << quote(command) << ",\n";
  os << "  \"graph\": " << quote(graph_source) << ",\n";
  os << "  \"config\": {\"p\": " << fmt17(cfg.p) << ", \"k\": " << cfg.k
     << ", \"tau\": " << fmt17(cfg.tau) << ", \"delta\": " << fmt17(cfg.delta)
     << ", \"tol\": " << fmt17(cfg.tol) << ", \"max_iter\": " << cfg.max_iter
     << ", \"init\": " << (cfg.init == plap::WeightInit::Ones ? "\"ones\"" : "\"random\"")
     << ", \"seed\": " << cfg.seed << ", \"record_every\": " << cfg.record_every << "},\n";
  os << "  \"version\": " << quote(kVersion) << ",\n";
  os << "  \"wall_seconds\": " << fmt17(wall_seconds) << ",\n";
  os << "  \"outputs\": [";
  for (std::size_t i = 0; i < outputs.size(); ++i)
    os << (i ? ", " : "") << quote(outputs[i]);
  os << "]\n}\n";
  write_file(dir / "manifest.json", os.str());
}

struct SolveArgs {
  std::string graph_path;
  plap::FlowConfig cfg;
  std::string init = "ones";
  std::string out_dir;
};

// Runs one flow and writes report.json, trace.csv, eigenfunction.csv into dir.
plap::EigenReport solve_into(const plap::Graph& g, const plap::FlowConfig& cfg,
                             const fs::path& dir) {
  fs::create_directories(dir);
  auto [report, trace] = plap::run_flow(g, cfg);
  write_file(dir / "report.json", report_json(report, cfg));
  write_file(dir / "trace.csv", trace_csv(trace));
  write_file(dir / "eigenfunction.csv", eigenfunction_csv(g, report.f));
  return report;
}

int cmd_solve(const SolveArgs& args) {
  const auto t0 = std::chrono::steady_clock::now();
  plap::FlowConfig cfg = args.cfg;
  cfg.init = args.init == "random" ? plap::WeightInit::RandomPositive : plap::WeightInit::Ones;
  const plap::Graph g = load_graph_file(args.graph_path);
  warn_about_graph(g);
  cfg.validate(g);

  const fs::path dir(args.out_dir);
  const plap::EigenReport report = solve_into(g, cfg, dir);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(dir, "solve", args.graph_path, cfg, wall,
                 {"report.json", "trace.csv", "eigenfunction.csv"});

  std::cout << "lambda_p = " << fmt17(report.lambda_p) << "  residual = " << fmt17(report.residual)
            << "  iters = " << report.iters << (report.converged ? "" : "  (not converged)")
            << "\n";
  return report.converged ? 0 : kExitNoConverge;
}

int cmd_sweep(const SolveArgs& args, int kmax, int jobs) {
  const auto t0 = std::chrono::steady_clock::now();
  const plap::Graph g = load_graph_file(args.graph_path);
  warn_about_graph(g);

  plap::FlowConfig base = args.cfg;
  base.init = args.init == "random" ? plap::WeightInit::RandomPositive : plap::WeightInit::Ones;
  base.k = 1;
  base.validate(g);
  if (kmax < 1 || kmax > g.num_interior())
    throw plap::Error("sweep: kmax outside [1, " + std::to_string(g.num_interior()) + "]");

  const fs::path dir(args.out_dir);
  fs::create_directories(dir);

  struct Row {
    plap::EigenReport report;
    std::string error;
  };
  std::vector<Row> rows(kmax);
  std::mutex err_mutex;

  std::atomic<int> next_k{1};
  auto worker = [&] {
    for (;;) {
      const int k = next_k.fetch_add(1);
      if (k > kmax) return;
      plap::FlowConfig cfg = base;
      cfg.k = k;
      try {
        rows[k - 1].report = solve_into(g, cfg, dir / ("k" + std::to_string(k)));
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        rows[k - 1].error = e.what();
      }
    }
  };
  jobs = std::max(1, std::min(jobs, kmax));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream os;
  os << "k,lambda_p,residual,iters,converged,oscillating\n";
  bool any_error = false, all_converged = true;
  for (int k = 1; k <= kmax; ++k) {
    const Row& row = rows[k - 1];
    if (!row.error.empty()) {
      std::cerr << "k=" << k << " failed: " << row.error << "\n";
      os << k << ",nan,nan,0,false,false\n";
      any_error = true;
      continue;
    }
    const plap::EigenReport& r = row.report;
    all_converged = all_converged && r.converged;
    os << k << ',' << fmt17(r.lambda_p) << ',' << fmt17(r.residual) << ',' << r.iters << ','
       << (r.converged ? "true" : "false") << ',' << (r.osc_count >= 10 ? "true" : "false")
       << '\n';
  }
  write_file(dir / "summary.csv", os.str());

  std::vector<std::string> outputs = {"summary.csv"};
  for (int k = 1; k <= kmax; ++k) {
    const std::string kd = "k" + std::to_string(k) + "/";
    outputs.push_back(kd + "report.json");
    outputs.push_back(kd + "trace.csv");
    outputs.push_back(kd + "eigenfunction.csv");
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(dir, "sweep", args.graph_path, base, wall, outputs);

  std::cout << "wrote " << (dir / "summary.csv").string() << "\n";
  if (any_error) return 1;
  return all_converged ? 0 : kExitNoConverge;
}

int cmd_gridgen(int rows, int cols, const std::string& out) {
  const plap::Graph g = plap::Graph::grid(rows, cols);
  write_file(out, g.to_json() + "\n");
  std::cout << "wrote " << out << ": " << g.num_nodes() << " nodes, " << g.num_interior()
            << " interior, " << g.num_edges() << " edges\n";
  return 0;
}

int cmd_verify(const std::string& graph_path, const std::string& ef_path, double lambda_p,
               double p) {
  const plap::Graph g = load_graph_file(graph_path);
  const plap::NodeFunction f = read_eigenfunction_csv(g, read_file(ef_path));

  const double lambda_lin = std::pow(lambda_p, 2.0 / p);
  const double res = plap::residual(g, f, lambda_lin, p);
  std::cout << "residual = " << fmt17(res) << "\n";

  try {
    const plap::MorseInfo mi = plap::morse_index(g, f, lambda_p, p, 1e-6);
    std::cout << "linear_index = " << mi.linear_index << "\n"
              << "multiplicity = " << mi.multiplicity << "\n"
              << "morse = (" << mi.morse_R << ", " << mi.morse_negR << ")\n"
              << "kernel_dim = " << mi.kernel_dim << "\n";
  } catch (const plap::Error&) {
    std::cout << "linear_index = unavailable (not an eigenpair at tolerance)\n";
  }
  try {
    const plap::DualEdgePair dual = plap::dual_edge_pair(g, f, lambda_p, p);
    std::cout << "dual eta = " << fmt17(dual.eta)
              << "  edge_residual = " << fmt17(dual.edge_residual) << "\n";
  } catch (const plap::Error& e) {
    std::cout << "dual check unavailable: " << e.what() << "\n";
  }
  return res < 1e-6 ? 0 : kExitVerifyFail;
}

int cmd_fdcheck(const std::string& graph_path, double p, int k, std::uint64_t seed) {
  const plap::Graph g = load_graph_file(graph_path);
  if (g.num_interior() == 0) throw plap::Error("fdcheck: graph has no interior nodes");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  // seed 0 selects deterministic unit weights.
  auto draw = [&](int n) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    if (seed != 0)
      for (int i = 0; i < n; ++i) v[i] = std::exp(u(rng));
    return v;
  };

  bool all_ok = true;

  plap::WeightPair w{draw(g.num_edges()), draw(g.num_interior())};
  try {
    const double err = plap::fd_grad_inv_lambda(g, w, p, k, 1e-8, 1e-4);
    std::cout << "grad_inv_lambda max rel err = " << fmt17(err) << "\n";
    all_ok = all_ok && err < 1e-4;
  } catch (const plap::NonSimpleEigenvalue& e) {
    std::cout << "grad_inv_lambda skipped: " << e.what() << "\n";
  }

  if (g.num_interior() <= 25) {
    const Eigen::VectorXd nu = draw(g.num_interior());
    const double err = plap::fd_grad_lambda1_p2(g, nu, p, 1e-4);
    std::cout << "grad_lambda1_p2 max rel err = " << fmt17(err) << "\n";
    all_ok = all_ok && err < 1e-4;
  } else {
    // Differencing through the inner minimizer is noise-limited at scale.
    std::cout << "grad_lambda1_p2 skipped: graph too large for accurate differences\n";
  }

  plap::FlowConfig cfg;
  cfg.p = p;
  cfg.k = k;
  cfg.tol = 1e-9;
  auto [report, trace] = plap::run_flow(g, cfg);
  if (report.converged && report.residual < 1e-6 && g.num_interior() > 1) {
    double worst = 0.0;
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::mt19937_64 xi_rng(seed + 1);
    for (int trial = 0; trial < 8; ++trial) {
      plap::NodeFunction xi(g.num_interior());
      for (int i = 0; i < xi.size(); ++i) xi[i] = gauss(xi_rng);
      const auto check = plap::fd_second_derivative_identity(g, report.f, p, xi, 1e-4);
      worst = std::max(worst, check.rel_err);
    }
    std::cout << "second_derivative_identity max rel err = " << fmt17(worst) << "\n";
    all_ok = all_ok && worst < 1e-4;
  } else {
    std::cout << "second_derivative_identity skipped: "
              << (g.num_interior() <= 1 ? "tangent space is trivial"
                                        : "no converged eigenpair for the identity check")
              << "\n";
  }
  return all_ok ? 0 : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph p-Laplacian eigenpairs via the saddle-point weight flow"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // gridgen
  auto* gridgen = app.add_subcommand("gridgen", "Generate a grid graph on the unit square");
  int rows = 0, cols = 0;
  std::string grid_out = "grid.json";
  gridgen->add_option("--rows", rows, "Grid rows")->required()->check(CLI::Range(2, 1 << 20));
  gridgen->add_option("--cols", cols, "Grid cols")->required()->check(CLI::Range(2, 1 << 20));
  gridgen->add_option("--out", grid_out, "Output graph JSON path")->required();

  // shared solve/sweep options
  SolveArgs sa;
  auto add_flow_options = [&](CLI::App* cmd) {
    cmd->add_option("--graph", sa.graph_path, "Graph JSON file")->required();
    cmd->add_option("--p", sa.cfg.p, "Exponent p (> 2)")
        ->required()
        ->check(CLI::Range(std::nextafter(2.0, 3.0), 1e6));
    cmd->add_option("--tau", sa.cfg.tau, "Euler step size in (0, 1]")
        ->check(CLI::Range(1e-12, 1.0));
    cmd->add_option("--delta", sa.cfg.delta, "Pencil regularization (> 0)")
        ->check(CLI::Range(1e-300, 1.0));
    cmd->add_option("--tol", sa.cfg.tol, "Convergence threshold on err");
    cmd->add_option("--max-iter", sa.cfg.max_iter, "Iteration cap")->check(CLI::Range(1, 1 << 30));
    cmd->add_option("--seed", sa.cfg.seed, "Seed for random initialization");
    cmd->add_option("--init", sa.init, "Weight initialization")
        ->check(CLI::IsMember({"ones", "random"}));
    cmd->add_option("--record-every", sa.cfg.record_every, "Trace stride")
        ->check(CLI::Range(1, 1 << 30));
    cmd->add_option("--out", sa.out_dir, "Output directory")->required();
  };

  auto* solve = app.add_subcommand("solve", "Run the flow for one eigenpair");
  add_flow_options(solve);
  solve->add_option("--k", sa.cfg.k, "Spectral index (1-based)")
      ->required()
      ->check(CLI::Range(1, 1 << 30));

  auto* sweep = app.add_subcommand("sweep", "Run the flow for k = 1..kmax");
  add_flow_options(sweep);
  int kmax = 1, jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  sweep->add_option("--kmax", kmax, "Largest spectral index")
      ->required()
      ->check(CLI::Range(1, 1 << 30));
  sweep->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::Range(1, 256));

  auto* verify = app.add_subcommand("verify", "Verify a stored eigenpair");
  std::string v_graph, v_ef;
  double v_lambda = 0.0, v_p = 3.0;
  verify->add_option("--graph", v_graph)->required();
  verify->add_option("--eigenfunction", v_ef, "CSV node_id,value over interior nodes")->required();
  verify->add_option("--lambda", v_lambda, "p-Laplacian eigenvalue")->required();
  verify->add_option("--p", v_p)->required()->check(CLI::Range(std::nextafter(2.0, 3.0), 1e6));

  auto* fdcheck = app.add_subcommand("fdcheck", "Finite-difference derivative suites");
  std::string f_graph;
  double f_p = 3.0;
  int f_k = 1;
  std::uint64_t f_seed = 1;
  fdcheck->add_option("--graph", f_graph)->required();
  fdcheck->add_option("--p", f_p)->required()->check(CLI::Range(std::nextafter(2.0, 3.0), 1e6));
  fdcheck->add_option("--k", f_k)->check(CLI::Range(1, 1 << 30));
  fdcheck->add_option("--seed", f_seed, "Weight seed; 0 selects unit weights");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (gridgen->parsed()) return cmd_gridgen(rows, cols, grid_out);
    if (solve->parsed()) return cmd_solve(sa);
    if (sweep->parsed()) return cmd_sweep(sa, kmax, jobs);
    if (verify->parsed()) return cmd_verify(v_graph, v_ef, v_lambda, v_p);
    if (fdcheck->parsed()) return cmd_fdcheck(f_graph, f_p, f_k, f_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
