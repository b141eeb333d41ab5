// End-to-end checks of the command-line tool against a scratch directory.
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "plap/graph.hpp"

namespace fs = std::filesystem;

namespace {

const char* cli_path() { return PLAP_CLI_PATH; }

int run(const std::string& args) {
  const std::string cmd = std::string(cli_path()) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() /
          ("plap_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

void write_path_graph(const std::string& out) {
  std::ofstream f(out);
  f << oracle::path3().to_json();
}

double json_number(const std::string& text, const std::string& key) {
  const auto at = text.find("\"" + key + "\":");
  REQUIRE(at != std::string::npos);
  return std::stod(text.substr(at + key.size() + 3));
}

}  // namespace

TEST_CASE("gridgen writes the documented grids and rejects bad dims") {
  Scratch s;
  CHECK(run("gridgen --rows 21 --cols 21 --out " + (s / "g21.json")) == 0);
  const plap::Graph g = plap::Graph::from_json(slurp(s.dir / "g21.json"));
  CHECK(g.num_nodes() == 441);
  CHECK(g.num_interior() == 361);
  for (const plap::Edge& e : g.edges()) CHECK(e.weight == doctest::Approx(20.0));

  CHECK(run("gridgen --rows 3 --cols 3 --out " + (s / "g3.json")) == 0);
  CHECK(plap::Graph::from_json(slurp(s.dir / "g3.json")).num_interior() == 1);

  CHECK(run("gridgen --rows 1 --cols 5 --out " + (s / "bad.json")) == 64);
}

TEST_CASE("solve emits report, trace, and eigenfunction; verify accepts them") {
  Scratch s;
  write_path_graph(s / "path.json");

  CHECK(run("solve --graph " + (s / "path.json") + " --p 3 --k 2 --tol 1e-9 --out " +
            (s / "run")) == 0);
  const std::string report = slurp(s.dir / "run" / "report.json");
  CHECK(json_number(report, "lambda_p") == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(report.find("\"converged\": true") != std::string::npos);
  CHECK(report.find("\"k\": 2") != std::string::npos);

  // trace err column is the row-wise max of err_mu and err_nu
  std::istringstream trace(slurp(s.dir / "run" / "trace.csv"));
  std::string line;
  std::getline(trace, line);
  CHECK(line == "iter,lambda,err_mu,err_nu,err,residual");
  int rows = 0;
  while (std::getline(trace, line)) {
    double lambda, err_mu, err_nu, err, res;
    int iter;
    char c;
    std::istringstream ls(line);
    ls >> iter >> c >> lambda >> c >> err_mu >> c >> err_nu >> c >> err >> c >> res;
    CHECK(err == doctest::Approx(std::max(err_mu, err_nu)));
    ++rows;
  }
  CHECK(rows > 5);

  CHECK(slurp(s.dir / "run" / "manifest.json").find("report.json") != std::string::npos);

  // verify the emitted eigenfunction at the known eigenvalue
  CHECK(run("verify --graph " + (s / "path.json") + " --eigenfunction " +
            (s / "run/eigenfunction.csv") + " --lambda 5.0 --p 3") == 0);
  // a perturbed eigenvalue fails verification
  CHECK(run("verify --graph " + (s / "path.json") + " --eigenfunction " +
            (s / "run/eigenfunction.csv") + " --lambda 4.9 --p 3") == 1);
}

TEST_CASE("solve determinism: identical inputs give byte-identical outputs") {
  Scratch s;
  write_path_graph(s / "path.json");
  const std::string base = "solve --graph " + (s / "path.json") +
                           " --p 3 --k 1 --init random --seed 7 --out ";
  CHECK(run(base + (s / "a")) == 0);
  CHECK(run(base + (s / "b")) == 0);
  CHECK(slurp(s.dir / "a" / "report.json") == slurp(s.dir / "b" / "report.json"));
  CHECK(slurp(s.dir / "a" / "trace.csv") == slurp(s.dir / "b" / "trace.csv"));
  CHECK(slurp(s.dir / "a" / "eigenfunction.csv") == slurp(s.dir / "b" / "eigenfunction.csv"));
}

TEST_CASE("solve usage errors") {
  Scratch s;
  write_path_graph(s / "path.json");
  CHECK(run("solve --graph " + (s / "path.json") + " --p 3 --k 0 --out " + (s / "x")) == 64);
  CHECK(run("solve --graph " + (s / "path.json") + " --p 2 --k 1 --out " + (s / "x")) == 64);
  CHECK(run("nosuchcommand") == 64);
  // missing file is a runtime failure, not a usage error
  CHECK(run("solve --graph " + (s / "missing.json") + " --p 3 --k 1 --out " + (s / "x")) == 1);
}

TEST_CASE("non-convergence exits 2 and still writes outputs") {
  Scratch s;
  write_path_graph(s / "path.json");
  CHECK(run("solve --graph " + (s / "path.json") +
            " --p 3 --k 2 --tol 1e-14 --max-iter 5 --out " + (s / "nc")) == 2);
  const std::string report = slurp(s.dir / "nc" / "report.json");
  CHECK(report.find("\"converged\": false") != std::string::npos);
  CHECK(fs::exists(s.dir / "nc" / "trace.csv"));
}

TEST_CASE("record-every controls the trace stride") {
  Scratch s;
  write_path_graph(s / "path.json");
  CHECK(run("solve --graph " + (s / "path.json") +
            " --p 3 --k 1 --tol 1e-9 --record-every 25 --out " + (s / "r")) == 0);
  std::istringstream trace(slurp(s.dir / "r" / "trace.csv"));
  std::string line;
  std::getline(trace, line);
  std::vector<int> iters;
  while (std::getline(trace, line)) iters.push_back(std::stoi(line));
  REQUIRE(!iters.empty());
  // every row sits on the stride except the first and the final one
  for (std::size_t i = 0; i + 1 < iters.size(); ++i)
    CHECK((iters[i] == 1 || iters[i] % 25 == 0));
  const std::string report = slurp(s.dir / "r" / "report.json");
  CHECK(static_cast<double>(iters.size()) <= json_number(report, "iters") / 25 + 2);
}

TEST_CASE("empty boundary draws a warning") {
  Scratch s;
  {
    std::ofstream f(s / "free.json");
    f << plap::Graph(3, {}, {{0, 1, 1.0}, {1, 2, 1.0}}).to_json();
  }
  const std::string cmd = std::string(cli_path()) + " solve --graph " + (s / "free.json") +
                          " --p 3 --k 1 --out " + (s / "x") + " > /dev/null 2> " +
                          (s / "err.txt");
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 1);
  CHECK(slurp(s.dir / "err.txt").find("empty boundary") != std::string::npos);
}

TEST_CASE("verify rejects a wrong-length eigenfunction") {
  Scratch s;
  write_path_graph(s / "path.json");
  {
    std::ofstream f(s / "short.csv");
    f << "node_id,value\n1,0.5\n";
  }
  CHECK(run("verify --graph " + (s / "path.json") + " --eigenfunction " + (s / "short.csv") +
            " --lambda 5 --p 3") == 1);
}

TEST_CASE("sweep covers k = 1..kmax and matches per-k solves") {
  Scratch s;
  write_path_graph(s / "path.json");
  CHECK(run("sweep --graph " + (s / "path.json") + " --p 4 --kmax 2 --tol 1e-9 --out " +
            (s / "sw")) == 0);
  const std::string summary = slurp(s.dir / "sw" / "summary.csv");
  CHECK(summary.find("k,lambda_p,residual,iters,converged,oscillating") == 0);
  // lambda values approx (1, 9) at p = 4
  const double l1 = json_number(slurp(s.dir / "sw" / "k1" / "report.json"), "lambda_p");
  const double l2 = json_number(slurp(s.dir / "sw" / "k2" / "report.json"), "lambda_p");
  CHECK(l1 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(l2 == doctest::Approx(9.0).epsilon(1e-6));
  CHECK(fs::exists(s.dir / "sw" / "k1" / "report.json"));
  CHECK(fs::exists(s.dir / "sw" / "k2" / "eigenfunction.csv"));

  // kmax = 1 degenerates to a single solve
  CHECK(run("sweep --graph " + (s / "path.json") + " --p 3 --kmax 1 --tol 1e-9 --out " +
            (s / "sw1")) == 0);
  CHECK(run("solve --graph " + (s / "path.json") + " --p 3 --k 1 --tol 1e-9 --out " +
            (s / "sv1")) == 0);
  CHECK(slurp(s.dir / "sw1" / "k1" / "report.json") ==
        slurp(s.dir / "sv1" / "report.json"));
}

TEST_CASE("fdcheck passes on the path graph and rejects p = 2") {
  Scratch s;
  write_path_graph(s / "path.json");
  CHECK(run("fdcheck --graph " + (s / "path.json") + " --p 3") == 0);
  CHECK(run("fdcheck --graph " + (s / "path.json") + " --p 2") == 64);
}

TEST_CASE("fdcheck skips the gradient suite on a non-simple instance") {
  Scratch s;
  {
    std::ofstream f(s / "cyc.json");
    f << oracle::cycle_with_pendants().to_json();
  }
  // seed 0 selects unit weights, with the double pencil eigenvalue at k = 2
  const std::string cmd = std::string(cli_path()) + " fdcheck --graph " + (s / "cyc.json") +
                          " --p 3 --k 2 --seed 0 > " + (s / "out.txt") + " 2>&1";
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  const std::string out = slurp(s.dir / "out.txt");
  CHECK(out.find("grad_inv_lambda skipped") != std::string::npos);
  CHECK(out.find("multiplicity 2") != std::string::npos);
}
