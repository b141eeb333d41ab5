#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "plap/operators.hpp"

using namespace plap;

namespace {

NodeFunction nf(std::initializer_list<double> vals) {
  NodeFunction f(static_cast<int>(vals.size()));
  int i = 0;
  for (double v : vals) f[i++] = v;
  return f;
}

}  // namespace

TEST_CASE("gradient on the path with boundary zeros") {
  const Graph g = oracle::path3();
  const EdgeFunction grad = gradient(g, nf({1.0, 1.0}));
  CHECK(grad[0] == doctest::Approx(1.0));
  CHECK(grad[1] == doctest::Approx(0.0));
  CHECK(grad[2] == doctest::Approx(-1.0));

  CHECK(gradient(g, nf({0.0, 0.0})).norm() == 0.0);
}

TEST_CASE("gradient around the center of the 3x3 grid") {
  const Graph g = Graph::grid(3, 3);
  const double c = 1.7;
  const EdgeFunction grad = gradient(g, nf({c}));
  REQUIRE(grad.size() == 4);
  for (int e = 0; e < 4; ++e) {
    const bool points_in = g.edge_iv(e) >= 0;  // interior endpoint is v
    CHECK(grad[e] == doctest::Approx(points_in ? 2.0 * c : -2.0 * c));
  }
}

TEST_CASE("divergence hand value and linearity") {
  const Graph g = oracle::path3();
  EdgeFunction G(3);
  G << 1.0, -4.0, 1.0;
  const NodeFunction div = divergence(g, G);
  CHECK(div[0] == doctest::Approx(5.0));
  CHECK(div[1] == doctest::Approx(-5.0));
  CHECK(divergence(g, EdgeFunction::Zero(3)).norm() == 0.0);
}

TEST_CASE("divergence is the adjoint of gradient") {
  const Graph g = Graph::grid(4, 4);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 20; ++trial) {
    NodeFunction f(g.num_interior());
    EdgeFunction G(g.num_edges());
    for (int i = 0; i < f.size(); ++i) f[i] = gauss(rng);
    for (int e = 0; e < G.size(); ++e) G[e] = gauss(rng);
    CHECK(gradient(g, f).dot(G) ==
          doctest::Approx(f.dot(divergence(g, G))).epsilon(1e-12));
  }
}

TEST_CASE("p-laplacian on the path matches the eigen-equation") {
  const Graph g = oracle::path3();
  const NodeFunction lap = apply_p_laplacian(g, nf({1.0, -1.0}), 3.0);
  CHECK(lap[0] == doctest::Approx(5.0));
  CHECK(lap[1] == doctest::Approx(-5.0));
}

TEST_CASE("p-laplacian one-edge closed form and p = 2 reduction") {
  const Graph one = oracle::single_edge(2.0);
  CHECK(apply_p_laplacian(one, nf({1.0}), 3.0)[0] == doctest::Approx(8.0));

  const Graph g = Graph::grid(4, 4);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  NodeFunction f(g.num_interior());
  for (int i = 0; i < f.size(); ++i) f[i] = gauss(rng);
  const NodeFunction direct = divergence(g, gradient(g, f));
  CHECK((apply_p_laplacian(g, f, 2.0) - direct).norm() == doctest::Approx(0.0));

  CHECK_THROWS_AS(apply_p_laplacian(g, f, 1.0), Error);
}

TEST_CASE("signed power vanishes at zero for all p > 1") {
  CHECK(signed_pow(0.0, 0.5) == 0.0);
  CHECK(signed_pow(0.0, 1.7) == 0.0);
  CHECK(signed_pow(-2.0, 2.0) == doctest::Approx(-4.0));
}

TEST_CASE("p-Rayleigh quotient values and homogeneity") {
  const Graph g = oracle::path3();
  CHECK(rayleigh_p(g, nf({1.0, 1.0}), 3.0) == doctest::Approx(1.0));
  CHECK(rayleigh_p(g, nf({1.0, -1.0}), 3.0) == doctest::Approx(5.0));
  const NodeFunction f = nf({0.3, -1.2});
  const double c = -3.7;
  CHECK(rayleigh_p(g, c * f, 3.0) == doctest::Approx(rayleigh_p(g, f, 3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(rayleigh_p(g, nf({0.0, 0.0}), 3.0), Error);
}

TEST_CASE("weighted 2-Rayleigh quotient") {
  const Graph g = oracle::path3();
  WeightPair ones{Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(2)};
  CHECK(rayleigh_2w(g, nf({1.0, 1.0}), ones) == doctest::Approx(1.0));

  WeightPair w;
  w.mu = Eigen::VectorXd(3);
  w.mu << 1.0, 2.0, 1.0;
  w.nu = Eigen::VectorXd::Ones(2);
  CHECK(rayleigh_2w(g, nf({1.0, -1.0}), w) == doctest::Approx(5.0));

  WeightPair zero_nu{Eigen::VectorXd::Ones(3), Eigen::VectorXd::Zero(2)};
  CHECK_THROWS_AS(rayleigh_2w(g, nf({1.0, 1.0}), zero_nu), Error);
}

TEST_CASE("[p,2] quotient values and homogeneity") {
  const Graph g = oracle::path3();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(2);
  CHECK(rayleigh_p2(g, nf({1.0, 1.0}), 3.0, ones) == doctest::Approx(0.7071067812));

  Eigen::VectorXd twos = 2.0 * ones;
  CHECK(rayleigh_p2(g, nf({1.0, 1.0}), 3.0, twos) == doctest::Approx(0.25));

  const NodeFunction f = nf({0.4, 1.9});
  CHECK(rayleigh_p2(g, 5.5 * f, 3.0, ones) ==
        doctest::Approx(rayleigh_p2(g, f, 3.0, ones)).epsilon(1e-14));
}

TEST_CASE("weights induced by a function") {
  const Graph g = oracle::path3();
  SUBCASE("p = 3") {
    const WeightPair w = weights_from(g, nf({1.0, -1.0}), 3.0);
    CHECK(w.mu[0] == doctest::Approx(1.0));
    CHECK(w.mu[1] == doctest::Approx(2.0));
    CHECK(w.mu[2] == doctest::Approx(1.0));
    CHECK(w.nu[0] == doctest::Approx(1.0));
    CHECK(w.nu[1] == doctest::Approx(1.0));
  }
  SUBCASE("p = 4") {
    const WeightPair w = weights_from(g, nf({1.0, -1.0}), 4.0);
    CHECK(w.mu[1] == doctest::Approx(4.0));
    CHECK(w.nu[0] == doctest::Approx(1.0));
  }
  SUBCASE("zeros in f land on the boundary of the weight cone") {
    const WeightPair w = weights_from(g, nf({1.0, 0.0}), 3.0);
    CHECK(w.nu[1] == 0.0);
  }
  CHECK_THROWS_AS(weights_from(g, nf({1.0, 1.0}), 2.0), Error);
}

TEST_CASE("reduction identity: weighted quotient at induced weights equals R_p") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  const Graph g = Graph::grid(4, 4);
  for (double p : {3.0, 3.5, 5.0}) {
    for (int trial = 0; trial < 10; ++trial) {
      NodeFunction f(g.num_interior());
      for (int i = 0; i < f.size(); ++i) f[i] = gauss(rng);
      const WeightPair w = weights_from(g, f, p);
      CHECK(rayleigh_2w(g, f, w) == doctest::Approx(rayleigh_p(g, f, p)).epsilon(1e-12));
    }
  }

  // still holds with zero entries in f as long as the nu-norm is positive
  const Graph path = oracle::path3();
  const NodeFunction f = nf({1.0, 0.0});
  const WeightPair w = weights_from(path, f, 3.0);
  CHECK(w.nu[1] == 0.0);
  CHECK(rayleigh_2w(path, f, w) == doctest::Approx(rayleigh_p(path, f, 3.0)).epsilon(1e-12));
}

TEST_CASE("size mismatches are rejected") {
  const Graph g = oracle::path3();
  CHECK_THROWS_AS(gradient(g, nf({1.0})), Error);
  CHECK_THROWS_AS(divergence(g, EdgeFunction::Zero(2)), Error);
}
