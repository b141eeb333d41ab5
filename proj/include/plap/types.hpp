#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace plap {

/// Real-valued function on the interior nodes of a graph.
using NodeFunction = Eigen::VectorXd;

/// Real-valued function on the stored (oriented) edges of a graph.
using EdgeFunction = Eigen::VectorXd;

/// Nonnegative measures on edges (mu) and interior nodes (nu).
struct WeightPair {
  Eigen::VectorXd mu;
  Eigen::VectorXd nu;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace plap
