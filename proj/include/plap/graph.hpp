#pragma once

#include <string>
#include <vector>

#include "plap/types.hpp"

namespace plap {

/// Undirected weighted edge, stored with the canonical orientation u < v.
struct Edge {
  int u = 0;
  int v = 0;
  double weight = 1.0;
};

/// Immutable graph with a Dirichlet boundary set.
///
/// Nodes are 0-based ids. Edges are canonicalized on construction: oriented
/// u < v, sorted lexicographically, validated (positive finite weight, no
/// self-loops, no duplicates). Edges with both endpoints on the boundary are
/// dropped; they would contribute identically zero rows to the gradient.
/// Interior nodes are kept in ascending id order and index NodeFunction
/// entries; stored edges index EdgeFunction entries.
class Graph {
 public:
  Graph(int num_nodes, std::vector<int> boundary, std::vector<Edge> edges);

  /// 4-neighbor grid on the unit square with the perimeter as boundary.
  /// Edge weights are the reciprocal of the edge lengths: cols-1 horizontally
  /// and rows-1 vertically.
  static Graph grid(int rows, int cols);

  /// Parses {"nodes": n, "boundary": [...], "edges": [[u,v,w],...]}.
  static Graph from_json(const std::string& text);

  /// Canonical JSON form; from_json(to_json()) reproduces the graph exactly.
  std::string to_json() const;

  int num_nodes() const { return num_nodes_; }
  const std::vector<int>& boundary() const { return boundary_; }
  const std::vector<int>& interior() const { return interior_; }
  const std::vector<Edge>& edges() const { return edges_; }

  int num_interior() const { return static_cast<int>(interior_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  /// Position of a node in interior(), or -1 for boundary nodes.
  int interior_index(int node) const { return interior_index_[node]; }
  bool is_boundary(int node) const { return interior_index_[node] < 0; }

  /// Interior indices of the endpoints of edge e (-1 where the endpoint is
  /// a boundary node). Hot path for gradient/divergence.
  int edge_iu(int e) const { return edge_iu_[e]; }
  int edge_iv(int e) const { return edge_iv_[e]; }

  /// True iff the subgraph induced by the interior nodes is connected.
  /// Graphs with at most one interior node count as connected.
  bool is_connected() const;

 private:
  int num_nodes_ = 0;
  std::vector<int> boundary_;        // ascending, deduplicated
  std::vector<int> interior_;        // ascending
  std::vector<Edge> edges_;          // canonical u < v, sorted
  std::vector<int> interior_index_;  // per node id, -1 on boundary
  std::vector<int> edge_iu_, edge_iv_;
};

}  // namespace plap
