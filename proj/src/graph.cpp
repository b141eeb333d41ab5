#include "plap/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>

#include <json.hpp>

namespace plap {

namespace {

std::string edge_str(int u, int v, double w) {
  std::ostringstream os;
  os << "[" << u << ", " << v << ", " << w << "]";
  return os.str();
}

}  // namespace

Graph::Graph(int num_nodes, std::vector<int> boundary, std::vector<Edge> edges)
    : num_nodes_(num_nodes) {
  if (num_nodes < 0) throw Error("graph: negative node count");

  std::sort(boundary.begin(), boundary.end());
  boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
  for (int b : boundary) {
    if (b < 0 || b >= num_nodes)
      throw Error("graph: boundary id " + std::to_string(b) + " out of range [0, " +
                  std::to_string(num_nodes) + ")");
  }
  boundary_ = std::move(boundary);

  interior_index_.assign(num_nodes_, 0);
  for (int b : boundary_) interior_index_[b] = -1;
  interior_.reserve(num_nodes_ - boundary_.size());
  for (int v = 0; v < num_nodes_; ++v) {
    if (interior_index_[v] == 0) {
      interior_index_[v] = static_cast<int>(interior_.size());
      interior_.push_back(v);
    }
  }

  for (Edge& e : edges) {
    if (e.u < 0 || e.u >= num_nodes_ || e.v < 0 || e.v >= num_nodes_)
      throw Error("graph: edge endpoint out of range in " + edge_str(e.u, e.v, e.weight));
    if (e.u == e.v) throw Error("graph: self-loop " + edge_str(e.u, e.v, e.weight));
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw Error("graph: nonpositive or non-finite weight in " + edge_str(e.u, e.v, e.weight));
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i - 1].u == edges[i].u && edges[i - 1].v == edges[i].v)
      throw Error("graph: duplicate edge " + edge_str(edges[i].u, edges[i].v, edges[i].weight));
  }

  edges_.reserve(edges.size());
  for (const Edge& e : edges) {
    if (is_boundary(e.u) && is_boundary(e.v)) continue;  // zero gradient row
    edges_.push_back(e);
  }
  edge_iu_.reserve(edges_.size());
  edge_iv_.reserve(edges_.size());
  for (const Edge& e : edges_) {
    edge_iu_.push_back(interior_index_[e.u]);
    edge_iv_.push_back(interior_index_[e.v]);
  }
}

Graph Graph::grid(int rows, int cols) {
  if (rows < 2 || cols < 2) throw Error("grid: rows and cols must both be at least 2");
  const int n = rows * cols;
  auto id = [cols](int r, int c) { return r * cols + c; };

  std::vector<int> boundary;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (r == 0 || r == rows - 1 || c == 0 || c == cols - 1) boundary.push_back(id(r, c));

  const double wh = static_cast<double>(cols - 1);  // 1/h, horizontal
  const double wv = static_cast<double>(rows - 1);  // 1/h, vertical
  std::vector<Edge> edges;
  edges.reserve(2 * n);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1), wh});
      if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c), wv});
    }
  }
  return Graph(n, std::move(boundary), std::move(edges));
}

Graph Graph::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("graph: invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("nodes") || !j.contains("boundary") || !j.contains("edges"))
    throw Error("graph: expected object with \"nodes\", \"boundary\", \"edges\"");
  if (!j["nodes"].is_number_integer()) throw Error("graph: \"nodes\" must be an integer");
  if (!j["boundary"].is_array()) throw Error("graph: \"boundary\" must be an array");
  if (!j["edges"].is_array()) throw Error("graph: \"edges\" must be an array");

  const int n = j["nodes"].get<int>();
  std::vector<int> boundary;
  for (const auto& b : j["boundary"]) {
    if (!b.is_number_integer()) throw Error("graph: boundary entry " + b.dump() + " is not an integer");
    boundary.push_back(b.get<int>());
  }
  std::vector<Edge> edges;
  for (const auto& e : j["edges"]) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() ||
        !e[1].is_number_integer() || !e[2].is_number())
      throw Error("graph: edge record " + e.dump() + " must be [u, v, w]");
    edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
  }
  return Graph(n, std::move(boundary), std::move(edges));
}

std::string Graph::to_json() const {
  nlohmann::json j;
  j["nodes"] = num_nodes_;
  j["boundary"] = boundary_;
  auto edges = nlohmann::json::array();
  for (const Edge& e : edges_) edges.push_back({e.u, e.v, e.weight});
  j["edges"] = std::move(edges);
  return j.dump();
}

bool Graph::is_connected() const {
  const int n = num_interior();
  if (n <= 1) return true;

  std::vector<std::vector<int>> adj(n);
  for (int e = 0; e < num_edges(); ++e) {
    const int iu = edge_iu_[e], iv = edge_iv_[e];
    if (iu >= 0 && iv >= 0) {
      adj[iu].push_back(iv);
      adj[iv].push_back(iu);
    }
  }
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        q.push(v);
      }
    }
  }
  return reached == n;
}

}  // namespace plap
