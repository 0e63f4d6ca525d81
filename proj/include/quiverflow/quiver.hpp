/**
 * @file quiver.hpp
 * @brief Quivers, doubles, framings and the built-in catalog.
 */
#pragma once

#include "common.hpp"

#include <map>
#include <memory>
#include <optional>

namespace quiverflow {

struct Edge {
  std::string id;
  int tail = 0;
  int head = 0;
};

/**
 * Vertex/edge incidence. A quiver may be a double (then every edge has a star
 * partner and the partners with `starred` set form Q*), and may carry framing
 * metadata: the index of the vertex ∞ and, per vertex, the framing edges b_{i,r}.
 */
class Quiver {
 public:
  Quiver() = default;
  Quiver(std::vector<std::string> vertices, std::vector<Edge> edges)
      : vertices_(std::move(vertices)), edges_(std::move(edges)) {
    validate();
  }

  int num_vertices() const { return int(vertices_.size()); }
  int num_edges() const { return int(edges_.size()); }
  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_.at(e); }
  const std::string& vertex_name(int v) const { return vertices_.at(v); }

  int vertex_index(const std::string& name) const {
    for (int i = 0; i < num_vertices(); ++i)
      if (vertices_[i] == name) return i;
    throw Error("unknown vertex '" + name + "'");
  }
  int edge_index(const std::string& id) const {
    for (int i = 0; i < num_edges(); ++i)
      if (edges_[i].id == id) return i;
    throw Error("unknown edge '" + id + "'");
  }
  std::optional<int> find_edge(const std::string& id) const {
    for (int i = 0; i < num_edges(); ++i)
      if (edges_[i].id == id) return i;
    return std::nullopt;
  }

  bool is_double() const { return !star_.empty(); }
  int star(int e) const {
    if (!is_double()) throw Error("quiver is not a double");
    return star_.at(e);
  }
  bool starred(int e) const { return is_double() && starred_.at(e); }
  // (−1)^a : +1 on Q, −1 on Q*.
  int sign(int e) const { return starred(e) ? -1 : 1; }

  // Edges of the underlying quiver Q (all edges when not a double).
  std::vector<int> base_edges() const {
    std::vector<int> out;
    for (int e = 0; e < num_edges(); ++e)
      if (!starred(e)) out.push_back(e);
    return out;
  }

  int loops_at(int v) const {
    int n = 0;
    for (int e : base_edges())
      if (edges_[e].tail == v && edges_[e].head == v) ++n;
    return n;
  }
  bool loop_free(int v) const { return loops_at(v) == 0; }

  int infinity() const { return infinity_; }
  bool framed() const { return infinity_ >= 0; }
  // framing_edges()[v][r-1] is the edge b_{v,r} : ∞ → v.
  const std::vector<std::vector<int>>& framing_edges() const { return framing_; }
  int zeta(int v) const { return framed() ? int(framing_.at(v).size()) : 0; }

  void set_framing(int infinity, std::vector<std::vector<int>> framing) {
    infinity_ = infinity;
    framing_ = std::move(framing);
  }
  void set_star(std::vector<int> star, std::vector<bool> starred) {
    star_ = std::move(star);
    starred_ = std::move(starred);
    for (int e = 0; e < num_edges(); ++e) {
      int s = star_[e];
      if (s < 0 || s >= num_edges() || s == e || star_[s] != e)
        throw Error("star pairing is not a fixed-point-free involution");
      if (edges_[s].tail != edges_[e].head || edges_[s].head != edges_[e].tail)
        throw Error("star partner does not reverse edge " + edges_[e].id);
    }
  }

  bool is_base_vertex(int v) const { return v != infinity_; }

 private:
  void validate() const {
    for (const auto& e : edges_)
      if (e.tail < 0 || e.tail >= num_vertices() || e.head < 0 || e.head >= num_vertices())
        throw Error("edge " + e.id + " has an endpoint outside the vertex set");
  }

  std::vector<std::string> vertices_;
  std::vector<Edge> edges_;
  std::vector<int> star_;
  std::vector<bool> starred_;
  int infinity_ = -1;
  std::vector<std::vector<int>> framing_;
};

using QuiverPtr = std::shared_ptr<const Quiver>;

/// Q̄: edges 0..E-1 are the original ones, E..2E-1 their reverses a*.
inline Quiver double_quiver(const Quiver& q) {
  if (q.is_double()) return q;
  std::vector<Edge> edges = q.edges();
  const int n = q.num_edges();
  for (int e = 0; e < n; ++e) edges.push_back({q.edge(e).id + "*", q.edge(e).head, q.edge(e).tail});
  Quiver d(q.vertices(), edges);
  std::vector<int> star(2 * n);
  std::vector<bool> starred(2 * n, false);
  for (int e = 0; e < n; ++e) {
    star[e] = e + n;
    star[e + n] = e;
    starred[e + n] = true;
  }
  d.set_star(star, starred);
  if (q.framed()) d.set_framing(q.infinity(), q.framing_edges());
  return d;
}

/// The framed quiver Q_ζ. Vertex ∞ gets index 0 and base vertex i becomes i+1.
struct FramedQuiver {
  Quiver base;
  DimVector zeta;
  Quiver quiver;

  static int vertex(int base_vertex) { return base_vertex + 1; }
  static constexpr int infinity = 0;
  int framing_edge(int base_vertex, int r) const {
    return quiver.framing_edges().at(vertex(base_vertex)).at(r - 1);
  }
};

inline std::string framing_edge_id(const std::string& vertex, int r) {
  return "b" + vertex + "_" + std::to_string(r);
}

inline FramedQuiver frame(const Quiver& base, const DimVector& zeta) {
  if (base.is_double()) throw Error("frame expects an undoubled quiver");
  if (int(zeta.size()) != base.num_vertices()) throw Error("framing length mismatch");
  std::vector<std::string> vertices{"inf"};
  for (const auto& v : base.vertices()) {
    if (v == "inf") throw Error("vertex name 'inf' is reserved");
    vertices.push_back(v);
  }
  std::vector<Edge> edges;
  for (const auto& e : base.edges()) edges.push_back({e.id, e.tail + 1, e.head + 1});
  std::vector<std::vector<int>> framing(vertices.size());
  for (int i = 0; i < base.num_vertices(); ++i) {
    if (zeta[i] < 0) throw Error("framing must be nonnegative");
    for (int r = 1; r <= zeta[i]; ++r) {
      framing[i + 1].push_back(int(edges.size()));
      edges.push_back({framing_edge_id(base.vertex_name(i), r), 0, i + 1});
    }
  }
  FramedQuiver fq{base, zeta, Quiver(vertices, edges)};
  fq.quiver.set_framing(0, framing);
  return fq;
}

/// One vertex with one loop a0 (X = V_{a0}, Y = V_{a0*}).
inline Quiver jordan_quiver() { return Quiver({"0"}, {{"a0", 0, 0}}); }

/// Vertices ℤ/m, edges a_i : i → i+1.
inline Quiver cyclic_quiver(int m) {
  if (m < 1) throw Error("cyclic quiver needs m >= 1");
  std::vector<std::string> v;
  std::vector<Edge> e;
  for (int i = 0; i < m; ++i) v.push_back(std::to_string(i));
  for (int i = 0; i < m; ++i) e.push_back({"a" + std::to_string(i), i, (i + 1) % m});
  return Quiver(v, e);
}

/// Linear A_n: vertices 0..n-1, edges a_i : i → i+1.
inline Quiver type_a_quiver(int n) {
  if (n < 1) throw Error("A_n needs n >= 1");
  std::vector<std::string> v;
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i) v.push_back(std::to_string(i));
  for (int i = 0; i + 1 < n; ++i) e.push_back({"a" + std::to_string(i), i, i + 1});
  return Quiver(v, e);
}

/// `jordan`, `cyclic:<m>`, `A:<n>`.
inline Quiver builtin_quiver(const std::string& name) {
  if (name == "jordan") return jordan_quiver();
  auto colon = name.find(':');
  if (colon != std::string::npos) {
    std::string kind = name.substr(0, colon);
    int k = std::stoi(name.substr(colon + 1));
    if (kind == "cyclic") return cyclic_quiver(k);
    if (kind == "A") return type_a_quiver(k);
  }
  throw Error("unknown built-in quiver '" + name + "'");
}

/// m if Q (ignoring framing) is a single oriented cycle on all its vertices, else 0.
inline int cyclic_order(const Quiver& q) {
  const int n = q.num_vertices();
  auto base = q.base_edges();
  if (n == 0 || int(base.size()) != n) return 0;
  std::vector<int> next(n, -1), indeg(n, 0);
  for (int e : base) {
    if (next[q.edge(e).tail] != -1) return 0;
    next[q.edge(e).tail] = q.edge(e).head;
    indeg[q.edge(e).head]++;
  }
  for (int v = 0; v < n; ++v)
    if (next[v] < 0 || indeg[v] != 1) return 0;
  int v = 0, len = 0;
  do {
    v = next[v];
    ++len;
  } while (v != 0 && len <= n);
  return len == n ? n : 0;
}

inline DimVector unit_vector(int n, int i) {
  DimVector e(n, 0);
  e.at(i) = 1;
  return e;
}

}  // namespace quiverflow
