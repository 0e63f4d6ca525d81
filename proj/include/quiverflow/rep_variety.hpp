/**
 * @file rep_variety.hpp
 * @brief Points of representation spaces of double quivers: moment map,
 *        gauge action, trace functions, their gradients, the canonical
 *        Poisson bracket and the simplicity test.
 */
#pragma once

#include "quiver.hpp"

#include <functional>
#include <map>
#include <set>

namespace quiverflow {

/// Matrices V_a : V_{tail} → V_{head} for every edge of a double quiver.
struct RepPoint {
  QuiverPtr quiver;
  DimVector dims;
  std::vector<Mat> mats;

  static RepPoint zero(QuiverPtr q, DimVector dims) {
    if (!q->is_double()) throw Error("representation points live on double quivers");
    RepPoint v{q, std::move(dims), {}};
    check_length_(*q, v.dims);
    for (const auto& e : q->edges()) v.mats.push_back(Mat::Zero(v.dims[e.head], v.dims[e.tail]));
    return v;
  }

  const Mat& operator[](const std::string& id) const { return mats.at(quiver->edge_index(id)); }
  Mat& operator[](const std::string& id) { return mats.at(quiver->edge_index(id)); }

  void check() const {
    if (!quiver || !quiver->is_double()) throw Error("representation point needs a double quiver");
    check_length_(*quiver, dims);
    if (int(mats.size()) != quiver->num_edges()) throw Error("wrong number of edge matrices");
    for (int e = 0; e < quiver->num_edges(); ++e) {
      const auto& ed = quiver->edge(e);
      if (mats[e].rows() != dims[ed.head] || mats[e].cols() != dims[ed.tail])
        throw Error("matrix for edge " + ed.id + " has the wrong shape");
    }
  }

  int total_dim() const {
    int s = 0;
    for (int d : dims) s += d;
    return s;
  }

 private:
  static void check_length_(const Quiver& q, const DimVector& d) {
    if (int(d.size()) != q.num_vertices()) throw Error("dimension vector length mismatch");
    for (int x : d)
      if (x < 0) throw Error("negative dimension");
  }
};

/// P_i(V) = Σ_{a : j→i} (−1)^a V_a V_{a*}.
inline std::vector<Mat> moment_map(const RepPoint& v) {
  const Quiver& q = *v.quiver;
  if (!q.is_double()) throw Error("moment map needs a double quiver");
  std::vector<Mat> p;
  for (int i = 0; i < q.num_vertices(); ++i) p.push_back(Mat::Zero(v.dims[i], v.dims[i]));
  for (int e = 0; e < q.num_edges(); ++e) {
    int h = q.edge(e).head;
    if (v.dims[h] == 0) continue;
    p[h] += double(q.sign(e)) * v.mats[e] * v.mats[q.star(e)];
  }
  return p;
}

/// max_i ‖P_i(V) − λ_i Id‖ (operator norm).
inline double relation_residual(const RepPoint& v, const Weight& lambda) {
  if (int(lambda.size()) != v.quiver->num_vertices()) throw Error("weight length mismatch");
  auto p = moment_map(v);
  double r = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i].size() == 0) continue;
    r = std::max(r, op_norm(p[i] - lambda[i] * identity(int(p[i].rows()))));
  }
  return r;
}

struct GaugeElement {
  std::vector<Mat> g;

  static GaugeElement identity_like(const RepPoint& v) {
    GaugeElement out;
    for (int d : v.dims) out.g.push_back(quiverflow::identity(d));
    return out;
  }
  double condition_number() const {
    double c = 1;
    for (const auto& m : g) {
      if (m.size() == 0) continue;
      Eigen::JacobiSVD<Mat> svd(m);
      auto s = svd.singularValues();
      c = std::max(c, s(0) / s(s.size() - 1));
    }
    return c;
  }
};

/// V_a ↦ g_{head} V_a g_{tail}^{-1} (this also covers a* edges).
inline RepPoint gauge_act(const GaugeElement& g, const RepPoint& v) {
  const Quiver& q = *v.quiver;
  if (int(g.g.size()) != q.num_vertices()) throw Error("gauge element has the wrong number of blocks");
  std::vector<Mat> inv;
  for (int i = 0; i < q.num_vertices(); ++i) {
    if (g.g[i].rows() != v.dims[i] || g.g[i].cols() != v.dims[i]) throw Error("gauge block shape mismatch");
    if (v.dims[i] == 0) {
      inv.push_back(g.g[i]);
      continue;
    }
    Eigen::FullPivLU<Mat> lu(g.g[i]);
    if (!lu.isInvertible()) throw Error("gauge block " + q.vertex_name(i) + " is singular");
    inv.push_back(lu.inverse());
  }
  RepPoint out = v;
  for (int e = 0; e < q.num_edges(); ++e) out.mats[e] = g.g[q.edge(e).head] * v.mats[e] * inv[q.edge(e).tail];
  return out;
}

/**
 * A closed path a_1,…,a_ℓ (a_1 applied first) starting and ending at `start`.
 * The empty word is the idempotent 1_start.
 */
struct TraceWord {
  int start = 0;
  std::vector<int> letters;

  static TraceWord make(const Quiver& q, std::vector<int> letters, int start = -1) {
    TraceWord w;
    w.letters = std::move(letters);
    if (w.letters.empty()) {
      if (start < 0 || start >= q.num_vertices()) throw Error("trivial word needs a vertex");
      w.start = start;
      return w;
    }
    w.start = q.edge(w.letters.front()).tail;
    int at = w.start;
    for (int e : w.letters) {
      if (e < 0 || e >= q.num_edges()) throw Error("word letter out of range");
      if (q.edge(e).tail != at) throw Error("word is not composable at letter " + q.edge(e).id);
      at = q.edge(e).head;
    }
    if (at != w.start) throw Error("word does not close up");
    return w;
  }
  static TraceWord from_ids(const Quiver& q, const std::vector<std::string>& ids) {
    std::vector<int> l;
    for (const auto& s : ids) l.push_back(q.edge_index(s));
    return make(q, l);
  }
  static TraceWord trivial(int vertex) {
    TraceWord w;
    w.start = vertex;
    return w;
  }
  bool in_star_part(const Quiver& q) const {
    for (int e : letters)
      if (!q.starred(e) || q.is_base_vertex(q.edge(e).tail) == false || !q.is_base_vertex(q.edge(e).head))
        return false;
    return true;
  }
  std::string str(const Quiver& q) const {
    if (letters.empty()) return "1_" + q.vertex_name(start);
    std::string s;
    for (size_t i = 0; i < letters.size(); ++i) s += (i ? "," : "") + q.edge(letters[i]).id;
    return s;
  }
};

namespace detail {
// V_{a_hi} ⋯ V_{a_lo} for positions lo..hi of a word (inclusive), as a map out of tail(a_lo).
inline Mat path_product(const RepPoint& v, const std::vector<int>& letters, int lo, int hi) {
  const Quiver& q = *v.quiver;
  Mat acc = identity(v.dims[q.edge(letters[lo]).tail]);
  for (int i = lo; i <= hi; ++i) acc = v.mats[letters[i]] * acc;
  return acc;
}
}  // namespace detail

inline cplx trace_word(const RepPoint& v, const TraceWord& w) {
  if (w.letters.empty()) return double(v.dims.at(w.start));
  return detail::path_product(v, w.letters, 0, int(w.letters.size()) - 1).trace();
}

/// ∂ tr(w) / ∂(V_a)_{kl}, arranged with the shape of V_a.
inline Mat word_gradient(const RepPoint& v, const TraceWord& w, int a) {
  const Quiver& q = *v.quiver;
  const auto& ed = q.edge(a);
  Mat g = Mat::Zero(v.dims[ed.head], v.dims[ed.tail]);
  const int len = int(w.letters.size());
  for (int j = 0; j < len; ++j) {
    if (w.letters[j] != a) continue;
    // B = V_{a_{j-1}}⋯V_{a_1} V_{a_ℓ}⋯V_{a_{j+1}} : V_{head a} → V_{tail a}
    Mat b = identity(v.dims[ed.head]);
    for (int s = 1; s < len; ++s) b = v.mats[w.letters[(j + s) % len]] * b;
    g += b.transpose();
  }
  return g;
}

/// Finite sums of products of trace words.
struct TracePoly {
  struct Term {
    cplx coeff = 1;
    std::vector<TraceWord> factors;
  };
  std::vector<Term> terms;

  static TracePoly word(const TraceWord& w, cplx c = 1) { return TracePoly{{Term{c, {w}}}}; }
  static TracePoly constant(cplx c) { return TracePoly{{Term{c, {}}}}; }

  TracePoly& operator+=(const TracePoly& o) {
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    return *this;
  }
  friend TracePoly operator+(TracePoly a, const TracePoly& b) { return a += b; }
  friend TracePoly operator*(cplx c, TracePoly a) {
    for (auto& t : a.terms) t.coeff *= c;
    return a;
  }
  friend TracePoly operator*(const TracePoly& a, const TracePoly& b) {
    TracePoly out;
    for (const auto& s : a.terms)
      for (const auto& t : b.terms) {
        Term u{s.coeff * t.coeff, s.factors};
        u.factors.insert(u.factors.end(), t.factors.begin(), t.factors.end());
        out.terms.push_back(u);
      }
    return out;
  }
};

inline cplx evaluate(const RepPoint& v, const TracePoly& f) {
  cplx s = 0;
  for (const auto& t : f.terms) {
    cplx p = t.coeff;
    for (const auto& w : t.factors) p *= trace_word(v, w);
    s += p;
  }
  return s;
}

/// Entrywise gradients of f with respect to every edge matrix.
inline std::vector<Mat> gradient(const RepPoint& v, const TracePoly& f) {
  const Quiver& q = *v.quiver;
  std::vector<Mat> g;
  for (const auto& e : q.edges()) g.push_back(Mat::Zero(v.dims[e.head], v.dims[e.tail]));
  for (const auto& t : f.terms) {
    std::vector<cplx> vals;
    for (const auto& w : t.factors) vals.push_back(trace_word(v, w));
    for (size_t i = 0; i < t.factors.size(); ++i) {
      cplx c = t.coeff;
      for (size_t j = 0; j < vals.size(); ++j)
        if (j != i) c *= vals[j];
      if (c == cplx(0)) continue;
      std::set<int> letters(t.factors[i].letters.begin(), t.factors[i].letters.end());
      for (int a : letters) g[a] += c * word_gradient(v, t.factors[i], a);
    }
  }
  return g;
}

/// {f,g} = Σ_{a∈Q} tr(∂f/∂V_a · ∂g/∂V_{a*}) − tr(∂g/∂V_a · ∂f/∂V_{a*}).
inline cplx bracket_from_gradients(const Quiver& q, const std::vector<Mat>& gf, const std::vector<Mat>& gg) {
  cplx s = 0;
  for (int a : q.base_edges()) {
    int b = q.star(a);
    if (gf[a].size() == 0) continue;
    s += (gf[a] * gg[b]).trace() - (gg[a] * gf[b]).trace();
  }
  return s;
}

inline cplx poisson_bracket(const RepPoint& v, const TracePoly& f, const TracePoly& g) {
  return bracket_from_gradients(*v.quiver, gradient(v, f), gradient(v, g));
}

/// Hamiltonian vector field dV/dt = {H, V}: V_a' = −(∂H/∂V_{a*})ᵀ on Q, V_{a*}' = (∂H/∂V_a)ᵀ.
inline std::vector<Mat> hamiltonian_field(const Quiver& q, const std::vector<Mat>& grad) {
  std::vector<Mat> d(grad.size());
  for (int e = 0; e < q.num_edges(); ++e) {
    int s = q.star(e);
    d[e] = q.starred(e) ? Mat(grad[s].transpose()) : Mat(-grad[s].transpose());
  }
  return d;
}

/// H_θ = Σ_{a∈Q̄} (−1)^a tr(V_a V_{a*} θ_{head a}).
inline cplx gauge_hamiltonian(const RepPoint& v, const std::vector<Mat>& theta) {
  const Quiver& q = *v.quiver;
  auto p = moment_map(v);
  cplx s = 0;
  for (int i = 0; i < q.num_vertices(); ++i)
    if (v.dims[i] > 0) s += (p[i] * theta[i]).trace();
  return s;
}

/// H_θ as a trace polynomial in the entries of θ (for use with the bracket engine).
inline std::vector<Mat> gauge_hamiltonian_gradient(const RepPoint& v, const std::vector<Mat>& theta) {
  const Quiver& q = *v.quiver;
  std::vector<Mat> g;
  for (const auto& e : q.edges()) g.push_back(Mat::Zero(v.dims[e.head], v.dims[e.tail]));
  // ∂/∂V_a of (−1)^a tr(V_a V_{a*} θ_h) + (−1)^{a*} tr(V_{a*} V_a θ_t)
  for (int e = 0; e < q.num_edges(); ++e) {
    int s = q.star(e);
    int h = q.edge(e).head, t = q.edge(e).tail;
    if (v.dims[h] == 0 || v.dims[t] == 0) continue;
    Mat b1 = v.mats[s] * theta[h];  // from tr(V_e V_s θ_h)
    Mat b2 = theta[t] * v.mats[s];  // from tr(V_s V_e θ_t)
    g[e] += double(q.sign(e)) * b1.transpose() + double(q.sign(s)) * b2.transpose();
  }
  return g;
}

/**
 * Span of the algebra generated by vertex idempotents and all edge maps acting
 * on ⊕V_i; simple iff the span is all of End(⊕V_i).
 */
inline bool is_simple(const RepPoint& v, double tol = 1e-8) {
  const Quiver& q = *v.quiver;
  const int n = v.total_dim();
  if (n == 0) return false;
  std::vector<int> offset(q.num_vertices(), 0);
  for (int i = 1; i < q.num_vertices(); ++i) offset[i] = offset[i - 1] + v.dims[i - 1];
  std::vector<Mat> gens;
  for (int i = 0; i < q.num_vertices(); ++i) {
    if (v.dims[i] == 0) continue;
    Mat e = Mat::Zero(n, n);
    e.block(offset[i], offset[i], v.dims[i], v.dims[i]).setIdentity();
    gens.push_back(e);
  }
  for (int e = 0; e < q.num_edges(); ++e) {
    const auto& ed = q.edge(e);
    if (v.mats[e].size() == 0) continue;
    Mat a = Mat::Zero(n, n);
    a.block(offset[ed.head], offset[ed.tail], v.dims[ed.head], v.dims[ed.tail]) = v.mats[e];
    gens.push_back(a);
  }
  double scale = 0;
  for (const auto& g : gens) scale = std::max(scale, g.norm());
  std::vector<CVec> basis;  // orthonormal, flattened
  std::vector<Mat> elems;
  auto try_add = [&](const Mat& m) {
    CVec x = Eigen::Map<const CVec>(m.data(), m.size());
    double nrm = x.norm();
    if (nrm <= tol * std::max(1.0, scale)) return false;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) x -= b.dot(x) * b;
    if (x.norm() <= tol * nrm) return false;
    basis.push_back(x / x.norm());
    elems.push_back(m / nrm);
    return true;
  };
  for (const auto& g : gens) try_add(g);
  for (size_t i = 0; i < elems.size() && int(basis.size()) < n * n; ++i)
    for (const auto& g : gens) {
      try_add(g * elems[i]);
      if (int(basis.size()) == n * n) break;
    }
  return int(basis.size()) == n * n;
}

/// Closed walks in the double quiver up to the given length, one per rotation class.
inline std::vector<TraceWord> enumerate_cycles(const Quiver& q, int max_len) {
  std::vector<TraceWord> out;
  std::set<std::vector<int>> seen;
  std::vector<int> path;
  std::function<void(int, int)> rec = [&](int start, int at) {
    if (!path.empty() && at == start) {
      std::vector<int> best = path;
      for (size_t r = 1; r < path.size(); ++r) {
        std::vector<int> rot(path.begin() + r, path.end());
        rot.insert(rot.end(), path.begin(), path.begin() + r);
        best = std::min(best, rot);
      }
      if (seen.insert(best).second) out.push_back(TraceWord::make(q, best));
    }
    if (int(path.size()) == max_len) return;
    for (int e = 0; e < q.num_edges(); ++e)
      if (q.edge(e).tail == at) {
        path.push_back(e);
        rec(start, q.edge(e).head);
        path.pop_back();
      }
  };
  for (int v = 0; v < q.num_vertices(); ++v) rec(v, v);
  return out;
}

/// Block-diagonal direct sum of two points over the same quiver.
inline RepPoint direct_sum(const RepPoint& a, const RepPoint& b) {
  if (a.quiver.get() != b.quiver.get() && a.quiver->num_edges() != b.quiver->num_edges())
    throw Error("direct sum needs a common quiver");
  DimVector d(a.dims.size());
  for (size_t i = 0; i < d.size(); ++i) d[i] = a.dims[i] + b.dims[i];
  RepPoint out = RepPoint::zero(a.quiver, d);
  const Quiver& q = *a.quiver;
  for (int e = 0; e < q.num_edges(); ++e) {
    const auto& ed = q.edge(e);
    out.mats[e].block(0, 0, a.dims[ed.head], a.dims[ed.tail]) = a.mats[e];
    out.mats[e].block(a.dims[ed.head], a.dims[ed.tail], b.dims[ed.head], b.dims[ed.tail]) = b.mats[e];
  }
  return out;
}

}  // namespace quiverflow
