/**
 * @file roots.hpp
 * @brief Symmetric bilinear form, reflections, root classification and
 *        bounded searches over roots and reflection orbits.
 */
#pragma once

#include "quiver.hpp"

#include <deque>
#include <functional>
#include <set>
#include <sstream>

namespace quiverflow {

inline void check_length(const Quiver& q, size_t n) {
  if (int(n) != q.num_vertices()) throw Error("vector length does not match vertex count");
}

inline int bilinear_form(const Quiver& q, const DimVector& a, const DimVector& b) {
  check_length(q, a.size());
  check_length(q, b.size());
  int s = 0;
  for (int i = 0; i < q.num_vertices(); ++i) s += 2 * a[i] * b[i];
  for (int e : q.base_edges()) {
    const auto& ed = q.edge(e);
    s -= a[ed.tail] * b[ed.head] + a[ed.head] * b[ed.tail];
  }
  return s;
}

// (ε_i, ε_j) = 2δ_ij − n_ij
inline int cartan_entry(const Quiver& q, int i, int j) {
  int n = q.num_vertices();
  return bilinear_form(q, unit_vector(n, i), unit_vector(n, j));
}

struct TitsForms {
  int q = 0;
  int p = 0;
};

inline TitsForms tits_forms(const Quiver& quiver, const DimVector& a) {
  int f = bilinear_form(quiver, a, a);
  return {f / 2, 1 - f / 2};
}

inline void require_loop_free(const Quiver& q, int k) {
  if (k < 0 || k >= q.num_vertices()) throw Error("vertex index out of range");
  if (!q.loop_free(k)) throw PreconditionError("vertex " + q.vertex_name(k) + " carries a loop");
}

inline DimVector reflect_dim(const Quiver& q, int k, const DimVector& a) {
  require_loop_free(q, k);
  DimVector out = a;
  out[k] -= bilinear_form(q, a, unit_vector(q.num_vertices(), k));
  return out;
}

inline Weight reflect_weight(const Quiver& q, int k, const Weight& lambda) {
  require_loop_free(q, k);
  check_length(q, lambda.size());
  Weight out = lambda;
  for (int j = 0; j < q.num_vertices(); ++j) out[j] = lambda[j] - double(cartan_entry(q, k, j)) * lambda[k];
  return out;
}

enum class RootKind { NotRoot, Real, Imaginary };

struct RootClass {
  RootKind kind = RootKind::NotRoot;
  int sign = 1;                 // +1 positive root, −1 negative root
  std::vector<int> chain;       // reflections applied, in order
  DimVector reduced;            // image after the chain (ε_i or an element of F)

  bool is_root() const { return kind != RootKind::NotRoot; }
  std::string str() const {
    switch (kind) {
      case RootKind::NotRoot: return "not-a-root";
      case RootKind::Real: return sign > 0 ? "real(+)" : "real(-)";
      case RootKind::Imaginary: return sign > 0 ? "imaginary(+)" : "imaginary(-)";
    }
    return "";
  }
};

inline bool support_connected(const Quiver& q, const DimVector& a) {
  const int n = q.num_vertices();
  int start = -1;
  for (int i = 0; i < n; ++i)
    if (a[i] != 0) {
      start = i;
      break;
    }
  if (start < 0) return false;
  std::vector<bool> seen(n, false);
  std::vector<int> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int e : q.base_edges()) {
      const auto& ed = q.edge(e);
      int other = -1;
      if (ed.tail == v) other = ed.head;
      if (ed.head == v) other = ed.tail;
      if (other >= 0 && !seen[other] && a[other] != 0) {
        seen[other] = true;
        stack.push_back(other);
      }
    }
  }
  for (int i = 0; i < n; ++i)
    if (a[i] != 0 && !seen[i]) return false;
  return true;
}

// α ≥ 0, nonzero, (α,ε_i) ≤ 0 for all i, connected support.
inline bool in_fundamental_domain(const Quiver& q, const DimVector& a) {
  const int n = q.num_vertices();
  bool nonzero = false;
  for (int x : a) {
    if (x < 0) return false;
    if (x > 0) nonzero = true;
  }
  if (!nonzero) return false;
  for (int i = 0; i < n; ++i)
    if (bilinear_form(q, a, unit_vector(n, i)) > 0) return false;
  return support_connected(q, a);
}

inline RootClass classify_root(const Quiver& q, const DimVector& alpha) {
  check_length(q, alpha.size());
  const int n = q.num_vertices();
  RootClass rc;
  bool pos = false, neg = false;
  for (int x : alpha) {
    pos |= x > 0;
    neg |= x < 0;
  }
  if (pos == neg) {  // zero vector or mixed signs
    rc.reduced = alpha;
    return rc;
  }
  DimVector a = alpha;
  if (neg) {
    rc.sign = -1;
    for (auto& x : a) x = -x;
  }
  while (true) {
    for (int i = 0; i < n; ++i)
      if (q.loop_free(i) && a == unit_vector(n, i)) {
        rc.kind = RootKind::Real;
        rc.reduced = a;
        return rc;
      }
    int k = -1;
    for (int i = 0; i < n && k < 0; ++i)
      if (q.loop_free(i) && bilinear_form(q, a, unit_vector(n, i)) > 0) k = i;
    if (k < 0) {
      rc.kind = support_connected(q, a) ? RootKind::Imaginary : RootKind::NotRoot;
      rc.reduced = a;
      return rc;
    }
    a = reflect_dim(q, k, a);
    rc.chain.push_back(k);
    for (int x : a)
      if (x < 0) {
        rc.kind = RootKind::NotRoot;
        rc.reduced = a;
        return rc;
      }
  }
}

// All α ≥ 0 with 1 ≤ Σα ≤ h.
inline void for_each_nonneg(int n, int h, const std::function<void(const DimVector&)>& f) {
  DimVector a(n, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == n) {
      if (left < h) f(a);
      return;
    }
    for (int x = 0; x <= left; ++x) {
      a[i] = x;
      rec(i + 1, left - x);
    }
    a[i] = 0;
  };
  rec(0, h);
}

struct RegularityResult {
  bool regular = true;
  bool exact = false;  // true when decided by the closed-form cyclic criterion
  int bound = 0;       // height bound used by the enumeration otherwise
  std::optional<DimVector> witness;
};

inline bool near_integer(cplx z, double tol, long* k = nullptr) {
  double r = std::round(z.real());
  if (k) *k = long(r);
  return std::abs(z - cplx(r, 0)) < tol;
}

inline RegularityResult is_regular(const Quiver& q, const Weight& lambda, int height_bound,
                                   double tol = 1e-12) {
  check_length(q, lambda.size());
  if (height_bound < 1) throw PreconditionError("height bound must be >= 1");
  RegularityResult res;
  const int n = q.num_vertices();
  const int m = q.framed() ? 0 : cyclic_order(q);
  if (m > 0) {
    res.exact = true;
    cplx total = 0;
    for (auto l : lambda) total += l;
    DimVector delta(n, 1);
    if (std::abs(total) < tol) {
      res.regular = false;
      res.witness = delta;
      return res;
    }
    // vertex order along the cycle
    std::vector<int> order{0};
    for (int s = 1; s < m; ++s)
      for (int e : q.base_edges())
        if (q.edge(e).tail == order.back()) {
          order.push_back(q.edge(e).head);
          break;
        }
    for (int start = 0; start < m; ++start)
      for (int len = 1; len < m; ++len) {
        cplx seg = 0;
        DimVector beta(n, 0);
        for (int s = 0; s < len; ++s) {
          int v = order[(start + s) % m];
          seg += lambda[v];
          beta[v] = 1;
        }
        long k = 0;
        if (near_integer(seg / total, 1e-10, &k)) {
          DimVector w(n);
          for (int i = 0; i < n; ++i) w[i] = k >= 1 ? int(k) * delta[i] - beta[i] : beta[i] - int(k) * delta[i];
          res.regular = false;
          res.witness = w;
          return res;
        }
      }
    return res;
  }
  res.bound = height_bound;
  std::optional<DimVector> found;
  for_each_nonneg(n, height_bound, [&](const DimVector& a) {
    if (found) return;
    if (classify_root(q, a).is_root() && std::abs(dot(lambda, a)) < tol) found = a;
  });
  if (found) {
    res.regular = false;
    res.witness = found;
  }
  return res;
}

enum class Tri { Yes, No, Unknown };

inline std::string tri_str(Tri t) { return t == Tri::Yes ? "yes" : t == Tri::No ? "no" : "unknown"; }

struct DecompositionResult {
  Tri answer = Tri::Unknown;
  std::vector<DimVector> witness;
  long bound = 0;
  long explored = 0;
};

namespace detail {

// Positive roots β with 0 < β ≤ α componentwise and λ·β = 0.
inline std::vector<DimVector> annihilated_roots_below(const Quiver& q, const Weight& lambda,
                                                       const DimVector& alpha, double tol) {
  std::vector<DimVector> out;
  const int n = q.num_vertices();
  DimVector b(n, 0);
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      bool nz = false;
      for (int x : b) nz |= x != 0;
      if (nz && classify_root(q, b).is_root() && std::abs(dot(lambda, b)) < tol) out.push_back(b);
      return;
    }
    for (int x = 0; x <= alpha[i]; ++x) {
      b[i] = x;
      rec(i + 1);
    }
    b[i] = 0;
  };
  rec(0);
  return out;
}

// Enumerate multisets of roots (indices non-increasing) summing to target.
// The visitor returns false to stop. Returns false when the node budget ran out.
inline bool enumerate_decompositions(const std::vector<DimVector>& roots, const DimVector& target,
                                     long budget, long& explored,
                                     const std::function<bool(const std::vector<int>&)>& visit) {
  std::vector<int> chosen;
  DimVector rest = target;
  bool stopped = false, exhausted = false;
  std::function<void(int)> rec = [&](int max_index) {
    if (stopped || exhausted) return;
    if (++explored > budget) {
      exhausted = true;
      return;
    }
    bool zero = true;
    for (int x : rest) zero &= x == 0;
    if (zero) {
      if (!visit(chosen)) stopped = true;
      return;
    }
    for (int r = max_index; r >= 0; --r) {
      bool fits = true;
      for (size_t i = 0; i < rest.size(); ++i) fits &= roots[r][i] <= rest[i];
      if (!fits) continue;
      for (size_t i = 0; i < rest.size(); ++i) rest[i] -= roots[r][i];
      chosen.push_back(r);
      rec(r);
      chosen.pop_back();
      for (size_t i = 0; i < rest.size(); ++i) rest[i] += roots[r][i];
      if (stopped || exhausted) return;
    }
  };
  rec(int(roots.size()) - 1);
  return !exhausted;
}

}  // namespace detail

inline DecompositionResult rep_existence(const Quiver& q, const Weight& lambda, const DimVector& alpha,
                                         long bound, double tol = 1e-10) {
  check_length(q, alpha.size());
  check_length(q, lambda.size());
  for (int x : alpha)
    if (x < 0) throw PreconditionError("rep_existence needs α ≥ 0");
  DecompositionResult res;
  res.bound = bound;
  bool zero = true;
  for (int x : alpha) zero &= x == 0;
  if (zero) {
    res.answer = Tri::Yes;
    return res;
  }
  long boxes = 1;
  for (int x : alpha) {
    boxes *= (x + 1);
    if (boxes > bound) return res;
  }
  auto roots = detail::annihilated_roots_below(q, lambda, alpha, tol);
  std::vector<int> found;
  bool complete = detail::enumerate_decompositions(roots, alpha, bound, res.explored,
                                                   [&](const std::vector<int>& c) {
                                                     found = c;
                                                     return false;
                                                   });
  if (!found.empty()) {
    res.answer = Tri::Yes;
    for (int i : found) res.witness.push_back(roots[i]);
  } else {
    res.answer = complete ? Tri::No : Tri::Unknown;
  }
  return res;
}

inline DecompositionResult sigma_lambda_test(const Quiver& q, const Weight& lambda, const DimVector& alpha,
                                             long bound, double tol = 1e-10) {
  auto rc = classify_root(q, alpha);
  if (!rc.is_root() || rc.sign < 0) throw PreconditionError("α is not a positive root");
  if (std::abs(dot(lambda, alpha)) > tol) throw PreconditionError("λ·α ≠ 0");
  DecompositionResult res;
  res.bound = bound;
  const int p_alpha = tits_forms(q, alpha).p;
  auto roots = detail::annihilated_roots_below(q, lambda, alpha, tol);
  std::vector<int> bad;
  bool complete = detail::enumerate_decompositions(roots, alpha, bound, res.explored,
                                                   [&](const std::vector<int>& c) {
                                                     if (c.size() < 2) return true;
                                                     int s = 0;
                                                     for (int i : c) s += tits_forms(q, roots[i]).p;
                                                     if (p_alpha > s) return true;
                                                     bad = c;
                                                     return false;
                                                   });
  if (!bad.empty()) {
    res.answer = Tri::No;
    for (int i : bad) res.witness.push_back(roots[i]);
  } else {
    res.answer = complete ? Tri::Yes : Tri::Unknown;
  }
  return res;
}

/// Breadth-first search over admissible reflections (λ,α) ↦ (r_kλ, s_kα).
inline std::optional<std::vector<int>> orbit_search(
    const Quiver& q, const Weight& lambda, const DimVector& alpha,
    const std::function<bool(const Weight&, const DimVector&)>& target, int depth, double tol = 1e-12) {
  if (depth < 0) throw PreconditionError("depth must be >= 0");
  struct Node {
    Weight lambda;
    DimVector alpha;
    std::vector<int> chain;
  };
  auto key = [](const Weight& l, const DimVector& a) {
    std::ostringstream s;
    for (int x : a) s << x << ',';
    s.precision(9);
    for (auto z : l) s << z.real() << ':' << z.imag() << ';';
    return s.str();
  };
  std::deque<Node> queue{{lambda, alpha, {}}};
  std::set<std::string> seen{key(lambda, alpha)};
  while (!queue.empty()) {
    Node cur = queue.front();
    queue.pop_front();
    if (target(cur.lambda, cur.alpha)) return cur.chain;
    if (int(cur.chain.size()) >= depth) continue;
    for (int k = 0; k < q.num_vertices(); ++k) {
      if (!q.loop_free(k) || std::abs(cur.lambda[k]) <= tol) continue;
      Node next{reflect_weight(q, k, cur.lambda), reflect_dim(q, k, cur.alpha), cur.chain};
      next.chain.push_back(k);
      if (seen.insert(key(next.lambda, next.alpha)).second) queue.push_back(std::move(next));
    }
  }
  return std::nullopt;
}

struct OrbitScanRow {
  DimVector alpha;                 // base part; the framed vector is (1, alpha)
  bool in_orbit = false;
  int n = 0;                       // matching (1, nδ) when in_orbit
  std::vector<int> chain;          // reflections taking (1,alpha) to (1,nδ)
};

/**
 * Scan of the imaginary roots (1,α) of the framed cyclic quiver with height(α) ≤ h,
 * recording whether each lies in the Weyl orbit of some (1,nδ). Each orbit of
 * imaginary roots meets the fundamental domain once, so membership is decided
 * by comparing the descents of both vectors.
 */
inline std::vector<OrbitScanRow> orbit_scan(int m, const DimVector& zeta, int h) {
  FramedQuiver fq = frame(cyclic_quiver(m), zeta);
  const Quiver& q = fq.quiver;
  std::vector<OrbitScanRow> rows;
  std::map<DimVector, std::pair<int, std::vector<int>>> targets;
  for (int n = 1; n <= h + 2; ++n) {
    DimVector t(m + 1, n);
    t[0] = 1;
    auto rc = classify_root(q, t);
    if (rc.kind == RootKind::Imaginary && !targets.count(rc.reduced)) targets[rc.reduced] = {n, rc.chain};
  }
  for_each_nonneg(m, h, [&](const DimVector& a) {
    DimVector full{1};
    full.insert(full.end(), a.begin(), a.end());
    auto rc = classify_root(q, full);
    if (rc.kind != RootKind::Imaginary) return;
    OrbitScanRow row;
    row.alpha = a;
    auto it = targets.find(rc.reduced);
    if (it != targets.end()) {
      row.in_orbit = true;
      row.n = it->second.first;
      row.chain = rc.chain;
      for (auto r = it->second.second.rbegin(); r != it->second.second.rend(); ++r) row.chain.push_back(*r);
    }
    rows.push_back(row);
  });
  return rows;
}

}  // namespace quiverflow
