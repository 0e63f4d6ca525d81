/**
 * @file reflection.hpp
 * @brief The reflection functor on points of Rep(Π^λ(Q), α) and its checks.
 */
#pragma once

#include "rep_variety.hpp"
#include "roots.hpp"

namespace quiverflow {

enum class KernelMode { Orthonormal, Pivot };

struct ReflectionResult {
  RepPoint point;
  Weight lambda;
  Mat kernel_basis;          // columns spanning Ker π inside V_⊕
  double conditioning = 0;   // smallest retained singular value
  std::vector<int> incoming; // H, the edges with head k
};

inline bool admissible(const Quiver& q, const Weight& lambda, int k, double tol = 1e-12) {
  return k >= 0 && k < q.num_vertices() && q.loop_free(k) && std::abs(lambda.at(k)) > tol;
}

inline ReflectionResult apply_reflection(const RepPoint& v, int k, const Weight& lambda,
                                         KernelMode mode = KernelMode::Orthonormal, double input_tol = 1e-8) {
  const Quiver& q = *v.quiver;
  v.check();
  if (!admissible(q, lambda, k))
    throw PreconditionError("reflection at " + q.vertex_name(k) + " is not admissible");
  if (double r = relation_residual(v, lambda); r > input_tol)
    throw PreconditionError("input violates the relations (residual " + std::to_string(r) + ")");
  const cplx lk = lambda[k];

  std::vector<int> incoming, offset;
  int total = 0;
  for (int e = 0; e < q.num_edges(); ++e)
    if (q.edge(e).head == k) {
      incoming.push_back(e);
      offset.push_back(total);
      total += v.dims[q.edge(e).tail];
    }
  const int ak = v.dims[k];
  Mat mu = Mat::Zero(total, ak), pi = Mat::Zero(ak, total);
  for (size_t s = 0; s < incoming.size(); ++s) {
    int a = incoming[s];
    int n = v.dims[q.edge(a).tail];
    mu.block(offset[s], 0, n, ak) = v.mats[q.star(a)];
    pi.block(0, offset[s], ak, n) = (double(q.sign(a)) / lk) * v.mats[a];
  }
  Mat proj = identity(total) - mu * pi;

  DimVector new_dims = reflect_dim(q, k, v.dims);
  const int nk = new_dims[k];
  if (nk < 0) throw Error("reflected dimension is negative");

  Mat basis, coproj;
  double cond = 0;
  if (total > 0) {
    Eigen::JacobiSVD<Mat> svd(proj, Eigen::ComputeThinU);
    auto s = svd.singularValues();
    double cut = 1e-10 * std::max(s(0), 1.0);  // proj = 1 − μπ has unit scale
    int rank = 0;
    while (rank < s.size() && s(rank) > cut) ++rank;
    if (rank != nk)
      throw Error("kernel rank " + std::to_string(rank) + " does not match reflected dimension " +
                  std::to_string(nk) + " (smallest singular value " +
                  std::to_string(rank > 0 ? s(rank - 1) : 0.0) + ")");
    cond = rank > 0 ? s(rank - 1) : 0.0;
    if (mode == KernelMode::Orthonormal) {
      basis = svd.matrixU().leftCols(rank);
      coproj = basis.adjoint() * proj;
    } else {
      Eigen::ColPivHouseholderQR<Mat> qr(proj);
      Mat cols(total, rank);
      for (int c = 0; c < rank; ++c) cols.col(c) = proj.col(qr.colsPermutation().indices()(c));
      basis = cols;
      coproj = cols.completeOrthogonalDecomposition().pseudoInverse() * proj;
    }
  } else {
    if (nk != 0) throw Error("empty sum but nonzero reflected dimension");
    basis = Mat::Zero(0, 0);
    coproj = Mat::Zero(0, 0);
  }

  RepPoint out = v;
  out.dims = new_dims;
  for (size_t s = 0; s < incoming.size(); ++s) {
    int a = incoming[s];
    int n = v.dims[q.edge(a).tail];
    out.mats[a] = (-lk * double(q.sign(a))) * coproj.block(0, offset[s], nk, n);
    out.mats[q.star(a)] = basis.block(offset[s], 0, n, nk);
  }
  return {out, reflect_weight(q, k, lambda), basis, cond, incoming};
}

/// Max deviation in the identities V'_{b*}V'_a = −λ_k(−1)^a δ_ab + V_{b*}V_a and the two vanishing sums.
inline double reflection_identity_residual(const RepPoint& v, const ReflectionResult& r, int k, const Weight& lambda) {
  const Quiver& q = *v.quiver;
  const auto& w = r.point;
  double err = 0;
  for (int a : r.incoming)
    for (int b : r.incoming) {
      Mat lhs = w.mats[q.star(b)] * w.mats[a];
      Mat rhs = v.mats[q.star(b)] * v.mats[a];
      if (a == b) rhs -= lambda[k] * double(q.sign(a)) * identity(int(rhs.rows()));
      err = std::max(err, max_abs(lhs - rhs));
    }
  Mat s1 = Mat::Zero(w.dims[k], v.dims[k]), s2 = Mat::Zero(v.dims[k], w.dims[k]);
  for (int c : r.incoming) {
    s1 += double(q.sign(c)) * w.mats[c] * v.mats[q.star(c)];
    s2 += double(q.sign(c)) * v.mats[c] * w.mats[q.star(c)];
  }
  return std::max({err, max_abs(s1), max_abs(s2)});
}

/// Words used to compare modules: all closed walks up to the given length.
inline int default_word_length(const Quiver& q) { return std::min(8, 2 * q.num_vertices()); }

inline double trace_discrepancy(const RepPoint& a, const RepPoint& b, const std::vector<TraceWord>& words) {
  double err = 0;
  for (int i = 0; i < a.quiver->num_vertices(); ++i) err = std::max(err, double(std::abs(a.dims[i] - b.dims[i])));
  for (const auto& w : words) err = std::max(err, std::abs(trace_word(a, w) - trace_word(b, w)));
  return err;
}

/// Applies F_k twice and compares trace functions of the result with the input.
inline double involution_check(const RepPoint& v, int k, const Weight& lambda, int max_len = -1) {
  auto once = apply_reflection(v, k, lambda);
  auto twice = apply_reflection(once.point, k, once.lambda);
  if (max_len < 0) max_len = default_word_length(*v.quiver);
  return trace_discrepancy(v, twice.point, enumerate_cycles(*v.quiver, max_len));
}

struct PullbackResult {
  cplx lhs = 0;                 // trace on the reflected point
  cplx rhs = 0;                 // trace on the input
  bool pattern_free = true;     // no letter into k is followed by its own star
  bool match = false;           // lhs ≈ rhs (asserted only when pattern_free)
  // When the pattern occurs: lhs = Σ coeff · tr(subword) on the input point.
  std::vector<std::pair<cplx, TraceWord>> expansion;
  cplx expansion_value = 0;
};

inline PullbackResult trace_pullback_check(const RepPoint& v, int k, const Weight& lambda, const TraceWord& w,
                                           double tol = 1e-9) {
  const Quiver& q = *v.quiver;
  auto refl = apply_reflection(v, k, lambda);
  PullbackResult out;
  out.lhs = trace_word(refl.point, w);
  out.rhs = trace_word(v, w);
  std::vector<int> letters = w.letters;
  if (letters.empty()) {
    out.pattern_free = w.start != k;
    out.expansion.push_back({1.0, w});
    out.expansion_value = w.start == k ? cplx(refl.point.dims[k]) : out.rhs;
    out.match = out.pattern_free && std::abs(out.lhs - out.rhs) <= tol;
    return out;
  }
  // rotate so the word does not start at k; then every passage through k is interior
  const int len = int(letters.size());
  int shift = 0;
  while (shift < len && q.edge(letters[shift]).tail == k) ++shift;
  std::rotate(letters.begin(), letters.begin() + shift, letters.end());
  std::vector<int> pairs;  // positions j with letters[j] into k and letters[j+1] = letters[j]*
  for (int j = 0; j + 1 < len; ++j)
    if (q.edge(letters[j]).head == k && letters[j + 1] == q.star(letters[j])) pairs.push_back(j);
  out.pattern_free = pairs.empty();
  const int start = q.edge(letters.front()).tail;
  for (unsigned mask = 0; mask < (1u << pairs.size()); ++mask) {
    cplx c = 1;
    std::vector<bool> drop(len, false);
    for (size_t s = 0; s < pairs.size(); ++s)
      if (mask & (1u << s)) {
        c *= -lambda[k] * double(q.sign(letters[pairs[s]]));
        drop[pairs[s]] = drop[pairs[s] + 1] = true;
      }
    std::vector<int> sub;
    for (int j = 0; j < len; ++j)
      if (!drop[j]) sub.push_back(letters[j]);
    TraceWord tw = sub.empty() ? TraceWord::trivial(start) : TraceWord::make(q, sub);
    out.expansion.push_back({c, tw});
    out.expansion_value += c * trace_word(v, tw);
  }
  out.match = out.pattern_free && std::abs(out.lhs - out.rhs) <= tol * std::max(1.0, std::abs(out.rhs));
  return out;
}

/// True when some letter entering k is followed (cyclically) by its own star, the case excluded from trace invariance.
inline bool backtracks_at(const Quiver& q, int k, const TraceWord& w) {
  const int len = int(w.letters.size());
  if (len == 0) return w.start == k;
  for (int j = 0; j < len; ++j) {
    int a = w.letters[j], b = w.letters[(j + 1) % len];
    if (q.edge(a).head == k && b == q.star(a)) return true;
  }
  return false;
}

inline double symplectic_proxy_check(const RepPoint& v, int k, const Weight& lambda, const TraceWord& w1,
                                     const TraceWord& w2) {
  auto refl = apply_reflection(v, k, lambda);
  auto f = TracePoly::word(w1), g = TracePoly::word(w2);
  return std::abs(poisson_bracket(v, f, g) - poisson_bracket(refl.point, f, g));
}

/// Shifts of the Hamiltonians H_{ℓ,r} produced by one reflection step (new value = old value + shift).
struct TransportStep {
  int vertex = 0;
  std::vector<cplx> h0_shift;                  // indexed by r-1
  std::map<std::pair<int, int>, cplx> hlr_shift; // (ℓ, r) ↦ shift, only at k = ∞
};

struct ChainResult {
  RepPoint point;
  Weight lambda;
  std::vector<TransportStep> transport;
};

namespace detail {
// Σ over Q*-cycles p at base vertex i of length ℓ of tr V_p.
inline cplx star_cycle_sum(const RepPoint& v, int i, int len) {
  const Quiver& q = *v.quiver;
  cplx s = 0;
  std::vector<int> path;
  std::function<void(int)> rec = [&](int at) {
    if (int(path.size()) == len) {
      if (at == i) s += trace_word(v, len == 0 ? TraceWord::trivial(i) : TraceWord::make(q, path));
      return;
    }
    for (int e = 0; e < q.num_edges(); ++e) {
      const auto& ed = q.edge(e);
      if (!q.starred(e) || ed.tail != at || !q.is_base_vertex(ed.head) || !q.is_base_vertex(ed.tail)) continue;
      path.push_back(e);
      rec(ed.head);
      path.pop_back();
    }
  };
  rec(i);
  return s;
}
}  // namespace detail

/// Folds apply_reflection along `chain` on a framed double quiver, recording Hamiltonian transport.
inline ChainResult chain_apply(const RepPoint& v, const std::vector<int>& chain, const Weight& lambda,
                               int max_path_length = 4) {
  const Quiver& q = *v.quiver;
  ChainResult res{v, lambda, {}};
  int maxz = 0;
  for (int i = 0; i < q.num_vertices(); ++i) maxz = std::max(maxz, q.zeta(i));
  for (size_t s = 0; s < chain.size(); ++s) {
    int k = chain[s];
    if (!admissible(q, res.lambda, k))
      throw PreconditionError("chain step " + std::to_string(s) + " at vertex " + q.vertex_name(k) +
                              " is not admissible");
    TransportStep step{k, std::vector<cplx>(maxz, 0.0), {}};
    if (q.framed()) {
      const int inf = q.infinity();
      const cplx lk = res.lambda[k];
      if (k != inf) {
        for (int r = 1; r <= q.zeta(k); ++r) step.h0_shift[r - 1] = lk * double(res.point.dims[inf]);
      } else {
        for (int r = 1; r <= maxz; ++r) {
          cplx sum = 0;
          for (int i = 0; i < q.num_vertices(); ++i)
            if (i != inf && r <= q.zeta(i)) sum += double(res.point.dims[i]);
          step.h0_shift[r - 1] = -lk * sum;
          for (int l = 1; l <= max_path_length; ++l) {
            cplx hs = 0;
            for (int i = 0; i < q.num_vertices(); ++i)
              if (i != inf && r <= q.zeta(i)) hs += detail::star_cycle_sum(res.point, i, l);
            step.hlr_shift[{l, r}] = -lk * hs;
          }
        }
      }
    }
    auto r = apply_reflection(res.point, k, res.lambda);
    res.point = r.point;
    res.lambda = r.lambda;
    res.transport.push_back(step);
  }
  return res;
}

}  // namespace quiverflow
