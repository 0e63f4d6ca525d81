/**
 * @file hamiltonians.hpp
 * @brief Hamiltonians H_p, integrals I_A, the family H_{ℓ,r}, the Lie algebra L_ζ
 *        and the corresponding flows on framed representation spaces.
 */
#pragma once

#include "rep_variety.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace quiverflow {

/// A path in Q*: starred edges of base edges, a_1 applied first.
struct StarPath {
  int start = 0;
  int end = 0;
  std::vector<int> letters;

  int length() const { return int(letters.size()); }
  bool operator<(const StarPath& o) const {
    return std::tie(start, end, letters) < std::tie(o.start, o.end, o.letters);
  }
  bool operator==(const StarPath& o) const {
    return start == o.start && end == o.end && letters == o.letters;
  }
};

inline bool is_star_letter(const Quiver& q, int e) {
  if (!q.starred(e)) return false;
  const auto& ed = q.edge(e);
  return q.is_base_vertex(ed.tail) && q.is_base_vertex(ed.head);
}

/// All Q*-paths of the given length from i to j.
inline std::vector<StarPath> star_paths(const Quiver& q, int i, int j, int length) {
  std::vector<StarPath> out;
  std::vector<int> letters;
  std::function<void(int)> rec = [&](int at) {
    if (int(letters.size()) == length) {
      if (at == j) out.push_back({i, j, letters});
      return;
    }
    for (int e = 0; e < q.num_edges(); ++e)
      if (is_star_letter(q, e) && q.edge(e).tail == at) {
        letters.push_back(e);
        rec(q.edge(e).head);
        letters.pop_back();
      }
  };
  rec(i);
  return out;
}

inline std::vector<StarPath> all_star_paths(const Quiver& q, int length) {
  std::vector<StarPath> out;
  for (int i = 0; i < q.num_vertices(); ++i)
    for (int j = 0; j < q.num_vertices(); ++j)
      if (q.is_base_vertex(i) && q.is_base_vertex(j)) {
        auto p = star_paths(q, i, j, length);
        out.insert(out.end(), p.begin(), p.end());
      }
  return out;
}

/// Product V_p : V_i → V_j.
inline Mat path_matrix(const RepPoint& v, const StarPath& p) {
  Mat acc = identity(v.dims[p.start]);
  for (int e : p.letters) acc = v.mats[e] * acc;
  return acc;
}

inline cplx hamiltonian_Hp(const RepPoint& v, const StarPath& p) {
  const Quiver& q = *v.quiver;
  if (p.start != p.end) throw Error("H_p needs a cycle");
  for (int e : p.letters)
    if (!is_star_letter(q, e)) throw Error("H_p needs a cycle in Q*, got letter " + q.edge(e).id);
  return path_matrix(v, p).trace();
}

inline TraceWord star_word(const Quiver& q, const StarPath& p) {
  return p.letters.empty() ? TraceWord::trivial(p.start) : TraceWord::make(q, p.letters);
}

/// Element of L_ζ: A_p ∈ Hom(ℂ^{ζ_j}, ℂ^{ζ_i}) (a ζ_i × ζ_j matrix) for p ∈ P_ij.
struct LZetaElement {
  std::map<StarPath, Mat> comps;
  int cap = 12;

  void add(const StarPath& p, const Mat& a) {
    if (p.length() > cap) throw Error("path length exceeds the L_zeta cap");
    auto it = comps.find(p);
    if (it == comps.end()) comps[p] = a;
    else it->second += a;
  }
  int max_length() const {
    int l = 0;
    for (const auto& [p, a] : comps) l = std::max(l, p.length());
    return l;
  }
  double norm() const {
    double s = 0;
    for (const auto& [p, a] : comps) s = std::max(s, max_abs(a));
    return s;
  }
};

inline LZetaElement operator-(const LZetaElement& a, const LZetaElement& b) {
  LZetaElement out = a;
  out.cap = std::max(a.cap, b.cap);
  for (const auto& [p, m] : b.comps) out.add(p, -m);
  return out;
}

inline Mat unit_rect(int rows, int cols, int r) {
  Mat e = Mat::Zero(rows, cols);
  if (r >= 1 && r <= std::min(rows, cols)) e(r - 1, r - 1) = 1;
  return e;
}

/// E_r^{(ℓ)}: E_r on every Q*-path of length ℓ.
inline LZetaElement E_element(const Quiver& q, int l, int r, int cap = 12) {
  LZetaElement a;
  a.cap = std::max(cap, l);
  for (const auto& p : all_star_paths(q, l)) a.add(p, unit_rect(q.zeta(p.start), q.zeta(p.end), r));
  return a;
}

/// J_ℓ(T): T on every Q*-path of length ℓ (all framings equal to T's size).
inline LZetaElement J_element(const Quiver& q, int l, const Mat& t, int cap = 12) {
  LZetaElement a;
  a.cap = std::max(cap, l);
  for (const auto& p : all_star_paths(q, l)) {
    if (q.zeta(p.start) != t.rows() || q.zeta(p.end) != t.cols()) throw Error("J element needs uniform framing");
    a.add(p, t);
  }
  return a;
}

/// [A,B]_p = Σ_{p = p''p'} (A_{p'} B_{p''} − B_{p'} A_{p''}), p' traversed first.
inline LZetaElement lzeta_bracket(const LZetaElement& a, const LZetaElement& b) {
  LZetaElement out;
  out.cap = std::max(a.cap, b.cap);
  if (a.max_length() + b.max_length() > out.cap) throw Error("bracket exceeds the L_zeta cap");
  for (const auto& [p1, x] : a.comps)
    for (const auto& [p2, y] : b.comps) {
      if (p1.end == p2.start) {  // p = p2 ∘ p1
        StarPath p{p1.start, p2.end, p1.letters};
        p.letters.insert(p.letters.end(), p2.letters.begin(), p2.letters.end());
        out.add(p, x * y);
      }
      if (p2.end == p1.start) {  // p = p1 ∘ p2
        StarPath p{p2.start, p1.end, p2.letters};
        p.letters.insert(p.letters.end(), p1.letters.begin(), p1.letters.end());
        out.add(p, -(y * x));
      }
    }
  return out;
}

/// I_A = −Σ tr(A_p w_j V_p v_i) as a polynomial in trace words through ∞.
inline TracePoly integral_poly(const Quiver& q, const LZetaElement& a) {
  if (!q.framed()) throw Error("integrals need a framed quiver");
  TracePoly f;
  for (const auto& [p, m] : a.comps) {
    if (m.rows() != q.zeta(p.start) || m.cols() != q.zeta(p.end))
      throw Error("L_zeta component has the wrong shape");
    for (int r = 1; r <= m.rows(); ++r)
      for (int s = 1; s <= m.cols(); ++s) {
        if (m(r - 1, s - 1) == cplx(0)) continue;
        std::vector<int> letters{q.framing_edges()[p.start][r - 1]};
        letters.insert(letters.end(), p.letters.begin(), p.letters.end());
        letters.push_back(q.star(q.framing_edges()[p.end][s - 1]));
        f += TracePoly::word(TraceWord::make(q, letters), -m(r - 1, s - 1));
      }
  }
  return f;
}

/// Framing matrices v_i (α_i × ζ_i) and w_i (ζ_i × α_i) of a point with α_∞ = 1.
inline Mat framing_v(const RepPoint& v, int i) {
  const Quiver& q = *v.quiver;
  Mat out(v.dims[i], q.zeta(i));
  for (int r = 0; r < q.zeta(i); ++r) out.col(r) = v.mats[q.framing_edges()[i][r]];
  return out;
}
inline Mat framing_w(const RepPoint& v, int i) {
  const Quiver& q = *v.quiver;
  Mat out(q.zeta(i), v.dims[i]);
  for (int r = 0; r < q.zeta(i); ++r) out.row(r) = v.mats[q.star(q.framing_edges()[i][r])];
  return out;
}

inline cplx integral_IA(const RepPoint& v, const LZetaElement& a) {
  const Quiver& q = *v.quiver;
  if (!q.framed()) throw Error("integrals need a framed quiver");
  if (v.dims[q.infinity()] != 1) return evaluate(v, integral_poly(q, a));
  cplx s = 0;
  for (const auto& [p, m] : a.comps) {
    if (p.length() > a.cap) throw Error("path length exceeds the L_zeta cap");
    s -= (m * framing_w(v, p.end) * path_matrix(v, p) * framing_v(v, p.start)).trace();
  }
  return s;
}

inline cplx hamiltonian_Hlr(const RepPoint& v, int l, int r) {
  return integral_IA(v, E_element(*v.quiver, l, r, std::max(12, l)));
}

/// Exact flow of H_p: only unstarred base matrices move, linearly in t.
inline RepPoint flow_exact_Hp(const RepPoint& v, const StarPath& p, cplx t) {
  const Quiver& q = *v.quiver;
  hamiltonian_Hp(v, p);
  auto field = hamiltonian_field(q, gradient(v, TracePoly::word(star_word(q, p))));
  RepPoint out = v;
  for (int e = 0; e < q.num_edges(); ++e) out.mats[e] += t * field[e];
  return out;
}

struct Trajectory {
  std::vector<cplx> times;
  std::vector<RepPoint> points;
  std::vector<std::string> names;           // logged quantities
  std::vector<std::vector<cplx>> log;       // per time, one value per name
  double max_drift(size_t column) const {
    double d = 0;
    for (const auto& row : log) d = std::max(d, std::abs(row[column] - log.front()[column]));
    return d;
  }
};

namespace detail {
inline std::vector<std::pair<int, int>> framing_slots(const RepPoint& v) {
  // (edge, size) for every framing edge and its star, in a fixed order
  const Quiver& q = *v.quiver;
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < q.num_vertices(); ++i)
    for (int e : q.framing_edges()[i]) {
      out.push_back({e, v.dims[i]});
      out.push_back({q.star(e), v.dims[i]});
    }
  return out;
}
inline CVec pack(const RepPoint& v, const std::vector<std::pair<int, int>>& slots) {
  int n = 0;
  for (auto [e, s] : slots) n += s;
  CVec z(n);
  int at = 0;
  for (auto [e, s] : slots) {
    z.segment(at, s) = Eigen::Map<const CVec>(v.mats[e].data(), s);
    at += s;
  }
  return z;
}
inline void unpack(RepPoint& v, const std::vector<std::pair<int, int>>& slots, const CVec& z) {
  int at = 0;
  for (auto [e, s] : slots) {
    Eigen::Map<CVec>(v.mats[e].data(), s) = z.segment(at, s);
    at += s;
  }
}
}  // namespace detail

/**
 * Flow of I_A. The framing data solve a linear system with constant coefficients
 * (starred base matrices do not move) and are advanced by a matrix exponential;
 * unstarred base matrices are integrated by adaptive Simpson quadrature with
 * Richardson correction.
 */
inline Trajectory flow_IA(const RepPoint& v0, const LZetaElement& a, cplx t, int steps,
                          const std::vector<std::pair<std::string, TracePoly>>& watch = {}, double tol = 1e-10) {
  const Quiver& q = *v0.quiver;
  if (steps < 1) throw PreconditionError("steps must be >= 1");
  const TracePoly ia = integral_poly(q, a);
  const auto slots = detail::framing_slots(v0);
  const CVec z0 = detail::pack(v0, slots);
  const int nz = int(z0.size());

  // linear generator on framing data
  Mat omega = Mat::Zero(nz, nz);
  {
    RepPoint probe = v0;
    for (int c = 0; c < nz; ++c) {
      CVec e = CVec::Zero(nz);
      e(c) = 1;
      detail::unpack(probe, slots, e);
      auto field = hamiltonian_field(q, gradient(probe, ia));
      RepPoint df = probe;
      for (int k = 0; k < q.num_edges(); ++k) df.mats[k] = field[k];
      omega.col(c) = detail::pack(df, slots);
    }
  }
  std::vector<int> moving;  // unstarred base edges
  int nv = 0;
  for (int e = 0; e < q.num_edges(); ++e)
    if (!q.starred(e) && q.is_base_vertex(q.edge(e).tail)) {
      moving.push_back(e);
      nv += int(v0.mats[e].size());
    }
  auto rhs = [&](cplx s) {
    RepPoint p = v0;
    detail::unpack(p, slots, Mat((omega * s).exp()) * z0);
    auto field = hamiltonian_field(q, gradient(p, ia));
    CVec out(nv);
    int at = 0;
    for (int e : moving) {
      int sz = int(field[e].size());
      out.segment(at, sz) = Eigen::Map<const CVec>(field[e].data(), sz);
      at += sz;
    }
    return out;
  };
  // integrate along the segment s = τ·t, τ ∈ [0,1]
  std::function<CVec(double, double, const CVec&, const CVec&, const CVec&, const CVec&, double, int)> simpson;
  simpson = [&](double lo, double hi, const CVec& flo, const CVec& fmid, const CVec& fhi, const CVec& whole,
                double eps, int depth) -> CVec {
    double mid = 0.5 * (lo + hi);
    CVec fl = rhs(0.5 * (lo + mid) * t), fr = rhs(0.5 * (mid + hi) * t);
    double h = (hi - lo) / 12.0;
    CVec left = h * (flo + 4.0 * fl + fmid), right = h * (fmid + 4.0 * fr + fhi);
    CVec diff = left + right - whole;
    double scale = std::max(1.0, (left + right).cwiseAbs().maxCoeff());
    if (depth <= 0 && diff.cwiseAbs().maxCoeff() > 15 * eps * scale)
      throw Error("flow quadrature: step-size underflow");
    if (diff.size() == 0 || diff.cwiseAbs().maxCoeff() <= 15 * eps * scale)
      return CVec(left + right + diff / 15.0);
    return CVec(simpson(lo, mid, flo, fl, fmid, left, eps / 2, depth - 1) +
                simpson(mid, hi, fmid, fr, fhi, right, eps / 2, depth - 1));
  };

  Trajectory traj;
  traj.names = {"relation_residual", "I_A"};
  for (const auto& [name, f] : watch) traj.names.push_back(name);
  auto record = [&](cplx time, const RepPoint& p, const Weight* lam) {
    std::vector<cplx> row{lam ? cplx(relation_residual(p, *lam)) : cplx(0), evaluate(p, ia)};
    for (const auto& [name, f] : watch) row.push_back(evaluate(p, f));
    traj.times.push_back(time);
    traj.points.push_back(p);
    traj.log.push_back(row);
  };
  // weight is recovered from the initial point's moment map (scalar blocks)
  Weight lam(q.num_vertices(), 0.0);
  {
    auto pm = moment_map(v0);
    for (int i = 0; i < q.num_vertices(); ++i)
      if (v0.dims[i] > 0) lam[i] = pm[i].trace() / double(v0.dims[i]);
  }
  record(0.0, v0, &lam);
  CVec acc = CVec::Zero(nv);
  CVec f_prev = rhs(0.0);
  for (int k = 0; k < steps; ++k) {
    double lo = double(k) / steps, hi = double(k + 1) / steps;
    CVec fhi = rhs(hi * t), fmid = rhs(0.5 * (lo + hi) * t);
    CVec whole = ((hi - lo) / 6.0) * (f_prev + 4.0 * fmid + fhi);
    acc += t * simpson(lo, hi, f_prev, fmid, fhi, whole, tol, 40);
    f_prev = fhi;
    RepPoint p = v0;
    detail::unpack(p, slots, Mat((omega * (hi * t)).exp()) * z0);
    int at = 0;
    for (int e : moving) {
      int sz = int(p.mats[e].size());
      Eigen::Map<CVec>(p.mats[e].data(), sz) += acc.segment(at, sz);
      at += sz;
    }
    record(hi * t, p, &lam);
  }
  return traj;
}

}  // namespace quiverflow
