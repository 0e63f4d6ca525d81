/**
 * @file cyclic.hpp
 * @brief Framed cyclic quivers: matrix data (X_i, Y_i, v_i, w_i), block lifts,
 *        Darboux charts, explicit Hamiltonians and flows.
 */
#pragma once

#include "hamiltonians.hpp"
#include "roots.hpp"

namespace quiverflow {

struct CyclicPoint {
  int m = 1;
  DimVector alpha;          // per vertex
  DimVector zeta;           // framing per vertex
  std::vector<Mat> X, Y;    // X_i : V_i → V_{i+1},  Y_i : V_{i+1} → V_i
  std::vector<Mat> v, w;    // v_i : α_i × ζ_i,  w_i : ζ_i × α_i

  int next(int i) const { return mod(i + 1, m); }

  static CyclicPoint zero(int m, DimVector alpha, DimVector zeta) {
    CyclicPoint p{m, std::move(alpha), std::move(zeta), {}, {}, {}, {}};
    if (int(p.alpha.size()) != m || int(p.zeta.size()) != m) throw Error("cyclic data length mismatch");
    for (int i = 0; i < m; ++i) {
      p.X.push_back(Mat::Zero(p.alpha[p.next(i)], p.alpha[i]));
      p.Y.push_back(Mat::Zero(p.alpha[i], p.alpha[p.next(i)]));
      p.v.push_back(Mat::Zero(p.alpha[i], p.zeta[i]));
      p.w.push_back(Mat::Zero(p.zeta[i], p.alpha[i]));
    }
    return p;
  }

  /// X_{i−1}Y_{i−1} − Y_iX_i + v_iw_i − λ_i, max over i.
  double residual(const Weight& lambda) const {
    double r = 0;
    for (int i = 0; i < m; ++i) {
      int j = mod(i - 1, m);
      Mat e = X[j] * Y[j] - Y[i] * X[i] + v[i] * w[i] - lambda[i] * identity(alpha[i]);
      r = std::max(r, op_norm(e));
    }
    return r;
  }
};

inline cplx weight_sum(const Weight& l) {
  cplx s = 0;
  for (auto x : l) s += x;
  return s;
}

/// Framed weight 𝝀 = (−λ·α, λ).
inline Weight framed_weight(const Weight& lambda, const DimVector& alpha) {
  Weight out{-dot(lambda, alpha)};
  out.insert(out.end(), lambda.begin(), lambda.end());
  return out;
}

inline QuiverPtr framed_cyclic_quiver(int m, const DimVector& zeta) {
  return std::make_shared<const Quiver>(double_quiver(frame(cyclic_quiver(m), zeta).quiver));
}

inline RepPoint to_rep(const CyclicPoint& c, QuiverPtr q = nullptr) {
  if (!q) q = framed_cyclic_quiver(c.m, c.zeta);
  DimVector dims{1};
  dims.insert(dims.end(), c.alpha.begin(), c.alpha.end());
  RepPoint v = RepPoint::zero(q, dims);
  for (int i = 0; i < c.m; ++i) {
    v["a" + std::to_string(i)] = c.X[i];
    v["a" + std::to_string(i) + "*"] = c.Y[i];
    for (int r = 1; r <= c.zeta[i]; ++r) {
      std::string b = framing_edge_id(std::to_string(i), r);
      v[b] = c.v[i].col(r - 1);
      v[b + "*"] = c.w[i].row(r - 1);
    }
  }
  return v;
}

inline CyclicPoint from_rep(const RepPoint& v) {
  const Quiver& q = *v.quiver;
  if (!q.framed() || q.infinity() != 0) throw Error("expected a framed cyclic quiver");
  const int m = q.num_vertices() - 1;
  DimVector alpha(v.dims.begin() + 1, v.dims.end()), zeta;
  for (int i = 0; i < m; ++i) zeta.push_back(q.zeta(i + 1));
  CyclicPoint c = CyclicPoint::zero(m, alpha, zeta);
  for (int i = 0; i < m; ++i) {
    c.X[i] = v["a" + std::to_string(i)];
    c.Y[i] = v["a" + std::to_string(i) + "*"];
    for (int r = 1; r <= zeta[i]; ++r) {
      std::string b = framing_edge_id(std::to_string(i), r);
      c.v[i].col(r - 1) = v[b];
      c.w[i].row(r - 1) = v[b + "*"];
    }
  }
  return c;
}

/// 𝐗, 𝐘 on 𝐕 = ⊕V_i and 𝐯_i, 𝐰_i (with d = max ζ_i columns/rows).
struct BlockLift {
  int m = 1;
  std::vector<int> offset, size;
  Mat X, Y;
  std::vector<Mat> v, w;

  Mat vsum() const {
    Mat s = Mat::Zero(X.rows(), v.empty() ? 0 : v[0].cols());
    for (const auto& x : v) s += x;
    return s;
  }
  Mat wsum() const {
    Mat s = Mat::Zero(w.empty() ? 0 : w[0].rows(), X.cols());
    for (const auto& x : w) s += x;
    return s;
  }
  /// Zero out everything outside the blocks (i+1, i).
  Mat project_X(const Mat& a) const {
    Mat out = Mat::Zero(a.rows(), a.cols());
    for (int i = 0; i < m; ++i) {
      int j = mod(i + 1, m);
      out.block(offset[j], offset[i], size[j], size[i]) = a.block(offset[j], offset[i], size[j], size[i]);
    }
    return out;
  }
};

inline BlockLift lift(const CyclicPoint& c) {
  BlockLift b;
  b.m = c.m;
  int n = 0, d = 0;
  for (int i = 0; i < c.m; ++i) {
    b.offset.push_back(n);
    b.size.push_back(c.alpha[i]);
    n += c.alpha[i];
    d = std::max(d, c.zeta[i]);
  }
  b.X = Mat::Zero(n, n);
  b.Y = Mat::Zero(n, n);
  for (int i = 0; i < c.m; ++i) {
    int j = c.next(i);
    b.X.block(b.offset[j], b.offset[i], c.alpha[j], c.alpha[i]) = c.X[i];
    b.Y.block(b.offset[i], b.offset[j], c.alpha[i], c.alpha[j]) = c.Y[i];
    Mat vi = Mat::Zero(n, d), wi = Mat::Zero(d, n);
    vi.block(b.offset[i], 0, c.alpha[i], c.zeta[i]) = c.v[i];
    wi.block(0, b.offset[i], c.zeta[i], c.alpha[i]) = c.w[i];
    b.v.push_back(vi);
    b.w.push_back(wi);
  }
  return b;
}

inline CyclicPoint unlift(const BlockLift& b, const CyclicPoint& shape) {
  CyclicPoint c = shape;
  for (int i = 0; i < c.m; ++i) {
    int j = c.next(i);
    c.X[i] = b.X.block(b.offset[j], b.offset[i], c.alpha[j], c.alpha[i]);
    c.Y[i] = b.Y.block(b.offset[i], b.offset[j], c.alpha[i], c.alpha[j]);
    c.v[i] = b.v[i].block(b.offset[i], 0, c.alpha[i], c.zeta[i]);
    c.w[i] = b.w[i].block(0, b.offset[i], c.zeta[i], c.alpha[i]);
  }
  return c;
}

/// ‖[𝐗,𝐘] + Σ𝐯_i𝐰_i − Σλ_i π_i‖ plus the size of anything off the block pattern.
inline double lift_residual(const BlockLift& b, const Weight& lambda) {
  Mat rhs = Mat::Zero(b.X.rows(), b.X.cols());
  for (int i = 0; i < b.m; ++i) rhs.block(b.offset[i], b.offset[i], b.size[i], b.size[i]).setIdentity();
  for (int i = 0; i < b.m; ++i) rhs.block(b.offset[i], b.offset[i], b.size[i], b.size[i]) *= lambda[i];
  Mat lhs = b.X * b.Y - b.Y * b.X;
  for (int i = 0; i < b.m; ++i) lhs += b.v[i] * b.w[i];
  double off = max_abs(b.X - b.project_X(b.X));
  return std::max(op_norm(lhs - rhs), off);
}

enum class ChartKind { Eps0, Delta, Jordan };

inline std::string chart_kind_str(ChartKind k) {
  return k == ChartKind::Eps0 ? "eps0" : k == ChartKind::Delta ? "delta" : "jordan";
}
inline ChartKind parse_chart_kind(const std::string& s) {
  if (s == "eps0") return ChartKind::Eps0;
  if (s == "delta") return ChartKind::Delta;
  if (s == "jordan") return ChartKind::Jordan;
  throw Error("unknown chart kind '" + s + "'");
}

/**
 * Darboux data. φ_a is d × c and ψ_a is c × d with c = m for the δ chart and
 * c = 1 otherwise; (φ_a)_{00} = 1 and (ψ_a)_{00} is fixed by tr(ψ_aφ_a) = |λ|.
 */
struct DarbouxChart {
  ChartKind kind = ChartKind::Jordan;
  int m = 1;
  int d = 1;
  std::vector<cplx> x, p;
  std::vector<Mat> phi, psi;

  int n() const { return int(x.size()); }
  int spin_cols() const { return kind == ChartKind::Delta ? m : 1; }

  DimVector zeta() const {
    DimVector z(m, 0);
    if (kind == ChartKind::Delta) std::fill(z.begin(), z.end(), d);
    else z[0] = d;
    return z;
  }
  DimVector alpha() const { return DimVector(m, n()); }
};

inline void normalize(DarbouxChart& c, const Weight& lambda) {
  const cplx total = weight_sum(lambda);
  for (int a = 0; a < c.n(); ++a) {
    c.phi[a](0, 0) = 1;
    c.psi[a](0, 0) = 0;
    c.psi[a](0, 0) = total - (c.psi[a] * c.phi[a]).trace();
  }
}

inline void check_chart(const DarbouxChart& c, double tol = 1e-8) {
  if (c.kind == ChartKind::Jordan && c.m != 1) throw Error("jordan chart needs m = 1");
  if (int(c.p.size()) != c.n() || int(c.phi.size()) != c.n() || int(c.psi.size()) != c.n())
    throw Error("chart arrays have inconsistent lengths");
  for (int a = 0; a < c.n(); ++a)
    if (c.phi[a].rows() != c.d || c.phi[a].cols() != c.spin_cols() || c.psi[a].rows() != c.spin_cols() ||
        c.psi[a].cols() != c.d)
      throw Error("spin matrices have the wrong shape");
  double scale = 1;
  for (auto x : c.x) scale = std::max(scale, std::pow(std::abs(x), c.m));
  for (int a = 0; a < c.n(); ++a) {
    if (c.m >= 2 && std::abs(c.x[a]) < tol) throw ChartBoundaryError("x_" + std::to_string(a + 1) + " vanishes");
    for (int b = a + 1; b < c.n(); ++b)
      if (std::abs(std::pow(c.x[a], c.m) - std::pow(c.x[b], c.m)) < tol * scale)
        throw ChartBoundaryError("x_" + std::to_string(a + 1) + " and x_" + std::to_string(b + 1) +
                                 " collide (x^m coincide)");
  }
}

inline CyclicPoint from_darboux(const DarbouxChart& c, const Weight& lambda) {
  check_chart(c);
  const int m = c.m, n = c.n(), d = c.d;
  if (int(lambda.size()) != m) throw Error("weight length must equal m");
  auto full_phi = [&](int a) {
    Mat f = Mat::Zero(d, m);
    f.leftCols(c.spin_cols()) = c.phi[a];
    return f;
  };
  auto full_psi = [&](int a) {
    Mat f = Mat::Zero(m, d);
    f.topRows(c.spin_cols()) = c.psi[a];
    return f;
  };
  CyclicPoint out = CyclicPoint::zero(m, c.alpha(), c.zeta());
  std::vector<Mat> phi, psi;
  for (int a = 0; a < n; ++a) {
    phi.push_back(full_phi(a));
    psi.push_back(full_psi(a));
  }
  for (int i = 0; i < m; ++i) {
    for (int a = 0; a < n; ++a) out.X[i](a, a) = c.x[a];
    for (int a = 0; a < n; ++a) {
      Mat cc = psi[a] * phi[a];
      cplx s1 = 0, s2 = 0;
      for (int l = 1; l < m; ++l) s1 += double(m - l) / m * (lambda[l] - cc(l, l));
      for (int l = 1; l <= i; ++l) s2 += lambda[l] - cc(l, l);
      out.Y[i](a, a) = c.p[a] / double(m) + (m > 1 ? (s1 - s2) / c.x[a] : cplx(0));
      for (int b = 0; b < n; ++b) {
        if (a == b) continue;
        Mat cb = psi[b] * phi[a];
        cplx s = 0;
        const cplx den = std::pow(c.x[a], m) - std::pow(c.x[b], m);
        for (int j = 0; j < m; ++j) {
          int k = mod(i - j, m);
          s += std::pow(c.x[a], j) * std::pow(c.x[b], m - j - 1) / den * cb(k, k);
        }
        out.Y[i](a, b) = -s;
      }
    }
  }
  const DimVector z = c.zeta();
  for (int i = 0; i < m; ++i)
    for (int a = 0; a < n; ++a)
      for (int r = 0; r < z[i]; ++r) {
        out.v[i](a, r) = phi[a](r, i);
        out.w[i](r, a) = psi[a](i, r);
      }
  return out;
}

/// Lexicographic (Re, Im) order of particles.
inline void canonicalize(DarbouxChart& c) {
  std::vector<int> idx(c.n());
  for (int a = 0; a < c.n(); ++a) idx[a] = a;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (c.x[a].real() != c.x[b].real()) return c.x[a].real() < c.x[b].real();
    return c.x[a].imag() < c.x[b].imag();
  });
  DarbouxChart s = c;
  for (int a = 0; a < c.n(); ++a) {
    s.x[a] = c.x[idx[a]];
    s.p[a] = c.p[idx[a]];
    s.phi[a] = c.phi[idx[a]];
    s.psi[a] = c.psi[idx[a]];
  }
  c = s;
}

/// Branch of the m-th root with argument in [0, 2π/m).
inline cplx principal_root(cplx z, int m) {
  double arg = std::arg(z);
  if (arg < 0) arg += 2 * kPi;
  return std::polar(std::pow(std::abs(z), 1.0 / m), arg / m);
}

inline DarbouxChart to_darboux(const CyclicPoint& c, ChartKind kind, double tol = 1e-8) {
  const int m = c.m;
  const int n = c.alpha[0];
  for (int a : c.alpha)
    if (a != n) throw Error("charts need α = nδ");
  if (kind == ChartKind::Jordan && m != 1) throw Error("jordan chart needs m = 1");
  const int d = *std::max_element(c.zeta.begin(), c.zeta.end());
  DarbouxChart out;
  out.kind = kind;
  out.m = m;
  out.d = d;
  if (n == 0) return out;
  Mat prod = identity(n);
  for (int i = 0; i < m; ++i) prod = c.X[i] * prod;
  Eigen::ComplexEigenSolver<Mat> es(prod);
  CVec ev = es.eigenvalues();
  double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (int a = 0; a < n; ++a) {
    if (m >= 2 && std::abs(ev(a)) < tol * scale) throw ChartBoundaryError("X-product is degenerate");
    for (int b = a + 1; b < n; ++b)
      if (std::abs(ev(a) - ev(b)) < tol * scale)
        throw ChartBoundaryError("eigenvalue collision between particles " + std::to_string(a + 1) + " and " +
                                 std::to_string(b + 1));
  }
  Mat vecs = es.eigenvectors();
  if (Eigen::JacobiSVD<Mat>(vecs).singularValues().minCoeff() < tol)
    throw ChartBoundaryError("X-product is not diagonalisable");
  std::vector<cplx> x(n);
  for (int a = 0; a < n; ++a) x[a] = m == 1 ? ev(a) : principal_root(ev(a), m);
  Mat dx = Mat::Zero(n, n);
  for (int a = 0; a < n; ++a) dx(a, a) = x[a];
  std::vector<Mat> g(m);
  g[0] = vecs.inverse();
  for (int i = 0; i + 1 < m; ++i) g[i + 1] = dx * g[i] * c.X[i].inverse();
  // residual torus: fix (v_0)_{a,0} = 1
  Mat v0 = g[0] * c.v[0];
  if (v0.cols() == 0) throw ChartBoundaryError("no framing at vertex 0");
  Mat t = Mat::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    if (std::abs(v0(a, 0)) < tol) throw ChartBoundaryError("first spin component vanishes");
    t(a, a) = 1.0 / v0(a, 0);
  }
  for (auto& gi : g) gi = t * gi;
  std::vector<Mat> Y(m), v(m), w(m);
  for (int i = 0; i < m; ++i) {
    Y[i] = g[i] * c.Y[i] * g[mod(i + 1, m)].inverse();
    v[i] = g[i] * c.v[i];
    w[i] = c.w[i] * g[i].inverse();
  }
  const int cols = kind == ChartKind::Delta ? m : 1;
  for (int a = 0; a < n; ++a) {
    out.x.push_back(x[a]);
    cplx p = 0;
    for (int i = 0; i < m; ++i) p += Y[i](a, a);
    out.p.push_back(p);
    Mat phi = Mat::Zero(d, cols), psi = Mat::Zero(cols, d);
    for (int i = 0; i < cols; ++i)
      for (int r = 0; r < c.zeta[i]; ++r) {
        phi(r, i) = v[i](a, r);
        psi(i, r) = w[i](r, a);
      }
    out.phi.push_back(phi);
    out.psi.push_back(psi);
  }
  canonicalize(out);
  return out;
}

/// Free coordinates: x, p and every spin entry except the normalized (0,0) pair.
inline CVec free_coordinates(const DarbouxChart& c) {
  std::vector<cplx> z(c.x.begin(), c.x.end());
  z.insert(z.end(), c.p.begin(), c.p.end());
  for (int a = 0; a < c.n(); ++a) {
    for (int i = 0; i < c.phi[a].size(); ++i)
      if (i != 0) z.push_back(c.phi[a].data()[i]);
    for (int i = 0; i < c.psi[a].size(); ++i)
      if (i != 0) z.push_back(c.psi[a].data()[i]);
  }
  return Eigen::Map<CVec>(z.data(), Eigen::Index(z.size()));
}

inline DarbouxChart with_free_coordinates(DarbouxChart c, const CVec& z, const Weight& lambda) {
  int at = 0;
  for (auto& x : c.x) x = z(at++);
  for (auto& p : c.p) p = z(at++);
  for (int a = 0; a < c.n(); ++a) {
    for (int i = 1; i < c.phi[a].size(); ++i) c.phi[a].data()[i] = z(at++);
    for (int i = 1; i < c.psi[a].size(); ++i) c.psi[a].data()[i] = z(at++);
  }
  normalize(c, lambda);
  return c;
}

/// 2p(𝛂) for the framed cyclic quiver, the expected number of chart coordinates.
inline int expected_chart_dimension(const DarbouxChart& c) {
  FramedQuiver fq = frame(cyclic_quiver(c.m), c.zeta());
  DimVector a{1};
  for (int x : c.alpha()) a.push_back(x);
  return 2 * tits_forms(fq.quiver, a).p;
}

/// Random chart with unit-scale entries, normalized.
template <class Rng>
DarbouxChart random_chart(Rng& rng, ChartKind kind, int m, int n, int d, const Weight& lambda, double spread = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  auto rc = [&] { return cplx(g(rng), g(rng)); };
  DarbouxChart c;
  c.kind = kind;
  c.m = m;
  c.d = d;
  for (int a = 0; a < n; ++a) {
    // spread particles so x^m stay apart
    cplx x = std::polar(spread * (0.8 + 0.6 * a + 0.2 * std::abs(g(rng))), 0.3 + 0.4 * g(rng) / m);
    c.x.push_back(x);
    c.p.push_back(rc() * 0.5);
    c.phi.push_back(Mat::NullaryExpr(d, c.spin_cols(), [&] { return rc() * 0.5; }));
    c.psi.push_back(Mat::NullaryExpr(c.spin_cols(), d, [&] { return rc() * 0.5; }));
  }
  normalize(c, lambda);
  return c;
}

inline cplx hamiltonian_Hmk(const CyclicPoint& c, int k) {
  Mat acc = identity(c.alpha[0]);
  for (int s = 0; s < c.m * k; ++s) acc = acc * c.Y[s % c.m];
  return acc.trace();
}

inline cplx hamiltonian_Hmk_block(const CyclicPoint& c, int k) {
  BlockLift b = lift(c);
  Mat yk = identity(int(b.Y.rows()));
  for (int s = 0; s < c.m * k; ++s) yk = yk * b.Y;
  return yk.trace() / double(c.m);
}

/// H_{ℓ,r} = −Σ_i w_{i−ℓ,r} Y_{i−ℓ}⋯Y_{i−1} v_{i,r}.
inline cplx hamiltonian_Hlr_cyclic(const CyclicPoint& c, int l, int r) {
  cplx s = 0;
  for (int i = 0; i < c.m; ++i) {
    int j = mod(i - l, c.m);
    if (r > c.zeta[i] || r > c.zeta[j]) continue;
    Mat acc = c.w[j].row(r - 1);
    for (int q = 0; q < l; ++q) acc = acc * c.Y[mod(j + q, c.m)];
    s -= (acc * c.v[i].col(r - 1))(0, 0);
  }
  return s;
}

/// X_i(t) = X_i − |λ| Σ_k k t_{mk} Y_{i+1}⋯Y_{i+mk−1}; times[k−1] = t_{mk}.
inline CyclicPoint exact_flow_mk(const CyclicPoint& c, const Weight& lambda, const std::vector<cplx>& times) {
  CyclicPoint out = c;
  const cplx total = weight_sum(lambda);
  for (int i = 0; i < c.m; ++i)
    for (size_t kk = 0; kk < times.size(); ++kk) {
      int k = int(kk) + 1;
      if (times[kk] == cplx(0)) continue;
      Mat acc = identity(c.alpha[c.next(i)]);
      for (int s = 1; s < c.m * k; ++s) acc = acc * c.Y[mod(i + s, c.m)];
      out.X[i] -= total * double(k) * times[kk] * acc;
    }
  return out;
}

inline CyclicPoint embed_eps0_in_delta(const CyclicPoint& c) {
  int d = c.zeta[0];
  for (int i = 1; i < c.m; ++i)
    if (c.zeta[i] != 0) throw PreconditionError("expected framing d·ε_0");
  CyclicPoint out = CyclicPoint::zero(c.m, c.alpha, DimVector(c.m, d));
  out.X = c.X;
  out.Y = c.Y;
  out.v[0] = c.v[0];
  out.w[0] = c.w[0];
  return out;
}

/// Drops the framing at i ≠ 0; `dropped` receives the largest discarded entry.
inline CyclicPoint restrict_delta_to_eps0(const CyclicPoint& c, double* dropped = nullptr) {
  DimVector z(c.m, 0);
  z[0] = c.zeta[0];
  CyclicPoint out = CyclicPoint::zero(c.m, c.alpha, z);
  out.X = c.X;
  out.Y = c.Y;
  out.v[0] = c.v[0];
  out.w[0] = c.w[0];
  double big = 0;
  for (int i = 1; i < c.m; ++i) big = std::max({big, max_abs(c.v[i]), max_abs(c.w[i])});
  if (dropped) *dropped = big;
  return out;
}

inline std::pair<cplx, cplx> partial_fraction_identity(int j, int m, cplx x, cplx y) {
  if (std::abs(std::pow(x, m) - std::pow(y, m)) < 1e-14 * std::max(1.0, std::pow(std::abs(x), m)))
    throw PreconditionError("x^m = y^m is a pole");
  cplx lhs = std::pow(x, m - j - 1) * std::pow(y, j) / (std::pow(x, m) - std::pow(y, m));
  cplx rhs = 0;
  for (int l = 0; l < m; ++l) rhs += root_of_unity(m, -j * l) / (x - root_of_unity(m, l) * y);
  return {lhs, rhs / double(m)};
}

enum class Family { Hmk_r, Hlr, H0r };

struct RankResult {
  int rank = 0;
  int size = 0;
  std::vector<double> singular_values;
  double gap = 0;  // σ_rank / σ_{rank+1} (infinite if full rank)
};

/// Trace polynomials for a family on the framed cyclic quiver.
inline std::vector<TracePoly> family_polys(const Quiver& q, const DarbouxChart& c, Family f) {
  std::vector<TracePoly> out;
  const int n = c.n(), d = c.d, m = c.m;
  if (f == Family::Hmk_r) {
    for (int k = 1; k <= n; ++k)
      for (int r = 1; r <= d; ++r) out.push_back(integral_poly(q, E_element(q, m * k, r, m * k)));
  } else if (f == Family::Hlr) {
    for (int l = 1; l <= n * m; ++l)
      for (int r = 1; r <= d; ++r) out.push_back(integral_poly(q, E_element(q, l, r, l)));
  } else {
    for (int r = 1; r <= d; ++r) out.push_back(integral_poly(q, E_element(q, 0, r, 0)));
  }
  return out;
}

/**
 * Numeric rank of the Jacobian of a family with respect to the free chart
 * coordinates: exact trace gradients chained with 4th-order central
 * differences of from_darboux.
 */
inline RankResult independence_rank(const DarbouxChart& c, const Weight& lambda, Family f, double h = 1e-4) {
  auto q = framed_cyclic_quiver(c.m, c.zeta());
  const auto polys = family_polys(*q, c, f);
  const CVec z0 = free_coordinates(c);
  const RepPoint v0 = to_rep(from_darboux(c, lambda), q);
  std::vector<std::vector<Mat>> grads;
  for (const auto& p : polys) grads.push_back(gradient(v0, p));
  Mat jac = Mat::Zero(Eigen::Index(polys.size()), z0.size());
  for (int k = 0; k < z0.size(); ++k) {
    auto point_at = [&](double s) {
      CVec z = z0;
      z(k) += s;
      return to_rep(from_darboux(with_free_coordinates(c, z, lambda), lambda), q);
    };
    RepPoint p1 = point_at(h), m1 = point_at(-h), p2 = point_at(2 * h), m2 = point_at(-2 * h);
    for (size_t f_i = 0; f_i < polys.size(); ++f_i) {
      cplx s = 0;
      for (int e = 0; e < q->num_edges(); ++e) {
        Mat dv = (8.0 * (p1.mats[e] - m1.mats[e]) - (p2.mats[e] - m2.mats[e])) / (12.0 * h);
        s += (grads[f_i][e].cwiseProduct(dv)).sum();
      }
      jac(Eigen::Index(f_i), k) = s;
    }
  }
  RankResult res;
  res.size = int(polys.size());
  Eigen::JacobiSVD<Mat> svd(jac);
  auto sv = svd.singularValues();
  for (int i = 0; i < sv.size(); ++i) res.singular_values.push_back(sv(i));
  const double cut = 1e-8 * (sv.size() ? sv(0) : 0.0);
  while (res.rank < sv.size() && sv(res.rank) > cut) ++res.rank;
  res.gap = res.rank < sv.size() ? sv(res.rank - 1) / std::max(sv(res.rank), 1e-300)
                                 : std::numeric_limits<double>::infinity();
  return res;
}

}  // namespace quiverflow
