/**
 * @file kp.hpp
 * @brief Rational solutions of the (generalized, matrix) KP hierarchy from
 *        framed cyclic quiver data: time evolution of the seed, the dressing
 *        operator M, the Lax operators L and R_r, and residual checks.
 */
#pragma once

#include "cyclic.hpp"
#include "hbar.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace quiverflow {

struct KpSeed {
  CyclicPoint point;
  Weight lambda;
  ChartKind kind = ChartKind::Jordan;  // framing: Jordan (m = 1), Eps0 (spherical) or Delta
  int lo = -12;
  int hi = 6;
  std::vector<cplx> a;  // diagonal of A, empty means the identity

  int m() const { return point.m; }
  int d() const { return *std::max_element(point.zeta.begin(), point.zeta.end()); }
  bool spherical() const { return kind != ChartKind::Delta; }
  cplx a_r(int r) const { return a.empty() ? cplx(1) : a[r - 1]; }
};

/// One time variable: t_{ℓ,r} for r ≥ 1, or the scalar time t_ℓ (r = 0, ℓ divisible by m).
struct KpTime {
  int l = 1;
  int r = 0;
  cplx t = 0;
};

inline KpSeed make_seed(const CyclicPoint& c, const Weight& lambda, ChartKind kind, int lo = -12) {
  KpSeed s{c, lambda, kind, lo, 6, {}};
  if (kind == ChartKind::Jordan && c.m != 1) throw Error("jordan framing needs m = 1");
  if (kind == ChartKind::Eps0)
    for (int i = 1; i < c.m; ++i)
      if (c.zeta[i] != 0) throw Error("spherical seeds are framed at vertex 0 only");
  double res = c.residual(lambda);
  if (res > 1e-8) throw PreconditionError("seed is off-shell, residual " + std::to_string(res));
  return s;
}

/// For L = M A y M^{-1} the seed flows by a_r^{ℓ} t_{ℓ,r}, since L^ℓR_r = a_r^ℓ M y^ℓ E_r M^{-1}.
inline cplx diag_time_factor(const KpSeed& s, int l, int r) { return r == 0 ? cplx(1) : std::pow(s.a_r(r), l); }

/**
 * Flow of −H_{ℓ,r} on the lifted data, time t: with s = −t,
 * v_r ↦ e^{sY^ℓ}v_r, w_r ↦ w_r e^{−sY^ℓ} and X ↦ X + Σ_q Y^q K Y^{ℓ−1−q} on the X block
 * pattern, where K = ∫_0^s e^{τY^ℓ} v_r w_r e^{−τY^ℓ} dτ comes from a block exponential.
 */
inline void flow_lift(BlockLift& b, int l, int r, cplx time) {
  const int N = int(b.X.rows());
  if (N == 0 || time == cplx(0)) return;
  const cplx t = -time;
  Mat A = identity(N);
  for (int s = 0; s < l; ++s) A = A * b.Y;
  Mat V = b.vsum(), W = b.wsum();
  if (r < 1 || r > V.cols()) throw Error("framing index out of range");
  Mat B = V.col(r - 1) * W.row(r - 1);
  Mat big = Mat::Zero(2 * N, 2 * N);
  big.topLeftCorner(N, N) = A;
  big.bottomRightCorner(N, N) = A;
  big.topRightCorner(N, N) = B;
  Mat E = (t * big).exp();
  Mat K = E.topRightCorner(N, N) * (-t * A).exp();
  Mat dX = Mat::Zero(N, N);
  std::vector<Mat> ypow{identity(N)};
  for (int s = 1; s < l; ++s) ypow.push_back(ypow.back() * b.Y);
  for (int s = 0; s < l; ++s) dX += ypow[s] * K * ypow[l - 1 - s];
  b.X += b.project_X(dX);
  Mat vr = E.topLeftCorner(N, N) * V.col(r - 1);
  Mat wr = W.row(r - 1) * (-t * A).exp();
  for (int i = 0; i < b.m; ++i) {
    b.v[i].col(r - 1).setZero();
    b.w[i].row(r - 1).setZero();
    b.v[i].block(b.offset[i], r - 1, b.size[i], 1) = vr.block(b.offset[i], 0, b.size[i], 1);
    b.w[i].block(r - 1, b.offset[i], 1, b.size[i]) = wr.block(0, b.offset[i], 1, b.size[i]);
  }
}

/// Seed evolved to the given times, as lifted data.
inline BlockLift evolve(const KpSeed& seed, const std::vector<KpTime>& times) {
  const int m = seed.m();
  std::vector<cplx> scalar;
  for (const auto& t : times) {
    if (t.r != 0) continue;
    if (t.l % m != 0 || t.l <= 0) throw PreconditionError("scalar times t_l need l divisible by m");
    int k = t.l / m;
    if (int(scalar.size()) < k) scalar.resize(k, 0.0);
    scalar[k - 1] += t.t;
  }
  CyclicPoint c = scalar.empty() ? seed.point : exact_flow_mk(seed.point, seed.lambda, scalar);
  BlockLift b = lift(c);
  for (const auto& t : times) {
    if (t.r == 0) continue;
    if (seed.spherical() && t.l % m != 0)
      throw PreconditionError("non-spherical time t_{" + std::to_string(t.l) + "," + std::to_string(t.r) +
                              "} leaves the spherical locus");
    if (t.r > seed.d()) throw Error("framing index out of range");
    cplx s = t.t * diag_time_factor(seed, t.l, t.r);
    flow_lift(b, t.l, t.r, s);
  }
  return b;
}

// ---------------------------------------------------------------- resolvent coefficients

/// Pole-collision guard for sample points.
inline void check_sample_points(const Mat& X, const std::vector<cplx>& pts, double radius) {
  if (X.rows() == 0) return;
  Eigen::ComplexEigenSolver<Mat> es(X, false);
  for (auto p : pts)
    for (int k = 0; k < X.rows(); ++k)
      if (std::abs(es.eigenvalues()(k) - p) < radius)
        throw Error("sample point collides with a pole at " + std::to_string(es.eigenvalues()(k).real()) + "+" +
                    std::to_string(es.eigenvalues()(k).imag()) + "i");
}

/// Per-field entries of w (X − x)^{-1} u as d × d arrays of scalars.
struct JetResolvent {
  std::vector<std::vector<Mat>> pw;  // per point: (X − s)^{-e-1}, e = 0..P
  static JetResolvent make(const JetField& f, const Mat& X) {
    JetResolvent r;
    const int N = int(X.rows());
    check_sample_points(X, f.points, 1e-3);
    for (auto s : f.points) {
      Mat R = (X - s * identity(N)).inverse();
      std::vector<Mat> v{R};
      for (int e = 1; e <= f.order; ++e) v.push_back(v.back() * R);
      r.pw.push_back(std::move(v));
    }
    return r;
  }
  std::vector<Jet> entries(const JetField& f, const Mat& w, const Mat& u) const {
    const int d1 = int(w.rows()), d2 = int(u.cols());
    std::vector<Jet> out(d1 * d2, f.zero());
    for (int p = 0; p < f.npt(); ++p)
      for (int e = 0; e <= f.order; ++e) {
        Mat g = w * pw[p][e] * u;
        for (int a = 0; a < d1; ++a)
          for (int b = 0; b < d2; ++b) out[a * d2 + b].a(p, e) = g(a, b);
      }
    return out;
  }
};

/// (X − x)^{-1} = −adj(x − X)/det(x − X) with both from the Faddeev–LeVerrier recursion.
struct RationalResolvent {
  std::vector<Mat> adj;  // adj(x − X) = Σ_k adj[k] x^{N−1−k}
  Polynomial det;
  static RationalResolvent make(const RationalField&, const Mat& X) {
    RationalResolvent r;
    const int N = int(X.rows());
    std::vector<cplx> c(N + 1, 0.0);
    c[N] = 1;
    Mat Mk = Mat::Zero(N, N);
    for (int k = 1; k <= N; ++k) {
      Mk = X * Mk + c[N - k + 1] * identity(N);
      r.adj.push_back(Mk);
      c[N - k] = -(X * Mk).trace() / double(k);
    }
    r.det = Polynomial(c);
    return r;
  }
  std::vector<RationalFunction> entries(const RationalField&, const Mat& w, const Mat& u) const {
    const int d1 = int(w.rows()), d2 = int(u.cols()), N = int(adj.size());
    std::vector<RationalFunction> out(d1 * d2);
    for (int a = 0; a < d1; ++a)
      for (int b = 0; b < d2; ++b) {
        Polynomial num;
        num.c.assign(std::max(N, 1), 0.0);
        for (int k = 0; k < N; ++k) num.c[N - 1 - k] = -(w.row(a) * adj[k] * u.col(b))(0, 0);
        out[a * d2 + b] = RationalFunction(num, det);
      }
    return out;
  }
};

inline JetResolvent make_resolvent(const JetField& f, const Mat& X) { return JetResolvent::make(f, X); }
inline RationalResolvent make_resolvent(const RationalField& f, const Mat& X) { return RationalResolvent::make(f, X); }

/**
 * M = 1 + Σ_{i,j} Σ_l ε_i 𝐰_i(𝐗 − x)^{-1}𝐘^l𝐯_j ε_{j−l−1} y^{−l−1}, truncated at the window.
 */
template <class F>
MatrixOperator<F> build_M(std::shared_ptr<const F> f, const BlockLift& b, int lo) {
  const int m = f->m();
  if (b.m != m) throw Error("field and seed disagree on m");
  const int d = b.v.empty() ? 1 : int(b.v[0].cols());
  const int N = int(b.X.rows());
  auto M = mop_diag(f, d, lo);
  if (N == 0) return M;
  auto res = make_resolvent(*f, b.X);
  std::vector<Crossed<F>> eps;
  for (int k = 0; k < m; ++k) eps.push_back(idempotent(*f, k));
  Mat yl = identity(N);
  for (int l = 0; l < -lo; ++l) {
    const int k = -l - 1;
    for (int i = 0; i < m; ++i) {
      if (b.w[i].isZero(0)) continue;
      for (int j = 0; j < m; ++j) {
        if (b.v[j].isZero(0)) continue;
        auto g = res.entries(*f, b.w[i], yl * b.v[j]);
        for (int r = 0; r < d; ++r)
          for (int s = 0; s < d; ++s) {
            auto z = crossed_mul(*f, crossed_mul(*f, eps[i], f->scalar(g[r * d + s])), eps[mod(j - l - 1, m)]);
            M(r, s).add_term(k, z);
          }
      }
    }
    yl = yl * b.Y;
  }
  for (auto& e : M.e) e.floor = lo;
  return M;
}

// ---------------------------------------------------------------- Lax data

template <class F>
struct LaxData {
  MatrixOperator<F> M, Minv, L;
  std::vector<MatrixOperator<F>> R;
};

template <class F>
LaxData<F> dress(const MatrixOperator<F>& M, const std::vector<cplx>& a = {}) {
  LaxData<F> out{M, mop_invert_unitriangular(M), M, {}};
  auto Ay = mop_diag(M.field, M.d, M.lo, 1, a);
  out.L = mop_mul(mop_mul(M, Ay), out.Minv);
  for (int r = 0; r < M.d; ++r) out.R.push_back(mop_mul(mop_mul(M, mop_unit(M.field, M.d, M.lo, r)), out.Minv));
  return out;
}

/// Jet field around base points chosen for the window depth.
inline std::shared_ptr<const JetField> default_jet_field(const KpSeed& s, std::vector<cplx> base = {}) {
  if (base.empty()) base = {cplx(3.7, 2.9), cplx(-4.1, 3.3)};
  return std::make_shared<const JetField>(CherednikData(s.m(), s.lambda), base, -s.lo + 12);
}

template <class F>
LaxData<F> lax_at(std::shared_ptr<const F> f, const KpSeed& s, const std::vector<KpTime>& times) {
  return dress(build_M(f, evolve(s, times), s.lo), s.a);
}

template <class F>
MatrixOperator<F> mop_commutator(const MatrixOperator<F>& a, const MatrixOperator<F>& b) {
  return mop_add(mop_mul(a, b), mop_mul(b, a), -1.0);
}

template <class F>
MatrixOperator<F> mop_power(const MatrixOperator<F>& a, int k) {
  auto out = mop_diag(a.field, a.d, a.lo);
  for (int i = 0; i < k; ++i) out = mop_mul(out, a);
  return out;
}

/// Residuals of ‖[L,R_r]‖, ‖R_rR_s − δ_{rs}R_r‖ and ‖ΣR_r − 1‖ over the guaranteed window.
struct ConstraintReport {
  double commute = 0, idempotent = 0, sum = 0;
  int floor = 0;
  double max() const { return std::max({commute, idempotent, sum}); }
};

template <class F>
ConstraintReport constraints(const LaxData<F>& x) {
  ConstraintReport rep;
  const int d = x.L.d;
  int fl = x.L.floor();
  for (const auto& r : x.R) fl = std::max(fl, r.floor());
  fl += 2;
  rep.floor = fl;
  auto sum = mop_zero(x.L.field, d, x.L.lo);
  for (int r = 0; r < d; ++r) {
    rep.commute = std::max(rep.commute, mop_max_abs(mop_commutator(x.L, x.R[r]), fl));
    sum = mop_add(sum, x.R[r]);
    for (int s = 0; s < d; ++s) {
      auto p = mop_mul(x.R[r], x.R[s]);
      if (r == s) p = mop_add(p, x.R[r], -1.0);
      rep.idempotent = std::max(rep.idempotent, mop_max_abs(p, fl));
    }
  }
  rep.sum = mop_max_diff(sum, mop_diag(x.L.field, d, x.L.lo), fl);
  return rep;
}

/// max_i ‖ε_i L − L ε_{i−1}‖ over the guaranteed window.
template <class F>
double equivariance_residual(const LaxData<F>& x) {
  double err = 0;
  const F& f = *x.L.field;
  const int fl = x.L.floor() + 1;
  for (int i = 0; i < f.m(); ++i) {
    auto a = mop_left_crossed(x.L, idempotent(f, i));
    auto b = mop_right_crossed(x.L, idempotent(f, i - 1));
    err = std::max(err, mop_max_diff(a, b, fl));
  }
  return err;
}

struct LaxResidual {
  int l = 1, r = 0;
  double h = 1e-3;
  double L = 0, R = 0, M = 0;  // absolute residuals of the three equations
  double scale = 0;            // size of the right-hand side for L
  int floor = 0;
  int valid_orders = 0;
  double max() const { return std::max({L, R, M}); }
};

/**
 * Central differences of L, R_s and M along t_{ℓ,r} (r = 0: the scalar time t_ℓ)
 * against [(L^ℓR_r)_+, L], [(L^ℓR_r)_+, R_s] and −(My^ℓE_rM^{-1})_−M.
 */
template <class F>
LaxResidual lax_residual(std::shared_ptr<const F> f, const KpSeed& s, int l, int r, double h,
                         const std::vector<KpTime>& base = {}) {
  if (h <= 0) throw Error("step must be positive");
  auto shifted = [&](double sign) {
    auto t = base;
    t.push_back({l, r, sign * h});
    return lax_at(f, s, t);
  };
  auto x0 = lax_at(f, s, base);
  auto xp = shifted(1), xm = shifted(-1);
  const int d = x0.L.d;
  const cplx inv2h = 1.0 / (2 * h);
  LaxResidual rep;
  rep.l = l;
  rep.r = r;
  rep.h = h;

  auto Ll = mop_power(x0.L, l);
  auto gen = r == 0 ? Ll : mop_mul(Ll, x0.R[r - 1]);
  auto P = mop_split(gen).first;
  auto rhsL = mop_commutator(P, x0.L);
  auto dL = mop_add(xp.L, xm.L, -1.0);
  int fl = std::max(rhsL.floor(), dL.floor()) + 1;
  rep.L = mop_max_diff(mop_left_crossed(dL, f->scalar(f->constant(inv2h))), rhsL, fl);
  rep.scale = mop_max_abs(rhsL, fl);
  rep.floor = fl;
  for (int q = 0; q < d; ++q) {
    auto rhsR = mop_commutator(P, x0.R[q]);
    auto dR = mop_add(xp.R[q], xm.R[q], -1.0);
    int flr = std::max(rhsR.floor(), dR.floor()) + 1;
    rep.R = std::max(rep.R, mop_max_diff(mop_left_crossed(dR, f->scalar(f->constant(inv2h))), rhsR, flr));
  }
  // M-equation in the flow time of the seed
  auto yl = mop_diag(f, d, s.lo, l);
  auto ylE = r == 0 ? yl : mop_mul(yl, mop_unit(f, d, s.lo, r - 1));
  auto Q = mop_split(mop_mul(mop_mul(x0.M, ylE), x0.Minv)).second;
  auto rhsM = mop_mul(Q, x0.M);
  cplx c = diag_time_factor(s, l, r);
  auto dM = mop_add(xp.M, xm.M, -1.0);
  int flm = std::max(rhsM.floor(), dM.floor()) + 1;
  rep.M = mop_max_diff(mop_left_crossed(dM, f->scalar(f->constant(inv2h / c))), mop_left_crossed(rhsM, f->scalar(f->constant(-1.0))), flm);
  int v = 1 << 20;
  for (const auto* x : {&xp.L, &xm.L, &rhsL})
    for (const auto& e : x->e) v = std::min(v, hbar_valid_orders(e));
  rep.valid_orders = v;
  if (v < 0) throw Error("jet order exhausted; increase the jet order for this window");
  return rep;
}

// ---------------------------------------------------------------- m = 1: u and the KP equation

/// Poles x_a(t) of u at X(t) = X − Σ k t_k Y^{k−1}; times[k−1] = t_k.
inline CyclicPoint cm_flow(const CyclicPoint& c, const std::vector<cplx>& times) {
  if (c.m != 1) throw PreconditionError("closed-form u needs m = 1");
  return exact_flow_mk(c, {1.0}, times);
}

inline std::vector<cplx> u_poles(const CyclicPoint& c) {
  if (c.alpha[0] == 0) return {};
  Eigen::ComplexEigenSolver<Mat> es(c.X[0], false);
  std::vector<cplx> out;
  for (int i = 0; i < c.alpha[0]; ++i) out.push_back(es.eigenvalues()(i));
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  return out;
}

/// u(x) = −2 tr (x − X)^{-2}, which is −Σ 2/(x − x_a)² on the diagonalizable locus.
inline cplx u_value(const CyclicPoint& c, cplx x) {
  const int N = c.alpha[0];
  if (N == 0) return 0;
  Mat R = (x * identity(N) - c.X[0]).inverse();
  return -2.0 * (R * R).trace();
}

namespace detail {
// Σ coeff · tr(word) over words in the letters R (resolvent) and Y^k
struct WordSum {
  std::map<std::vector<int>, cplx> terms;  // letter −1 = R, letter k ≥ 0 = Y^k (only k ≥ 1 stored)
};

// ∂ of R is −R (∂A) R; `dA` lists (power of Y, coefficient) of ∂A
inline WordSum differentiate(const WordSum& w, const std::vector<std::pair<int, cplx>>& dA) {
  WordSum out;
  for (const auto& [word, c] : w.terms)
    for (size_t i = 0; i < word.size(); ++i) {
      if (word[i] != -1) continue;
      for (auto [k, a] : dA) {
        std::vector<int> nw(word.begin(), word.begin() + i);
        nw.push_back(-1);
        if (k > 0) nw.push_back(k);
        nw.push_back(-1);
        nw.insert(nw.end(), word.begin() + i + 1, word.end());
        out.terms[nw] -= c * a;
      }
    }
  return out;
}

inline cplx evaluate(const WordSum& w, const Mat& R, const Mat& Y) {
  std::map<int, Mat> ypow;
  cplx s = 0;
  for (const auto& [word, c] : w.terms) {
    Mat acc = identity(int(R.rows()));
    for (int l : word) {
      if (l == -1) acc = acc * R;
      else {
        if (!ypow.count(l)) {
          Mat y = identity(int(Y.rows()));
          for (int q = 0; q < l; ++q) y = y * Y;
          ypow[l] = y;
        }
        acc = acc * ypow[l];
      }
    }
    s += c * acc.trace();
  }
  return s;
}
}  // namespace detail

struct PdeSample {
  cplx x, t2, t3;
  cplx u;
  double residual;
};

struct PdeReport {
  double max_residual = 0;
  double max_u = 0;
  std::vector<PdeSample> samples;
};

/**
 * Residual of 3u_{t2t2} = ∂_x(4u_{t3} − 6uu_x − u_xxx) for u = −2 tr R², R = (x − X(t))^{-1},
 * X(t) = X − 2t₂Y − 3t₃Y², with every derivative expanded exactly as a trace of words.
 */
inline PdeReport kp_pde_residual(const CyclicPoint& c, const std::vector<cplx>& xs, const std::vector<cplx>& t2s,
                                 const std::vector<cplx>& t3s, double pole_radius = 0.25) {
  if (c.m != 1) throw PreconditionError("the KP equation check needs m = 1");
  using detail::WordSum;
  // A = x − X(t) has ∂_x A = 1, ∂_{t₂} A = 2Y, ∂_{t₃} A = 3Y²
  auto dx = [](const WordSum& w) { return detail::differentiate(w, {{0, 1.0}}); };
  auto dt2 = [](const WordSum& w) { return detail::differentiate(w, {{1, 2.0}}); };
  auto dt3 = [](const WordSum& w) { return detail::differentiate(w, {{2, 3.0}}); };
  WordSum u;
  u.terms[{-1, -1}] = -2.0;
  WordSum ux = dx(u), uxx = dx(ux), uxxx = dx(uxx), uxxxx = dx(uxxx);
  WordSum ut2t2 = dt2(dt2(u)), ut3x = dx(dt3(u));
  const int N = c.alpha[0];
  PdeReport rep;
  for (auto t2 : t2s)
    for (auto t3 : t3s) {
      Mat X = c.X[0] - 2.0 * t2 * c.Y[0] - 3.0 * t3 * c.Y[0] * c.Y[0];
      std::vector<cplx> eig;
      if (N > 0) {
        Eigen::ComplexEigenSolver<Mat> es(X, false);
        for (int i = 0; i < N; ++i) eig.push_back(es.eigenvalues()(i));
      }
      for (auto x0 : xs) {
        cplx x = x0;
        // nudge off the poles along the imaginary direction
        for (int tries = 0; tries < 20; ++tries) {
          bool close = false;
          for (auto e : eig) close = close || std::abs(x - e) < pole_radius;
          if (!close) break;
          x += cplx(0, pole_radius);
        }
        if (N == 0) {
          rep.samples.push_back({x, t2, t3, 0, 0});
          continue;
        }
        Mat R = (x * identity(N) - X).inverse();
        const Mat& Y = c.Y[0];
        cplx uv = detail::evaluate(u, R, Y), uxv = detail::evaluate(ux, R, Y);
        cplx res = 3.0 * detail::evaluate(ut2t2, R, Y) -
                   (4.0 * detail::evaluate(ut3x, R, Y) - 6.0 * uxv * uxv - 6.0 * uv * detail::evaluate(uxx, R, Y) -
                    detail::evaluate(uxxxx, R, Y));
        rep.samples.push_back({x, t2, t3, uv, std::abs(res)});
        rep.max_residual = std::max(rep.max_residual, std::abs(res));
        rep.max_u = std::max(rep.max_u, std::abs(uv));
      }
    }
  return rep;
}

/// Default pole-avoiding 10×5×5 grid.
inline PdeReport kp_pde_residual(const CyclicPoint& c) {
  std::vector<cplx> xs, t2s, t3s;
  for (int i = 0; i < 10; ++i) xs.push_back(cplx(-2.0 + 0.45 * i, 0.35));
  for (int i = 0; i < 5; ++i) t2s.push_back(cplx(-0.2 + 0.1 * i, 0.0));
  for (int i = 0; i < 5; ++i) t3s.push_back(cplx(-0.1 + 0.05 * i, 0.0));
  return kp_pde_residual(c, xs, t2s, t3s);
}

struct EmitResult {
  std::vector<cplx> poles;
  std::string expression;
  double crosscheck = 0;  // |2f₁ − u| at the sample points
};

/// u = 2f₁ from the dressing (rational coefficients) checked against −Σ 2/(x − x_a)².
inline EmitResult emit_u(const KpSeed& s, const std::vector<cplx>& times, int lo = -4) {
  if (s.m() != 1 || s.d() != 1) throw PreconditionError("the pole-sum form of u needs m = 1, d = 1");
  CyclicPoint c = cm_flow(s.point, times);
  EmitResult out;
  out.poles = u_poles(c);
  std::string e;
  char buf[160];
  if (out.poles.empty()) e = "0";
  for (auto p : out.poles) {
    std::snprintf(buf, sizeof buf, "%s2/(x - (%.17g%+.17gi))^2", e.empty() ? "-" : " - ", p.real(), p.imag());
    e += buf;
  }
  out.expression = "u = " + e;
  auto f = std::make_shared<const RationalField>(CherednikData(1, {1.0}));
  KpSeed moved = s;
  moved.point = c;
  moved.lo = lo;
  auto x = lax_at(f, moved, {});
  const auto* f1 = x.L(0, 0).get(-1);
  for (auto z : f->samples) {
    cplx two_f1 = f1 ? 2.0 * (*f1)[0](z) : cplx(0);
    out.crosscheck = std::max(out.crosscheck, std::abs(two_f1 - u_value(c, z)));
  }
  return out;
}

// ---------------------------------------------------------------- reducible seeds

/**
 * Non-split extension of a cyclic point by the one-dimensional simple S at a base
 * vertex k with λ_k = 0 (all maps zero). `sub = true` makes the original point a
 * submodule (new columns on arrows leaving k), otherwise a quotient (new rows on
 * arrows entering k). Coefficients are taken from the null space of the relation at k.
 */
inline CyclicPoint extend_by_simple(const CyclicPoint& c, const Weight& lambda, int k, bool sub, std::mt19937& rng) {
  if (std::abs(lambda[k]) > 1e-12) throw PreconditionError("extension by S_k needs λ_k = 0");
  const int m = c.m;
  const int prev = mod(k - 1, m), next = mod(k + 1, m);
  // arrows at k: X_k : V_k → V_{k+1}, Y_{k−1} : V_k → V_{k−1}, w_k : V_k → C^ζ (leaving);
  // X_{k−1} : V_{k−1} → V_k, Y_k : V_{k+1} → V_k, v_k : C^ζ → V_k (entering)
  const int ak = c.alpha[k];
  const int sx = c.alpha[next], sy = c.alpha[prev], sz = c.zeta[k];
  const int nvar = sx + sy + sz;
  // relation at k: X_{k−1}Y_{k−1} − Y_kX_k + v_kw_k
  Mat lin = Mat::Zero(ak, nvar);
  if (sub) {
    // column e: X_{k−1}·C_Y − Y_k·C_X + v_k·C_w
    lin.middleCols(0, sx) = -c.Y[k];
    lin.middleCols(sx, sy) = c.X[prev];
    lin.middleCols(sx + sy, sz) = c.v[k];
  } else {
    // row e: R_X·Y_{k−1} − R_Y·X_k + R_v·w_k, transposed
    lin.middleCols(0, sy) = c.Y[prev].transpose();
    lin.middleCols(sy, sx) = -c.X[k].transpose();
    lin.middleCols(sy + sx, sz) = c.w[k].transpose();
  }
  Eigen::JacobiSVD<Mat> svd(lin, Eigen::ComputeFullV);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i) rank += svd.singularValues()(i) > 1e-10;
  if (rank == nvar) throw PreconditionError("no extension exists: the relation has trivial null space");
  CVec coef = CVec::Zero(nvar);
  std::normal_distribution<double> g;
  for (int i = rank; i < nvar; ++i) coef += cplx(g(rng), g(rng)) * svd.matrixV().col(i);
  coef /= coef.norm();

  DimVector alpha = c.alpha;
  alpha[k] += 1;
  CyclicPoint e = CyclicPoint::zero(m, alpha, c.zeta);
  for (int i = 0; i < m; ++i) {
    e.X[i].topLeftCorner(c.X[i].rows(), c.X[i].cols()) = c.X[i];
    e.Y[i].topLeftCorner(c.Y[i].rows(), c.Y[i].cols()) = c.Y[i];
    e.v[i].topRows(c.v[i].rows()) = c.v[i];
    e.w[i].leftCols(c.w[i].cols()) = c.w[i];
  }
  if (sub) {
    e.X[k].col(ak).head(sx) = coef.segment(0, sx);
    e.Y[prev].col(ak).head(sy) = coef.segment(sx, sy);
    e.w[k].col(ak) = coef.segment(sx + sy, sz);
  } else {
    e.X[prev].row(ak) = coef.segment(0, sy).transpose();
    e.Y[k].row(ak) = coef.segment(sy, sx).transpose();
    e.v[k].row(ak) = coef.segment(sy + sx, sz).transpose();
  }
  return e;
}

}  // namespace quiverflow
