/**
 * @file hbar.hpp
 * @brief Truncated arithmetic in the localized rational Cherednik algebra of ℤ/m:
 *        elements Σ f_{jk}(x) σ^j y^k with relations σx = μ^{-1}xσ, σy = μyσ and
 *        yx − xy = Σ λ_k ε_k. For m = 1, λ = 1 these are pseudo-differential operators.
 *
 * Coefficients live in a field policy: RationalField (exact rational functions,
 * recursive commutator) or JetField (Taylor jets at sample points, closed-form
 * commutator).
 */
#pragma once

#include "rational.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>

namespace quiverflow {

/// Shared data: m, μ = e^{2πi/m}, λ and c_j = (1/m) Σ_k λ_k μ^{-kj} so that c = Σ_j c_j σ^j.
struct CherednikData {
  int m = 1;
  Weight lambda{1.0};
  std::vector<cplx> c;

  CherednikData() : CherednikData(1, {1.0}) {}
  CherednikData(int m_, Weight lam) : m(m_), lambda(std::move(lam)) {
    if (m < 1 || int(lambda.size()) != m) throw Error("Cherednik data needs m >= 1 and m weights");
    c.assign(m, 0.0);
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) c[j] += lambda[k] * mu(-k * j);
      c[j] /= double(m);
    }
  }
  cplx mu(int power = 1) const { return root_of_unity(m, power); }
};

// ---------------------------------------------------------------- rational field

struct RationalField {
  using Scalar = RationalFunction;
  CherednikData data;
  std::vector<cplx> samples;  // comparison points

  RationalField(CherednikData d, std::vector<cplx> s = {}) : data(std::move(d)), samples(std::move(s)) {
    if (samples.empty()) samples = {cplx(2.3, 1.1), cplx(-1.9, 1.7), cplx(0.7, -2.4), cplx(-2.6, -0.9)};
  }
  int m() const { return data.m; }
  Scalar zero() const { return Scalar(); }
  Scalar constant(cplx a) const { return Scalar(a); }
  Scalar x() const { return Scalar::x(); }
  bool is_zero(const Scalar& f) const { return f.is_zero(); }
  /// g(μ^{-j}x)
  Scalar twist(const Scalar& f, int j) const { return mod(j, m()) == 0 ? f : f.scaled(data.mu(-j)); }
  CVec sample(const Scalar& f) const {
    CVec out(Eigen::Index(samples.size()));
    for (size_t i = 0; i < samples.size(); ++i) out(Eigen::Index(i)) = f(samples[i]);
    return out;
  }
  int valid(const Scalar&) const { return 1 << 20; }

  std::vector<Scalar> mul(const std::vector<Scalar>& f, const std::vector<Scalar>& g) const {
    std::vector<Scalar> out(m());
    for (int i = 0; i < m(); ++i) {
      if (f[i].is_zero()) continue;
      for (int j = 0; j < m(); ++j)
        if (!g[j].is_zero()) out[mod(i + j, m())] = out[mod(i + j, m())] + f[i] * twist(g[j], i);
    }
    return out;
  }
  std::vector<Scalar> scalar(const Scalar& f) const {
    std::vector<Scalar> out(m());
    out[0] = f;
    return out;
  }

  /**
   * [y, f] from c = [y,x] by Leibniz: [y, x^n] = c x^{n−1} + x[y, x^{n−1}] on the
   * polynomial part and [y, q] = −q c q for q = (x−r)^{-1}, with
   * [y, q^k] = Σ_i q^i [y,q] q^{k−1−i}. Products are taken in the crossed product.
   */
  std::vector<Scalar> comm_y(const Scalar& f) const {
    std::vector<Scalar> cvec(m());
    for (int j = 0; j < m(); ++j) cvec[j] = Scalar(data.c[j]);
    auto add = [&](std::vector<Scalar>& a, const std::vector<Scalar>& b, cplx s = 1) {
      for (int j = 0; j < m(); ++j) a[j] = a[j] + s * b[j];
    };
    std::vector<Scalar> acc(m()), cx(m());  // cx = [y, x^n]
    const auto& p = f.polynomial();
    for (int n = 1; n <= p.degree(); ++n) {
      Polynomial xn1;
      xn1.c.assign(n, 0.0);
      xn1.c[n - 1] = 1;
      auto t = mul(cvec, scalar(Scalar(xn1)));
      add(t, mul(scalar(x()), cx));
      cx = t;
      if (p.c[n] != cplx(0)) add(acc, cx, p.c[n]);
    }
    for (const auto& t : f.poles()) {
      Scalar q = Scalar::pole(t.r);
      auto dq = mul(mul(scalar(q), cvec), scalar(q));
      for (auto& z : dq) z = cplx(-1) * z;
      const int K = int(t.a.size());
      std::vector<Scalar> qp(K + 1);  // q^i
      qp[0] = Scalar(1.0);
      for (int i = 1; i <= K; ++i) qp[i] = Scalar::pole(t.r, i);
      for (int k = 1; k <= K; ++k) {
        if (t.a[k - 1] == cplx(0)) continue;
        for (int i = 0; i < k; ++i) add(acc, mul(mul(scalar(qp[i]), dq), scalar(qp[k - 1 - i])), t.a[k - 1]);
      }
    }
    return acc;
  }
};

// ---------------------------------------------------------------- jet field

/// Taylor jets Σ_e a_e ε^e at sample points; `valid` counts the trustworthy orders.
struct Jet {
  Eigen::ArrayXXcd a;  // points × (P+1)
  int valid = 0;
};

/**
 * Jets at the orbit grid {b_q μ^j}; the twist x ↦ μ^{-j}x permutes grid points,
 * so twisted jets stay on the grid.
 */
struct JetField {
  using Scalar = Jet;
  CherednikData data;
  std::vector<cplx> base;
  int order = 24;
  std::vector<cplx> points;

  JetField(CherednikData d, std::vector<cplx> b, int P) : data(std::move(d)), base(std::move(b)), order(P) {
    for (auto z : base)
      for (int j = 0; j < data.m; ++j) {
        if (std::abs(z) < 1e-12) throw Error("jet base points must be nonzero");
        points.push_back(z * data.mu(j));
      }
  }
  int m() const { return data.m; }
  int npt() const { return int(points.size()); }
  int idx(int q, int j) const { return q * m() + mod(j, m()); }

  Scalar zero() const { return {Eigen::ArrayXXcd::Zero(npt(), order + 1), order}; }
  Scalar constant(cplx c) const {
    Scalar s = zero();
    s.a.col(0) = c;
    return s;
  }
  Scalar x() const {
    Scalar s = zero();
    for (int i = 0; i < npt(); ++i) s.a(i, 0) = points[i];
    if (order >= 1) s.a.col(1) = 1;
    return s;
  }
  bool is_zero(const Scalar& f) const { return f.a.size() == 0 || (f.a == cplx(0)).all(); }
  CVec sample(const Scalar& f) const { return f.a.col(0).matrix(); }
  int valid(const Scalar& f) const { return f.valid; }

  /// Jet of f(μ^{-j}x) at point (q,a) is the jet of f at (q, a−j) with ε ↦ μ^{-j}ε.
  Scalar twist(const Scalar& f, int j) const {
    if (mod(j, m()) == 0) return f;
    Scalar out = zero();
    out.valid = f.valid;
    Eigen::ArrayXcd sc(order + 1);
    for (int e = 0; e <= order; ++e) sc(e) = data.mu(-j * e);
    for (size_t q = 0; q < base.size(); ++q)
      for (int a = 0; a < m(); ++a) out.a.row(idx(int(q), a)) = f.a.row(idx(int(q), a - j)) * sc.transpose();
    return out;
  }
  Scalar mul(const Scalar& f, const Scalar& g) const {
    Scalar out = zero();
    out.valid = std::min(f.valid, g.valid);
    for (int i = 0; i <= order; ++i)
      out.a.rightCols(order + 1 - i) += f.a.col(i).replicate(1, order + 1 - i) * g.a.leftCols(order + 1 - i);
    return out;
  }
  Scalar inverse(const Scalar& f) const {
    Scalar out = zero();
    out.valid = f.valid;
    out.a.col(0) = 1.0 / f.a.col(0);
    for (int k = 1; k <= order; ++k) {
      Eigen::ArrayXcd s = Eigen::ArrayXcd::Zero(npt());
      for (int i = 1; i <= k; ++i) s += f.a.col(i) * out.a.col(k - i);
      out.a.col(k) = -s / f.a.col(0);
    }
    return out;
  }
  /// Taylor jets of a rational function at the grid points.
  Scalar from_rational(const RationalFunction& r) const {
    Scalar out = zero();
    for (int i = 0; i < npt(); ++i) {
      const cplx p = points[i];
      Eigen::ArrayXcd acc = Eigen::ArrayXcd::Zero(order + 1);
      Polynomial q = r.polynomial();
      for (int e = 0; e <= order && !q.is_zero(); ++e) {
        acc(e) = q(p);
        q = cplx(1.0 / double(e + 1)) * q.derivative();
      }
      for (const auto& t : r.poles()) {
        // (p − r + ε)^{-k} = Σ_e C(k+e−1, e) (−ε)^e (p − r)^{-k−e}
        cplx inv = 1.0 / (p - t.r);
        for (size_t k = 1; k <= t.a.size(); ++k) {
          if (t.a[k - 1] == cplx(0)) continue;
          double bin = 1;
          for (int e = 0; e <= order; ++e) {
            acc(e) += t.a[k - 1] * bin * (e % 2 ? -1.0 : 1.0) * std::pow(inv, int(k) + e);
            bin = bin * double(int(k) + e) / double(e + 1);
          }
        }
      }
      out.a.row(i) = acc.transpose();
    }
    return out;
  }
  Scalar derivative(const Scalar& f) const {
    Scalar out = zero();
    out.valid = f.valid - 1;
    for (int e = 0; e < order; ++e) out.a.col(e) = f.a.col(e + 1) * double(e + 1);
    return out;
  }

  std::vector<Scalar> mul(const std::vector<Scalar>& f, const std::vector<Scalar>& g) const {
    std::vector<Scalar> out(m(), zero());
    for (int i = 0; i < m(); ++i) {
      if (is_zero(f[i])) continue;
      for (int j = 0; j < m(); ++j)
        if (!is_zero(g[j])) add_to(out[mod(i + j, m())], mul(f[i], twist(g[j], i)));
    }
    return out;
  }
  std::vector<Scalar> scalar(const Scalar& f) const {
    std::vector<Scalar> out(m(), zero());
    out[0] = f;
    return out;
  }
  static void add_to(Scalar& acc, const Scalar& f, cplx s = 1) {
    acc.a += s * f.a;
    acc.valid = std::min(acc.valid, f.valid);
  }

  /// [y, f] = c_0 f' + Σ_{j≠0} c_j (f(x) − f(μ^{-j}x)) / ((1 − μ^{-j}) x) σ^j.
  std::vector<Scalar> comm_y(const Scalar& f) const {
    std::vector<Scalar> out(m(), zero());
    out[0] = derivative(f);
    out[0].a *= data.c[0];
    if (m() > 1) {
      Scalar invx = inverse(x());
      for (int j = 1; j < m(); ++j) {
        Scalar diff = f;
        diff.a -= twist(f, j).a;
        out[j] = mul(diff, invx);
        out[j].a *= data.c[j] / (1.0 - data.mu(-j));
      }
    }
    return out;
  }
};

inline Jet operator+(Jet a, const Jet& b) {
  JetField::add_to(a, b);
  return a;
}
inline Jet operator-(Jet a, const Jet& b) {
  JetField::add_to(a, b, -1.0);
  return a;
}
inline Jet operator*(cplx s, Jet a) {
  a.a *= s;
  return a;
}

// ---------------------------------------------------------------- crossed elements

template <class F>
using Crossed = std::vector<typename F::Scalar>;

template <class F>
Crossed<F> crossed_zero(const F& f) {
  return Crossed<F>(f.m(), f.zero());
}

template <class F>
Crossed<F> crossed_add(const F& f, const Crossed<F>& a, const Crossed<F>& b, cplx s = 1) {
  Crossed<F> out = a;
  for (int j = 0; j < f.m(); ++j) out[j] = out[j] + s * b[j];
  return out;
}

template <class F>
Crossed<F> crossed_mul(const F& f, const Crossed<F>& a, const Crossed<F>& b) {
  return f.mul(a, b);
}

/// ε_k = (1/m) Σ_j μ^{-kj} σ^j.
template <class F>
Crossed<F> idempotent(const F& f, int k) {
  Crossed<F> out = crossed_zero(f);
  for (int j = 0; j < f.m(); ++j) out[j] = f.constant(f.data.mu(-k * j) / double(f.m()));
  return out;
}

template <class F>
Crossed<F> sigma_power(const F& f, int j) {
  Crossed<F> out = crossed_zero(f);
  out[mod(j, f.m())] = f.constant(1.0);
  return out;
}

/// Φ^p: multiplies the σ^j component by μ^{-jp}; y^p·g = Φ^p(g)·y^p modulo lower terms.
template <class F>
Crossed<F> phi_twist(const F& f, const Crossed<F>& g, int p) {
  Crossed<F> out = g;
  for (int j = 0; j < f.m(); ++j) out[j] = f.data.mu(-j * p) * out[j];
  return out;
}

/// [y, G] for G = Σ g_j σ^j: Σ_j [y, g_j] σ^j.
template <class F>
Crossed<F> comm_y_crossed(const F& f, const Crossed<F>& g) {
  Crossed<F> out = crossed_zero(f);
  for (int j = 0; j < f.m(); ++j) {
    if (f.is_zero(g[j])) continue;
    auto d = f.comm_y(g[j]);
    for (int k = 0; k < f.m(); ++k) out[mod(k + j, f.m())] = out[mod(k + j, f.m())] + d[k];
  }
  return out;
}

// ---------------------------------------------------------------- HBar

inline constexpr int kExactFloor = -(1 << 28);

/**
 * Σ_k G_k y^k with G_k crossed elements, stored for orders ≥ lo. Coefficients
 * of order ≥ floor are exact; lower ones may be missing contributions.
 */
template <class F>
struct HBar {
  std::shared_ptr<const F> field;
  std::map<int, Crossed<F>> terms;
  int lo = -12;
  int floor = kExactFloor;

  int max_order() const {
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) return it->first;
    return kExactFloor;
  }
  int min_order() const { return terms.empty() ? 0 : terms.begin()->first; }
  int guaranteed_floor() const { return std::max(floor, lo); }

  void add_term(int k, const Crossed<F>& g, cplx s = 1) {
    if (k < lo) return;
    auto it = terms.find(k);
    if (it == terms.end()) terms[k] = s == cplx(1) ? g : crossed_add(*field, crossed_zero(*field), g, s);
    else it->second = crossed_add(*field, it->second, g, s);
  }
  const Crossed<F>* get(int k) const {
    auto it = terms.find(k);
    return it == terms.end() ? nullptr : &it->second;
  }
};

template <class F>
HBar<F> hbar_zero(std::shared_ptr<const F> f, int lo) {
  return HBar<F>{f, {}, lo, kExactFloor};
}

template <class F>
HBar<F> hbar_crossed(std::shared_ptr<const F> f, const Crossed<F>& g, int order, int lo) {
  HBar<F> h = hbar_zero(f, lo);
  h.add_term(order, g);
  return h;
}

template <class F>
HBar<F> hbar_scalar(std::shared_ptr<const F> f, const typename F::Scalar& s, int order, int lo) {
  return hbar_crossed(f, f->scalar(s), order, lo);
}

template <class F>
HBar<F> hbar_const(std::shared_ptr<const F> f, cplx c, int order, int lo) {
  return hbar_scalar(f, f->constant(c), order, lo);
}

template <class F>
HBar<F> hbar_add(const HBar<F>& a, const HBar<F>& b, cplx s = 1) {
  HBar<F> out = a;
  out.lo = std::max(a.lo, b.lo);
  for (auto it = out.terms.begin(); it != out.terms.end();) it = it->first < out.lo ? out.terms.erase(it) : ++it;
  for (const auto& [k, g] : b.terms) out.add_term(k, g, s);
  out.floor = std::max(a.floor, b.floor);
  return out;
}

namespace detail {
// y^{±1} · Σ_k G_k y^k, truncated below lo
template <class F>
std::map<int, Crossed<F>> y_times(const F& f, const std::map<int, Crossed<F>>& g, int p, int lo) {
  std::map<int, Crossed<F>> out;
  auto add = [&](int k, const Crossed<F>& v, cplx s) {
    if (k < lo) return;
    auto it = out.find(k);
    if (it == out.end()) out[k] = s == cplx(1) ? v : crossed_add(f, crossed_zero(f), v, s);
    else it->second = crossed_add(f, it->second, v, s);
  };
  for (const auto& [k, gk] : g) {
    if (p == 1) {
      // y·G = Φ(G) y + [y, G]
      add(k + 1, phi_twist(f, gk, 1), 1.0);
      add(k, comm_y_crossed(f, gk), 1.0);
    } else {
      // y^{-1}·G = Σ_s (−1)^s Φ^{-1}([y,·]Φ^{-1})^s G · y^{-1-s}
      Crossed<F> cur = phi_twist(f, gk, -1);
      for (int s = 0; k - 1 - s >= lo; ++s) {
        add(k - 1 - s, cur, s % 2 == 0 ? 1.0 : -1.0);
        if (k - 2 - s < lo) break;
        cur = phi_twist(f, comm_y_crossed(f, cur), -1);
      }
    }
  }
  return out;
}
}  // namespace detail

/// F·G = Σ_a F_a · (y^a G), truncated below `lo` (default: the larger of the operand windows).
template <class F>
HBar<F> hbar_mul(const HBar<F>& a, const HBar<F>& b, std::optional<int> window_lo = std::nullopt) {
  const F& f = *a.field;
  const int lo = window_lo ? *window_lo : std::max(a.lo, b.lo);
  HBar<F> out = hbar_zero(a.field, lo);
  if (a.terms.empty() || b.terms.empty()) return out;
  const int amax = a.max_order(), amin = a.min_order();
  std::map<int, std::map<int, Crossed<F>>> powers;
  powers[0] = b.terms;
  for (int p = 1; p <= amax; ++p) powers[p] = detail::y_times(f, powers[p - 1], 1, lo);
  for (int p = -1; p >= amin; --p) powers[p] = detail::y_times(f, powers[p + 1], -1, lo);
  for (const auto& [k, fa] : a.terms)
    for (const auto& [l, g] : powers[k]) out.add_term(l, crossed_mul(f, fa, g));
  const int fa_ = a.floor == kExactFloor ? kExactFloor : a.floor + b.max_order();
  const int fb_ = b.floor == kExactFloor ? kExactFloor : b.floor + a.max_order();
  out.floor = std::max({fa_, fb_, lo});
  return out;
}

template <class F>
std::pair<HBar<F>, HBar<F>> split_pm(const HBar<F>& a) {
  HBar<F> plus = hbar_zero(a.field, a.lo), minus = hbar_zero(a.field, a.lo);
  for (const auto& [k, g] : a.terms) (k >= 0 ? plus : minus).terms[k] = g;
  minus.floor = a.floor;
  // the plus part only misses terms below the floor, which lie at negative orders when floor ≤ 0
  plus.floor = a.floor <= 0 ? kExactFloor : a.floor;
  return {plus, minus};
}

/// Max over orders ≥ floor of sampled coefficient differences.
template <class F>
double hbar_max_diff(const HBar<F>& a, const HBar<F>& b, int floor) {
  const F& f = *a.field;
  double err = 0;
  std::set<int> keys;
  for (const auto& [k, g] : a.terms) keys.insert(k);
  for (const auto& [k, g] : b.terms) keys.insert(k);
  for (int k : keys) {
    if (k < floor) continue;
    for (int j = 0; j < f.m(); ++j) {
      CVec x = a.get(k) ? f.sample((*a.get(k))[j]) : CVec();
      CVec y = b.get(k) ? f.sample((*b.get(k))[j]) : CVec();
      if (x.size() == 0) x = CVec::Zero(y.size());
      if (y.size() == 0) y = CVec::Zero(x.size());
      if (x.size()) err = std::max(err, (x - y).cwiseAbs().maxCoeff());
    }
  }
  return err;
}

template <class F>
double hbar_max_abs(const HBar<F>& a, int floor) {
  return hbar_max_diff(a, hbar_zero(a.field, a.lo), floor);
}

/// Lowest count of trustworthy jet orders among the coefficients (large for exact fields).
template <class F>
int hbar_valid_orders(const HBar<F>& a) {
  int v = 1 << 20;
  for (const auto& [k, g] : a.terms)
    for (const auto& s : g) v = std::min(v, a.field->valid(s));
  return v;
}

/// Inverse of 1 + (terms of order ≤ −1) by the terminating Neumann series.
template <class F>
HBar<F> invert_unitriangular(const HBar<F>& m) {
  const F& f = *m.field;
  HBar<F> one = hbar_const(m.field, 1.0, 0, m.lo);
  for (const auto& [k, g] : m.terms) {
    if (k > 0) throw PreconditionError("operator has positive order; not unitriangular");
    if (k == 0) {
      auto d = crossed_add(f, g, (*one.get(0)), -1.0);
      for (const auto& s : d)
        if (f.sample(s).cwiseAbs().maxCoeff() > 1e-12) throw PreconditionError("order-zero part is not 1");
    }
  }
  HBar<F> n = hbar_add(one, m, -1.0);
  n.terms.erase(0);
  HBar<F> sum = one, pw = one;
  for (int s = 1; s <= -m.lo; ++s) {
    pw = hbar_mul(pw, n);
    if (pw.terms.empty()) break;
    sum = hbar_add(sum, pw);
  }
  return sum;
}

// ---------------------------------------------------------------- matrix operators

template <class F>
struct MatrixOperator {
  std::shared_ptr<const F> field;
  int d = 1;
  int lo = -12;
  std::vector<HBar<F>> e;  // row-major

  HBar<F>& operator()(int r, int s) { return e[r * d + s]; }
  const HBar<F>& operator()(int r, int s) const { return e[r * d + s]; }
  int floor() const {
    int fl = kExactFloor;
    for (const auto& x : e) fl = std::max(fl, x.floor);
    return std::max(fl, lo);
  }
};

template <class F>
MatrixOperator<F> mop_zero(std::shared_ptr<const F> f, int d, int lo) {
  return {f, d, lo, std::vector<HBar<F>>(d * d, hbar_zero(f, lo))};
}

/// diag(scale)·y^order (scale defaults to the identity).
template <class F>
MatrixOperator<F> mop_diag(std::shared_ptr<const F> f, int d, int lo, int order = 0,
                           std::vector<cplx> scale = {}) {
  auto out = mop_zero(f, d, lo);
  for (int r = 0; r < d; ++r) out(r, r) = hbar_const(f, scale.empty() ? cplx(1) : scale[r], order, lo);
  return out;
}

template <class F>
MatrixOperator<F> mop_unit(std::shared_ptr<const F> f, int d, int lo, int r) {
  auto out = mop_zero(f, d, lo);
  out(r, r) = hbar_const(f, 1.0, 0, lo);
  return out;
}

template <class F>
MatrixOperator<F> mop_add(const MatrixOperator<F>& a, const MatrixOperator<F>& b, cplx s = 1) {
  auto out = a;
  out.lo = std::max(a.lo, b.lo);
  for (size_t i = 0; i < a.e.size(); ++i) out.e[i] = hbar_add(a.e[i], b.e[i], s);
  return out;
}

template <class F>
MatrixOperator<F> mop_mul(const MatrixOperator<F>& a, const MatrixOperator<F>& b) {
  if (a.d != b.d) throw Error("matrix operator size mismatch");
  const int d = a.d, lo = std::max(a.lo, b.lo);
  auto out = mop_zero(a.field, d, lo);
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s) {
      HBar<F> acc = hbar_zero(a.field, lo);
      bool first = true;
      for (int q = 0; q < d; ++q) {
        if (a(r, q).terms.empty() || b(q, s).terms.empty()) continue;
        auto p = hbar_mul(a(r, q), b(q, s), lo);
        acc = first ? p : hbar_add(acc, p);
        first = false;
      }
      out(r, s) = acc;
    }
  return out;
}

/// Multiplies every entry on the left by the crossed element g (e.g. an idempotent).
template <class F>
MatrixOperator<F> mop_left_crossed(const MatrixOperator<F>& a, const Crossed<F>& g) {
  auto out = a;
  auto gg = hbar_crossed(a.field, g, 0, a.lo);
  for (auto& x : out.e) x = hbar_mul(gg, x, a.lo);
  return out;
}
template <class F>
MatrixOperator<F> mop_right_crossed(const MatrixOperator<F>& a, const Crossed<F>& g) {
  auto out = a;
  auto gg = hbar_crossed(a.field, g, 0, a.lo);
  for (auto& x : out.e) x = hbar_mul(x, gg, a.lo);
  return out;
}

template <class F>
std::pair<MatrixOperator<F>, MatrixOperator<F>> mop_split(const MatrixOperator<F>& a) {
  auto plus = a, minus = a;
  for (size_t i = 0; i < a.e.size(); ++i) std::tie(plus.e[i], minus.e[i]) = split_pm(a.e[i]);
  return {plus, minus};
}

template <class F>
MatrixOperator<F> mop_invert_unitriangular(const MatrixOperator<F>& m) {
  const int d = m.d;
  auto one = mop_diag(m.field, d, m.lo);
  auto n = mop_add(one, m, -1.0);
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s) {
      for (const auto& [k, g] : n(r, s).terms)
        if (k > 0) throw PreconditionError("operator has positive order; not unitriangular");
      if (auto g = n(r, s).get(0))
        for (const auto& x : *g)
          if (m.field->sample(x).cwiseAbs().maxCoeff() > 1e-12) throw PreconditionError("order-zero part is not 1");
      n(r, s).terms.erase(0);
    }
  auto sum = one, pw = one;
  for (int s = 1; s <= -m.lo; ++s) {
    pw = mop_mul(pw, n);
    bool empty = true;
    for (const auto& x : pw.e) empty = empty && x.terms.empty();
    if (empty) break;
    sum = mop_add(sum, pw);
  }
  return sum;
}

template <class F>
double mop_max_diff(const MatrixOperator<F>& a, const MatrixOperator<F>& b, int floor) {
  double err = 0;
  for (size_t i = 0; i < a.e.size(); ++i) err = std::max(err, hbar_max_diff(a.e[i], b.e[i], floor));
  return err;
}

template <class F>
double mop_max_abs(const MatrixOperator<F>& a, int floor) {
  double err = 0;
  for (const auto& x : a.e) err = std::max(err, hbar_max_abs(x, floor));
  return err;
}

}  // namespace quiverflow
