/**
 * @file rational.hpp
 * @brief Complex polynomials and rational functions with approximate root cancellation.
 */
#pragma once

#include "common.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>

namespace quiverflow {

/// Coefficients low → high.
struct Polynomial {
  std::vector<cplx> c;

  Polynomial() = default;
  Polynomial(std::initializer_list<cplx> l) : c(l) {}
  explicit Polynomial(std::vector<cplx> v) : c(std::move(v)) {}
  static Polynomial constant(cplx a) { return Polynomial(std::vector<cplx>{a}); }
  static Polynomial x() { return Polynomial(std::vector<cplx>{0.0, 1.0}); }

  int degree() const {
    for (int i = int(c.size()) - 1; i >= 0; --i)
      if (c[i] != cplx(0)) return i;
    return -1;
  }
  bool is_zero() const { return degree() < 0; }
  cplx lead() const { return degree() < 0 ? cplx(0) : c[degree()]; }
  double norm() const {
    double s = 0;
    for (auto z : c) s = std::max(s, std::abs(z));
    return s;
  }
  Polynomial& trim(double rel = 0) {
    double cut = rel * norm();
    while (!c.empty() && std::abs(c.back()) <= cut) c.pop_back();
    return *this;
  }
  cplx operator()(cplx x) const {
    cplx s = 0;
    for (int i = int(c.size()) - 1; i >= 0; --i) s = s * x + c[i];
    return s;
  }
  // Σ|c_k||x|^k, the natural scale for judging p(x) ≈ 0
  double magnitude(cplx x) const {
    double s = 0, ax = std::abs(x);
    for (int i = int(c.size()) - 1; i >= 0; --i) s = s * ax + std::abs(c[i]);
    return s;
  }
  Polynomial derivative() const {
    Polynomial d;
    for (size_t i = 1; i < c.size(); ++i) d.c.push_back(double(i) * c[i]);
    return d;
  }
  /// p(s·x)
  Polynomial scaled(cplx s) const {
    Polynomial out = *this;
    cplx f = 1;
    for (auto& z : out.c) {
      z *= f;
      f *= s;
    }
    return out;
  }
  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    Polynomial out;
    out.c.assign(std::max(a.c.size(), b.c.size()), 0.0);
    for (size_t i = 0; i < a.c.size(); ++i) out.c[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) out.c[i] += b.c[i];
    return out;
  }
  friend Polynomial operator*(cplx s, Polynomial a) {
    for (auto& z : a.c) z *= s;
    return a;
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + cplx(-1) * b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.c.empty() || b.c.empty()) return {};
    Polynomial out;
    out.c.assign(a.c.size() + b.c.size() - 1, 0.0);
    for (size_t i = 0; i < a.c.size(); ++i)
      for (size_t j = 0; j < b.c.size(); ++j) out.c[i + j] += a.c[i] * b.c[j];
    return out;
  }
  /// Quotient and remainder of long division.
  std::pair<Polynomial, Polynomial> divmod(const Polynomial& d) const {
    int dd = d.degree();
    if (dd < 0) throw Error("division by the zero polynomial");
    Polynomial r = *this;
    r.c.resize(std::max<size_t>(r.c.size(), 1));
    int nd = r.degree();
    Polynomial q;
    q.c.assign(std::max(nd - dd + 1, 1), 0.0);
    for (int k = nd; k >= dd; --k) {
      cplx f = r.c[k] / d.c[dd];
      q.c[k - dd] = f;
      for (int j = 0; j <= dd; ++j) r.c[k - dd + j] -= f * d.c[j];
      r.c[k] = 0;
    }
    r.c.resize(std::max(dd, 0));
    return {q, r};
  }
  std::vector<cplx> roots() const {
    int n = degree();
    if (n < 1) return {};
    Mat comp = Mat::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i] / c[n];
    Eigen::ComplexEigenSolver<Mat> es(comp, false);
    std::vector<cplx> r;
    for (int i = 0; i < n; ++i) r.push_back(es.eigenvalues()(i));
    return r;
  }
};

/**
 * Partial-fraction form p(x) + Σ_r Σ_k a_{r,k} (x − r)^{-k}. Sums, derivatives
 * and dilations act termwise; products expand pole pairs in closed form.
 */
class RationalFunction {
 public:
  static constexpr double kPoleTol = 1e-9;
  static constexpr double kCancelTol = 1e-9;
  static constexpr int kDegreeCap = 256;
  struct PoleTerm {
    cplx r;
    std::vector<cplx> a;  // a[k−1] multiplies (x − r)^{-k}
  };

  RationalFunction() = default;
  RationalFunction(cplx a) : poly_(Polynomial::constant(a)) { tidy(); }
  RationalFunction(Polynomial p) : poly_(std::move(p)) { tidy(); }
  /// num/den; the denominator roots are clustered to recover multiplicities.
  RationalFunction(const Polynomial& num, const Polynomial& den) {
    if (den.is_zero()) throw Error("zero denominator");
    RationalFunction out(cplx(1.0 / den.lead()) * num);
    std::vector<std::pair<cplx, int>> roots;
    for (cplx r : den.roots()) {
      bool merged = false;
      for (auto& [z, k] : roots)
        if (std::abs(z - r) <= 1e-5 * std::max(1.0, std::abs(r))) {
          z = (z * double(k) + r) / double(k + 1);
          ++k;
          merged = true;
          break;
        }
      if (!merged) roots.push_back({r, 1});
    }
    for (auto [r, k] : roots) out = out * pole(r, k);
    // drop pole coefficients that are rounding residue of a common root
    double scale = out.poly_.norm();
    for (const auto& t : out.poles_)
      for (auto c : t.a) scale = std::max(scale, std::abs(c));
    for (auto& t : out.poles_)
      for (auto& c : t.a)
        if (std::abs(c) <= kCancelTol * scale) c = 0;
    out.tidy();
    *this = out;
  }
  static RationalFunction x() { return RationalFunction(Polynomial::x()); }
  /// (x − r)^{-k}
  static RationalFunction pole(cplx r, int k = 1) {
    RationalFunction f;
    PoleTerm t{r, std::vector<cplx>(k, 0.0)};
    t.a[k - 1] = 1;
    f.poles_.push_back(t);
    return f;
  }

  const Polynomial& polynomial() const { return poly_; }
  const std::vector<PoleTerm>& poles() const { return poles_; }
  bool is_zero() const { return poly_.is_zero() && poles_.empty(); }
  /// Monic denominator Π (x − r)^{k_r}.
  Polynomial denominator() const {
    Polynomial d = Polynomial::constant(1);
    for (const auto& t : poles_) d = d * linear_power(t.r, int(t.a.size()));
    return d;
  }
  Polynomial numerator() const {
    Polynomial n = poly_ * denominator();
    for (size_t i = 0; i < poles_.size(); ++i) {
      Polynomial others = Polynomial::constant(1);
      for (size_t j = 0; j < poles_.size(); ++j)
        if (j != i) others = others * linear_power(poles_[j].r, int(poles_[j].a.size()));
      const auto& t = poles_[i];
      const int K = int(t.a.size());
      for (int k = 1; k <= K; ++k)
        if (t.a[k - 1] != cplx(0)) n = n + t.a[k - 1] * (others * linear_power(t.r, K - k));
    }
    if (n.c.empty()) n = Polynomial::constant(0);
    return n;
  }
  /// Largest pole order.
  int max_pole_order() const {
    int k = 0;
    for (const auto& t : poles_) k = std::max(k, int(t.a.size()));
    return k;
  }

  cplx operator()(cplx x) const {
    cplx v = poly_(x);
    for (const auto& t : poles_) {
      cplx d = x - t.r;
      if (std::abs(d) < 1e-300) throw Error("evaluation at a pole");
      cplx inv = 1.0 / d, pw = inv;
      for (auto c : t.a) {
        v += c * pw;
        pw *= inv;
      }
    }
    return v;
  }
  RationalFunction derivative() const {
    RationalFunction out(poly_.derivative());
    for (const auto& t : poles_) {
      PoleTerm d{t.r, std::vector<cplx>(t.a.size() + 1, 0.0)};
      for (size_t k = 0; k < t.a.size(); ++k) d.a[k + 1] = -double(k + 1) * t.a[k];
      out.poles_.push_back(d);
    }
    out.tidy();
    return out;
  }
  /// f(s·x): (s x − r)^{-k} = s^{-k} (x − r/s)^{-k}
  RationalFunction scaled(cplx s) const {
    RationalFunction out(poly_.scaled(s));
    for (const auto& t : poles_) {
      PoleTerm d{t.r / s, t.a};
      cplx f = 1;
      for (auto& c : d.a) c *= (f /= s);
      out.poles_.push_back(d);
    }
    out.tidy();
    return out;
  }

  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    RationalFunction out = a;
    out.poly_ = out.poly_ + b.poly_;
    for (const auto& t : b.poles_) out.add_pole(t, 1.0);
    out.tidy();
    return out;
  }
  friend RationalFunction operator*(cplx s, RationalFunction a) {
    a.poly_ = s * a.poly_;
    for (auto& t : a.poles_)
      for (auto& c : t.a) c *= s;
    a.tidy();
    return a;
  }
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + cplx(-1) * b; }
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
    if (b.is_zero()) throw Error("division by the zero rational function");
    return a * RationalFunction(b.denominator(), b.numerator());
  }
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    RationalFunction out(a.poly_ * b.poly_);
    for (const auto& t : b.poles_) out = out + poly_times_pole(a.poly_, t);
    for (const auto& t : a.poles_) out = out + poly_times_pole(b.poly_, t);
    for (const auto& s : a.poles_)
      for (const auto& t : b.poles_)
        for (size_t i = 0; i < s.a.size(); ++i)
          for (size_t j = 0; j < t.a.size(); ++j) {
            cplx c = s.a[i] * t.a[j];
            if (c != cplx(0)) out = out + c * pole_product(s.r, int(i) + 1, t.r, int(j) + 1);
          }
    return out;
  }

 private:
  static bool same(cplx r, cplx s) { return std::abs(r - s) <= kPoleTol * std::max(1.0, std::abs(r)); }

  void add_pole(const PoleTerm& t, cplx s) {
    for (auto& u : poles_)
      if (same(u.r, t.r)) {
        if (u.a.size() < t.a.size()) u.a.resize(t.a.size(), 0.0);
        for (size_t k = 0; k < t.a.size(); ++k) u.a[k] += s * t.a[k];
        return;
      }
    PoleTerm n = t;
    for (auto& c : n.a) c *= s;
    poles_.push_back(n);
  }

  // (x − r)^{-a} (x − s)^{-b}
  static RationalFunction pole_product(cplx r, int a, cplx s, int b) {
    if (same(r, s)) return pole(r, a + b);
    RationalFunction out;
    const cplx d = r - s;
    // around r: u = x − r, x − s = u + d
    PoleTerm tr{r, std::vector<cplx>(a, 0.0)}, ts{s, std::vector<cplx>(b, 0.0)};
    for (int i = 0; i < a; ++i) tr.a[a - i - 1] = binom(b + i - 1, i) * (i % 2 ? -1.0 : 1.0) / std::pow(d, b + i);
    for (int i = 0; i < b; ++i) ts.a[b - i - 1] = binom(a + i - 1, i) * (i % 2 ? -1.0 : 1.0) / std::pow(-d, a + i);
    out.poles_ = {tr, ts};
    out.tidy();
    return out;
  }
  // p(x) Σ_k a_k (x − r)^{-k}
  static RationalFunction poly_times_pole(const Polynomial& p, const PoleTerm& t) {
    if (p.is_zero()) return RationalFunction();
    // Taylor coefficients of p at r
    std::vector<cplx> q;
    Polynomial w = p;
    for (int e = 0; !w.is_zero(); ++e) {
      q.push_back(w(t.r));
      w = cplx(1.0 / double(e + 1)) * w.derivative();
    }
    RationalFunction out;
    PoleTerm n{t.r, std::vector<cplx>(t.a.size(), 0.0)};
    std::vector<cplx> u(1, 0.0);  // polynomial part in powers of (x − r)
    for (size_t k = 0; k < t.a.size(); ++k)
      for (size_t e = 0; e < q.size(); ++e) {
        int pw = int(e) - int(k + 1);
        cplx c = t.a[k] * q[e];
        if (pw < 0) n.a[-pw - 1] += c;
        else {
          if (int(u.size()) <= pw) u.resize(pw + 1, 0.0);
          u[pw] += c;
        }
      }
    Polynomial shift = Polynomial::constant(0), basis = Polynomial::constant(1);
    for (auto c : u) {
      shift = shift + c * basis;
      basis = basis * Polynomial{-t.r, 1.0};
    }
    out.poly_ = shift;
    out.poles_ = {n};
    out.tidy();
    return out;
  }
  static Polynomial linear_power(cplx r, int k) {
    Polynomial p = Polynomial::constant(1);
    for (int i = 0; i < k; ++i) p = p * Polynomial{-r, 1.0};
    return p;
  }
  static double binom(int n, int k) {
    double v = 1;
    for (int i = 1; i <= k; ++i) v = v * double(n - k + i) / double(i);
    return v;
  }

  void tidy() {
    poly_.trim();
    for (auto& t : poles_)
      while (!t.a.empty() && t.a.back() == cplx(0)) t.a.pop_back();
    std::erase_if(poles_, [](const PoleTerm& t) { return t.a.empty(); });
    int deg = 0;
    for (const auto& t : poles_) deg += int(t.a.size());
    if (deg > kDegreeCap || poly_.degree() > kDegreeCap) throw Error("rational function exceeds the degree cap");
  }

  Polynomial poly_;
  std::vector<PoleTerm> poles_;
};

}  // namespace quiverflow
