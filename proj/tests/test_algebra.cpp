#include <gtest/gtest.h>

#include "quiverflow/hbar.hpp"
#include "quiverflow/io.hpp"
#include "quiverflow/kp.hpp"

using namespace quiverflow;

namespace {

using RF = RationalField;
using FPtr = std::shared_ptr<const RF>;

FPtr field(int m, Weight lam) { return std::make_shared<const RF>(CherednikData(m, std::move(lam))); }

double crossed_diff(const RF& f, const Crossed<RF>& a, const Crossed<RF>& b) {
  double d = 0;
  for (int j = 0; j < f.m(); ++j) d = std::max(d, (f.sample(a[j]) - f.sample(b[j])).cwiseAbs().maxCoeff());
  return d;
}

Crossed<RF> x_power(const RF& f, int k) {
  RationalFunction r(1.0);
  for (int i = 0; i < k; ++i) r = r * RationalFunction::x();
  return f.scalar(r);
}

}  // namespace

// ------------------------------------------------------------ rational functions

TEST(Rational, SumOfPoles) {
  auto s = RationalFunction::pole(1.0) + RationalFunction::pole(-1.0);
  RationalFunction want(Polynomial{0.0, 2.0}, Polynomial{-1.0, 0.0, 1.0});
  for (cplx z : {cplx(2.5, 0.3), cplx(-0.4, 1.1), cplx(3, -2)}) EXPECT_NEAR(std::abs(s(z) - want(z)), 0, 1e-14);
}

TEST(Rational, DerivativeOfInverse) {
  auto d = RationalFunction::pole(0.0).derivative();
  for (cplx z : {cplx(2, 0), cplx(-0.5, 0.7)}) EXPECT_NEAR(std::abs(d(z) + 1.0 / (z * z)), 0, 1e-14);
}

TEST(Rational, CancelsCommonFactor) {
  RationalFunction r(Polynomial{-1.0, 0.0, 1.0}, Polynomial{-1.0, 1.0});
  EXPECT_NEAR(std::abs(r(3.0) - 4.0), 0, 1e-14);
  EXPECT_TRUE(r.poles().empty());
}

TEST(Rational, FieldAxiomsAtSamples) {
  auto a = RationalFunction::pole(cplx(0.3, 0.2), 2) + RationalFunction::x();
  auto b = RationalFunction::pole(cplx(-0.9, 0.1)) + RationalFunction(2.0);
  for (cplx z : {cplx(2.3, 1.1), cplx(-1.9, 1.7)}) {
    EXPECT_NEAR(std::abs((a * b)(z) - a(z) * b(z)), 0, 1e-12);
    EXPECT_NEAR(std::abs((a / b)(z) - a(z) / b(z)), 0, 1e-12);
    EXPECT_NEAR(std::abs((a - b)(z) - (a(z) - b(z))), 0, 1e-12);
  }
}

// ------------------------------------------------------------ crossed product

TEST(Crossed, IdempotentsAreOrthogonal) {
  auto f = field(4, {1.0, 0.5, cplx(0.2, 0.1), -0.3});
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l) {
      auto p = crossed_mul(*f, idempotent(*f, k), idempotent(*f, l));
      EXPECT_LE(crossed_diff(*f, p, k == l ? idempotent(*f, k) : crossed_zero(*f)), 1e-14);
    }
}

TEST(Crossed, ScalarCaseIsRationalProduct) {
  auto f = field(1, {1.0});
  auto a = f->scalar(RationalFunction::pole(0.5)), b = f->scalar(RationalFunction::x());
  auto p = crossed_mul(*f, a, b);
  EXPECT_LE(crossed_diff(*f, p, f->scalar(RationalFunction::pole(0.5) * RationalFunction::x())), 1e-14);
}

TEST(Crossed, IdempotentsShiftPastX) {
  auto f = field(3, {1.0, 0.4, -0.2});
  auto x = x_power(*f, 1);
  for (int i = 0; i < 3; ++i) {
    auto lhs = crossed_mul(*f, idempotent(*f, i), x);
    auto rhs = crossed_mul(*f, x, idempotent(*f, i + 1));
    EXPECT_LE(crossed_diff(*f, lhs, rhs), 1e-14) << i;
  }
}

TEST(CommY, Examples) {
  auto f1 = field(1, {1.0});
  EXPECT_LE(crossed_diff(*f1, comm_y_crossed(*f1, x_power(*f1, 2)), crossed_add(*f1, x_power(*f1, 1), x_power(*f1, 1))), 1e-14);
  const cplx l0(0.7, 0.1), l1(-0.3, 0.4);
  auto f2 = field(2, {l0, l1});
  auto want = crossed_add(*f2, crossed_add(*f2, crossed_zero(*f2), idempotent(*f2, 0), l0), idempotent(*f2, 1), l1);
  EXPECT_LE(crossed_diff(*f2, comm_y_crossed(*f2, x_power(*f2, 1)), want), 1e-14);
  auto want2 = crossed_add(*f2, crossed_zero(*f2), x_power(*f2, 1), l0 + l1);
  EXPECT_LE(crossed_diff(*f2, comm_y_crossed(*f2, x_power(*f2, 2)), want2), 1e-14);
}

// ------------------------------------------------------------ operators

TEST(Operators, InverseDerivativeTimesX) {
  const int lo = -8;
  auto f = field(1, {1.0});
  auto dinv = hbar_const(f, 1.0, -1, lo);
  auto x = hbar_scalar(f, RationalFunction::x(), 0, lo);
  auto want = hbar_add(hbar_scalar(f, RationalFunction::x(), -1, lo), hbar_const(f, 1.0, -2, lo), -1.0);
  EXPECT_LE(hbar_max_diff(hbar_mul(dinv, x), want, lo), 1e-14);
}

TEST(Operators, YTimesInverse) {
  const int lo = -8;
  for (int m : {1, 2, 3}) {
    Weight lam(m, 0.6);
    lam[0] = cplx(1.1, 0.2);
    auto f = field(m, lam);
    auto p = hbar_mul(hbar_const(f, 1.0, 1, lo), hbar_const(f, 1.0, -1, lo));
    EXPECT_LE(hbar_max_diff(p, hbar_const(f, 1.0, 0, lo), lo), 1e-14) << m;
  }
}

TEST(Operators, YPastSectorIdempotent) {
  // ε_i y = y ε_{i−1}
  const int lo = -6;
  auto f = field(2, {cplx(0.8, 0), cplx(0.7, 0.05)});
  auto y = hbar_const(f, 1.0, 1, lo);
  for (int i = 0; i < 2; ++i) {
    auto lhs = hbar_mul(hbar_crossed(f, idempotent(*f, i), 0, lo), y);
    auto rhs = hbar_mul(y, hbar_crossed(f, idempotent(*f, i - 1), 0, lo));
    EXPECT_LE(hbar_max_diff(lhs, rhs, lo), 1e-12) << i;
  }
}

TEST(Operators, SplitPlusMinus) {
  const int lo = -8;
  auto f = field(1, {1.0});
  auto y2 = hbar_const(f, 1.0, 2, lo);
  auto [p, n] = split_pm(y2);
  EXPECT_LE(hbar_max_diff(p, y2, lo), 0.0);
  EXPECT_TRUE(n.terms.empty());
  auto f0 = RationalFunction::pole(0.4, 2), f1 = RationalFunction::pole(-0.3), f2 = RationalFunction::x();
  auto L = hbar_add(hbar_add(hbar_const(f, 1.0, 1, lo), hbar_scalar(f, f0, 0, lo)),
                    hbar_add(hbar_scalar(f, f1, -1, lo), hbar_scalar(f, f2, -2, lo)));
  auto [lp, ln] = split_pm(L);
  EXPECT_LE(hbar_max_diff(lp, hbar_add(hbar_const(f, 1.0, 1, lo), hbar_scalar(f, f0, 0, lo)), lo), 0.0);
  EXPECT_LE(hbar_max_diff(ln, hbar_add(hbar_scalar(f, f1, -1, lo), hbar_scalar(f, f2, -2, lo)), lo), 0.0);
  auto [pp, pn] = split_pm(lp);
  EXPECT_LE(hbar_max_diff(pp, lp, lo), 0.0);
  EXPECT_TRUE(pn.terms.empty());
}

TEST(Operators, UnitriangularInverse) {
  const int lo = -8;
  auto f = field(1, {1.0});
  auto one = hbar_const(f, 1.0, 0, lo);
  EXPECT_LE(hbar_max_diff(invert_unitriangular(one), one, lo), 0.0);
  auto M = hbar_add(one, hbar_scalar(f, RationalFunction::pole(0.5), -1, lo));
  auto Mi = invert_unitriangular(M);
  EXPECT_LE(hbar_max_diff(hbar_mul(M, Mi), one, lo), 1e-12);
  EXPECT_LE(hbar_max_diff(hbar_mul(Mi, M), one, lo), 1e-12);
  auto f2 = field(2, {cplx(0.8, 0), cplx(0.7, 0.05)});
  auto one2 = hbar_const(f2, 1.0, 0, lo);
  auto M2 = hbar_add(one2, hbar_scalar(f2, RationalFunction::pole(cplx(0.4, 0.3)), -1, lo));
  EXPECT_LE(hbar_max_diff(hbar_mul(M2, invert_unitriangular(M2)), one2, lo), 1e-11);
}

TEST(Operators, MatrixUnitriangularInverse) {
  const int lo = -6;
  auto f = field(1, {1.0});
  auto M = mop_diag(f, 2, lo);
  M(0, 1) = hbar_scalar(f, RationalFunction::pole(0.5), -1, lo);
  M(1, 0) = hbar_scalar(f, RationalFunction::x(), -2, lo);
  M(1, 1) = hbar_add(M(1, 1), hbar_scalar(f, RationalFunction::pole(-0.7, 2), -1, lo));
  auto Mi = mop_invert_unitriangular(M);
  EXPECT_LE(mop_max_diff(mop_mul(M, Mi), mop_diag(f, 2, lo), lo), 1e-12);
}

TEST(Operators, JetAndRationalFieldsAgree) {
  const int lo = -6;
  auto rf = field(2, {cplx(0.8, 0), cplx(0.7, 0.05)});
  auto jf = std::make_shared<const JetField>(CherednikData(2, {cplx(0.8, 0), cplx(0.7, 0.05)}),
                                             std::vector<cplx>{cplx(3.7, 2.9), cplx(-4.1, 3.3)}, 20);
  auto g = RationalFunction::pole(cplx(0.3, 0.2)) + RationalFunction::x();
  auto a = hbar_add(hbar_const(rf, 1.0, 1, lo), hbar_scalar(rf, g, -1, lo));
  auto ja = hbar_add(hbar_const(jf, 1.0, 1, lo), hbar_scalar(jf, jf->from_rational(g), -1, lo));
  auto p = hbar_mul(a, a);
  auto jp = hbar_mul(ja, ja);
  for (int k = lo; k <= 2; ++k) {
    const auto* r = p.get(k);
    const auto* j = jp.get(k);
    if (!r) continue;
    ASSERT_NE(j, nullptr);
    for (int s = 0; s < 2; ++s) {
      auto rv = (*r)[s];
      CVec jv = jf->sample((*j)[s]);
      for (int q = 0; q < jf->npt(); ++q) EXPECT_NEAR(std::abs(rv(jf->points[q]) - jv(q)), 0, 1e-10);
    }
  }
}

// ------------------------------------------------------------ io

TEST(Io, NumberFormatting) {
  std::string s;
  io::detail::format_number(s, 0.1);
  EXPECT_EQ(s, "0.10000000000000001");
  EXPECT_EQ(io::dump(io::json{{"a", 0.5}, {"b", 3}}, -1), R"({"a":0.5,"b":3})");
}

TEST(Io, ParseComplex) {
  EXPECT_EQ(io::parse_complex("0.7+0.05i"), cplx(0.7, 0.05));
  EXPECT_EQ(io::parse_complex("-2i"), cplx(0, -2));
  EXPECT_EQ(io::parse_complex("3"), cplx(3, 0));
  EXPECT_EQ(io::parse_complex("1e-3-2e+1i"), cplx(1e-3, -20));
  EXPECT_THROW(io::parse_complex("abc"), Error);
}

TEST(Io, ChartAndPointRoundTrip) {
  std::mt19937 rng(7);
  Weight lam{cplx(0.8, 0), cplx(0.7, 0.05)};
  auto c = random_chart(rng, ChartKind::Delta, 2, 2, 1, lam, 0.9);
  auto back = io::chart_from(io::json::parse(io::dump(io::to_json(c))), lam);
  ASSERT_EQ(back.n(), c.n());
  for (int a = 0; a < c.n(); ++a) {
    EXPECT_EQ(back.x[a], c.x[a]);
    EXPECT_EQ(back.p[a], c.p[a]);
    EXPECT_EQ(back.phi[a], c.phi[a]);
    EXPECT_EQ(back.psi[a], c.psi[a]);
  }
  auto v = to_rep(from_darboux(c, lam));
  auto fl = framed_weight(lam, {2, 2});
  Weight wl;
  auto pv = io::point_from(io::json::parse(io::dump(io::to_json(v, &fl))), &wl);
  EXPECT_EQ(pv.dims, v.dims);
  EXPECT_EQ(pv.mats, v.mats);
  EXPECT_EQ(wl, fl);
}

TEST(Io, OperatorRoundTrip) {
  const int lo = -6;
  auto f = field(2, {cplx(0.8, 0), cplx(0.7, 0.05)});
  auto a = hbar_add(hbar_const(f, 1.0, 1, lo), hbar_scalar(f, RationalFunction::pole(cplx(0.4, 0.3), 2), -1, lo));
  a.add_term(-2, crossed_mul(*f, idempotent(*f, 1), f->scalar(RationalFunction::x())));
  auto b = io::operator_from(io::json::parse(io::dump(io::to_json(a))));
  EXPECT_LE(hbar_max_diff(a, b, lo), 1e-14);
}

TEST(Io, SeedRoundTrip) {
  auto j = io::json::parse(R"({"schema":"quiverflow.seed.v1","kind":"jordan","lambda":[1],"window":[-8,6],
    "chart":{"schema":"quiverflow.chart.v1","kind":"jordan","m":1,"d":1,"x":[0.5],"p":[0.3]}})");
  auto s = io::seed_from(j);
  EXPECT_EQ(s.lo, -8);
  EXPECT_EQ(s.point.X[0](0, 0), cplx(0.5));
  auto again = io::seed_from(io::to_json(s));
  EXPECT_EQ(again.point.X[0], s.point.X[0]);
  EXPECT_EQ(again.point.Y[0], s.point.Y[0]);
  EXPECT_EQ(again.lo, s.lo);
  EXPECT_THROW(io::seed_from(io::json{{"schema", "quiverflow.chart.v1"}}), Error);
  j["window"] = {2, 1};
  EXPECT_THROW(io::seed_from(j), Error);
}
