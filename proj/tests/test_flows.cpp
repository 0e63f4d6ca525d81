#include <gtest/gtest.h>

#include <random>

#include "quiverflow/cyclic.hpp"
#include "quiverflow/hamiltonians.hpp"
#include "quiverflow/kp.hpp"

using namespace quiverflow;

namespace {

const Weight kLam2{cplx(0.8, 0), cplx(0.7, 0.05)};

DarbouxChart jordan_chart(std::vector<cplx> x, std::vector<cplx> p) {
  DarbouxChart c;
  c.x = std::move(x);
  c.p = std::move(p);
  for (int a = 0; a < c.n(); ++a) {
    c.phi.push_back(Mat::Ones(1, 1));
    c.psi.push_back(Mat::Ones(1, 1));
  }
  normalize(c, {1.0});
  return c;
}

CyclicPoint cm_point(std::vector<cplx> x, std::vector<cplx> p) {
  return from_darboux(jordan_chart(std::move(x), std::move(p)), {1.0});
}

CyclicPoint collision_point(cplx x1, cplx a, cplx b) {
  auto c = CyclicPoint::zero(1, {2}, {1});
  c.X[0] << x1, 1, 0, x1;
  c.Y[0] << a, b, 1, a;
  c.v[0] << 0, 2;
  c.w[0] << 0, 1;
  return c;
}

Mat random_mat(std::mt19937& rng, int r, int c) {
  std::normal_distribution<double> g;
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

LZetaElement random_lzeta(std::mt19937& rng, const Quiver& q, int max_len) {
  LZetaElement a;
  for (int l = 0; l <= max_len; ++l)
    for (const auto& p : all_star_paths(q, l)) a.add(p, random_mat(rng, q.zeta(p.start), q.zeta(p.end)));
  return a;
}

}  // namespace

// ------------------------------------------------------------ cyclic constructors

TEST(FromDarboux, SingleParticle) {
  auto c = cm_point({0.5}, {0.3});
  EXPECT_EQ(c.X[0](0, 0), cplx(0.5));
  EXPECT_EQ(c.Y[0](0, 0), cplx(0.3));
  EXPECT_LE(c.residual({1.0}), 1e-15);
}

TEST(FromDarboux, ResidualsAcrossKinds) {
  std::mt19937 rng(41);
  for (auto kind : {ChartKind::Eps0, ChartKind::Delta})
    for (int n = 1; n <= 3; ++n)
      for (int d = 1; d <= 2; ++d) {
        auto c = random_chart(rng, kind, 2, n, d, kLam2, 0.9);
        EXPECT_LE(from_darboux(c, kLam2).residual(kLam2), 1e-12) << chart_kind_str(kind) << n << d;
      }
}

TEST(ToDarboux, RoundTripAndGauge) {
  std::mt19937 rng(43);
  for (auto kind : {ChartKind::Eps0, ChartKind::Delta}) {
    auto c = random_chart(rng, kind, 2, 2, 1, kLam2, 0.9);
    auto cp = from_darboux(c, kLam2);
    auto back = to_darboux(cp, kind);
    canonicalize(c);
    ASSERT_EQ(back.n(), c.n());
    for (int a = 0; a < c.n(); ++a) {
      EXPECT_NEAR(std::abs(back.x[a] - c.x[a]), 0, 1e-9);
      EXPECT_NEAR(std::abs(back.p[a] - c.p[a]), 0, 1e-9);
    }
    // conjugate by a random block-diagonal g
    CyclicPoint g = cp;
    std::vector<Mat> gs;
    for (int i = 0; i < cp.m; ++i) gs.push_back(random_mat(rng, cp.alpha[i], cp.alpha[i]) + 3.0 * identity(cp.alpha[i]));
    for (int i = 0; i < cp.m; ++i) {
      int j = cp.next(i);
      g.X[i] = gs[j] * cp.X[i] * gs[i].inverse();
      g.Y[i] = gs[i] * cp.Y[i] * gs[j].inverse();
      g.v[i] = gs[i] * cp.v[i];
      g.w[i] = cp.w[i] * gs[i].inverse();
    }
    auto again = to_darboux(g, kind);
    for (int a = 0; a < c.n(); ++a) {
      EXPECT_NEAR(std::abs(again.x[a] - back.x[a]), 0, 1e-9);
      EXPECT_NEAR(std::abs(again.p[a] - back.p[a]), 0, 1e-9);
    }
  }
}

TEST(ToDarboux, CollisionIsOffChart) {
  EXPECT_THROW(to_darboux(collision_point(0.4, 0.3, -0.2), ChartKind::Jordan), ChartBoundaryError);
}

// ------------------------------------------------------------ Hamiltonians

TEST(Hamiltonians, TrivialCycleAndYCycle) {
  std::mt19937 rng(47);
  auto cp = from_darboux(random_chart(rng, ChartKind::Delta, 2, 2, 1, kLam2), kLam2);
  auto v = to_rep(cp);
  const auto& q = *v.quiver;
  for (const auto& p : star_paths(q, 1, 1, 0)) EXPECT_EQ(hamiltonian_Hp(v, p), cplx(2));
  auto loops = star_paths(q, 1, 1, 2);
  int seen = 0;
  for (const auto& p : loops) {
    if (!std::all_of(p.letters.begin(), p.letters.end(), [&](int e) { return q.edge(e).id.front() == 'a'; })) continue;
    EXPECT_NEAR(std::abs(hamiltonian_Hp(v, p) - (cp.Y[0] * cp.Y[1]).trace()), 0, 1e-13);
    ++seen;
  }
  EXPECT_EQ(seen, 1);
}

TEST(Hamiltonians, CmEnergy) {
  cplx x1(0.2, 0.1), x2(-0.9, 0.4), p1(0.3, 0), p2(-0.5, 0.2);
  auto cp = cm_point({x1, x2}, {p1, p2});
  cplx want = p1 * p1 + p2 * p2 - 2.0 / ((x1 - x2) * (x1 - x2));
  EXPECT_NEAR(std::abs(hamiltonian_Hmk(cp, 2) - want), 0, 1e-13);
  EXPECT_NEAR(std::abs(hamiltonian_Hmk(cm_point({0.5}, {0.3}), 3) - 0.027), 0, 1e-15);
}

TEST(Hamiltonians, IntegralOfZeroAndH0r) {
  std::mt19937 rng(53);
  auto cp = from_darboux(random_chart(rng, ChartKind::Eps0, 2, 2, 2, kLam2), kLam2);
  auto v = to_rep(cp);
  EXPECT_EQ(integral_IA(v, LZetaElement{}), cplx(0));
  cplx sum = 0;
  for (int r = 1; r <= 2; ++r) {
    cplx h0 = hamiltonian_Hlr(v, 0, r);
    cplx direct = -(cp.w[0].row(r - 1) * cp.v[0].col(r - 1))(0, 0);
    EXPECT_NEAR(std::abs(h0 - direct), 0, 1e-13);
    sum += h0;
  }
  EXPECT_NEAR(std::abs(sum + dot(kLam2, cp.alpha)), 0, 1e-12);
  EXPECT_EQ(hamiltonian_Hlr(v, 2, 3), cplx(0));
}

TEST(Hamiltonians, HmkFromFramingSums) {
  std::mt19937 rng(59);
  const cplx total = weight_sum(kLam2);
  for (auto kind : {ChartKind::Eps0, ChartKind::Delta}) {
    auto cp = from_darboux(random_chart(rng, kind, 2, 2, 2, kLam2, 0.9), kLam2);
    auto v = to_rep(cp);
    for (int k = 1; k <= 2; ++k) {
      cplx s = 0;
      for (int r = 1; r <= 2; ++r) s += hamiltonian_Hlr(v, 2 * k, r);
      EXPECT_NEAR(std::abs(-s / total - hamiltonian_Hmk(cp, k)), 0, 1e-10);
      EXPECT_NEAR(std::abs(hamiltonian_Hmk_block(cp, k) - hamiltonian_Hmk(cp, k)), 0, 1e-10);
    }
  }
}

TEST(Hamiltonians, DeltaH11CoordinateFormula) {
  std::mt19937 rng(61);
  auto cp = from_darboux(random_chart(rng, ChartKind::Delta, 2, 1, 1, kLam2), kLam2);
  cplx want = -(cp.w[0] * cp.Y[0] * cp.v[1])(0, 0) - (cp.w[1] * cp.Y[1] * cp.v[0])(0, 0);
  EXPECT_NEAR(std::abs(hamiltonian_Hlr(to_rep(cp), 1, 1) - want), 0, 1e-13);
  EXPECT_NEAR(std::abs(hamiltonian_Hlr_cyclic(cp, 1, 1) - want), 0, 1e-13);
}

TEST(LZeta, BracketProperties) {
  std::mt19937 rng(67);
  auto q = framed_cyclic_quiver(2, {2, 2});
  for (int k = 0; k <= 3; ++k)
    for (int l = 0; l <= 3; ++l)
      for (int r = 1; r <= 2; ++r)
        for (int s = 1; s <= 2; ++s)
          EXPECT_EQ(lzeta_bracket(E_element(*q, k, r), E_element(*q, l, s)).norm(), 0.0);
  auto a = random_lzeta(rng, *q, 2);
  EXPECT_LE(lzeta_bracket(a, a).norm(), 1e-14);
}

TEST(LZeta, IntegralsRepresentBracket) {
  std::mt19937 rng(71);
  auto c = random_chart(rng, ChartKind::Delta, 2, 2, 2, kLam2, 0.9);
  auto v = to_rep(from_darboux(c, kLam2));
  const auto& q = *v.quiver;
  for (int trial = 0; trial < 3; ++trial) {
    auto a = random_lzeta(rng, q, 2), b = random_lzeta(rng, q, 2);
    cplx lhs = poisson_bracket(v, integral_poly(q, a), integral_poly(q, b));
    cplx rhs = integral_IA(v, lzeta_bracket(a, b));
    EXPECT_NEAR(std::abs(lhs - rhs), 0, 1e-9 * (1 + std::abs(rhs)));
  }
}

// ------------------------------------------------------------ flows

TEST(ExactFlow, CmFlowAndZeroTime) {
  auto cp = cm_point({0.4, -0.7}, {0.25, 0.6});
  auto same = exact_flow_mk(cp, {1.0}, {0.0, 0.0});
  EXPECT_EQ(same.X[0], cp.X[0]);
  const cplx s(0.3, 0.1);
  auto moved = exact_flow_mk(cp, {1.0}, {0.0, s});
  EXPECT_LE(max_abs(moved.X[0] - (cp.X[0] - 2.0 * s * cp.Y[0])), 1e-15);
  EXPECT_LE(moved.residual({1.0}), 1e-12);
  EXPECT_LE(max_abs(moved.Y[0] - cp.Y[0]), 0.0);
}

TEST(ExactFlow, ConservesFamily) {
  std::mt19937 rng(73);
  for (auto kind : {ChartKind::Eps0, ChartKind::Delta}) {
    auto cp = from_darboux(random_chart(rng, kind, 2, 2, 2, kLam2, 0.9), kLam2);
    auto moved = exact_flow_mk(cp, kLam2, {cplx(0.3), cplx(-0.2, 0.1)});
    EXPECT_LE(moved.residual(kLam2), 1e-10);
    for (int l = 1; l <= 4; ++l)
      for (int r = 1; r <= 2; ++r)
        EXPECT_NEAR(std::abs(hamiltonian_Hlr_cyclic(moved, l, r) - hamiltonian_Hlr_cyclic(cp, l, r)), 0,
                    1e-10 * (1 + std::abs(hamiltonian_Hlr_cyclic(cp, l, r))));
  }
}

TEST(FlowHp, MatchesCmFlowAndKeepsRelation) {
  auto cp = cm_point({0.4, -0.7}, {0.25, 0.6});
  auto v = to_rep(cp);
  const auto& q = *v.quiver;
  StarPath yy;
  for (const auto& p : star_paths(q, 1, 1, 2))
    if (q.edge(p.letters[0]).id == "a0*" && q.edge(p.letters[1]).id == "a0*") yy = p;
  ASSERT_EQ(yy.length(), 2);
  EXPECT_EQ(flow_exact_Hp(v, yy, 0.0).mats, v.mats);
  const cplx t(0.2, -0.1);
  auto out = flow_exact_Hp(v, yy, t);
  EXPECT_LE(relation_residual(out, framed_weight({1.0}, {2})), 1e-12);
  // same line as X − 2sY up to the sign of time
  Mat dx = out["a0"] - v["a0"];
  EXPECT_LE(std::min(max_abs(dx - 2.0 * t * cp.Y[0]), max_abs(dx + 2.0 * t * cp.Y[0])), 1e-13);
}

TEST(FlowIA, ZeroTimeAndConservation) {
  std::mt19937 rng(79);
  auto cp = from_darboux(random_chart(rng, ChartKind::Eps0, 2, 1, 2, kLam2, 0.9), kLam2);
  auto v = to_rep(cp);
  const auto& q = *v.quiver;
  auto a = E_element(q, 2, 1);
  std::vector<std::pair<std::string, TracePoly>> watch;
  for (int l = 0; l <= 2; ++l)
    for (int r = 1; r <= 2; ++r) watch.push_back({"H", integral_poly(q, E_element(q, l, r))});
  auto still = flow_IA(v, a, 0.0, 4);
  for (size_t e = 0; e < v.mats.size(); ++e) EXPECT_LE(max_abs(still.points.back().mats[e] - v.mats[e]), 1e-15);
  auto tr = flow_IA(v, a, 0.5, 20, watch);
  auto fl = framed_weight(kLam2, cp.alpha);
  EXPECT_LE(relation_residual(tr.points.back(), fl), 1e-10);
  for (size_t col = 0; col < watch.size(); ++col) EXPECT_LE(tr.max_drift(col), 1e-8);
}

TEST(FlowIA, AgreesWithExactFlowOnTraces) {
  // E^{(2)} summed over framings on a spherical point is −|λ| H_2
  std::mt19937 rng(83);
  auto cp = from_darboux(random_chart(rng, ChartKind::Eps0, 2, 2, 1, kLam2, 0.9), kLam2);
  auto v = to_rep(cp);
  const auto& q = *v.quiver;
  const cplx t(0.3, 0.0);
  auto tr = flow_IA(v, E_element(q, 2, 1), t, 40);
  auto ex = to_rep(exact_flow_mk(cp, kLam2, {-t}), v.quiver);
  auto ex_rev = to_rep(exact_flow_mk(cp, kLam2, {t}), v.quiver);
  double err = 0, err_rev = 0;
  for (const auto& w : enumerate_cycles(q, 4)) {
    err = std::max(err, std::abs(trace_word(tr.points.back(), w) - trace_word(ex, w)));
    err_rev = std::max(err_rev, std::abs(trace_word(tr.points.back(), w) - trace_word(ex_rev, w)));
  }
  EXPECT_LE(std::min(err, err_rev), 1e-8);
}

TEST(Inclusion, Eps0EmbedsInDelta) {
  std::mt19937 rng(89);
  auto cp = from_darboux(random_chart(rng, ChartKind::Eps0, 2, 2, 1, kLam2), kLam2);
  auto big = embed_eps0_in_delta(cp);
  double dropped = -1;
  auto back = restrict_delta_to_eps0(big, &dropped);
  EXPECT_EQ(dropped, 0.0);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(back.X[i], cp.X[i]);
    EXPECT_EQ(back.Y[i], cp.Y[i]);
  }
  for (int l = 2; l <= 4; l += 2)
    EXPECT_NEAR(std::abs(hamiltonian_Hlr_cyclic(big, l, 1) - hamiltonian_Hlr_cyclic(cp, l, 1)), 0, 1e-12);
}

TEST(IndependenceRank, Examples) {
  std::mt19937 rng(97);
  auto e0 = random_chart(rng, ChartKind::Eps0, 2, 2, 2, kLam2, 0.9);
  EXPECT_EQ(independence_rank(e0, kLam2, Family::Hmk_r).rank, 4);
  auto dl = random_chart(rng, ChartKind::Delta, 2, 1, 1, kLam2, 0.9);
  EXPECT_EQ(independence_rank(dl, kLam2, Family::Hlr).rank, 2);
  auto d3 = random_chart(rng, ChartKind::Delta, 2, 1, 3, kLam2, 0.9);
  EXPECT_EQ(independence_rank(d3, kLam2, Family::H0r).rank, 2);
}

// ------------------------------------------------------------ KP

TEST(Emit, SingleParticle) {
  auto s = make_seed(cm_point({0.5}, {0.3}), {1.0}, ChartKind::Jordan, -6);
  auto e = emit_u(s, {0.0});
  ASSERT_EQ(e.poles.size(), 1u);
  EXPECT_NEAR(std::abs(e.poles[0] - 0.5), 0, 1e-15);
  EXPECT_LE(e.crosscheck, 1e-12);
  EXPECT_NEAR(std::abs(u_value(s.point, 2.0) + 2.0 / 2.25), 0, 1e-15);
  auto moved = emit_u(s, {0.0, 0.25});
  EXPECT_NEAR(std::abs(moved.poles[0] - (0.5 - 2 * 0.3 * 0.25)), 0, 1e-15);
  EXPECT_LE(moved.crosscheck, 1e-12);
}

TEST(Emit, EmptySeed) {
  auto s = make_seed(CyclicPoint::zero(1, {0}, {1}), {1.0}, ChartKind::Jordan, -6);
  auto e = emit_u(s, {0.0});
  EXPECT_TRUE(e.poles.empty());
  EXPECT_EQ(e.expression, "u = 0");
}

TEST(KpPde, Residuals) {
  EXPECT_LE(kp_pde_residual(cm_point({0.5}, {0.3})).max_residual, 1e-10);
  auto two = kp_pde_residual(cm_point({-0.7, 0.9}, {0.3, -0.2}));
  EXPECT_LE(two.max_residual, 1e-8 * std::max(1.0, two.max_u));
  auto coll = kp_pde_residual(collision_point(cplx(0.1, 1.2), 0.3, -0.2));
  EXPECT_LE(coll.max_residual, 1e-8 * std::max(1.0, coll.max_u));
}

TEST(Lax, SingleParticleLinearFlow) {
  auto s = make_seed(cm_point({0.5}, {0.3}), {1.0}, ChartKind::Jordan, -6);
  auto f = default_jet_field(s);
  auto r = lax_residual(f, s, 1, 0, 1e-3);
  EXPECT_LE(r.max(), 1e-8);
}

TEST(Lax, TwoParticlesSecondOrder) {
  auto s = make_seed(cm_point({-0.7, 0.9}, {0.3, -0.2}), {1.0}, ChartKind::Jordan, -7);
  auto f = default_jet_field(s);
  for (int k = 2; k <= 3; ++k) {
    auto a = lax_residual(f, s, k, 0, 1e-3), b = lax_residual(f, s, k, 0, 5e-4);
    EXPECT_GE(a.L / b.L, 3.5) << "k=" << k;
  }
}

TEST(Lax, SphericalAndEquivariance) {
  std::mt19937 rng(101);
  auto c = random_chart(rng, ChartKind::Eps0, 2, 1, 1, kLam2, 0.9);
  auto s = make_seed(from_darboux(c, kLam2), kLam2, ChartKind::Eps0, -7);
  auto f = default_jet_field(s);
  EXPECT_LE(lax_residual(f, s, 2, 1, 1e-3).max(), 1e-6);
  auto x = lax_at(f, s, {});
  EXPECT_LE(equivariance_residual(x), 1e-10);
  auto k = constraints(x);
  EXPECT_LE(std::max({k.commute, k.idempotent, k.sum}), 1e-12);
}

TEST(BuildM, EmptySeedIsIdentity) {
  auto s = make_seed(CyclicPoint::zero(1, {0}, {1}), {1.0}, ChartKind::Jordan, -6);
  auto f = default_jet_field(s);
  auto x = lax_at(f, s, {});
  auto one = mop_diag(f, 1, -6);
  EXPECT_LE(mop_max_diff(x.M, one, -6), 1e-15);
}

TEST(BuildM, SingleParticleExpansion) {
  // M = 1 + Σ_l p^l (x₁ − x)^{-1} ∂^{-l-1}
  const cplx x1 = 0.5, p = 0.3;
  auto s = make_seed(cm_point({x1}, {p}), {1.0}, ChartKind::Jordan, -6);
  auto f = std::make_shared<const RationalField>(CherednikData(1, {1.0}));
  auto M = build_M(f, lift(s.point), -6);
  for (int l = 0; l + 1 <= 6; ++l) {
    const auto* g = M(0, 0).get(-l - 1);
    ASSERT_NE(g, nullptr);
    for (auto z : f->samples) EXPECT_NEAR(std::abs((*g)[0](z) - std::pow(p, l) / (x1 - z)), 0, 1e-13);
  }
}
