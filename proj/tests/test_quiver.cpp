#include <gtest/gtest.h>

#include <random>

#include "quiverflow/cyclic.hpp"
#include "quiverflow/reflection.hpp"
#include "quiverflow/roots.hpp"

using namespace quiverflow;

namespace {

Weight W(std::initializer_list<cplx> l) { return Weight(l); }

// framed Jordan quiver (vertices inf, 0) with ζ = d
Quiver framed_jordan(int d = 1) { return frame(jordan_quiver(), {d}).quiver; }

QuiverPtr framed_jordan_double() { return framed_cyclic_quiver(1, {1}); }

CyclicPoint cm_point(std::vector<cplx> x, std::vector<cplx> p) {
  DarbouxChart c;
  c.kind = ChartKind::Jordan;
  c.x = std::move(x);
  c.p = std::move(p);
  for (int a = 0; a < c.n(); ++a) {
    c.phi.push_back(Mat::Ones(1, 1));
    c.psi.push_back(Mat::Ones(1, 1));
  }
  normalize(c, {1.0});
  return from_darboux(c, {1.0});
}

// X=[[x1,1],[0,x1]], Y=[[a,b],[1,a]], v=(0,2)ᵀ, w=(0,1)
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

RepPoint perturb(const RepPoint& v, int e, const Mat& dir, double h) {
  RepPoint out = v;
  out.mats[e] += h * dir;
  return out;
}

}  // namespace

// ------------------------------------------------------------ roots

TEST(Bilinear, OneLoopSelfPairingVanishes) {
  EXPECT_EQ(bilinear_form(jordan_quiver(), {1}, {1}), 0);
}

TEST(Bilinear, CyclicTwoOffDiagonal) {
  EXPECT_EQ(bilinear_form(cyclic_quiver(2), {1, 0}, {0, 1}), -2);
}

TEST(Bilinear, ZeroVector) {
  for (auto q : {cyclic_quiver(3), type_a_quiver(4), jordan_quiver()})
    EXPECT_EQ(bilinear_form(q, DimVector(q.num_vertices(), 0), DimVector(q.num_vertices(), 1)), 0);
}

TEST(TitsForm, Examples) {
  auto t = tits_forms(cyclic_quiver(3), {1, 1, 1});
  EXPECT_EQ(t.q, 0);
  EXPECT_EQ(t.p, 1);
  t = tits_forms(cyclic_quiver(2), {1, 0});
  EXPECT_EQ(t.q, 1);
  EXPECT_EQ(t.p, 0);
  for (int n = 1; n <= 6; ++n) EXPECT_EQ(tits_forms(framed_jordan(), {1, n}).p, n);
}

TEST(ReflectDim, Examples) {
  auto c2 = cyclic_quiver(2);
  EXPECT_EQ(reflect_dim(c2, 0, {1, 1}), (DimVector{1, 1}));
  EXPECT_EQ(reflect_dim(c2, 0, {0, 1}), (DimVector{2, 1}));
  EXPECT_EQ(reflect_dim(framed_jordan(), 0, {1, 1}), (DimVector{0, 1}));
  EXPECT_THROW(reflect_dim(jordan_quiver(), 0, {1}), PreconditionError);
}

TEST(ReflectWeight, Examples) {
  auto c2 = cyclic_quiver(2);
  auto l = reflect_weight(c2, 0, W({0.0, 3.0}));
  EXPECT_EQ(l, W({0.0, 3.0}));
  l = reflect_weight(framed_jordan(), 0, W({-1.0, 1.0}));
  EXPECT_EQ(l, W({1.0, 0.0}));
  cplx a(0.3, 0.2), b(-1.1, 0.5);
  l = reflect_weight(c2, 0, W({a, b}));
  EXPECT_NEAR(std::abs(l[0] + a), 0, 1e-15);
  EXPECT_NEAR(std::abs(l[1] - (b + 2.0 * a)), 0, 1e-15);
}

TEST(ReflectWeight, PairingIsInvariant) {
  // λ·α is preserved by the simultaneous reflection
  auto q = cyclic_quiver(3);
  Weight l{cplx(0.3, 0.1), cplx(-0.7, 0.4), cplx(1.2, 0)};
  DimVector a{2, 1, 3};
  for (int k = 0; k < 3; ++k) {
    auto l2 = reflect_weight(q, k, l);
    auto a2 = reflect_dim(q, k, a);
    EXPECT_NEAR(std::abs(dot(l2, a2) - dot(l, a)), 0, 1e-14);
    EXPECT_EQ(reflect_dim(q, k, a2), a);
  }
}

TEST(ClassifyRoot, Examples) {
  EXPECT_EQ(classify_root(cyclic_quiver(3), {1, 1, 1}).kind, RootKind::Imaginary);
  EXPECT_EQ(classify_root(cyclic_quiver(2), {2, 0}).kind, RootKind::NotRoot);
  EXPECT_EQ(classify_root(cyclic_quiver(2), {2, 1}).kind, RootKind::Real);
  EXPECT_EQ(classify_root(cyclic_quiver(3), {1, 1, 1}).str(), "imaginary(+)");
  EXPECT_EQ(classify_root(type_a_quiver(3), {-1, -1, 0}).str(), "real(-)");
}

TEST(ClassifyRoot, SignSymmetryAndWeylInvariance) {
  auto q = cyclic_quiver(3);
  for_each_nonneg(3, 6, [&](const DimVector& a) {
    auto rc = classify_root(q, a);
    DimVector neg(a);
    for (auto& x : neg) x = -x;
    EXPECT_EQ(classify_root(q, neg).kind, rc.kind);
    for (int k = 0; k < 3; ++k) {
      auto b = reflect_dim(q, k, a);
      if (b == neg) continue;  // s_k ε_k = −ε_k
      EXPECT_EQ(classify_root(q, b).kind, rc.kind) << "k=" << k;
    }
  });
}

TEST(Regular, Examples) {
  EXPECT_TRUE(is_regular(jordan_quiver(), W({1.0}), 10).regular);
  auto r = is_regular(cyclic_quiver(2), W({1.0, -1.0}), 10);
  EXPECT_FALSE(r.regular);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(*r.witness, (DimVector{1, 1}));
  EXPECT_TRUE(is_regular(cyclic_quiver(2), W({1.0, 2.0}), 50).regular);
}

TEST(RepExistence, Examples) {
  EXPECT_EQ(rep_existence(cyclic_quiver(2), W({1.0, -1.0}), {1, 1}, 10000).answer, Tri::Yes);
  EXPECT_EQ(rep_existence(framed_jordan(), W({-1.0, 1.0}), {1, 1}, 10000).answer, Tri::Yes);
  EXPECT_EQ(rep_existence(cyclic_quiver(2), W({1.0, 2.0}), {1, 0}, 10000).answer, Tri::No);
}

TEST(SigmaLambda, Examples) {
  EXPECT_EQ(sigma_lambda_test(framed_jordan(), W({-1.0, 1.0}), {1, 1}, 10000).answer, Tri::Yes);
  EXPECT_EQ(sigma_lambda_test(framed_jordan(), W({0.0, 1.0}), {1, 0}, 10000).answer, Tri::Yes);
  EXPECT_EQ(sigma_lambda_test(cyclic_quiver(2), W({1.0, -1.0}), {2, 2}, 10000).answer, Tri::No);
}

TEST(OrbitSearch, Examples) {
  auto q = framed_jordan();
  Weight l{-1.0, 1.0};
  DimVector a{1, 1};
  auto same = orbit_search(q, l, a, [&](const Weight& x, const DimVector& b) { return b == a && x == l; }, 0);
  ASSERT_TRUE(same.has_value());
  EXPECT_TRUE(same->empty());
  auto one = orbit_search(q, l, a, [](const Weight&, const DimVector& b) { return b == DimVector{0, 1}; }, 3);
  ASSERT_TRUE(one.has_value());
  EXPECT_EQ(*one, (std::vector<int>{0}));
}

TEST(OrbitScan, RowsAreImaginaryRoots) {
  auto rows = orbit_scan(2, {1, 0}, 4);
  ASSERT_FALSE(rows.empty());
  auto q = frame(cyclic_quiver(2), {1, 0}).quiver;
  for (const auto& r : rows) {
    DimVector full{1};
    full.insert(full.end(), r.alpha.begin(), r.alpha.end());
    EXPECT_EQ(classify_root(q, full).kind, RootKind::Imaginary);
    if (!r.in_orbit) continue;
    DimVector b = full;
    for (int k : r.chain) b = reflect_dim(q, k, b);
    EXPECT_EQ(b, (DimVector{1, r.n, r.n}));
  }
}

// ------------------------------------------------------------ rep variety

TEST(MomentMap, TrivialFramedJordan) {
  auto v = RepPoint::zero(framed_jordan_double(), {1, 1});
  v["b0_1"](0, 0) = 1;
  v["b0_1*"](0, 0) = 1;
  auto p = moment_map(v);
  EXPECT_NEAR(std::abs(p[1](0, 0) - 1.0), 0, 1e-15);
}

TEST(MomentMap, CollisionPointGivesIdentity) {
  auto v = to_rep(collision_point(0.4, 0.3, -0.2));
  auto p = moment_map(v);
  EXPECT_LE(max_abs(p[1] - identity(2)), 1e-15);
  EXPECT_LE(relation_residual(v, framed_weight({1.0}, {2})), 1e-15);
}

TEST(MomentMap, GaugeEquivariance) {
  std::mt19937 rng(5);
  auto v = to_rep(cm_point({0.3, -0.8, cplx(0.2, 0.9)}, {0.1, 0.4, -0.5}));
  GaugeElement g;
  for (int d : v.dims) g.g.push_back(random_mat(rng, d, d) + 3.0 * identity(d));
  auto p0 = moment_map(v), p1 = moment_map(gauge_act(g, v));
  for (size_t i = 0; i < p0.size(); ++i)
    EXPECT_LE(max_abs(p1[i] - g.g[i] * p0[i] * g.g[i].inverse()), 1e-12 * (1 + max_abs(p0[i])));
}

TEST(RelationResidual, Examples) {
  auto v = to_rep(cm_point({-1.0, 0.4, cplx(1.1, 0.3)}, {0.2, -0.3, 0.6}));
  EXPECT_LE(relation_residual(v, framed_weight({1.0}, {3})), 1e-12);
  auto z = RepPoint::zero(framed_jordan_double(), {1, 1});
  EXPECT_NEAR(relation_residual(z, W({-1.0, 1.0})), 1.0, 1e-15);
}

TEST(Gauge, IdentityScalarAndTraceInvariance) {
  std::mt19937 rng(7);
  auto v = to_rep(cm_point({0.5, -0.6}, {0.3, 0.2}));
  auto id = GaugeElement::identity_like(v);
  auto same = gauge_act(id, v);
  for (size_t e = 0; e < v.mats.size(); ++e) EXPECT_EQ(same.mats[e], v.mats[e]);
  GaugeElement s;
  for (int d : v.dims) s.g.push_back(cplx(2.5, -1) * identity(d));
  auto scaled = gauge_act(s, v);
  for (size_t e = 0; e < v.mats.size(); ++e) EXPECT_LE(max_abs(scaled.mats[e] - v.mats[e]), 1e-15);
  GaugeElement g;
  for (int d : v.dims) g.g.push_back(random_mat(rng, d, d) + 3.0 * identity(d));
  auto moved = gauge_act(g, v);
  for (const auto& w : enumerate_cycles(*v.quiver, 6))
    EXPECT_NEAR(std::abs(trace_word(moved, w) - trace_word(v, w)), 0, 1e-10 * (1 + std::abs(trace_word(v, w))));
}

TEST(TraceWord, Examples) {
  auto v = to_rep(cm_point({0.5}, {0.3}));
  const auto& q = *v.quiver;
  EXPECT_EQ(trace_word(v, TraceWord::trivial(1)), cplx(1));
  EXPECT_EQ(trace_word(v, TraceWord::trivial(0)), cplx(1));
  EXPECT_NEAR(std::abs(trace_word(v, TraceWord::from_ids(q, {"a0*", "a0*"})) - 0.09), 0, 1e-15);
  cplx x1(0.2, 0.1), x2(-0.9, 0.4), p1(0.3, 0), p2(-0.5, 0.2);
  auto v2 = to_rep(cm_point({x1, x2}, {p1, p2}));
  cplx want = p1 * p1 + p2 * p2 - 2.0 / ((x1 - x2) * (x1 - x2));
  EXPECT_NEAR(std::abs(trace_word(v2, TraceWord::from_ids(q, {"a0*", "a0*"})) - want), 0, 1e-13);
}

TEST(CmsChart, OffDiagonalY) {
  auto c = cm_point({0.0, 1.0}, {0.0, 0.0});
  EXPECT_NEAR(std::abs(c.Y[0](0, 1) - (-1.0 / (0.0 - 1.0))), 0, 1e-15);
  EXPECT_NEAR(std::abs(c.Y[0](1, 0) - (-1.0 / (1.0 - 0.0))), 0, 1e-15);
  EXPECT_NEAR(std::abs(c.Y[0](0, 0)), 0, 1e-15);
}

TEST(WordGradient, FiniteDifferences) {
  std::mt19937 rng(11);
  auto v = to_rep(cm_point({0.4, -0.7}, {0.25, 0.6}));
  const auto& q = *v.quiver;
  for (auto ids : {std::vector<std::string>{"a0*", "a0*"}, {"a0", "a0*"}, {"b0_1", "a0", "a0*", "a0", "b0_1*"}}) {
    auto w = TraceWord::from_ids(q, ids);
    for (int e = 0; e < q.num_edges(); ++e) {
      Mat dir = random_mat(rng, int(v.mats[e].rows()), int(v.mats[e].cols()));
      const double h = 1e-7;
      cplx fd = (trace_word(perturb(v, e, dir, h), w) - trace_word(perturb(v, e, dir, -h), w)) / (2 * h);
      cplx an = word_gradient(v, w, e).cwiseProduct(dir).sum();
      EXPECT_NEAR(std::abs(fd - an), 0, 1e-6);
    }
  }
  auto w = TraceWord::from_ids(q, {"a0*", "a0*"});
  EXPECT_EQ(max_abs(word_gradient(v, w, q.edge_index("a0"))), 0.0);
}

TEST(PoissonBracket, YOnlyFunctionsCommute) {
  auto v = to_rep(cm_point({0.4, -0.7, 1.3}, {0.25, 0.6, -0.1}));
  const auto& q = *v.quiver;
  auto y2 = TracePoly::word(TraceWord::from_ids(q, {"a0*", "a0*"}));
  auto y3 = TracePoly::word(TraceWord::from_ids(q, {"a0*", "a0*", "a0*"}));
  EXPECT_NEAR(std::abs(poisson_bracket(v, y2, y3)), 0, 1e-12);
}

TEST(PoissonBracket, Antisymmetric) {
  auto v = to_rep(cm_point({0.4, -0.7}, {0.25, 0.6}));
  const auto& q = *v.quiver;
  auto f = TracePoly::word(TraceWord::from_ids(q, {"a0", "a0*"}));
  auto g = TracePoly::word(TraceWord::from_ids(q, {"a0", "a0*", "a0*"}));
  EXPECT_NEAR(std::abs(poisson_bracket(v, f, g) + poisson_bracket(v, g, f)), 0, 1e-12);
  EXPECT_EQ(poisson_bracket(v, f, f), cplx(0));
}

TEST(PoissonBracket, MatchesHamiltonianFlow) {
  // {f, g} = d/dt g along the Hamiltonian field of f
  auto v = to_rep(cm_point({0.4, -0.7}, {0.25, 0.6}));
  const auto& q = *v.quiver;
  auto f = TracePoly::word(TraceWord::from_ids(q, {"a0", "a0*"}));
  auto g = TracePoly::word(TraceWord::from_ids(q, {"a0"}));
  auto field = hamiltonian_field(q, gradient(v, f));
  const double h = 1e-6;
  RepPoint plus = v, minus = v;
  for (int e = 0; e < q.num_edges(); ++e) {
    plus.mats[e] += h * field[e];
    minus.mats[e] -= h * field[e];
  }
  cplx fd = (evaluate(plus, g) - evaluate(minus, g)) / (2 * h);
  EXPECT_NEAR(std::abs(fd - poisson_bracket(v, f, g)), 0, 1e-6);
}

TEST(PoissonBracket, GaugeHamiltoniansFormLieAlgebra) {
  std::mt19937 rng(3);
  auto v = to_rep(cm_point({0.4, -0.7, 0.9}, {0.25, 0.6, -0.3}));
  std::vector<Mat> th, et, comm;
  for (int d : v.dims) {
    th.push_back(random_mat(rng, d, d));
    et.push_back(random_mat(rng, d, d));
    comm.push_back(th.back() * et.back() - et.back() * th.back());
  }
  cplx lhs = bracket_from_gradients(*v.quiver, gauge_hamiltonian_gradient(v, th), gauge_hamiltonian_gradient(v, et));
  EXPECT_NEAR(std::abs(lhs - gauge_hamiltonian(v, comm)), 0, 1e-10);
}

TEST(Simple, Examples) {
  EXPECT_TRUE(is_simple(to_rep(cm_point({0.5}, {0.3}))));
  EXPECT_TRUE(is_simple(to_rep(collision_point(0.4, 0.3, -0.2))));
  auto a = to_rep(cm_point({0.5}, {0.3})), b = to_rep(cm_point({-0.5, 1.2}, {0.1, 0.2}));
  EXPECT_FALSE(is_simple(direct_sum(a, b)));
}

// ------------------------------------------------------------ reflection

TEST(Admissible, Examples) {
  EXPECT_FALSE(admissible(jordan_quiver(), W({1.0}), 0));
  auto q = *framed_jordan_double();
  EXPECT_TRUE(admissible(q, W({-1.0, 1.0}), 0));
  EXPECT_FALSE(admissible(q, W({0.0, 1.0}), 0));
}

TEST(Reflection, SmallestCmPointAtInfinity) {
  auto v = to_rep(CyclicPoint::zero(1, {1}, {1}));
  v["b0_1"](0, 0) = 1;
  v["b0_1*"](0, 0) = 1;
  Weight l{-1.0, 1.0};
  auto r = apply_reflection(v, 0, l);
  EXPECT_EQ(r.point.dims, (DimVector{0, 1}));
  EXPECT_EQ(r.lambda, W({1.0, 0.0}));
  EXPECT_EQ(r.point["a0"](0, 0), cplx(0));
  EXPECT_EQ(r.point["a0*"](0, 0), cplx(0));
  EXPECT_EQ(r.point["b0_1"].size(), 0);
  EXPECT_LE(relation_residual(r.point, r.lambda), 1e-15);
}

TEST(Reflection, DimensionsAndRelations) {
  std::mt19937 rng(19);
  Weight lam{cplx(0.7, 0.1), cplx(0.15, 0.05)};
  auto c = random_chart(rng, ChartKind::Delta, 2, 1, 1, lam, 0.9);
  auto cp = from_darboux(c, lam);
  auto v = to_rep(cp);
  auto fl = framed_weight(lam, cp.alpha);
  for (int k = 0; k < v.quiver->num_vertices(); ++k) {
    if (!admissible(*v.quiver, fl, k)) continue;
    auto r = apply_reflection(v, k, fl);
    EXPECT_EQ(r.point.dims, reflect_dim(*v.quiver, k, v.dims));
    EXPECT_LE(relation_residual(r.point, r.lambda), 1e-9);
    EXPECT_LE(reflection_identity_residual(v, r, k, fl), 1e-9);
    EXPECT_LE(involution_check(v, k, fl), 1e-8);
  }
}

TEST(Reflection, YCyclesPreservedAndGaugeInvariant) {
  std::mt19937 rng(23);
  Weight lam{cplx(0.7, 0.1), cplx(0.15, 0.05)};
  auto cp = from_darboux(random_chart(rng, ChartKind::Delta, 2, 1, 1, lam, 0.9), lam);
  auto v = to_rep(cp);
  const auto& q = *v.quiver;
  auto fl = framed_weight(lam, cp.alpha);
  auto ycyc = TraceWord::from_ids(q, {"a0*", "a1*"});
  GaugeElement g;
  for (int d : v.dims) g.g.push_back(random_mat(rng, d, d) + 3.0 * identity(d));
  auto gv = gauge_act(g, v);
  for (int k = 0; k < q.num_vertices(); ++k) {
    if (!admissible(q, fl, k)) continue;
    auto r = apply_reflection(v, k, fl);
    EXPECT_NEAR(std::abs(trace_word(r.point, ycyc) - trace_word(v, ycyc)), 0, 1e-9);
    EXPECT_LE(involution_check(gv, k, fl), 1e-8);
    auto other = TraceWord::trivial(k == 1 ? 2 : 1);
    EXPECT_EQ(trace_word(r.point, other), trace_word(v, other));
  }
}

TEST(Reflection, ProxyBracketAntisymmetryZero) {
  std::mt19937 rng(29);
  Weight lam{cplx(0.7, 0.1), cplx(0.15, 0.05)};
  auto cp = from_darboux(random_chart(rng, ChartKind::Delta, 2, 1, 1, lam, 0.9), lam);
  auto v = to_rep(cp);
  auto fl = framed_weight(lam, cp.alpha);
  const auto& q = *v.quiver;
  auto y = TraceWord::from_ids(q, {"a0*", "a1*"});
  auto y2 = TraceWord::from_ids(q, {"a0*", "a1*", "a0*", "a1*"});
  for (int k = 0; k < q.num_vertices(); ++k) {
    if (!admissible(q, fl, k)) continue;
    EXPECT_EQ(symplectic_proxy_check(v, k, fl, y, y), 0.0);
    EXPECT_LE(symplectic_proxy_check(v, k, fl, y, y2), 1e-9);
  }
}

TEST(PartialFractions, Examples) {
  auto [l0, r0] = partial_fraction_identity(0, 1, 2.0, 1.0);
  EXPECT_NEAR(std::abs(l0 - 1.0), 0, 1e-15);
  EXPECT_NEAR(std::abs(r0 - 1.0), 0, 1e-15);
  auto [l1, r1] = partial_fraction_identity(1, 2, 2.0, 1.0);
  EXPECT_NEAR(std::abs(l1 - 1.0 / 3.0), 0, 1e-15);
  EXPECT_NEAR(std::abs(l1 - r1), 0, 1e-14);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int m = 1; m <= 6; ++m)
    for (int j = 0; j < m; ++j) {
      cplx x(u(rng), u(rng)), y(u(rng), u(rng));
      auto [l, r] = partial_fraction_identity(j, m, x, y);
      EXPECT_NEAR(std::abs(l - r), 0, 1e-12 * (1 + std::abs(l)));
    }
}
