#include "support.hpp"

using namespace l2t;
using namespace l2t::test;

TEST_CASE("sum formula on the two-disk sphere") {
  const EquivariantCWComplex s1 = builtin_space("sphere", {1}).space, d2 = builtin_space("disk", {2}).space;
  const CoefficientSystem triv = CoefficientSystem::trivial(GroupPresentation::trivial());
  const ChainMap id = {IntegralMatrix::identity(1), IntegralMatrix::identity(1)};
  const Pushout p = pushout_assemble(s1, d2, d2, {{0}, {0}}, id, triv);
  const SumReport r = verify_sum(p, s1, d2, d2, triv);
  CHECK(r.passed);
  REQUIRE(r.residual);
  CHECK(*r.residual < 1e-8);

  const Pushout q = pushout_assemble(s1, s1, d2, {{0}, {0}}, id, triv);
  const SumReport rq = verify_sum(q, s1, s1, d2, triv);
  REQUIRE(rq.residual);
  CHECK(*rq.residual < 1e-12);
}

TEST_CASE("property: sum residual is symmetric in X1 and X2") {
  gen::Rng rng(51);
  for (int i = 0; i < 15; ++i) {
    const gen::PushoutCase c = gen::pushout(rng, rng.uniform(2, 7));
    const SumReport a = verify_sum(c.pushout, c.x0, c.x1, c.x2, c.h);
    // Same square with the roles of X1 and X2 exchanged.
    const Pushout swapped{c.pushout.space, c.pushout.i2, c.pushout.i1, c.pushout.j2, c.pushout.j1, {}};
    const SumReport b = verify_sum(swapped, c.x0, c.x2, c.x1, c.h);
    REQUIRE(a.residual);
    REQUIRE(b.residual);
    CHECK(*a.residual < 1e-8);
    CHECK(std::abs(*a.residual - *b.residual) < 1e-10);
  }
}

TEST_CASE("product formula") {
  const BuiltinSpace pt = builtin_space("point", {});
  for (const char* name : {"sphere", "klein_bottle", "circle_Z"}) {
    const BuiltinSpace x = builtin_space(name, {});
    const ProductReport r = verify_product(pt.space, pt.coefficients, x.space, x.coefficients);
    CHECK(r.passed);
    REQUIRE(r.residual);
    CHECK(*r.residual < 1e-12);
  }
  const BuiltinSpace s1 = builtin_space("circle_Z", {}), s2 = builtin_space("sphere", {2});
  const ProductReport cs = verify_product(s1.space, s1.coefficients, s2.space, s2.coefficients);
  CHECK(cs.passed);
  REQUIRE(cs.lhs);
  CHECK(std::abs(*cs.lhs) < 1e-8);

  const BuiltinSpace l = builtin_space("lens", {3, 1});
  const ProductReport lc = verify_product(l.space, l.coefficients, s1.space, s1.coefficients);
  CHECK(lc.passed);
  REQUIRE(lc.residual);
  CHECK(*lc.residual < 1e-8);

  // Swapping the factors leaves the residual alone.
  const ProductReport cl = verify_product(s1.space, s1.coefficients, l.space, l.coefficients);
  REQUIRE(cl.residual);
  CHECK(std::abs(*cl.residual - *lc.residual) < 1e-10);
  CHECK_THROWS_AS(verify_product(builtin_space("torus", {2}).space, builtin_space("torus", {2}).coefficients,
                                 builtin_space("torus", {2}).space, builtin_space("torus", {2}).coefficients),
                  Error);
}

TEST_CASE("tensor determinant identity") {
  const AlgebraModel z2 = cyclic(2), z3 = cyclic(3);
  const TensorDetReport id = det_tensor_identity_check(GroupRingMatrix::identity(z2, 1), GroupRingMatrix::identity(z3, 1));
  CHECK(id.lhs == doctest::Approx(0.0));
  CHECK(id.passed);
  const TensorDetReport six = det_tensor_identity_check(scalar_matrix(z2, 1, 2.0), scalar_matrix(z3, 1, 3.0));
  CHECK(six.lhs == doctest::Approx(std::log(6.0)));
  CHECK(six.rhs == doctest::Approx(std::log(6.0)));
  CHECK_THROWS_AS(det_tensor_identity_check(scalar_matrix(z2, 1, 0.0), scalar_matrix(z3, 1, 3.0)), Error);

  gen::Rng rng(52);
  for (int i = 0; i < 20; ++i) {
    const GroupRingMatrix a = gen::invertible(rng, z2, rng.uniform(1, 3)), b = gen::invertible(rng, z3, rng.uniform(1, 3));
    CHECK(det_tensor_identity_check(a, b).residual < 1e-10);
  }
}

TEST_CASE("long exact sequence of a split sequence is trivial") {
  const CochainComplex l = scalar_complex({2.0}, "L"), n = scalar_complex({0.0}, "N");
  const CochainComplex m = direct_sum(l, n, "M");
  const AlgebraModel triv = AlgebraModel::scalars();
  DenseMatrix a(2, 1), b(1, 2);
  a << 1, 0;
  b << 0, 1;
  const GroupRingMatrix alpha = derealize(triv, a, 2, 1), beta = derealize(triv, b, 1, 2);
  const LesTorsion les = long_exact_sequence_torsion(l, m, n, {alpha, alpha}, {beta, beta});
  CHECK(les.log_value == doctest::Approx(0.0));
  CHECK_THROWS_AS(long_exact_sequence_torsion(l, m, n, {alpha, alpha}, {alpha.transpose(), beta}), Error);
}

TEST_CASE("fibrations") {
  for (const char* name : {"circle_x_sphere", "circle_x_circle"}) {
    const BuiltinBundle b = builtin_bundle(name);
    const FibrationReport r = verify_fibration(b.bundle, b.coefficients);
    CHECK(r.passed);
    REQUIRE(r.residual);
    CHECK(*r.residual < 1e-8);
    // Trivial bundle against the product driver.
    const EquivariantCWComplex base = base_space(b.bundle);
    const CoefficientSystem hb = CoefficientSystem::trivial(base.group());
    const ProductReport pr = verify_product(b.bundle.fiber, b.coefficients, base, hb);
    REQUIRE(pr.lhs);
    REQUIRE(r.total.log_value);
    CHECK(std::abs(*pr.lhs - *r.total.log_value) < 1e-12);
  }
  const BuiltinBundle k = builtin_bundle("klein_bottle");
  const FibrationReport kr = verify_fibration(k.bundle, k.coefficients);
  CHECK(kr.passed);
  CHECK(kr.chi_base == 0);
  const BuiltinBundle bad = builtin_bundle("sphere_x_circle");
  CHECK_THROWS_AS(verify_fibration(bad.bundle, bad.coefficients), Error);
  CHECK_THROWS_AS(builtin_bundle("moebius"), Error);
}

TEST_CASE("bundle assembly rejects broken gluing data") {
  BuiltinBundle b = builtin_bundle("circle_x_circle");
  b.bundle.base.back().faces.front().cell = 7;
  CHECK_THROWS_AS(total_space(b.bundle), Error);
  BuiltinBundle m = builtin_bundle("circle_x_circle");
  m.bundle.base.back().faces.front().transport.clear();
  CHECK_THROWS_AS(total_space(m.bundle), Error);
}
