#include "support.hpp"

using namespace l2t;
using namespace l2t::test;

namespace {

// Exact d_{k-1} d_k = 0 in the free group ring pushed through a finite quotient.
void check_dd_zero(const EquivariantCWComplex& x, const CoefficientSystem& h) {
  for (int k = 2; k <= x.dimension(); ++k) {
    const GroupRingMatrix dd = h.apply(then(x.boundary(k), x.boundary(k - 1)));
    CHECK(dd.max_abs() < 1e-12);
  }
}

}  // namespace

TEST_CASE("words reduce freely and parse") {
  const Word a = Word::generator(0), b = Word::generator(1, 2);
  CHECK((a * a.inverse()).is_identity());
  CHECK((a * b * b.inverse() * a).letters == std::vector<std::pair<int, int>>{{0, 2}});
  GroupPresentation g{"G", {"s", "t"}, {}};
  CHECK(g.format(Word::generator(1, 2) * Word::generator(0, -1)) == "t^2*s^-1");
  CHECK(g.format(Word{}) == "1");
  CHECK(g.parse("t^2*s^-1") == Word::generator(1, 2) * Word::generator(0, -1));
  CHECK(g.parse("1").is_identity());
  CHECK_THROWS_AS(g.parse("u"), Error);
  CHECK_THROWS_AS(g.parse("t^"), Error);
  CHECK(g.generator_index("t") == 1);
  CHECK(g.generator_index("x") == -1);
}

TEST_CASE("presentations") {
  CHECK(GroupPresentation::cyclic(5).relators.front() == Word::generator(0, 5));
  CHECK(GroupPresentation::free_abelian(2).generators.size() == 2);
  const GroupPresentation p = GroupPresentation::product(GroupPresentation::cyclic(2), GroupPresentation::cyclic(3));
  CHECK(p.generators.size() == 2);
  CHECK(p.generators[0] != p.generators[1]);
  CHECK(p.relators.size() == 3);
}

TEST_CASE("builtin cell structures") {
  const BuiltinSpace s2 = builtin_space("sphere", {2});
  CHECK(s2.space.cells() == std::vector<int>{1, 0, 1});
  CHECK(s2.space.boundary(1).is_zero());
  CHECK(s2.space.boundary(2).is_zero());
  CHECK(euler_char(s2.space) == 2);
  CHECK(euler_char(builtin_space("point", {}).space) == 1);

  const BuiltinSpace k = builtin_space("klein_bottle", {});
  CHECK(k.space.cells() == std::vector<int>{1, 2, 1});
  CHECK(euler_char(k.space) == 0);
  check_dd_zero(k.space, k.coefficients);
  CHECK_NOTHROW(check_homomorphism(k.space.group(), k.coefficients));

  for (int p : {2, 3, 5}) {
    const BuiltinSpace l = builtin_space("lens", {p, 1});
    CHECK(l.space.cells() == std::vector<int>{1, 1, 1, 1});
    check_dd_zero(l.space, l.coefficients);
  }
  const BuiltinSpace nil = builtin_space("heisenberg", {});
  CHECK(euler_char(nil.space) == 0);
  CHECK_NOTHROW(check_homomorphism(nil.space.group(), nil.coefficients));
  check_dd_zero(nil.space, nil.coefficients);

  CHECK_THROWS_AS(builtin_space("lens", {4, 2}), Error);
  CHECK_THROWS_AS(builtin_space("nowhere", {}), Error);
  CHECK_THROWS_AS(builtin_space("sphere", {1, 2}), Error);
}

TEST_CASE("coefficients send the circle boundary to z - 1") {
  const BuiltinSpace s1 = builtin_space("circle_Z", {});
  const CochainComplex c = cochain_with_coefficients(s1.space, s1.coefficients);
  const AlgebraModel& t = c.algebra();
  CHECK(c.differential_matrix(0) == one_by_one(laurent(t, {{{1}, 1.0}, {{0}, -1.0}})).transpose());
}

TEST_CASE("homomorphism checks") {
  CoefficientSystem h;
  h.target = cyclic(4);
  h.images = {GeneratorImage{1.0, GroupKey{1, {}}}};
  CHECK_THROWS_AS(check_homomorphism(GroupPresentation::cyclic(3), h), Error);
  CHECK_NOTHROW(check_homomorphism(GroupPresentation::cyclic(8), h));
}

TEST_CASE("unimodularity") {
  CHECK(unimodularity_check(builtin_space("lens", {5, 2}).coefficients).unimodular);
  CHECK(unimodularity_check(builtin_space("torus", {2}).coefficients).unimodular);
  CoefficientSystem h = builtin_space("lens", {3, 1}).coefficients;
  h.images[0].scale = 2.0;
  const UnimodularityReport r = unimodularity_check(h);
  CHECK_FALSE(r.unimodular);
  CHECK(r.log_dets.at(0) == doctest::Approx(std::log(2.0)));
  const BuiltinSpace l = builtin_space("lens", {3, 1});
  CHECK_THROWS_AS(l2_torsion(l.space, h), Error);
}

TEST_CASE("L2-torsion of small spaces") {
  for (int p : {2, 3, 5}) {
    CoefficientSystem h = builtin_space("lens", {p, 1}).coefficients;
    CHECK(l2_torsion(builtin_space("point", {}).space, CoefficientSystem{h.target, {}, 1, "H"}).value() ==
          doctest::Approx(0.0));
  }
  const BuiltinSpace s1 = builtin_space("circle_Z", {});
  CHECK(std::abs(l2_torsion(s1.space, s1.coefficients).value()) < 1e-8);
  const BuiltinSpace s2 = builtin_space("sphere", {2});
  CHECK(l2_torsion(s2.space, s2.coefficients).value() == doctest::Approx(0.0));
  const BuiltinSpace t2 = builtin_space("torus", {2});
  CHECK(std::abs(l2_torsion(t2.space, t2.coefficients).value()) < 1e-8);
}

TEST_CASE("products multiply Euler characteristics") {
  const char* names[] = {"point", "sphere", "klein_bottle", "circle_Z"};
  for (const char* a : names)
    for (const char* b : names) {
      const EquivariantCWComplex x = builtin_space(a, {}).space, y = builtin_space(b, {}).space;
      const EquivariantCWComplex xy = product_space(x, y);
      CHECK(euler_char(xy) == euler_char(x) * euler_char(y));
      const CoefficientSystem h = tensor(builtin_space(a, {}).coefficients, builtin_space(b, {}).coefficients);
      if (h.target.torus_rank() == 0) check_dd_zero(xy, h);
    }
  const EquivariantCWComplex s = builtin_space("sphere", {2}).space;
  const EquivariantCWComplex ps = product_space(builtin_space("point", {}).space, s);
  CHECK(ps.cells() == s.cells());
  const EquivariantCWComplex tt = product_space(builtin_space("circle_Z", {}).space, builtin_space("circle_Z", {}).space);
  CHECK(tt.cells() == builtin_space("torus", {2}).space.cells());
}

TEST_CASE("pushouts add Euler characteristics") {
  const EquivariantCWComplex s1 = builtin_space("sphere", {1}).space, d2 = builtin_space("disk", {2}).space;
  const CoefficientSystem triv = CoefficientSystem::trivial(GroupPresentation::trivial());
  const Pushout p = pushout_assemble(s1, d2, d2, {{0}, {0}}, {IntegralMatrix::identity(1), IntegralMatrix::identity(1)}, triv);
  CHECK(p.space.cells() == std::vector<int>{1, 1, 2});
  CHECK(euler_char(p.space) == 2);

  // X0 = X1 along the identity gives X2 back.
  const Pushout q = pushout_assemble(s1, s1, d2, {{0}, {0}}, {IntegralMatrix::identity(1), IntegralMatrix::identity(1)}, triv);
  CHECK(q.space.cells() == d2.cells());

  gen::Rng rng(41);
  for (int i = 0; i < 20; ++i) {
    const gen::PushoutCase c = gen::pushout(rng, rng.uniform(2, 7));
    CHECK(euler_char(c.pushout.space) == euler_char(c.x1) + euler_char(c.x2) - euler_char(c.x0));
    check_dd_zero(c.pushout.space, c.h);
  }
  CHECK_THROWS_AS(pushout_assemble(s1, d2, d2, {{1}, {0}}, {IntegralMatrix::identity(1), IntegralMatrix::identity(1)}, triv),
                  Error);
}

TEST_CASE("property: L2-torsion ignores lifts and cell order") {
  gen::Rng rng(42);
  for (int i = 0; i < 20; ++i) {
    const int p = rng.uniform(2, 7);
    const CoefficientSystem h = gen::cyclic_coefficients(p);
    const EquivariantCWComplex x = gen::cyclic_space(rng, p, rng.coin());
    const double base = l2_torsion(x, h).value();
    CHECK(std::abs(l2_torsion(gen::shuffle_cells(rng, x, 4), h).value() - base) < 1e-10);
    const int k = rng.uniform(0, x.dimension());
    if (x.cell_count(k) > 0) {
      const EquivariantCWComplex y = relift_cell(x, k, 0, Word::generator(0, rng.uniform(1, p - 1)));
      CHECK(std::abs(l2_torsion(y, h).value() - base) < 1e-10);
    }
  }
}

TEST_CASE("mapping tori") {
  const BuiltinSpace t = builtin_space("mapping_torus", {1});
  CHECK(euler_char(t.space) == 0);
  CHECK(std::abs(l2_torsion(t.space, t.coefficients).value()) < 1e-8);
  // Degree 3: H^*(S^1) twisted by z - 3 in degree one, ln 3 up to sign.
  const BuiltinSpace t3 = builtin_space("mapping_torus", {3});
  CHECK(std::abs(std::abs(l2_torsion(t3.space, t3.coefficients).value()) - std::log(3.0)) < 1e-8);
}
