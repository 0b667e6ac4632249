#include "support.hpp"

#include "l2t/oracle.hpp"

using namespace l2t;
using namespace l2t::test;

namespace {

CochainComplex two_term(const GroupRingMatrix& d, std::string name = "C") {
  const AlgebraModel& m = d.model();
  return CochainComplex(m, {HilbertianModule(m, d.cols()), HilbertianModule(m, d.rows())}, {d}, std::move(name));
}

CochainComplex lens_complex(int p) {
  const BuiltinSpace l = builtin_space("lens", {p, 1});
  return cochain_with_coefficients(l.space, l.coefficients);
}

}  // namespace

TEST_CASE("validation reports d^2") {
  CHECK(validate(scalar_complex({0.0, 0.0})).d_squared.at(0) == 0.0);
  for (int p : {3, 5}) {
    const ComplexDiagnostics diag = validate(lens_complex(p));
    for (double v : diag.d_squared) CHECK(v == 0.0);
  }
  try {
    validate(scalar_complex({1.0, 1.0}));
    FAIL("accepted d^1 d^0 = 1");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotComplex);
  }
  CHECK_THROWS_AS(torsion(scalar_complex({1.0, 1.0})), Error);
  const AlgebraModel z2 = cyclic(2);
  CHECK_THROWS_AS(CochainComplex(z2, {HilbertianModule(z2, 1), HilbertianModule(z2, 2)}, {GroupRingMatrix::identity(z2, 1)}),
                  Error);
}

TEST_CASE("cohomology dimensions") {
  const AlgebraModel triv = AlgebraModel::scalars();
  const CochainComplex point(triv, {HilbertianModule(triv, 1)}, {}, "pt");
  CHECK(cohomology(point).betti == std::vector<double>{1.0});

  const BuiltinSpace s1 = builtin_space("circle_Z", {});
  const CohomologyData c = cohomology(cochain_with_coefficients(s1.space, s1.coefficients));
  CHECK(c.betti.at(0) == doctest::Approx(0.0));
  CHECK(c.betti.at(1) == doctest::Approx(0.0));
  CHECK(c.weakly_acyclic);

  for (int p : {3, 5, 7}) {
    const CohomologyData l = cohomology(lens_complex(p));
    REQUIRE(l.betti.size() == 4);
    CHECK(l.betti[0] == doctest::Approx(1.0 / p));
    CHECK(l.betti[1] == doctest::Approx(0.0));
    CHECK(l.betti[2] == doctest::Approx(0.0));
    CHECK(l.betti[3] == doctest::Approx(1.0 / p));
    CHECK_FALSE(l.weakly_acyclic);
  }
}

TEST_CASE("torsion closed forms") {
  CHECK(torsion(scalar_complex({3.0})).value() == doctest::Approx(std::log(3.0)));
  CHECK(torsion(scalar_complex({0.0, 0.0})).value() == doctest::Approx(0.0));
  const BuiltinSpace s1 = builtin_space("circle_Z", {});
  CHECK(std::abs(torsion(cochain_with_coefficients(s1.space, s1.coefficients)).value()) < 1e-8);
  for (int p : {2, 3, 5, 7}) {
    const AlgebraModel zp = cyclic(p);
    const CochainComplex c = two_term(one_by_one(elem(zp, {{1, 1.0}, {0, -1.0}})));
    const TorsionReport r = torsion(c);
    CHECK(r.log_dets.at(0) == doctest::Approx(std::log(p) / p).epsilon(1e-12));
    CHECK(r.value() == doctest::Approx(torsion_via_dense(c)).epsilon(1e-10));
  }
}

TEST_CASE("twisted sums of scalar complexes") {
  const CochainComplex l = scalar_complex({2.0}, "L"), n = scalar_complex({3.0}, "N");
  const AlgebraModel triv = AlgebraModel::scalars();
  for (double c : {0.0, 1.0, -7.5}) {
    const CochainComplex m = twisted_sum(l, n, {scalar_matrix(triv, 1, c)}, "M");
    CHECK(torsion(m).value() == doctest::Approx(std::log(6.0)));
  }
}

TEST_CASE("property: torsion multiplies over direct sums and flips under a shift") {
  gen::Rng rng(31);
  for (int i = 0; i < 30; ++i) {
    const AlgebraModel m = AlgebraModel::finite_group(gen::small_group(rng, 6));
    gen::ComplexShape shape;
    shape.max_total_rank = 6;
    shape.length = rng.uniform(2, 4);
    const CochainComplex a = gen::complex(rng, m, shape, "A"), b = gen::complex(rng, m, shape, "B");
    for (double v : validate(direct_sum(a, b)).d_squared) CHECK(v < 1e-10);
    const double ra = torsion(a).value(), rb = torsion(b).value();
    CHECK(std::abs(torsion(direct_sum(a, b)).value() - ra - rb) < 1e-9);
    CHECK(std::abs(torsion(shift_up(a)).value() + ra) < 1e-9);
  }
}

TEST_CASE("tensor products of complexes") {
  gen::Rng rng(32);
  const AlgebraModel triv = AlgebraModel::scalars();
  const CochainComplex point(triv, {HilbertianModule(triv, 1)}, {}, "pt");
  for (int i = 0; i < 20; ++i) {
    const AlgebraModel m1 = AlgebraModel::finite_group(gen::small_group(rng, 4));
    const AlgebraModel m2 = AlgebraModel::finite_group(gen::small_group(rng, 4));
    gen::ComplexShape shape;
    shape.max_total_rank = 5;
    shape.max_length = 3;
    const CochainComplex c1 = gen::complex(rng, m1, shape, "C1"), c2 = gen::complex(rng, m2, shape, "C2");
    const CochainComplex t = tensor_complexes(c1, c2);
    for (double v : validate(t).d_squared) CHECK(v < 1e-10);
    CHECK(t.euler_characteristic() == c1.euler_characteristic() * c2.euler_characteristic());
    const CochainComplex cp = tensor_complexes(c1, point);
    REQUIRE(cp.length() == c1.length());
    for (int k = 0; k + 1 < c1.length(); ++k)
      CHECK(max_abs(realize(cp.differential_matrix(k)).dense() - realize(c1.differential_matrix(k)).dense()) == 0.0);
  }
}

TEST_CASE("zero differentials give trivial torsion under any grams") {
  gen::Rng rng(33);
  const AlgebraModel z3 = cyclic(3);
  std::vector<HilbertianModule> mods;
  std::vector<GroupRingMatrix> ds;
  for (int i = 0; i < 3; ++i) mods.emplace_back(z3, 2, gen::positive(rng, z3, 2), "M" + std::to_string(i));
  for (int i = 0; i < 2; ++i) ds.push_back(GroupRingMatrix::zero(z3, 2, 2));
  const TorsionReport r = torsion(CochainComplex(z3, mods, ds, "Z"));
  CHECK(r.value() == doctest::Approx(0.0));
}

TEST_CASE("property: gram rescaling is tracked by the trivialization context") {
  gen::Rng rng(34);
  for (int i = 0; i < 25; ++i) {
    const AlgebraModel m = AlgebraModel::finite_group(gen::small_group(rng, 6));
    gen::ComplexShape shape;
    shape.max_total_rank = 6;
    shape.random_grams = false;
    const CochainComplex c = gen::complex(rng, m, shape, "C");
    std::vector<GroupRingMatrix> grams;
    for (int k = 0; k < c.length(); ++k) grams.push_back(gen::positive(rng, m, c.rank(k)));
    const CochainComplex d = c.with_grams(grams);
    // The chain line det C^0 (x) det(C^1)^-1 ... moves by Det'(P_k)^{-e/2} per degree.
    double chain_change = 0.0;
    for (int k = 0; k < c.length(); ++k)
      chain_change += (k % 2 == 0 ? -0.5 : 0.5) * fk_det(grams[static_cast<std::size_t>(k)]).log_det;
    const double transported = trivialize(torsion(c).element, trivialization_context(c, d)) + chain_change;
    CHECK(std::abs(transported - torsion(d).value()) < 1e-9);
  }
}
