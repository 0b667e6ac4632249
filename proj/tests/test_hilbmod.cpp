#include "support.hpp"

using namespace l2t;
using namespace l2t::test;

namespace {

Morphism standard_morphism(const GroupRingMatrix& m) {
  return Morphism(HilbertianModule(m.model(), m.cols()), HilbertianModule(m.model(), m.rows()), m);
}

}  // namespace

TEST_CASE("gram operators must be positive") {
  const AlgebraModel z2 = cyclic(2);
  CHECK_NOTHROW(HilbertianModule(z2, 1, one_by_one(elem(z2, {{0, 2.0}, {1, 1.0}})), "A"));
  CHECK_THROWS_AS(HilbertianModule(z2, 1, one_by_one(elem(z2, {{0, 1.0}, {1, 1.0}})), "A"), Error);  // singular
  CHECK_THROWS_AS(HilbertianModule(z2, 1, one_by_one(elem(z2, {{0, 1.0}, {1, 2.0}})), "A"), Error);  // indefinite
  CHECK_THROWS_AS(HilbertianModule(z2, 1, one_by_one(elem(z2, {{1, cplx(0, 1)}})), "A"), Error);     // not self-adjoint
  CHECK(HilbertianModule(z2, 3).vn_dimension() == 3.0);
  CHECK(HilbertianModule(z2, 2).standard());
}

TEST_CASE("adjoint of a translation is the inverse translation") {
  const AlgebraModel z5 = cyclic(5);
  const Morphism lg = standard_morphism(one_by_one(elem(z5, {{2, 1.0}})));
  CHECK(adjoint(lg).matrix() == one_by_one(elem(z5, {{3, 1.0}})));
}

TEST_CASE("property: adjoint satisfies the inner-product identity under random grams") {
  gen::Rng rng(11);
  for (int i = 0; i < 30; ++i) {
    const AlgebraModel m = AlgebraModel::finite_group(gen::small_group(rng, 6));
    const int p = rng.uniform(1, 3), q = rng.uniform(1, 3);
    const HilbertianModule s(m, q, gen::positive(rng, m, q), "S"), t(m, p, gen::positive(rng, m, p), "T");
    const Morphism f(s, t, gen::matrix(rng, m, p, q));
    const Morphism fs = adjoint(f);
    CHECK((adjoint(fs).matrix() - f.matrix()).max_abs() < 1e-10);
    const DenseMatrix gs = realize(s.gram()).dense(), gt = realize(t.gram()).dense();
    const DenseMatrix mf = realize(f.matrix()).dense(), mfs = realize(fs.matrix()).dense();
    const DenseVector x = DenseVector::Random(mf.cols()), y = DenseVector::Random(mf.rows());
    const cplx lhs = (y.adjoint() * gt * mf * x)(0, 0);
    const cplx rhs = ((mfs * y).adjoint() * gs * x)(0, 0);
    CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(lhs)));
  }
}

TEST_CASE("symbols are isometric images in orthonormal coordinates") {
  const AlgebraModel z3 = cyclic(3);
  const HilbertianModule a(z3, 1, scalar_matrix(z3, 1, 4.0), "A");
  const Morphism f(a, HilbertianModule(z3, 1), GroupRingMatrix::identity(z3, 1));
  // |x|_A = 2 |x|, so the identity shrinks by 1/2 into the standard module.
  CHECK(std::exp(det_prime(f).log_det) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("tensor of morphisms") {
  const AlgebraModel z2 = cyclic(2), z3 = cyclic(3);
  const Morphism f = tensor(standard_morphism(scalar_matrix(z2, 1, 2.0)), standard_morphism(scalar_matrix(z3, 1, 3.0)));
  CHECK(std::exp(det_prime(f).log_det) == doctest::Approx(6.0).epsilon(1e-12));
  const Morphism id = tensor(standard_morphism(GroupRingMatrix::identity(z2, 2)),
                             standard_morphism(GroupRingMatrix::identity(z3, 3)));
  CHECK(id.matrix() == GroupRingMatrix::identity(id.algebra(), 6));
  CHECK(id.source().vn_dimension() == 6.0);
  const Morphism mixed = tensor(standard_morphism(scalar_matrix(z2, 1, 2.0)),
                                standard_morphism(one_by_one(laurent(AlgebraModel::torus(1), {{{1}, 1.0}, {{0}, -3.0}}))));
  CHECK(mixed.algebra().kind() == AlgebraModel::Kind::Mixed);
  CHECK(std::abs(det_prime(mixed).log_det - std::log(6.0)) < 1e-8);
}

TEST_CASE("compose follows matrix products") {
  const AlgebraModel z3 = cyclic(3);
  const Morphism f = standard_morphism(scalar_matrix(z3, 1, 2.0));
  const Morphism g = standard_morphism(one_by_one(elem(z3, {{1, 1.0}})));
  CHECK(compose(g, f).matrix() == one_by_one(elem(z3, {{1, 2.0}})));
  CHECK_THROWS_AS(compose(g, standard_morphism(GroupRingMatrix::identity(z3, 2))), Error);
}

TEST_CASE("torsion/projective decomposition") {
  const AlgebraModel z3 = cyclic(3);
  const TPDecomposition inv = tp_decompose({standard_morphism(scalar_matrix(z3, 2, 2.0))});
  CHECK(inv.projective_dimension == doctest::Approx(0.0));
  CHECK(inv.torsion.image_dimension == doctest::Approx(2.0));
  CHECK(inv.torsion.log_det == doctest::Approx(2.0 * std::log(2.0)));

  const TPDecomposition zero = tp_decompose({standard_morphism(GroupRingMatrix::zero(z3, 2, 2))});
  CHECK(zero.projective_dimension == doctest::Approx(2.0));
  CHECK(zero.torsion.image_dimension == doctest::Approx(0.0));

  const TPDecomposition tm1 = tp_decompose({standard_morphism(one_by_one(elem(z3, {{1, 1.0}, {0, -1.0}})))});
  CHECK(tm1.projective_dimension == doctest::Approx(1.0 / 3.0));
  REQUIRE(tm1.projective_projection);
  CHECK(max_abs(*tm1.projective_projection - DenseMatrix::Constant(3, 3, 1.0 / 3.0)) < 1e-12);

  const AlgebraModel t1 = AlgebraModel::torus(1);
  const TPDecomposition z = tp_decompose({standard_morphism(one_by_one(laurent(t1, {{{1}, 1.0}, {{0}, -1.0}})))});
  CHECK(z.projective_dimension == doctest::Approx(0.0));
  CHECK_FALSE(z.torsion.trivial());
  CHECK(std::abs(z.torsion.log_det) < 1e-6);
}

TEST_CASE("property: dim P + dim closure(im alpha) = rank A") {
  gen::Rng rng(12);
  for (int i = 0; i < 40; ++i) {
    const AlgebraModel m = AlgebraModel::finite_group(gen::small_group(rng));
    const int p = rng.uniform(1, 4), q = rng.uniform(1, 4);
    GroupRingMatrix a = gen::matrix(rng, m, p, q);
    if (rng.coin()) a = a * GroupRingMatrix::zero(m, q, q);
    const TPDecomposition d = tp_decompose({standard_morphism(a)});
    CHECK(d.projective_dimension + d.torsion.image_dimension == doctest::Approx(static_cast<double>(p)));
    CHECK(d.projective_dimension >= -1e-12);
  }
}

TEST_CASE("harmonic projection") {
  const AlgebraModel triv = AlgebraModel::scalars();
  const Morphism zero_in = standard_morphism(GroupRingMatrix::zero(triv, 3, 0));
  const Morphism zero_out = standard_morphism(GroupRingMatrix::zero(triv, 0, 3));
  CHECK(harmonic_projection(zero_in, zero_out).betti == doctest::Approx(3.0));

  const AlgebraModel t1 = AlgebraModel::torus(1);
  const GroupRingMatrix zm1 = one_by_one(laurent(t1, {{{1}, 1.0}, {{0}, -1.0}}));
  const HarmonicProjection h0 = harmonic_projection(standard_morphism(GroupRingMatrix::zero(t1, 1, 0)), standard_morphism(zm1));
  CHECK(h0.betti == doctest::Approx(0.0));

  const AlgebraModel z4 = cyclic(4);
  const GroupRingMatrix tm1 = one_by_one(elem(z4, {{1, 1.0}, {0, -1.0}}));
  const HarmonicProjection h = harmonic_projection(standard_morphism(GroupRingMatrix::zero(z4, 1, 0)), standard_morphism(tm1));
  CHECK(h.betti == doctest::Approx(0.25));
  REQUIRE(h.projection);
  CHECK(max_abs(*h.projection - DenseMatrix::Constant(4, 4, 0.25)) < 1e-12);
}
