#include "support.hpp"

using namespace l2t;
using namespace l2t::test;

namespace {

Morphism scalar_morphism(const DenseMatrix& m) {
  const AlgebraModel triv = AlgebraModel::scalars();
  return Morphism(HilbertianModule(triv, static_cast<int>(m.cols())), HilbertianModule(triv, static_cast<int>(m.rows())),
                  derealize(triv, m, static_cast<int>(m.rows()), static_cast<int>(m.cols())));
}

}  // namespace

TEST_CASE("line expressions merge, cancel and dualize") {
  const LineExpr a = LineExpr::atom("A"), b = LineExpr::atom("B", 2);
  const LineExpr ab = a.tensor(b).tensor(a);
  CHECK(ab.exponent_of("A") == 2);
  CHECK(ab.exponent_of("B") == 2);
  CHECK(ab.atoms().front().label == "A");
  CHECK(ab.dual().exponent_of("B") == -2);
  CHECK(ab.tensor(ab.dual()).trivial());
  CHECK(a.power(0).trivial());
  CHECK(LineExpr::atom("A", 0).trivial());
  CHECK(b.power(-3).exponent_of("B") == -6);
  CHECK(LineExpr().to_string() == "R");
  CHECK(a.tensor(b).to_string() == "det(A) (x) det(B)^2");
}

TEST_CASE("graded alternating products") {
  CHECK(graded_alternating({LineExpr::atom("X")}) == LineExpr::atom("X"));
  CHECK(graded_alternating({LineExpr::atom("X"), LineExpr::atom("X")}).trivial());
  const LineExpr g = graded_alternating({LineExpr::atom("P"), LineExpr::atom("Q"), LineExpr::atom("R")});
  CHECK(g.exponent_of("P") == 1);
  CHECK(g.exponent_of("Q") == -1);
  CHECK(g.exponent_of("R") == 1);
}

TEST_CASE("rescaling an inner product") {
  const AlgebraModel triv = AlgebraModel::scalars();
  const LineElement e{LineExpr::atom("A"), 0.0, true};
  CHECK(rescale_inner_product(e, GroupRingMatrix::identity(triv, 1)).log_scalar == doctest::Approx(0.0));
  CHECK(rescale_inner_product(e, scalar_matrix(triv, 1, 4.0)).scalar() == doctest::Approx(0.5));
  const LineElement inv{LineExpr::atom("A", -1), std::log(3.0), true};
  CHECK(rescale_inner_product(inv, scalar_matrix(triv, 1, 4.0)).scalar() == doctest::Approx(6.0));
  CHECK_THROWS_AS(rescale_inner_product(e, scalar_matrix(triv, 1, -1.0)), Error);
  const LineElement two{LineExpr::atom("A").tensor(LineExpr::atom("B", 2)), 0.0, true};
  CHECK(rescale_inner_product(two, scalar_matrix(triv, 1, 4.0), "B").scalar() == doctest::Approx(0.25));
}

TEST_CASE("property: rescaling is functorial in the gram change") {
  gen::Rng rng(21);
  for (int i = 0; i < 30; ++i) {
    const AlgebraModel m = AlgebraModel::finite_group(gen::small_group(rng));
    const int n = rng.uniform(1, 3);
    const GroupRingMatrix a = gen::invertible(rng, m, n), b = gen::invertible(rng, m, n);
    // Positive operators a*a and b*b, composed as (ab)^*(ab).
    const GroupRingMatrix pa = a.star() * a, pab = (a * b).star() * (a * b), pb = b.star() * b;
    const LineElement e{LineExpr::atom("V"), rng.real(-1, 1), true};
    const double step = rescale_inner_product(rescale_inner_product(e, pa), pb).log_scalar;
    CHECK(std::abs(rescale_inner_product(e, pab).log_scalar - step) < 1e-10);
    CHECK(rescale_inner_product(e, pab).positive);
  }
}

TEST_CASE("short exact sequence isomorphisms") {
  // Direct sum inclusion and projection.
  DenseMatrix alpha(3, 1), beta(2, 3);
  alpha << 1, 0, 0;
  beta << 0, 1, 0, 0, 0, 1;
  CHECK(ses_iso(scalar_morphism(alpha), scalar_morphism(beta)).factor() == doctest::Approx(1.0));

  // 0 -> A -(1,1)-> A + A -(1,-1)-> A -> 0: [alpha | beta^+] = [[1, 1/2], [1, -1/2]], |det| = 1.
  DenseMatrix a2(2, 1), b2(1, 2);
  a2 << 1, 1;
  b2 << 1, -1;
  CHECK(ses_iso(scalar_morphism(a2), scalar_morphism(b2)).factor() == doctest::Approx(1.0).epsilon(1e-12));

  DenseMatrix a3(2, 1), b3(1, 2);
  a3 << 2, 0;
  b3 << 0, 5;
  CHECK(ses_iso(scalar_morphism(a3), scalar_morphism(b3)).factor() == doctest::Approx(2.0 / 5.0));

  DenseMatrix bad(1, 2);
  bad << 1, 0;
  CHECK_THROWS_AS(ses_iso(scalar_morphism(a2), scalar_morphism(bad)), Error);
}

TEST_CASE("property: ses factor is invariant under a unitary change of the middle term") {
  gen::Rng rng(22);
  for (int i = 0; i < 25; ++i) {
    const int p = rng.uniform(1, 3), q = rng.uniform(1, 3), n = p + q;
    const DenseMatrix g = DenseMatrix::Random(n, n) + 3.0 * DenseMatrix::Identity(n, n);
    const DenseMatrix alpha = g.leftCols(p);
    // beta kills im(alpha): rows spanning the orthogonal complement, mixed by an invertible q x q.
    const Eigen::HouseholderQR<DenseMatrix> qr(alpha);
    const DenseMatrix qfull = qr.householderQ() * DenseMatrix::Identity(n, n);
    const DenseMatrix beta = (DenseMatrix::Random(q, q) + 3.0 * DenseMatrix::Identity(q, q)) * qfull.rightCols(q).adjoint();
    const DenseMatrix u = Eigen::HouseholderQR<DenseMatrix>(DenseMatrix::Random(n, n)).householderQ() *
                          DenseMatrix::Identity(n, n);
    const double f0 = ses_iso(scalar_morphism(alpha), scalar_morphism(beta)).log_factor;
    const double f1 = ses_iso(scalar_morphism(u * alpha), scalar_morphism(beta * u.adjoint())).log_factor;
    CHECK(std::abs(f0 - f1) < 1e-10);
  }
}

TEST_CASE("pushforward along isomorphisms") {
  const AlgebraModel triv = AlgebraModel::scalars();
  const Morphism id(HilbertianModule(triv, 2), HilbertianModule(triv, 2), GroupRingMatrix::identity(triv, 2));
  CHECK(pushforward(id).factor() == doctest::Approx(1.0));
  const Morphism c(HilbertianModule(triv, 1), HilbertianModule(triv, 1), scalar_matrix(triv, 1, -2.5));
  CHECK(pushforward(c).factor() == doctest::Approx(2.5));
  CHECK(pushforward(compose(c, c)).log_factor == doctest::Approx(2.0 * pushforward(c).log_factor));
  const Morphism sing(HilbertianModule(triv, 1), HilbertianModule(triv, 1), scalar_matrix(triv, 1, 0.0));
  CHECK_THROWS_AS(pushforward(sing), Error);
}

TEST_CASE("trivialization") {
  CHECK(trivialize(LineElement{LineExpr(), std::log(7.0), true}, {}) == doctest::Approx(std::log(7.0)));
  TrivializationContext ctx;
  ctx.log_generator_change["H"] = 0.25;
  const LineElement e{LineExpr::atom("H", -2), 1.0, true};
  CHECK(trivialize(e, ctx) == doctest::Approx(0.5));
  CHECK(trivialize(e, {}) == doctest::Approx(1.0));
  ctx.determinant_class = false;
  CHECK_THROWS_AS(trivialize(e, ctx), Error);
}

TEST_CASE("inner product elements stay positive") {
  const LineElement e{LineExpr::atom("A"), -3.0, true};
  CHECK(e.scalar() > 0.0);
  CHECK(e.tensor(e.dual()).log_scalar == doctest::Approx(0.0));
  CHECK(e.tensor(e).line.exponent_of("A") == 2);
}
