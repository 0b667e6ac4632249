#include "support.hpp"

#include "l2t/oracle.hpp"

using namespace l2t;
using namespace l2t::test;

TEST_CASE("Laplacian oracle closed forms") {
  CHECK(torsion_via_laplacian(scalar_complex({0.0, 0.0})) == doctest::Approx(0.0));
  CHECK(torsion_via_laplacian(scalar_complex({3.0})) == doctest::Approx(std::log(3.0)));
  const BuiltinSpace s1 = builtin_space("circle_Z", {});
  CHECK(std::abs(torsion_via_laplacian(cochain_with_coefficients(s1.space, s1.coefficients))) < 1e-6);
}

TEST_CASE("dense oracle closed forms") {
  const AlgebraModel triv = AlgebraModel::scalars();
  CHECK(torsion_via_dense(CochainComplex(triv, {HilbertianModule(triv, 1)}, {}, "pt")) == doctest::Approx(0.0));
  for (int p : {3, 5, 7}) {
    const BuiltinSpace l = builtin_space("lens", {p, 1});
    const CochainComplex c = cochain_with_coefficients(l.space, l.coefficients);
    CHECK(std::abs(torsion_via_dense(c) - torsion(c).value()) < 1e-8);
    CHECK(std::abs(torsion_via_laplacian(c) - torsion(c).value()) < 1e-8);
  }
  const BuiltinSpace s1 = builtin_space("circle_Z", {});
  CHECK_THROWS_AS(torsion_via_dense(cochain_with_coefficients(s1.space, s1.coefficients)), Error);
}

TEST_CASE("property: oracles agree with the main path on random complexes") {
  gen::Rng rng(61);
  for (int i = 0; i < 20; ++i) {
    const AlgebraModel m = AlgebraModel::finite_group(gen::small_group(rng));
    const CochainComplex c = gen::complex(rng, m, gen::ComplexShape{}, "C");
    const double main = torsion(c).value();
    CHECK(std::abs(torsion_via_laplacian(c) - main) < 1e-8);
    CHECK(std::abs(torsion_via_dense(c) - main) < 1e-8);
  }
}

TEST_CASE("Mahler measures") {
  const AlgebraModel t1 = AlgebraModel::torus(1), t2 = AlgebraModel::torus(2);
  const MahlerEstimate z2 = mahler_refine(laurent(t1, {{{1}, 1.0}, {{0}, -2.0}}), 1e-9);
  CHECK(std::abs(z2.value - std::log(2.0)) < 1e-9);
  const MahlerEstimate z1 = mahler_refine(laurent(t1, {{{1}, 1.0}, {{0}, -1.0}}), 1e-6);
  CHECK(std::abs(z1.value) < 1e-6);
  CHECK(mahler_refine(laurent(t2, {{{0, 0}, 5.0}}), 1e-9).value == doctest::Approx(std::log(5.0)));
  CHECK_THROWS_AS(mahler_refine(GroupRingElement::zero(t1), 1e-9), Error);
}

TEST_CASE("property: the Mahler error bound covers the true error") {
  // Products of linear factors: m(prod (z - a_j)) = sum ln max(1, |a_j|).
  gen::Rng rng(62);
  const AlgebraModel t1 = AlgebraModel::torus(1);
  for (int i = 0; i < 20; ++i) {
    GroupRingElement p = GroupRingElement::scalar(t1, 1.0);
    double exact = 0.0;
    for (int j = rng.uniform(1, 3); j > 0; --j) {
      const double r = rng.coin() ? rng.real(0.2, 0.8) : rng.real(1.3, 3.0);
      const cplx a = std::polar(r, rng.real(0.0, 2.0 * M_PI));
      p = p * laurent(t1, {{{1}, 1.0}, {{0}, -a}});
      exact += std::log(std::max(1.0, r));
    }
    const MahlerEstimate e = mahler_refine(p, 1e-8);
    CHECK(std::abs(e.value - exact) <= std::max(e.error, 1e-12));
    CHECK(e.error <= 1e-8);
  }
}
