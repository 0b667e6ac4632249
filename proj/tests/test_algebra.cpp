#include "support.hpp"

using namespace l2t;
using namespace l2t::test;

TEST_CASE("group tables validate their laws") {
  CHECK_THROWS_AS(FiniteGroupTable({}, "empty"), Error);
  CHECK_THROWS_AS(FiniteGroupTable({{0, 1}, {1, 1}}), Error);          // not a latin square
  CHECK_THROWS_AS(FiniteGroupTable({{1, 0}, {0, 1}}), Error);          // 0 is not the identity
  CHECK_THROWS_AS(FiniteGroupTable({{0, 1, 2}, {1, 0, 2}}), Error);    // not square
  // Latin square that is not associative: the loop of order 5 below.
  CHECK_THROWS_AS(FiniteGroupTable({{0, 1, 2, 3, 4},
                                    {1, 0, 3, 4, 2},
                                    {2, 4, 0, 1, 3},
                                    {3, 2, 4, 0, 1},
                                    {4, 3, 1, 2, 0}}),
                  Error);
  const FiniteGroupTable d4 = FiniteGroupTable::dihedral(4);
  CHECK(d4.order() == 8);
  const int r = 1, s = 4;
  CHECK(d4.power(r, 4) == 0);
  CHECK(d4.mult(s, s) == 0);
  CHECK(d4.mult(d4.mult(s, r), s) == d4.inverse(r));  // s r s = r^-1
  const FiniteGroupTable q8 = FiniteGroupTable::quaternion();
  const int i = q8.generators()[0], j = q8.generators()[1];
  CHECK(q8.power(i, 2) == q8.power(j, 2));
  CHECK(q8.power(i, 2) != 0);
  CHECK(q8.mult(q8.mult(i, j), q8.mult(i, j)) == q8.power(i, 2));
  CHECK(FiniteGroupTable::heisenberg(3).order() == 27);
  CHECK(FiniteGroupTable(FiniteGroupTable::cyclic(6).rows()) == FiniteGroupTable::cyclic(6));
}

TEST_CASE("model keys multiply in G x Z^k") {
  const AlgebraModel m = AlgebraModel::mixed(FiniteGroupTable::cyclic(3), 2);
  const GroupKey a{1, {2, -1}}, b{2, {-2, 5}};
  CHECK(m.multiply(a, b) == GroupKey{0, {0, 4}});
  CHECK(m.multiply(a, m.inverse(a)) == m.identity());
  CHECK(m.valid_key(a));
  CHECK_FALSE(m.valid_key(GroupKey{3, {0, 0}}));
  CHECK_FALSE(m.valid_key(GroupKey{0, {0}}));
  CHECK(m.kind() == AlgebraModel::Kind::Mixed);
  CHECK(AlgebraModel::torus(2).kind() == AlgebraModel::Kind::Torus);
  CHECK(tensor(cyclic(2), AlgebraModel::torus(1)).kind() == AlgebraModel::Kind::Mixed);
  CHECK_THROWS_AS(tensor(AlgebraModel::torus(2), AlgebraModel::torus(2)), Error);
}

TEST_CASE("trace picks the identity coefficient") {
  const AlgebraModel z3 = cyclic(3);
  CHECK(trace(elem(z3, {{0, 1.0}})) == cplx(1.0));
  CHECK(trace(elem(z3, {{1, 1.0}})) == cplx(0.0));
  const GroupRingElement a = elem(z3, {{0, 1.0}, {1, 1.0}});
  CHECK(a * a == elem(z3, {{0, 1.0}, {1, 2.0}, {2, 1.0}}));
  CHECK(trace(a * a) == cplx(1.0));
}

TEST_CASE("involution conjugates and inverts") {
  const AlgebraModel z5 = cyclic(5);
  CHECK(involute(elem(z5, {{2, cplx(1, 2)}})) == elem(z5, {{3, cplx(1, -2)}}));
  const AlgebraModel t = AlgebraModel::torus(1);
  CHECK(involute(laurent(t, {{{3}, cplx(0, 1)}})) == laurent(t, {{{-3}, cplx(0, -1)}}));
}

TEST_CASE("property: involution and trace on random elements") {
  gen::Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const AlgebraModel m = AlgebraModel::finite_group(gen::small_group(rng));
    const GroupRingElement a = gen::element(rng, m, 4), b = gen::element(rng, m, 4);
    CHECK(involute(involute(a)) == a);
    double sq = 0.0;
    for (const auto& [k, c] : a.terms()) sq += std::norm(c);
    CHECK(std::abs(trace(involute(a) * a) - cplx(sq)) < 1e-12);
    if (!a.pruned(1e-14).is_zero()) CHECK(trace(involute(a) * a).real() > 0.0);
    CHECK(std::abs(trace(a * b) - trace(b * a)) < 1e-12);
    CHECK((involute(a * b) - involute(b) * involute(a)).max_abs() < 1e-12);
  }
}

TEST_CASE("realization of e + t over Z/2 is the all-ones matrix") {
  const AlgebraModel z2 = cyclic(2);
  const DenseMatrix r = realize(one_by_one(elem(z2, {{0, 1.0}, {1, 1.0}}))).dense();
  CHECK(max_abs(r - DenseMatrix::Ones(2, 2)) == 0.0);
  const AlgebraModel t = AlgebraModel::torus(1);
  const std::vector<double> zero{0.0};
  CHECK(max_abs(realize(one_by_one(laurent(t, {{{1}, 1.0}, {{0}, -1.0}}))).at(zero)) < 1e-15);
}

TEST_CASE("property: realize is multiplicative and derealize inverts it") {
  gen::Rng rng(2);
  for (int i = 0; i < 40; ++i) {
    const AlgebraModel m = AlgebraModel::finite_group(gen::small_group(rng));
    const int p = rng.uniform(1, 3), q = rng.uniform(1, 3), r = rng.uniform(1, 3);
    const GroupRingMatrix a = gen::matrix(rng, m, p, q), b = gen::matrix(rng, m, q, r);
    CHECK(max_abs(realize(a * b).dense() - realize(a).dense() * realize(b).dense()) < 1e-12);
    CHECK(max_abs(realize(a.star()).dense() - realize(a).dense().adjoint()) < 1e-12);
    CHECK((derealize(m, realize(a).dense(), p, q) - a).max_abs() < 1e-12);
  }
  // Torus: symbols multiply pointwise.
  const AlgebraModel t2 = AlgebraModel::torus(2);
  GroupRingMatrix a(t2, 2, 2), b(t2, 2, 1);
  a.set(0, 0, laurent(t2, {{{1, 0}, 1.0}, {{0, -1}, 2.0}}));
  a.set(1, 1, laurent(t2, {{{0, 0}, 3.0}}));
  a.set(1, 0, laurent(t2, {{{2, 1}, cplx(0, 1)}}));
  b.set(0, 0, laurent(t2, {{{-1, 1}, 1.0}}));
  b.set(1, 0, laurent(t2, {{{0, 0}, 1.0}, {{1, 1}, -1.0}}));
  const std::vector<double> theta{0.3, -1.7};
  CHECK(max_abs(realize(a * b).at(theta) - realize(a).at(theta) * realize(b).at(theta)) < 1e-12);
}

TEST_CASE("matrix algebra helpers") {
  const AlgebraModel z2 = cyclic(2);
  const GroupRingMatrix i2 = GroupRingMatrix::identity(z2, 2);
  const GroupRingMatrix t = one_by_one(elem(z2, {{1, 1.0}}));
  const GroupRingMatrix k = kron(i2, t);
  CHECK(k.rows() == 2);
  CHECK(k.model().group_order() == 4);
  const GroupRingMatrix h = GroupRingMatrix::hstack(i2, i2);
  CHECK(h.cols() == 4);
  CHECK(h.block(0, 2, 2, 2) == i2);
  CHECK(GroupRingMatrix::block_diagonal(i2, t).rows() == 3);
  CHECK(i2.permuted({1, 0}, {1, 0}) == i2);
  CHECK_THROWS_AS(i2 * GroupRingMatrix::identity(z2, 3), Error);
}

TEST_CASE("Fuglede-Kadison determinants: closed forms") {
  const AlgebraModel z3 = cyclic(3);
  CHECK(fk_det(GroupRingMatrix::identity(z3, 2)).log_det == doctest::Approx(0.0).epsilon(1e-15));
  const DetResult tm1 = fk_det(one_by_one(elem(z3, {{1, 1.0}, {0, -1.0}})));
  CHECK(std::exp(tm1.log_det) == doctest::Approx(std::cbrt(3.0)).epsilon(1e-12));
  CHECK_FALSE(tm1.invertible);
  CHECK(tm1.generic_rank == 2);
  CHECK(std::exp(fk_det(scalar_matrix(z3, 1, 2.0)).log_det) == doctest::Approx(2.0).epsilon(1e-12));

  const AlgebraModel t1 = AlgebraModel::torus(1);
  const DetResult z2 = fk_det(one_by_one(laurent(t1, {{{1}, 1.0}, {{0}, -2.0}})));
  CHECK(std::abs(z2.log_det - std::log(2.0)) < 1e-8);
  for (double a : {0.5, 1.0, 2.0}) {
    const double log_det = fk_det(one_by_one(laurent(t1, {{{1}, 1.0}, {{0}, -a}}))).log_det;
    CHECK(std::abs(log_det - std::log(std::max(1.0, a))) < 1e-8);
  }
  // 2 id over Z/2 tensor 3 id over Z/3: Det' = 6.
  const GroupRingMatrix k = kron(scalar_matrix(cyclic(2), 1, 2.0), scalar_matrix(z3, 1, 3.0));
  CHECK(std::exp(fk_det(k).log_det) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("property: Det' is multiplicative, adjoint-invariant and trivial on translations") {
  gen::Rng rng(3);
  for (int i = 0; i < 40; ++i) {
    const AlgebraModel m = AlgebraModel::finite_group(gen::small_group(rng));
    const int n = rng.uniform(1, 3);
    const GroupRingMatrix f = gen::invertible(rng, m, n), g = gen::invertible(rng, m, n);
    CHECK(std::abs(fk_det(f * g).log_det - fk_det(f).log_det - fk_det(g).log_det) < 1e-10);
    const GroupRingMatrix h = gen::matrix(rng, m, n, n);
    CHECK(std::abs(fk_det(h.star()).log_det - fk_det(h).log_det) < 1e-10);
    const int e = rng.uniform(0, m.group_order() - 1);
    CHECK(std::abs(fk_det(one_by_one(GroupRingElement::monomial(m, GroupKey{e, {}}))).log_det) < 1e-14);
  }
  const AlgebraModel t2 = AlgebraModel::torus(2);
  CHECK(std::abs(fk_det(one_by_one(laurent(t2, {{{3, -2}, 1.0}}))).log_det) < 1e-12);
}

TEST_CASE("rank decisions refuse values near the cutoff") {
  Eigen::VectorXd sv(3);
  sv << 1.0, 1e-3, 1e-16;
  CHECK(numerical_rank(sv, 1e-10) == 2);
  sv << 1.0, 1e-3, 2e-10;
  CHECK_THROWS_AS(numerical_rank(sv, 1e-10), Error);
}

TEST_CASE("von Neumann dimension") {
  CHECK(vn_dim(4) == 4.0);
  const AlgebraModel z2 = cyclic(2);
  CHECK(vn_dim(one_by_one(elem(z2, {{0, 0.5}, {1, 0.5}}))) == doctest::Approx(0.5));
  CHECK_THROWS_AS(vn_dim(one_by_one(elem(z2, {{0, 1.0}, {1, 1.0}}))), Error);
}

TEST_CASE("torus quadrature converges on smooth integrands and flags divergence") {
  QuadratureOptions o;
  o.start_resolution = 16;
  const QuadratureResult r = integrate_over_torus(
      2, 1, [](std::span<const double> t, int, std::span<double> out) { out[0] = std::cos(t[0]) * std::cos(t[0]) + t[1]; },
      o);
  CHECK(r.values[0] == doctest::Approx(0.5 + M_PI).epsilon(1e-12));
  // 1/|theta - pi| has a divergent mean; the midpoint sums grow like ln n.
  o.max_points = 1 << 14;
  CHECK_THROWS_AS(integrate_over_torus(
                      1, 1,
                      [](std::span<const double> t, int, std::span<double> out) {
                        out[0] = 1.0 / std::abs(t[0] - M_PI);
                      },
                      o),
                  Error);
}
