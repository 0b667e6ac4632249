#pragma once

#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <utility>
#include <vector>

#include "l2t/random.hpp"

namespace l2t::test {

inline AlgebraModel cyclic(int n) { return AlgebraModel::finite_group(FiniteGroupTable::cyclic(n)); }

// Finite-model element from (group index, coefficient) pairs.
inline GroupRingElement elem(const AlgebraModel& m, std::initializer_list<std::pair<int, cplx>> terms) {
  GroupRingElement a(m);
  for (const auto& [g, c] : terms) a.add_term(GroupKey{g, {}}, c);
  return a;
}

// Torus element from (exponent vector, coefficient) pairs.
inline GroupRingElement laurent(const AlgebraModel& m, std::initializer_list<std::pair<std::vector<int>, cplx>> terms) {
  GroupRingElement a(m);
  for (const auto& [v, c] : terms) a.add_term(GroupKey{0, v}, c);
  return a;
}

inline GroupRingMatrix scalar_matrix(const AlgebraModel& m, int n, cplx c) { return GroupRingMatrix::identity(m, n, c); }

inline GroupRingMatrix one_by_one(const GroupRingElement& a) { return GroupRingMatrix::from_element(a); }

// 0 -> C -> C with the given scalar differentials over the trivial group.
inline CochainComplex scalar_complex(std::vector<double> ds, std::string name = "C") {
  const AlgebraModel m = AlgebraModel::scalars();
  std::vector<HilbertianModule> mods(ds.size() + 1, HilbertianModule(m, 1));
  std::vector<GroupRingMatrix> d;
  for (double x : ds) d.push_back(scalar_matrix(m, 1, x));
  return CochainComplex(m, mods, d, name);
}

inline double max_abs(const DenseMatrix& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace l2t::test
