#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "l2t/formulas.hpp"

// Seeded generators for the property and acceptance suites.
namespace l2t::gen {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  int uniform(int lo, int hi);  // inclusive
  double real(double lo, double hi);
  bool coin(double p = 0.5);
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
  }
  std::vector<int> permutation(int n);

 private:
  std::mt19937_64 engine_;
};

// Cyclic groups, D_3, D_4, Q_8, Z/2 x Z/2 and Z/2 x Z/4, restricted to order <= max_order.
FiniteGroupTable small_group(Rng& rng, int max_order = 8);

// Finite models only below.
GroupRingElement element(Rng& rng, const AlgebraModel& model, int max_terms = 3);
GroupRingMatrix matrix(Rng& rng, const AlgebraModel& model, int rows, int cols, int max_terms = 3);
// Realized singular values within a factor 50 of each other.
GroupRingMatrix invertible(Rng& rng, const AlgebraModel& model, int n);
GroupRingMatrix positive(Rng& rng, const AlgebraModel& model, int n);
GroupRingMatrix inverse(const GroupRingMatrix& m);

struct ComplexShape {
  int max_total_rank = 12;
  int max_length = 4;
  int length = 0;  // 0: random in [2, max_length]
  bool weakly_acyclic = false;
  bool random_grams = true;
};

// Direct sum of elementary pieces (a: C^k -> C^{k+1}, free cells, e - g followed by the
// norm of <g>), conjugated by random invertible base changes.
CochainComplex complex(Rng& rng, const AlgebraModel& model, const ComplexShape& shape, std::string name = "C");

// ---- integral spaces over Z/p ---------------------------------------------------

CoefficientSystem cyclic_coefficients(int p);  // t -> generator of l2(Z/p)

// Elementary pieces with a unitriangular integral base change; acyclic over C[Z/p] on request.
EquivariantCWComplex cyclic_space(Rng& rng, int p, bool acyclic, std::string name = "X0");

struct PushoutCase {
  EquivariantCWComplex x0, x1, x2;
  std::vector<std::vector<int>> j1;  // inputs of pushout_assemble
  ChainMap j2;
  Pushout pushout;
  CoefficientSystem h;
  bool acyclic = false;  // all four spaces weakly acyclic by construction
};

// X1 and X2 attach one or two cell pairs to X0 along boundaries in X0; X1 is reordered
// and relifted off X0, X2 is relifted and reordered everywhere (j2 follows along).
PushoutCase pushout(Rng& rng, int p);

// Random re-liftings and reorderings, same cellular structure up to those moves.
EquivariantCWComplex shuffle_cells(Rng& rng, const EquivariantCWComplex& x, int moves);

struct TwistedCase {
  CochainComplex l, n, m;
};

// L and N weakly acyclic of equal length, M = twisted_sum(L, N, homotopy twist).
TwistedCase twisted(Rng& rng, const AlgebraModel& model, int max_total_rank = 12);

}  // namespace l2t::gen
