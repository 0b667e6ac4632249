#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "l2t/complex.hpp"

namespace l2t {

// Freely reduced word: (generator index, nonzero power) letters.
struct Word {
  std::vector<std::pair<int, int>> letters;

  static Word generator(int g, int power = 1);
  Word operator*(const Word& other) const;
  Word inverse() const;
  bool is_identity() const { return letters.empty(); }
  auto operator<=>(const Word&) const = default;
};

struct GroupPresentation {
  std::string name;
  std::vector<std::string> generators;
  std::vector<Word> relators;

  int generator_index(std::string_view g) const;  // -1 when absent
  std::string format(const Word& w) const;        // "t^2*s^-1", "1" for the identity
  Word parse(std::string_view text) const;        // throws InvalidInput

  static GroupPresentation trivial();
  static GroupPresentation cyclic(int p);                // <t | t^p>
  static GroupPresentation free_abelian(int k);          // t (k = 1) or t1..tk, commuting
  // Generators of b are renamed on clashes; commutators between the factors are added.
  static GroupPresentation product(const GroupPresentation& a, const GroupPresentation& b);
  bool operator==(const GroupPresentation& o) const { return generators == o.generators && relators == o.relators; }
};

// Element of the integral group ring of the free group on the generators; equality
// in the quotient is only decided through a coefficient system.
class IntegralElement {
 public:
  IntegralElement() = default;
  static IntegralElement one() { return word(Word{}); }
  static IntegralElement word(const Word& w, long long c = 1);
  static IntegralElement integer(long long c) { return word(Word{}, c); }

  const std::map<Word, long long>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  void add(const Word& w, long long c);

  IntegralElement& operator+=(const IntegralElement& o);
  IntegralElement& operator-=(const IntegralElement& o);
  friend IntegralElement operator+(IntegralElement a, const IntegralElement& b) { return a += b; }
  friend IntegralElement operator-(IntegralElement a, const IntegralElement& b) { return a -= b; }
  friend IntegralElement operator*(const IntegralElement& a, const IntegralElement& b);
  IntegralElement operator-() const;
  IntegralElement left_multiplied(const Word& g) const;
  IntegralElement right_multiplied(const Word& g) const;
  bool operator==(const IntegralElement&) const = default;

 private:
  std::map<Word, long long> terms_;
};

// Matrix of a chain map C_k(source) -> C_k(target) in the convention
// f(e_j) = sum_i m(i, j) e_i (columns are source cells).
class IntegralMatrix {
 public:
  IntegralMatrix(int rows = 0, int cols = 0);
  static IntegralMatrix identity(int n);
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  const IntegralElement& operator()(int i, int j) const;
  IntegralElement& at(int i, int j);
  bool is_zero() const;
  bool operator==(const IntegralMatrix&) const = default;

 private:
  int rows_, cols_;
  std::vector<IntegralElement> entries_;
};

// Composite "f then g" of left-module maps: (g o f)(i, j) = sum_k f(k, j) g(i, k).
IntegralMatrix then(const IntegralMatrix& f, const IntegralMatrix& g);

class EquivariantCWComplex {
 public:
  EquivariantCWComplex() = default;
  // boundary[k-1] is d_k with #c_{k-1} rows and #c_k columns.
  EquivariantCWComplex(GroupPresentation group, std::vector<int> cells, std::vector<IntegralMatrix> boundary,
                       std::string name);

  const GroupPresentation& group() const noexcept { return group_; }
  const std::string& name() const noexcept { return name_; }
  int dimension() const noexcept { return static_cast<int>(cells_.size()) - 1; }
  int cell_count(int k) const { return k >= 0 && k < static_cast<int>(cells_.size()) ? cells_[k] : 0; }
  const std::vector<int>& cells() const noexcept { return cells_; }
  // d_k for 1 <= k <= dimension; a zero matrix of the right shape otherwise.
  IntegralMatrix boundary(int k) const;
  EquivariantCWComplex renamed(std::string name) const;

 private:
  GroupPresentation group_;
  std::vector<int> cells_;
  std::vector<IntegralMatrix> boundary_;
  std::string name_;
};

int euler_char(const EquivariantCWComplex& x);

struct GeneratorImage {
  cplx scale = 1.0;
  GroupKey key;
};

// phi: pi -> target group (or Z^k), H = l2(target)^multiplicity.
struct CoefficientSystem {
  AlgebraModel target = AlgebraModel::scalars();
  std::vector<GeneratorImage> images;
  int multiplicity = 1;
  std::string label = "H";

  static CoefficientSystem trivial(const GroupPresentation& group);
  GroupRingElement apply(const Word& w) const;
  GroupRingElement apply(const IntegralElement& a) const;
  GroupRingMatrix apply(const IntegralMatrix& m) const;
  // Cochain-level map of a chain map: entrywise phi, plain transpose, (x) I_m.
  GroupRingMatrix cochain_map(const IntegralMatrix& chain) const;
};

// Relators must map to the unit. Throws HomomorphismInvalid.
void check_homomorphism(const GroupPresentation& group, const CoefficientSystem& h);
CoefficientSystem tensor(const CoefficientSystem& a, const CoefficientSystem& b);

struct PreferredVolume {
  std::optional<GroupRingMatrix> gram;  // inner product on H (multiplicity x multiplicity)
};

CochainComplex cochain_with_coefficients(const EquivariantCWComplex& x, const CoefficientSystem& h,
                                         const PreferredVolume& sigma = {});

struct UnimodularityReport {
  bool unimodular = true;
  std::vector<double> log_dets;  // ln Det'(L_phi(g)) per generator
};
UnimodularityReport unimodularity_check(const CoefficientSystem& h);

// Throws NotUnimodular; real value withheld when not of determinant class.
TorsionReport l2_torsion(const EquivariantCWComplex& x, const CoefficientSystem& h,
                         const PreferredVolume& sigma = {}, const DetOptions& options = {});

struct BuiltinSpace {
  EquivariantCWComplex space;
  CoefficientSystem coefficients;  // documented default target
};

// point, sphere n, disk n, circle_Z, torus k, lens p q, klein_bottle, heisenberg,
// mapping_torus d (degree-d self map of the circle), product <a> [params] x <b> [params].
BuiltinSpace builtin_space(std::string_view name, std::span<const std::string> params = {});
BuiltinSpace builtin_space(std::string_view name, std::initializer_list<int> params);

// Mapping torus of a self chain map of a complex over the trivial group; pi = Z.
EquivariantCWComplex mapping_torus(const EquivariantCWComplex& y, const std::vector<IntegralMatrix>& f);

// Cells e x f of degree k ordered by (deg e, index e, index f).
EquivariantCWComplex product_space(const EquivariantCWComplex& x1, const EquivariantCWComplex& x2);
int product_cell_index(const EquivariantCWComplex& x1, const EquivariantCWComplex& x2, int a, int i, int b, int j);

// Replaces cell j of degree k by g.e_j.
EquivariantCWComplex relift_cell(const EquivariantCWComplex& x, int k, int j, const Word& g);
// New cell i of degree k is old cell perm[i].
EquivariantCWComplex reorder_cells(const EquivariantCWComplex& x, int k, const std::vector<int>& perm);

using ChainMap = std::vector<IntegralMatrix>;  // per degree

struct Pushout {
  EquivariantCWComplex space;
  ChainMap i1, i2;                        // X1 -> X, X2 -> X
  ChainMap j1, j2;                        // X0 -> X1, X0 -> X2
  std::vector<std::vector<int>> new_cells;  // X1 cells outside X0, per degree
};

// j1 maps X0 cells to X1 cells (per degree index lists); j2 is a chain map
// witnessed through `witness` coefficients. Throws NotSubcomplex, NotCellular.
Pushout pushout_assemble(const EquivariantCWComplex& x0, const EquivariantCWComplex& x1,
                         const EquivariantCWComplex& x2, const std::vector<std::vector<int>>& j1,
                         const ChainMap& j2, const CoefficientSystem& witness);

// 0 -> C(X) -> C(X1) + C(X2) -> C(X0) -> 0 with alpha = [i1*; i2*], beta = [j1*, -j2*].
struct MayerVietoris {
  CochainComplex x, middle, x0;
  std::vector<GroupRingMatrix> alpha, beta;
};
MayerVietoris mayer_vietoris(const Pushout& p, const EquivariantCWComplex& x0, const EquivariantCWComplex& x1,
                             const EquivariantCWComplex& x2, const CoefficientSystem& h,
                             const PreferredVolume& sigma = {});

}  // namespace l2t
