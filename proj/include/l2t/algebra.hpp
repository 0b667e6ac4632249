#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "l2t/error.hpp"

namespace l2t {

using cplx = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;

// Multiplication table of a finite group. Elements are 0..N-1, identity is 0.
class FiniteGroupTable {
 public:
  // Validates identity/inverse/latin-square laws always, associativity when N <= 64.
  FiniteGroupTable(std::vector<std::vector<int>> rows, std::string name = "G",
                   std::vector<int> generators = {});

  static FiniteGroupTable trivial();
  static FiniteGroupTable cyclic(int n);  // generator t = element 1, t^j = j
  // Order 2n. Element r^i s^j has index i + n*j; generators {r, s}.
  static FiniteGroupTable dihedral(int n);
  // Q8 with generators {i, j}.
  static FiniteGroupTable quaternion();
  // Unipotent upper triangular 3x3 matrices over Z/p; (a,b,c) -> a + p*b + p^2*c
  // where the matrix is [[1,a,c],[0,1,b],[0,0,1]]. Generators {T, Y, Z}.
  static FiniteGroupTable heisenberg(int p);
  // Index of (g1, g2) is g1 * |H| + g2.
  static FiniteGroupTable product(const FiniteGroupTable& g, const FiniteGroupTable& h);

  int order() const noexcept { return order_; }
  int mult(int a, int b) const { return mult_[static_cast<std::size_t>(a) * order_ + b]; }
  int inverse(int a) const { return inverse_[a]; }
  int power(int a, int exponent) const;
  const std::string& name() const noexcept { return name_; }
  const std::vector<int>& generators() const noexcept { return generators_; }
  std::vector<std::vector<int>> rows() const;

  bool operator==(const FiniteGroupTable& other) const { return mult_ == other.mult_; }

 private:
  int order_ = 1;
  std::vector<int> mult_;
  std::vector<int> inverse_;
  std::string name_;
  std::vector<int> generators_;
};

// Basis key of G x Z^k: a group index and an exponent vector of length k.
struct GroupKey {
  int element = 0;
  std::vector<int> exponents;
  auto operator<=>(const GroupKey&) const = default;
};

// Group algebra of G x Z^k with the standard trace. k = 0 is the finite-group
// model, G trivial is the torus model, both nontrivial is the mixed model.
class AlgebraModel {
 public:
  enum class Kind { FiniteGroup, Torus, Mixed };

  static AlgebraModel scalars();
  static AlgebraModel finite_group(FiniteGroupTable table);
  static AlgebraModel torus(int rank);
  static AlgebraModel mixed(FiniteGroupTable table, int rank);

  Kind kind() const noexcept;
  const FiniteGroupTable& group() const noexcept { return *group_; }
  int group_order() const noexcept { return group_->order(); }
  int torus_rank() const noexcept { return rank_; }
  bool is_finite() const noexcept { return rank_ == 0; }

  GroupKey identity() const;
  GroupKey multiply(const GroupKey& a, const GroupKey& b) const;
  GroupKey inverse(const GroupKey& a) const;
  bool valid_key(const GroupKey& k) const;

  std::string describe() const;
  bool operator==(const AlgebraModel& other) const;

 private:
  AlgebraModel(std::shared_ptr<const FiniteGroupTable> group, int rank);
  std::shared_ptr<const FiniteGroupTable> group_;
  int rank_ = 0;
};

inline constexpr int kMaxTorusRank = 3;

// Tensor product model: product group table, torus ranks added.
AlgebraModel tensor(const AlgebraModel& a, const AlgebraModel& b);
GroupKey tensor_key(const AlgebraModel& a, const GroupKey& ka, const AlgebraModel& b,
                    const GroupKey& kb);

class GroupRingElement {
 public:
  explicit GroupRingElement(AlgebraModel model);

  static GroupRingElement zero(const AlgebraModel& model) { return GroupRingElement(model); }
  static GroupRingElement scalar(const AlgebraModel& model, cplx c);
  static GroupRingElement monomial(const AlgebraModel& model, const GroupKey& key, cplx c = 1.0);

  const AlgebraModel& model() const noexcept { return model_; }
  const std::map<GroupKey, cplx>& terms() const noexcept { return terms_; }
  cplx coefficient(const GroupKey& key) const;
  bool is_zero() const noexcept { return terms_.empty(); }
  // Largest |coefficient|, 0 for the zero element.
  double max_abs() const;

  void add_term(const GroupKey& key, cplx c);
  // Drops coefficients with |c| <= tol.
  GroupRingElement pruned(double tol) const;
  // Same element over an equal model instance (cheap model checks afterwards).
  GroupRingElement rebased(const AlgebraModel& model) const;

  GroupRingElement& operator+=(const GroupRingElement& other);
  GroupRingElement& operator-=(const GroupRingElement& other);
  GroupRingElement& operator*=(cplx c);
  friend GroupRingElement operator+(GroupRingElement a, const GroupRingElement& b) { return a += b; }
  friend GroupRingElement operator-(GroupRingElement a, const GroupRingElement& b) { return a -= b; }
  friend GroupRingElement operator*(cplx c, GroupRingElement a) { return a *= c; }
  friend GroupRingElement operator*(const GroupRingElement& a, const GroupRingElement& b);
  GroupRingElement operator-() const;
  bool operator==(const GroupRingElement& other) const { return terms_ == other.terms_; }

 private:
  AlgebraModel model_;
  std::map<GroupKey, cplx> terms_;
};

cplx trace(const GroupRingElement& a);
GroupRingElement involute(const GroupRingElement& a);

class GroupRingMatrix {
 public:
  GroupRingMatrix(AlgebraModel model, int rows, int cols);

  static GroupRingMatrix zero(const AlgebraModel& model, int rows, int cols) {
    return GroupRingMatrix(model, rows, cols);
  }
  static GroupRingMatrix identity(const AlgebraModel& model, int n, cplx c = 1.0);
  static GroupRingMatrix from_element(const GroupRingElement& a);

  const AlgebraModel& model() const noexcept { return model_; }
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  const GroupRingElement& operator()(int i, int j) const { return entries_[index(i, j)]; }
  void set(int i, int j, GroupRingElement value);
  void add_to(int i, int j, const GroupRingElement& value);

  GroupRingMatrix transpose() const;
  // Conjugate transpose with the involution applied entrywise.
  GroupRingMatrix star() const;
  GroupRingMatrix pruned(double tol) const;
  GroupRingMatrix rebased(const AlgebraModel& model) const;
  double max_abs() const;
  bool is_zero() const;

  GroupRingMatrix& operator+=(const GroupRingMatrix& other);
  GroupRingMatrix& operator-=(const GroupRingMatrix& other);
  GroupRingMatrix& operator*=(cplx c);
  friend GroupRingMatrix operator+(GroupRingMatrix a, const GroupRingMatrix& b) { return a += b; }
  friend GroupRingMatrix operator-(GroupRingMatrix a, const GroupRingMatrix& b) { return a -= b; }
  friend GroupRingMatrix operator*(cplx c, GroupRingMatrix a) { return a *= c; }
  friend GroupRingMatrix operator*(const GroupRingMatrix& a, const GroupRingMatrix& b);
  bool operator==(const GroupRingMatrix& other) const;

  GroupRingMatrix block(int row0, int col0, int rows, int cols) const;
  static GroupRingMatrix hstack(const GroupRingMatrix& a, const GroupRingMatrix& b);
  static GroupRingMatrix vstack(const GroupRingMatrix& a, const GroupRingMatrix& b);
  static GroupRingMatrix block_diagonal(const GroupRingMatrix& a, const GroupRingMatrix& b);
  // Row/column permutation: result(i, j) = m(row_of[i], col_of[j]).
  GroupRingMatrix permuted(const std::vector<int>& row_of, const std::vector<int>& col_of) const;

 private:
  std::size_t index(int i, int j) const;
  AlgebraModel model_;
  int rows_, cols_;
  std::vector<GroupRingElement> entries_;
};

cplx trace(const GroupRingMatrix& m);
inline GroupRingMatrix involute(const GroupRingMatrix& m) { return m.star(); }
// Kronecker product over the tensor model.
GroupRingMatrix kron(const GroupRingMatrix& a, const GroupRingMatrix& b);

// Concrete realization: block (i, j) at angle theta is
// sum_{(g,v)} c * exp(i<v,theta>) * L_g with L_g the left regular representation.
class Realization {
 public:
  explicit Realization(const GroupRingMatrix& m);
  const AlgebraModel& model() const noexcept { return model_; }
  Eigen::Index rows() const noexcept { return rows_; }
  Eigen::Index cols() const noexcept { return cols_; }
  DenseMatrix at(std::span<const double> theta) const;
  // Only for finite models.
  DenseMatrix dense() const;

 private:
  struct Term {
    int row, col, element;
    std::vector<int> exponents;
    cplx coefficient;
  };
  AlgebraModel model_;
  Eigen::Index rows_, cols_;
  std::vector<Term> terms_;
};

inline Realization realize(const GroupRingMatrix& m) { return Realization(m); }
// Inverse of realize for finite models; reads column 0 of every block.
GroupRingMatrix derealize(const AlgebraModel& model, const DenseMatrix& dense, int rows, int cols);

// ---- spectral determinants -------------------------------------------------

struct QuadratureOptions {
  int start_resolution = 256;          // per circle factor
  double tolerance = 1e-8;             // on each integrated value
  std::int64_t max_points = 1 << 22;   // per level, all factors together
};

struct QuadratureResult {
  std::vector<double> values;
  std::vector<double> errors;
  int resolution = 0;
  int levels = 0;
};

// Mean over the torus T^rank of a vector-valued integrand, by midpoint grids with
// doubling and delta-squared extrapolation. The integrand receives the angle and the
// current per-axis resolution. Throws NonConvergent.
using TorusIntegrand =
    std::function<void(std::span<const double> theta, int resolution, std::span<double> out)>;
QuadratureResult integrate_over_torus(int rank, std::size_t outputs, const TorusIntegrand& f,
                                      const QuadratureOptions& options);

// Deterministic sample angles used for generic rank decisions.
std::vector<std::vector<double>> generic_sample_points(int rank);

struct DetOptions {
  double epsilon = 1e-10;  // relative singular value cutoff (finite model)
  std::array<double, 3> floor_ladder{1e-4, 1e-6, 1e-8};
  QuadratureOptions quadrature;
};

struct DetResult {
  double log_det = 0.0;
  bool determinant_class = true;
  bool invertible = true;
  bool bounded_below = true;  // smallest nonzero singular value stays away from 0
  int generic_rank = 0;  // rank of the realization (per point for torus models)
  int resolution = 0;
  double error_estimate = 0.0;
  double det() const;
};

using SymbolFunction = std::function<DenseMatrix(std::span<const double> theta)>;

// Numerical rank with the relative cutoff; throws IllConditioned if a singular
// value lies within [eps/10, 10 eps] of the largest.
int numerical_rank(const Eigen::VectorXd& singular_values, double epsilon);
// Rank of the symbol at generic points (finite model: the single realization).
int generic_rank(const AlgebraModel& model, const SymbolFunction& symbol, double epsilon);

// ln Det' = (1/N) * mean over the torus of sum of ln of the nonzero singular values.
DetResult spectral_log_det(const AlgebraModel& model, const SymbolFunction& symbol,
                           const DetOptions& options = {});
DetResult fk_det(const GroupRingMatrix& m, const DetOptions& options = {});

double vn_dim(int rank);
// Trace of a projection; throws NotProjection.
double vn_dim(const GroupRingMatrix& projection, double tol = 1e-9);

}  // namespace l2t
