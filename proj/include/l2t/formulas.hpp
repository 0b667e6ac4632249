#pragma once

#include <optional>
#include <string>
#include <vector>

#include "l2t/spaces.hpp"

namespace l2t {

// Torsion of one factor of a formula, with the failure recorded instead of thrown.
struct FactorTorsion {
  std::string name;
  std::optional<double> log_value;
  bool determinant_class = true;
  bool weakly_acyclic = true;
  LineExpr line;
  std::string error;  // set when the factor could not be trivialized
};

// Torsion of the long exact cohomology sequence of 0 -> L -> M -> N -> 0,
// V_{3k} = H^k(L), V_{3k+1} = H^k(M), V_{3k+2} = H^k(N), log = sum_j (-1)^j ln Det'(V_j -> V_{j+1}).
struct LesTorsion {
  double log_value = 0.0;
  std::vector<double> dims;  // von Neumann dimensions of V_j
  LineExpr line;             // (x)_j det(V_j)^{(-1)^j}
};

// alpha[k]: L^k -> M^k and beta[k]: M^k -> N^k must be cochain maps forming a short exact
// sequence in each degree. Throws NotExact.
LesTorsion long_exact_sequence_torsion(const CochainComplex& l, const CochainComplex& m, const CochainComplex& n,
                                       const std::vector<GroupRingMatrix>& alpha,
                                       const std::vector<GroupRingMatrix>& beta, const DetOptions& options = {});

struct SumReport {
  FactorTorsion x, x0, x1, x2;
  std::optional<LesTorsion> les;
  std::optional<double> residual;  // |log rho(X) + log rho(X0) + les - log rho(X1) - log rho(X2)|
  std::optional<double> naturality_residual;  // real-number path, all four weakly acyclic
  double tolerance = 1e-8;
  bool passed = false;
};

SumReport verify_sum(const Pushout& p, const EquivariantCWComplex& x0, const EquivariantCWComplex& x1,
                     const EquivariantCWComplex& x2, const CoefficientSystem& h, const PreferredVolume& sigma = {},
                     double tol = 1e-8, const DetOptions& options = {});

struct ProductReport {
  FactorTorsion product, x1, x2;
  int chi1 = 0, chi2 = 0;
  std::optional<double> lhs, rhs;  // log rho(X1 x X2), chi2 log rho(X1) + chi1 log rho(X2)
  std::optional<double> residual;
  std::optional<double> naturality_residual;
  double tolerance = 1e-8;
  bool passed = false;
};

// Throws DimensionNotOne, UnsupportedModelPair.
ProductReport verify_product(const EquivariantCWComplex& x1, const CoefficientSystem& h1,
                             const EquivariantCWComplex& x2, const CoefficientSystem& h2, double tol = 1e-8,
                             const DetOptions& options = {});

struct TensorDetReport {
  double lhs = 0.0;  // ln Det(alpha1 (x) alpha2)
  double rhs = 0.0;  // dim H2 ln Det alpha1 + dim H1 ln Det alpha2
  double residual = 0.0;
  bool passed = false;
};

// Throws NotInvertible.
TensorDetReport det_tensor_identity_check(const GroupRingMatrix& alpha1, const GroupRingMatrix& alpha2,
                                          double tol = 1e-10, const DetOptions& options = {});

// ---- fibrations ------------------------------------------------------------

// transport[k] is a chain map of the fiber in degree k (rows and columns: fiber k-cells).
struct BaseFace {
  int cell = -1;
  int coefficient = 1;
  ChainMap transport;
};

// A base cell of dimension n. For n = 1, faces are the two endpoints with coefficients
// +1 and -1; for n >= 2, faces are (n-1)-cells and `basepoint` says where the attaching
// sphere's 0-cell goes.
struct BaseCell {
  int dimension = 0;
  std::vector<BaseFace> faces;
  std::optional<BaseFace> basepoint;
};

struct Bundle {
  EquivariantCWComplex fiber;  // the fiber's cover, over the group of the total space
  std::vector<BaseCell> base;  // cell-ordered: faces refer to earlier cells
  bool fiber_injective = true;  // user-asserted pi_1(F) -> pi_1(E) injectivity
  std::string name = "E";
};

// Cellular chain data of the base (trivial group). Throws BadBundle.
EquivariantCWComplex base_space(const Bundle& b);
// Cells f x e: degree k lists base cells in order, then fiber cells; the boundary is
// d(f x e) = df x e + (-1)^{|f|} sum_faces c T(f) x face. Throws BadBundle, MissingTransport.
EquivariantCWComplex total_space(const Bundle& b, int base_cells = -1);
// The trivial bundle F x B with identity transports.
Bundle trivial_bundle(const EquivariantCWComplex& fiber, const EquivariantCWComplex& base);

struct FibrationStep {
  int base_cell = 0;
  int dimension = 0;
  SumReport sum;
  std::optional<ProductReport> disk, sphere;
};

struct FibrationReport {
  int chi_base = 0, chi_fiber = 0;
  FactorTorsion total, fiber;
  std::optional<double> residual;  // |log rho(E) - chi(B) log rho(F)|
  std::vector<FibrationStep> steps;
  std::string injectivity_note;
  double tolerance = 1e-8;
  bool passed = false;
};

// Throws EulerNotZero, MissingTransport, BadBundle, NotUnimodular.
FibrationReport verify_fibration(const Bundle& b, const CoefficientSystem& h, const PreferredVolume& sigma = {},
                                 double tol = 1e-8, const DetOptions& options = {});

struct BuiltinBundle {
  Bundle bundle;
  CoefficientSystem coefficients;
};

// klein_bottle: S^1 over S^1 with the orientation-reversing gluing, l2(D_4) coefficients;
// circle_x_sphere: circle_Z fiber over S^2; circle_x_circle: circle_Z fiber over S^1;
// sphere_x_circle: S^2 fiber over S^1 (chi(F) = 2).
BuiltinBundle builtin_bundle(std::string_view name);

}  // namespace l2t
