#pragma once

#include <optional>
#include <string>
#include <vector>

#include "l2t/detline.hpp"
#include "l2t/hilbmod.hpp"

namespace l2t {

// C^0 -> C^1 -> ... -> C^n with d^i: C^i -> C^{i+1}. The grams of the modules are
// the preferred inner products.
class CochainComplex {
 public:
  CochainComplex(AlgebraModel algebra, std::vector<HilbertianModule> modules,
                 std::vector<GroupRingMatrix> differentials, std::string name = "C");

  const AlgebraModel& algebra() const noexcept { return algebra_; }
  const std::string& name() const noexcept { return name_; }
  int length() const noexcept { return static_cast<int>(modules_.size()); }
  const std::vector<HilbertianModule>& modules() const noexcept { return modules_; }
  const HilbertianModule& module(int i) const { return modules_.at(i); }
  int rank(int i) const { return i >= 0 && i < length() ? modules_[i].rank() : 0; }
  // Zero matrix outside 0 <= i < length-1.
  GroupRingMatrix differential_matrix(int i) const;
  Morphism differential(int i) const;
  int euler_characteristic() const;

  CochainComplex with_grams(const std::vector<GroupRingMatrix>& grams) const;
  CochainComplex renamed(std::string name) const;

  std::string cohomology_label(int i) const { return "H^" + std::to_string(i) + "(" + name_ + ")"; }
  std::string chain_label(int i) const { return "C^" + std::to_string(i) + "(" + name_ + ")"; }

 private:
  AlgebraModel algebra_;
  std::vector<HilbertianModule> modules_;
  std::vector<GroupRingMatrix> differentials_;
  std::string name_;
};

struct ComplexDiagnostics {
  std::vector<double> d_squared;  // max |coefficient| of d^{i+1} d^i
  bool grams_positive = true;
};

ComplexDiagnostics validate(const CochainComplex& c, double tol = kComplexTolerance);

struct CohomologyData {
  std::vector<double> betti;
  std::vector<DetResult> differentials;  // spectral data of d^i
  std::vector<int> generic_ranks;        // rank of realized d^i
  bool determinant_class = true;
  bool weakly_acyclic = true;
};

CohomologyData cohomology(const CochainComplex& c, const DetOptions& options = {});

struct TorsionReport {
  std::optional<double> log_value;  // withheld when not of determinant class
  LineElement element;              // in det H^*(C)
  bool determinant_class = true;
  bool weakly_acyclic = true;
  std::string trivialization;
  std::vector<double> betti;
  std::vector<double> log_dets;  // ln Det'(d^i)

  // Throws NotDeterminantClass.
  double value() const;
  const LineExpr& line() const { return element.line; }
};

// log rho = sum_i (-1)^i ln Det'(d^i), harmonic trivialization.
TorsionReport torsion(const CochainComplex& c, const DetOptions& options = {});

// M^i = L^i + N^i with d_M = [[d_L, t], [0, d_N]], twist[i]: N^i -> L^{i+1}.
CochainComplex twisted_sum(const CochainComplex& l, const CochainComplex& n,
                           const std::vector<GroupRingMatrix>& twist, std::string name = {});
// t^i = d_L^i h^i - h^{i+1} d_N^i for h^i: N^i -> L^i; always a valid twist.
std::vector<GroupRingMatrix> homotopy_twist(const CochainComplex& l, const CochainComplex& n,
                                            const std::vector<GroupRingMatrix>& h);
CochainComplex direct_sum(const CochainComplex& a, const CochainComplex& b, std::string name = {});

// Total complex; degree k lists C1^a (x) C2^{k-a} for a ascending, Kronecker order inside.
CochainComplex tensor_complexes(const CochainComplex& c1, const CochainComplex& c2, std::string name = {});

// Prepends a zero module: degree i becomes degree i+1.
CochainComplex shift_up(const CochainComplex& c);

// Per degree, the normalized ln|det| of the map taking a harmonic orthonormal basis
// for the grams of `before` to the harmonic orthonormal basis for the grams of `after`
// (same differentials).
std::vector<double> cohomology_volume_change(const CochainComplex& before, const CochainComplex& after,
                                             const DetOptions& options = {});
TrivializationContext trivialization_context(const CochainComplex& before, const CochainComplex& after,
                                             const DetOptions& options = {});

}  // namespace l2t
