#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "l2t/hilbmod.hpp"

namespace l2t {

struct LineAtom {
  std::string label;
  int exponent = 1;
  bool operator==(const LineAtom&) const = default;
};

// Formal tensor word of determinant lines. Atoms keep first-appearance order;
// repeated labels merge and zero exponents drop out.
class LineExpr {
 public:
  LineExpr() = default;
  static LineExpr atom(std::string label, int exponent = 1);

  const std::vector<LineAtom>& atoms() const noexcept { return atoms_; }
  bool trivial() const noexcept { return atoms_.empty(); }
  int exponent_of(std::string_view label) const;

  LineExpr tensor(const LineExpr& other) const;
  LineExpr dual() const;
  LineExpr power(int k) const;

  std::string to_string() const;
  bool operator==(const LineExpr&) const = default;

 private:
  void merge(const std::string& label, int exponent);
  std::vector<LineAtom> atoms_;
};

// (det X^0)^{+1} (det X^1)^{-1} ...
LineExpr graded_alternating(const std::vector<LineExpr>& per_degree);

// Element of a line: log of its scalar relative to the canonical generator
// (the designated inner products of the atoms).
struct LineElement {
  LineExpr line;
  double log_scalar = 0.0;
  bool positive = true;

  double scalar() const;
  LineElement tensor(const LineElement& other) const;
  LineElement dual() const;
};

// Scalar times Det'(alpha)^{-e/2}, e the exponent of `atom` in the line (the line's
// single atom when `atom` is empty). Throws NotPositive.
LineElement rescale_inner_product(const LineElement& e, const GroupRingMatrix& alpha,
                                  std::string_view atom = {}, const DetOptions& options = {});

struct LineIsomorphism {
  LineExpr source, target;
  double log_factor = 0.0;
  double factor() const;
};

// det H' (x) det H'' -> det H for 0 -> H' -> H -> H'' -> 0, with factor
// Det'[alpha | beta^*(beta beta^*)^{-1}]. Throws NotExact.
LineIsomorphism ses_iso(const Morphism& alpha, const Morphism& beta, const DetOptions& options = {});
// det A -> det B with factor Det'(f). Throws NotInvertible.
LineIsomorphism pushforward(const Morphism& f, const DetOptions& options = {});

// Per-atom log change of canonical generators between the element's trivialization
// and the requested one (missing atoms: no change).
struct TrivializationContext {
  bool determinant_class = true;
  std::map<std::string, double> log_generator_change;
  std::string description;
};

// Log of the real number obtained from e. Throws NotDeterminantClass.
double trivialize(const LineElement& e, const TrivializationContext& context);

}  // namespace l2t
