#pragma once

// Realizations of whole complexes at a single angle, shared by the torsion
// bookkeeping in complex.cpp and formulas.cpp.

#include <vector>

#include "l2t/complex.hpp"

namespace l2t::detail {

struct PointwiseComplex {
  std::vector<DenseMatrix> d;       // orthonormal coordinates, d[i]: C^i -> C^{i+1}
  std::vector<Eigen::Index> dims;   // realized dimension of C^i
};

class ComplexRealizer {
 public:
  explicit ComplexRealizer(const CochainComplex& c);
  PointwiseComplex at(std::span<const double> theta) const;
  const CochainComplex& complex() const { return *c_; }

 private:
  const CochainComplex* c_;
  std::vector<Morphism> d_;
};

// Rank of each realized differential (finite: cutoff with ill-conditioning check;
// torus: maximum over generic sample points).
std::vector<int> differential_ranks(const CochainComplex& c, double epsilon);

// Orthonormal basis (columns) of ker d^i and of (im d^{i-1})^perp at this point.
DenseMatrix harmonic_basis(const PointwiseComplex& p, int degree, const std::vector<int>& ranks);

// Sum of ln of the largest `count` singular values.
double log_top_singular(const DenseMatrix& m, int count);

}  // namespace l2t::detail
