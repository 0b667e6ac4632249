#pragma once

#include <memory>
#include <optional>
#include <string>

#include "l2t/algebra.hpp"

namespace l2t {

// Self-adjoint with positive realized spectrum, else NotPositive.
void require_positive(const GroupRingMatrix& m);

// Free module A^n with an admissible inner product <x, y> = y^* G x given by a
// positive gram matrix G over the group ring (identity when standard).
class HilbertianModule {
 public:
  HilbertianModule(AlgebraModel algebra, int rank, std::string label = {});
  HilbertianModule(AlgebraModel algebra, int rank, GroupRingMatrix gram, std::string label);

  const AlgebraModel& algebra() const noexcept { return gram_.model(); }
  int rank() const noexcept { return rank_; }
  const GroupRingMatrix& gram() const noexcept { return gram_; }
  bool standard() const noexcept { return standard_; }
  const std::string& label() const noexcept { return label_; }
  double vn_dimension() const { return vn_dim(rank_); }

  HilbertianModule with_gram(GroupRingMatrix gram) const;
  HilbertianModule relabeled(std::string label) const;

  // Upper triangular W with realized gram = W^* W, so W x has standard coordinates.
  DenseMatrix gram_factor(std::span<const double> theta) const;
  DenseMatrix gram_factor_inverse(std::span<const double> theta) const;

  bool same_space(const HilbertianModule& other) const;

 private:
  int rank_;
  GroupRingMatrix gram_;
  bool standard_;
  std::string label_;
  std::shared_ptr<const Realization> gram_real_;
};

HilbertianModule direct_sum(const HilbertianModule& a, const HilbertianModule& b, std::string label = {});
HilbertianModule tensor(const HilbertianModule& a, const HilbertianModule& b);

// Equivariant map between Hilbertian modules given by left multiplication with a
// group-ring matrix (target rank x source rank).
class Morphism {
 public:
  Morphism(HilbertianModule source, HilbertianModule target, GroupRingMatrix matrix);

  const HilbertianModule& source() const noexcept { return source_; }
  const HilbertianModule& target() const noexcept { return target_; }
  const GroupRingMatrix& matrix() const noexcept { return matrix_; }
  const AlgebraModel& algebra() const noexcept { return matrix_.model(); }

  // Realization in orthonormal coordinates: W_target * M(theta) * W_source^{-1}.
  DenseMatrix symbol(std::span<const double> theta) const;
  SymbolFunction symbol_function() const;

 private:
  HilbertianModule source_, target_;
  GroupRingMatrix matrix_;
  std::shared_ptr<const Realization> real_;
};

Morphism adjoint(const Morphism& f);
Morphism compose(const Morphism& g, const Morphism& f);  // g after f
Morphism tensor(const Morphism& f1, const Morphism& f2);
DetResult det_prime(const Morphism& f, const DetOptions& options = {});

struct ExtendedObject {
  Morphism alpha;  // A' -> A
};

struct TorsionPart {
  double image_dimension = 0.0;  // vn dimension of the closure of im(alpha)
  double log_det = 0.0;          // ln Det' of alpha restricted off its kernel
  bool bounded_below = true;     // closed image: corestriction is an isomorphism
  bool determinant_class = true;
  bool trivial() const { return bounded_below; }
};

struct TPDecomposition {
  TorsionPart torsion;
  double projective_dimension = 0.0;
  std::optional<DenseMatrix> projective_projection;  // finite models
};

TPDecomposition tp_decompose(const ExtendedObject& x, const DetOptions& options = {});

struct HarmonicProjection {
  double betti = 0.0;
  std::optional<DenseMatrix> projection;  // finite models, orthonormal coordinates
};

HarmonicProjection harmonic_projection(const Morphism& d_in, const Morphism& d_out,
                                       const DetOptions& options = {});

// Tolerance used for d^2 = 0 style checks on group-ring products.
inline constexpr double kComplexTolerance = 1e-10;

}  // namespace l2t
