#include "l2t/hilbmod.hpp"

#include <cmath>

namespace l2t {

void require_positive(const GroupRingMatrix& gram) {
  if (!gram.is_square()) fail(ErrorKind::NotPositive, "operator is not square");
  const double scale = std::max(1.0, gram.max_abs());
  if ((gram.star() - gram).max_abs() > 1e-12 * scale)
    fail(ErrorKind::NotPositive, "gram is not self-adjoint");
  const Realization real(gram);
  auto check_at = [&](std::span<const double> theta) {
    const DenseMatrix g = real.at(theta);
    if (g.rows() == 0) return;
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(g, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff()))
      fail(ErrorKind::NotPositive, "gram is not positive definite");
  };
  if (gram.model().is_finite()) {
    check_at({});
  } else {
    for (const auto& t : generic_sample_points(gram.model().torus_rank())) check_at(t);
  }
}

namespace {

DenseMatrix cholesky_upper(const DenseMatrix& g) {
  Eigen::LLT<DenseMatrix> llt(g);
  if (llt.info() != Eigen::Success) fail(ErrorKind::NotPositive, "gram factorization failed");
  return llt.matrixU();
}

}  // namespace

HilbertianModule::HilbertianModule(AlgebraModel algebra, int rank, std::string label)
    : rank_(rank),
      gram_(GroupRingMatrix::identity(algebra, rank)),
      standard_(true),
      label_(std::move(label)) {
  if (rank < 0) fail(ErrorKind::BadParams, "module rank must be nonnegative");
}

HilbertianModule::HilbertianModule(AlgebraModel algebra, int rank, GroupRingMatrix gram, std::string label)
    : rank_(rank), gram_(std::move(gram)), standard_(false), label_(std::move(label)) {
  if (rank < 0) fail(ErrorKind::BadParams, "module rank must be nonnegative");
  if (!(gram_.model() == algebra)) fail(ErrorKind::ModelMismatch, "gram over a different algebra");
  if (gram_ == GroupRingMatrix::identity(algebra, rank)) {
    standard_ = true;
    return;
  }
  if (gram_.rows() != rank || gram_.cols() != rank)
    fail(ErrorKind::ShapeMismatch, "gram must be rank x rank");
  require_positive(gram_);
  gram_real_ = std::make_shared<const Realization>(gram_);
}

HilbertianModule HilbertianModule::with_gram(GroupRingMatrix gram) const {
  return HilbertianModule(algebra(), rank_, std::move(gram), label_);
}

HilbertianModule HilbertianModule::relabeled(std::string label) const {
  HilbertianModule out(*this);
  out.label_ = std::move(label);
  return out;
}

DenseMatrix HilbertianModule::gram_factor(std::span<const double> theta) const {
  const Eigen::Index n = static_cast<Eigen::Index>(rank_) * algebra().group_order();
  if (standard_) return DenseMatrix::Identity(n, n);
  return cholesky_upper(gram_real_->at(theta));
}

DenseMatrix HilbertianModule::gram_factor_inverse(std::span<const double> theta) const {
  const Eigen::Index n = static_cast<Eigen::Index>(rank_) * algebra().group_order();
  if (standard_) return DenseMatrix::Identity(n, n);
  const DenseMatrix w = gram_factor(theta);
  return w.triangularView<Eigen::Upper>().solve(DenseMatrix::Identity(n, n));
}

bool HilbertianModule::same_space(const HilbertianModule& other) const {
  return rank_ == other.rank_ && algebra() == other.algebra() &&
         (standard_ == other.standard_) && (standard_ || gram_ == other.gram_);
}

HilbertianModule direct_sum(const HilbertianModule& a, const HilbertianModule& b, std::string label) {
  if (label.empty()) label = a.label() + "+" + b.label();
  if (a.standard() && b.standard()) return HilbertianModule(a.algebra(), a.rank() + b.rank(), label);
  return HilbertianModule(a.algebra(), a.rank() + b.rank(),
                          GroupRingMatrix::block_diagonal(a.gram(), b.gram()), label);
}

HilbertianModule tensor(const HilbertianModule& a, const HilbertianModule& b) {
  const std::string label = a.label() + "*" + b.label();
  if (a.standard() && b.standard())
    return HilbertianModule(tensor(a.algebra(), b.algebra()), a.rank() * b.rank(), label);
  GroupRingMatrix g = kron(a.gram(), b.gram());
  return HilbertianModule(g.model(), a.rank() * b.rank(), g, label);
}

// ---- Morphism --------------------------------------------------------------

Morphism::Morphism(HilbertianModule source, HilbertianModule target, GroupRingMatrix matrix)
    : source_(std::move(source)), target_(std::move(target)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != target_.rank() || matrix_.cols() != source_.rank())
    fail(ErrorKind::ShapeMismatch, "morphism matrix is " + std::to_string(matrix_.rows()) + "x" +
                                       std::to_string(matrix_.cols()) + ", modules have ranks " +
                                       std::to_string(source_.rank()) + " -> " +
                                       std::to_string(target_.rank()));
  if (!(matrix_.model() == source_.algebra()) || !(matrix_.model() == target_.algebra()))
    fail(ErrorKind::ModelMismatch, "morphism over a different algebra");
  real_ = std::make_shared<const Realization>(matrix_);
}

DenseMatrix Morphism::symbol(std::span<const double> theta) const {
  DenseMatrix m = real_->at(theta);
  if (!target_.standard()) m = target_.gram_factor(theta) * m;
  if (!source_.standard()) m = m * source_.gram_factor_inverse(theta);
  return m;
}

SymbolFunction Morphism::symbol_function() const {
  return [self = *this](std::span<const double> theta) { return self.symbol(theta); };
}

Morphism adjoint(const Morphism& f) {
  GroupRingMatrix m = f.matrix().star();
  if (!f.target().standard()) m = m * f.target().gram();
  if (!f.source().standard()) {
    if (!f.algebra().is_finite())
      fail(ErrorKind::Unsupported, "adjoint with a non-standard source gram over a torus model");
    const DenseMatrix ginv = realize(f.source().gram()).dense().inverse();
    m = derealize(f.algebra(), ginv, f.source().rank(), f.source().rank()) * m;
  }
  return Morphism(f.target(), f.source(), std::move(m));
}

Morphism compose(const Morphism& g, const Morphism& f) {
  if (!f.target().same_space(g.source()))
    fail(ErrorKind::ShapeMismatch, "compose: target of f is not the source of g");
  return Morphism(f.source(), g.target(), g.matrix() * f.matrix());
}

Morphism tensor(const Morphism& f1, const Morphism& f2) {
  return Morphism(tensor(f1.source(), f2.source()), tensor(f1.target(), f2.target()),
                  kron(f1.matrix(), f2.matrix()));
}

DetResult det_prime(const Morphism& f, const DetOptions& options) {
  if (f.source().standard() && f.target().standard() && f.matrix().is_square())
    return fk_det(f.matrix(), options);
  return spectral_log_det(f.algebra(), f.symbol_function(), options);
}

TPDecomposition tp_decompose(const ExtendedObject& x, const DetOptions& options) {
  const Morphism& a = x.alpha;
  const double n_group = a.algebra().group_order();
  TPDecomposition out;
  const DetResult det = spectral_log_det(a.algebra(), a.symbol_function(), options);
  out.torsion.image_dimension = det.generic_rank / n_group;
  out.torsion.log_det = det.log_det;
  out.torsion.bounded_below = det.bounded_below;
  out.torsion.determinant_class = det.determinant_class;
  out.projective_dimension = a.target().rank() - out.torsion.image_dimension;
  if (a.algebra().is_finite()) {
    const DenseMatrix m = a.symbol({});
    const Eigen::Index n = m.rows();
    if (m.cols() == 0 || det.generic_rank == 0) {
      out.projective_projection = DenseMatrix::Identity(n, n);
    } else {
      Eigen::JacobiSVD<DenseMatrix> svd(m, Eigen::ComputeFullU);
      const DenseMatrix u = svd.matrixU().leftCols(det.generic_rank);
      out.projective_projection = DenseMatrix::Identity(n, n) - u * u.adjoint();
    }
  }
  return out;
}

HarmonicProjection harmonic_projection(const Morphism& d_in, const Morphism& d_out, const DetOptions& options) {
  if (!d_in.target().same_space(d_out.source()))
    fail(ErrorKind::ShapeMismatch, "harmonic_projection: d_in and d_out do not meet");
  const GroupRingMatrix comp = d_out.matrix() * d_in.matrix();
  const double scale = std::max(1.0, d_out.matrix().max_abs() * d_in.matrix().max_abs());
  if (comp.max_abs() > kComplexTolerance * scale)
    fail(ErrorKind::NotComplex, "d_out * d_in has coefficient of size " + std::to_string(comp.max_abs()));
  const AlgebraModel& model = d_in.algebra();
  const double n_group = model.group_order();
  const int rank = d_in.target().rank();
  HarmonicProjection out;
  if (model.is_finite()) {
    const DenseMatrix a = d_out.symbol({});
    const DenseMatrix b = d_in.symbol({});
    const Eigen::Index n = static_cast<Eigen::Index>(rank) * model.group_order();
    DenseMatrix stacked(a.rows() + b.cols(), n);
    stacked << a, b.adjoint();
    if (stacked.rows() == 0 || n == 0) {
      out.betti = rank;
      out.projection = DenseMatrix::Identity(n, n);
      return out;
    }
    Eigen::JacobiSVD<DenseMatrix> svd(stacked, Eigen::ComputeFullV);
    const int r = numerical_rank(svd.singularValues(), options.epsilon);
    const DenseMatrix k = svd.matrixV().rightCols(n - r);
    out.projection = k * k.adjoint();
    out.betti = (n - r) / n_group;
    return out;
  }
  const int r_out = generic_rank(model, d_out.symbol_function(), options.epsilon);
  const int r_in = generic_rank(model, d_in.symbol_function(), options.epsilon);
  out.betti = rank - (r_in + r_out) / n_group;
  return out;
}

}  // namespace l2t
