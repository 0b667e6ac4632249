#include "l2t/detline.hpp"

#include <cmath>
#include <sstream>

namespace l2t {

LineExpr LineExpr::atom(std::string label, int exponent) {
  LineExpr e;
  e.merge(label, exponent);
  return e;
}

void LineExpr::merge(const std::string& label, int exponent) {
  for (auto it = atoms_.begin(); it != atoms_.end(); ++it) {
    if (it->label == label) {
      it->exponent += exponent;
      if (it->exponent == 0) atoms_.erase(it);
      return;
    }
  }
  if (exponent != 0) atoms_.push_back(LineAtom{label, exponent});
}

int LineExpr::exponent_of(std::string_view label) const {
  for (const auto& a : atoms_)
    if (a.label == label) return a.exponent;
  return 0;
}

LineExpr LineExpr::tensor(const LineExpr& other) const {
  LineExpr out(*this);
  for (const auto& a : other.atoms_) out.merge(a.label, a.exponent);
  return out;
}

LineExpr LineExpr::dual() const { return power(-1); }

LineExpr LineExpr::power(int k) const {
  LineExpr out;
  for (const auto& a : atoms_) out.merge(a.label, a.exponent * k);
  return out;
}

std::string LineExpr::to_string() const {
  if (atoms_.empty()) return "R";
  std::ostringstream os;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (i) os << " (x) ";
    os << "det(" << atoms_[i].label << ")";
    if (atoms_[i].exponent != 1) os << "^" << atoms_[i].exponent;
  }
  return os.str();
}

LineExpr graded_alternating(const std::vector<LineExpr>& per_degree) {
  LineExpr out;
  for (std::size_t i = 0; i < per_degree.size(); ++i)
    out = out.tensor(per_degree[i].power(i % 2 == 0 ? 1 : -1));
  return out;
}

double LineElement::scalar() const { return (positive ? 1.0 : -1.0) * std::exp(log_scalar); }

LineElement LineElement::tensor(const LineElement& other) const {
  return LineElement{line.tensor(other.line), log_scalar + other.log_scalar, positive == other.positive};
}

LineElement LineElement::dual() const { return LineElement{line.dual(), -log_scalar, positive}; }

LineElement rescale_inner_product(const LineElement& e, const GroupRingMatrix& alpha, std::string_view atom,
                                  const DetOptions& options) {
  int exponent = 0;
  if (atom.empty()) {
    if (e.line.atoms().size() != 1)
      fail(ErrorKind::InvalidInput, "rescale needs an atom label for a line with " +
                                        std::to_string(e.line.atoms().size()) + " atoms");
    exponent = e.line.atoms().front().exponent;
  } else {
    exponent = e.line.exponent_of(atom);
  }
  if (!alpha.is_square()) fail(ErrorKind::NotPositive, "alpha is not square");
  require_positive(alpha);
  const DetResult det = fk_det(alpha, options);
  if (!det.invertible) fail(ErrorKind::NotPositive, "alpha is not invertible");
  LineElement out(e);
  out.log_scalar += -0.5 * exponent * det.log_det;
  return out;
}

double LineIsomorphism::factor() const { return std::exp(log_factor); }

LineIsomorphism ses_iso(const Morphism& alpha, const Morphism& beta, const DetOptions& options) {
  if (!alpha.target().same_space(beta.source()))
    fail(ErrorKind::NotExact, "alpha and beta do not compose");
  const int n1 = alpha.source().rank(), n = alpha.target().rank(), n2 = beta.target().rank();
  if (n1 + n2 != n) fail(ErrorKind::NotExact, "ranks do not add up");
  const GroupRingMatrix comp = beta.matrix() * alpha.matrix();
  const double scale = std::max(1.0, alpha.matrix().max_abs() * beta.matrix().max_abs());
  if (comp.max_abs() > kComplexTolerance * scale) fail(ErrorKind::NotExact, "beta * alpha != 0");

  const AlgebraModel& model = alpha.algebra();
  const auto assembled = [&](std::span<const double> theta) {
    const DenseMatrix a = alpha.symbol(theta);
    const DenseMatrix b = beta.symbol(theta);
    DenseMatrix out(a.rows(), a.cols() + b.rows());
    if (b.rows() > 0) {
      const DenseMatrix bbt = b * b.adjoint();
      Eigen::FullPivLU<DenseMatrix> lu(bbt);
      if (!lu.isInvertible()) fail(ErrorKind::NotExact, "beta is not surjective");
      out << a, b.adjoint() * lu.inverse();
    } else {
      out << a;
    }
    return out;
  };
  const DetResult det = spectral_log_det(model, assembled, options);
  if (!det.invertible) fail(ErrorKind::NotExact, "sequence is not exact");
  LineIsomorphism iso;
  iso.source = LineExpr::atom(alpha.source().label()).tensor(LineExpr::atom(beta.target().label()));
  iso.target = LineExpr::atom(alpha.target().label());
  iso.log_factor = det.log_det;
  return iso;
}

LineIsomorphism pushforward(const Morphism& f, const DetOptions& options) {
  if (!f.matrix().is_square()) fail(ErrorKind::NotInvertible, "pushforward needs a square morphism");
  const DetResult det = det_prime(f, options);
  if (!det.invertible) fail(ErrorKind::NotInvertible, "morphism is not invertible");
  LineIsomorphism iso;
  iso.source = LineExpr::atom(f.source().label());
  iso.target = LineExpr::atom(f.target().label());
  iso.log_factor = det.log_det;
  return iso;
}

double trivialize(const LineElement& e, const TrivializationContext& context) {
  if (!context.determinant_class)
    fail(ErrorKind::NotDeterminantClass, "context is not of determinant class");
  double out = e.log_scalar;
  for (const auto& a : e.line.atoms()) {
    auto it = context.log_generator_change.find(a.label);
    if (it != context.log_generator_change.end()) out += a.exponent * it->second;
  }
  return out;
}

}  // namespace l2t
