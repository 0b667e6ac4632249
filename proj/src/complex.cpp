#include "l2t/complex.hpp"

#include <cmath>

#include "pointwise.hpp"

namespace l2t {

// ---- CochainComplex --------------------------------------------------------

CochainComplex::CochainComplex(AlgebraModel algebra, std::vector<HilbertianModule> modules,
                               std::vector<GroupRingMatrix> differentials, std::string name)
    : algebra_(std::move(algebra)), modules_(std::move(modules)), differentials_(std::move(differentials)),
      name_(std::move(name)) {
  const int n = length();
  if (n == 0 && !differentials_.empty()) fail(ErrorKind::ShapeMismatch, "differentials without modules");
  if (n > 0 && static_cast<int>(differentials_.size()) != n - 1)
    fail(ErrorKind::ShapeMismatch, "complex with " + std::to_string(n) + " modules needs " +
                                       std::to_string(n - 1) + " differentials");
  for (int i = 0; i < n; ++i) {
    if (!(modules_[i].algebra() == algebra_)) fail(ErrorKind::ModelMismatch, "module over a different algebra");
    if (modules_[i].label().empty()) modules_[i] = modules_[i].relabeled(chain_label(i));
  }
  for (int i = 0; i + 1 < n; ++i) {
    const auto& d = differentials_[i];
    if (d.rows() != modules_[i + 1].rank() || d.cols() != modules_[i].rank())
      fail(ErrorKind::ShapeMismatch, "d^" + std::to_string(i) + " is " + std::to_string(d.rows()) + "x" +
                                         std::to_string(d.cols()) + ", expected " +
                                         std::to_string(modules_[i + 1].rank()) + "x" +
                                         std::to_string(modules_[i].rank()));
    differentials_[i] = d.rebased(algebra_);
  }
}

GroupRingMatrix CochainComplex::differential_matrix(int i) const {
  if (i >= 0 && i + 1 < length()) return differentials_[i];
  return GroupRingMatrix::zero(algebra_, rank(i + 1), rank(i));
}

Morphism CochainComplex::differential(int i) const {
  if (i < 0 || i + 1 >= length()) fail(ErrorKind::ShapeMismatch, "no differential d^" + std::to_string(i));
  return Morphism(modules_[i], modules_[i + 1], differentials_[i]);
}

int CochainComplex::euler_characteristic() const {
  int chi = 0;
  for (int i = 0; i < length(); ++i) chi += (i % 2 == 0 ? 1 : -1) * modules_[i].rank();
  return chi;
}

CochainComplex CochainComplex::with_grams(const std::vector<GroupRingMatrix>& grams) const {
  if (static_cast<int>(grams.size()) != length()) fail(ErrorKind::ShapeMismatch, "one gram per degree");
  std::vector<HilbertianModule> mods;
  for (int i = 0; i < length(); ++i) mods.push_back(modules_[i].with_gram(grams[i].rebased(algebra_)));
  return CochainComplex(algebra_, std::move(mods), differentials_, name_);
}

CochainComplex CochainComplex::renamed(std::string name) const {
  CochainComplex out(*this);
  out.name_ = std::move(name);
  for (int i = 0; i < length(); ++i) out.modules_[i] = out.modules_[i].relabeled(out.chain_label(i));
  return out;
}

// ---- pointwise helpers -----------------------------------------------------

namespace detail {

ComplexRealizer::ComplexRealizer(const CochainComplex& c) : c_(&c) {
  for (int i = 0; i + 1 < c.length(); ++i) d_.push_back(c.differential(i));
}

PointwiseComplex ComplexRealizer::at(std::span<const double> theta) const {
  PointwiseComplex p;
  const Eigen::Index n = c_->algebra().group_order();
  for (int i = 0; i < c_->length(); ++i) p.dims.push_back(n * c_->rank(i));
  for (const auto& d : d_) p.d.push_back(d.symbol(theta));
  return p;
}

std::vector<int> differential_ranks(const CochainComplex& c, double epsilon) {
  std::vector<int> ranks;
  for (int i = 0; i + 1 < c.length(); ++i) {
    const Morphism d = c.differential(i);
    if (c.algebra().is_finite()) {
      const DenseMatrix m = d.symbol({});
      if (m.size() == 0) {
        ranks.push_back(0);
        continue;
      }
      Eigen::JacobiSVD<DenseMatrix> svd(m);
      ranks.push_back(numerical_rank(svd.singularValues(), epsilon));
    } else {
      ranks.push_back(generic_rank(c.algebra(), d.symbol_function(), epsilon));
    }
  }
  return ranks;
}

DenseMatrix harmonic_basis(const PointwiseComplex& p, int degree, const std::vector<int>& ranks) {
  const int len = static_cast<int>(p.dims.size());
  const Eigen::Index n = p.dims[degree];
  const int r_out = degree + 1 < len ? ranks[degree] : 0;
  const int r_in = degree >= 1 ? ranks[degree - 1] : 0;
  const Eigen::Index b = n - r_in - r_out;
  if (b <= 0) return DenseMatrix(n, 0);
  const Eigen::Index rows_out = degree + 1 < len ? p.dims[degree + 1] : 0;
  const Eigen::Index rows_in = degree >= 1 ? p.dims[degree - 1] : 0;
  if (rows_out + rows_in == 0) return DenseMatrix::Identity(n, n);
  DenseMatrix s(rows_out + rows_in, n);
  if (rows_out) s.topRows(rows_out) = p.d[degree];
  if (rows_in) s.bottomRows(rows_in) = p.d[degree - 1].adjoint();
  Eigen::JacobiSVD<DenseMatrix> svd(s, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(b);
}

double log_top_singular(const DenseMatrix& m, int count) {
  if (count <= 0) return 0.0;
  Eigen::VectorXd sv;
  if (m.rows() == 1 && m.cols() == 1) {
    sv = Eigen::VectorXd::Constant(1, std::abs(m(0, 0)));
  } else {
    Eigen::JacobiSVD<DenseMatrix> svd(m);
    sv = svd.singularValues();
  }
  if (count > sv.size()) fail(ErrorKind::ShapeMismatch, "rank exceeds matrix size");
  double acc = 0.0;
  for (int j = 0; j < count; ++j) acc += std::log(sv[j]);
  return acc;
}

}  // namespace detail

// ---- validation and cohomology --------------------------------------------

ComplexDiagnostics validate(const CochainComplex& c, double tol) {
  ComplexDiagnostics diag;
  for (int i = 0; i + 2 < c.length(); ++i) {
    const GroupRingMatrix a = c.differential_matrix(i);
    const GroupRingMatrix b = c.differential_matrix(i + 1);
    const double size = (b * a).max_abs();
    diag.d_squared.push_back(size);
    const double scale = std::max(1.0, a.max_abs() * b.max_abs() * std::max(1, c.rank(i + 1)));
    if (size > tol * scale)
      fail(ErrorKind::NotComplex, "d^" + std::to_string(i + 1) + " d^" + std::to_string(i) +
                                      " != 0 (largest coefficient " + std::to_string(size) + ")");
  }
  return diag;
}

CohomologyData cohomology(const CochainComplex& c, const DetOptions& options) {
  validate(c);
  CohomologyData out;
  const double n_group = c.algebra().group_order();
  for (int i = 0; i + 1 < c.length(); ++i) {
    const DetResult det = det_prime(c.differential(i), options);
    out.differentials.push_back(det);
    out.generic_ranks.push_back(det.generic_rank);
    out.determinant_class = out.determinant_class && det.determinant_class;
  }
  for (int i = 0; i < c.length(); ++i) {
    const int r_in = i >= 1 ? out.generic_ranks[i - 1] : 0;
    const int r_out = i + 1 < c.length() ? out.generic_ranks[i] : 0;
    double b = c.rank(i) - (r_in + r_out) / n_group;
    if (std::abs(b) < 0.25 / n_group) b = 0.0;
    out.betti.push_back(b);
    if (b != 0.0) out.weakly_acyclic = false;
  }
  return out;
}

double TorsionReport::value() const {
  if (!log_value) fail(ErrorKind::NotDeterminantClass, "torsion is not of determinant class");
  return *log_value;
}

TorsionReport torsion(const CochainComplex& c, const DetOptions& options) {
  const CohomologyData data = cohomology(c, options);
  TorsionReport rep;
  rep.betti = data.betti;
  rep.determinant_class = data.determinant_class;
  rep.weakly_acyclic = data.weakly_acyclic;
  rep.trivialization = "harmonic representatives with the induced inner products";
  double log_rho = 0.0;
  for (std::size_t i = 0; i < data.differentials.size(); ++i) {
    rep.log_dets.push_back(data.differentials[i].log_det);
    log_rho += (i % 2 == 0 ? 1.0 : -1.0) * data.differentials[i].log_det;
  }
  std::vector<LineExpr> lines;
  for (int i = 0; i < c.length(); ++i) {
    const bool torsion_part = i >= 1 && !data.differentials[i - 1].bounded_below;
    lines.push_back(data.betti[i] > 0.0 || torsion_part ? LineExpr::atom(c.cohomology_label(i)) : LineExpr());
  }
  rep.element.line = graded_alternating(lines);
  rep.element.log_scalar = log_rho;
  if (rep.determinant_class) rep.log_value = log_rho;
  return rep;
}

// ---- constructions ---------------------------------------------------------

CochainComplex twisted_sum(const CochainComplex& l, const CochainComplex& n,
                           const std::vector<GroupRingMatrix>& twist, std::string name) {
  if (!(l.algebra() == n.algebra())) fail(ErrorKind::ShapeMismatch, "twisted_sum over different algebras");
  if (l.length() != n.length()) fail(ErrorKind::ShapeMismatch, "twisted_sum needs equal lengths");
  const int len = l.length();
  if (!twist.empty() && static_cast<int>(twist.size()) != std::max(0, len - 1))
    fail(ErrorKind::ShapeMismatch, "one twist per differential");
  if (name.empty()) name = l.name() + "+" + n.name();
  const AlgebraModel& model = l.algebra();
  std::vector<HilbertianModule> mods;
  for (int i = 0; i < len; ++i) mods.push_back(direct_sum(l.module(i), n.module(i), {}));
  std::vector<GroupRingMatrix> ds;
  for (int i = 0; i + 1 < len; ++i) {
    GroupRingMatrix t = twist.empty() ? GroupRingMatrix::zero(model, l.rank(i + 1), n.rank(i)) : twist[i];
    if (t.rows() != l.rank(i + 1) || t.cols() != n.rank(i))
      fail(ErrorKind::ShapeMismatch, "twist " + std::to_string(i) + " has the wrong shape");
    const GroupRingMatrix top = GroupRingMatrix::hstack(l.differential_matrix(i), t.rebased(model));
    const GroupRingMatrix bottom =
        GroupRingMatrix::hstack(GroupRingMatrix::zero(model, n.rank(i + 1), l.rank(i)), n.differential_matrix(i));
    ds.push_back(GroupRingMatrix::vstack(top, bottom));
  }
  CochainComplex tmp(model, mods, ds, name);
  return tmp.renamed(name);
}

std::vector<GroupRingMatrix> homotopy_twist(const CochainComplex& l, const CochainComplex& n,
                                            const std::vector<GroupRingMatrix>& h) {
  const int len = l.length();
  if (static_cast<int>(h.size()) != len) fail(ErrorKind::ShapeMismatch, "one homotopy per degree");
  std::vector<GroupRingMatrix> t;
  for (int i = 0; i + 1 < len; ++i)
    t.push_back(l.differential_matrix(i) * h[i] - h[i + 1] * n.differential_matrix(i));
  return t;
}

CochainComplex direct_sum(const CochainComplex& a, const CochainComplex& b, std::string name) {
  return twisted_sum(a, b, {}, std::move(name));
}

CochainComplex tensor_complexes(const CochainComplex& c1, const CochainComplex& c2, std::string name) {
  const AlgebraModel model = tensor(c1.algebra(), c2.algebra());
  if (name.empty()) name = c1.name() + "x" + c2.name();
  const int len1 = c1.length(), len2 = c2.length();
  const int len = (len1 == 0 || len2 == 0) ? 0 : len1 + len2 - 1;
  // offsets[k][a]: position of the C1^a (x) C2^{k-a} block inside degree k.
  std::vector<std::vector<int>> offset(len, std::vector<int>(std::max(len1, 1), -1));
  std::vector<int> total(len, 0);
  for (int k = 0; k < len; ++k)
    for (int a = 0; a < len1; ++a) {
      const int b = k - a;
      if (b < 0 || b >= len2) continue;
      offset[k][a] = total[k];
      total[k] += c1.rank(a) * c2.rank(b);
    }
  bool standard = true;
  for (const auto& m : c1.modules()) standard = standard && m.standard();
  for (const auto& m : c2.modules()) standard = standard && m.standard();
  std::vector<HilbertianModule> mods;
  for (int k = 0; k < len; ++k) {
    if (standard) {
      mods.emplace_back(model, total[k]);
      continue;
    }
    GroupRingMatrix g = GroupRingMatrix::zero(model, total[k], total[k]);
    for (int a = 0; a < len1; ++a) {
      if (offset[k][a] < 0) continue;
      const GroupRingMatrix blk = kron(c1.module(a).gram(), c2.module(k - a).gram()).rebased(model);
      for (int i = 0; i < blk.rows(); ++i)
        for (int j = 0; j < blk.cols(); ++j) g.set(offset[k][a] + i, offset[k][a] + j, blk(i, j));
    }
    mods.emplace_back(model, total[k], g, std::string{});
  }
  std::vector<GroupRingMatrix> ds;
  for (int k = 0; k + 1 < len; ++k) {
    GroupRingMatrix d = GroupRingMatrix::zero(model, total[k + 1], total[k]);
    auto place = [&](const GroupRingMatrix& blk, int row0, int col0) {
      const GroupRingMatrix m = blk.rebased(model);
      for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
          if (!m(i, j).is_zero()) d.add_to(row0 + i, col0 + j, m(i, j));
    };
    for (int a = 0; a < len1; ++a) {
      const int b = k - a;
      if (offset[k][a] < 0) continue;
      if (a + 1 < len1 && offset[k + 1][a + 1] >= 0)
        place(kron(c1.differential_matrix(a), GroupRingMatrix::identity(c2.algebra(), c2.rank(b))),
              offset[k + 1][a + 1], offset[k][a]);
      if (b + 1 < len2 && offset[k + 1][a] >= 0) {
        GroupRingMatrix blk = kron(GroupRingMatrix::identity(c1.algebra(), c1.rank(a)), c2.differential_matrix(b));
        if (a % 2 == 1) blk *= -1.0;
        place(blk, offset[k + 1][a], offset[k][a]);
      }
    }
    ds.push_back(std::move(d));
  }
  return CochainComplex(model, std::move(mods), std::move(ds), name).renamed(name);
}

CochainComplex shift_up(const CochainComplex& c) {
  std::vector<HilbertianModule> mods{HilbertianModule(c.algebra(), 0)};
  for (const auto& m : c.modules()) mods.push_back(m);
  std::vector<GroupRingMatrix> ds;
  if (c.length() > 0) ds.push_back(GroupRingMatrix::zero(c.algebra(), c.rank(0), 0));
  for (int i = 0; i + 1 < c.length(); ++i) ds.push_back(c.differential_matrix(i));
  return CochainComplex(c.algebra(), std::move(mods), std::move(ds), c.name() + "[1]").renamed(c.name() + "[1]");
}

std::vector<double> cohomology_volume_change(const CochainComplex& before, const CochainComplex& after,
                                             const DetOptions& options) {
  if (before.length() != after.length()) fail(ErrorKind::ShapeMismatch, "complexes differ in length");
  for (int i = 0; i + 1 < before.length(); ++i)
    if (!(before.differential_matrix(i) == after.differential_matrix(i)))
      fail(ErrorKind::ShapeMismatch, "volume change needs identical differentials");
  const int len = before.length();
  const std::vector<int> ranks = detail::differential_ranks(before, options.epsilon);
  const detail::ComplexRealizer rb(before), ra(after);
  const TorusIntegrand integrand = [&](std::span<const double> theta, int, std::span<double> out) {
    const detail::PointwiseComplex pb = rb.at(theta), pa = ra.at(theta);
    for (int i = 0; i < len; ++i) {
      const DenseMatrix hb = detail::harmonic_basis(pb, i, ranks);
      if (hb.cols() == 0) {
        out[i] = 0.0;
        continue;
      }
      const DenseMatrix ha = detail::harmonic_basis(pa, i, ranks);
      const DenseMatrix change =
          after.module(i).gram_factor(theta) * before.module(i).gram_factor_inverse(theta);
      const DenseMatrix k = ha.adjoint() * change * hb;
      out[i] = detail::log_top_singular(k, static_cast<int>(k.cols()));
    }
  };
  const double n_group = before.algebra().group_order();
  QuadratureOptions q = options.quadrature;
  q.tolerance *= n_group;
  const QuadratureResult res = integrate_over_torus(before.algebra().torus_rank(), len, integrand, q);
  std::vector<double> out(len);
  for (int i = 0; i < len; ++i) out[i] = res.values[i] / n_group;
  return out;
}

TrivializationContext trivialization_context(const CochainComplex& before, const CochainComplex& after,
                                             const DetOptions& options) {
  TrivializationContext ctx;
  const std::vector<double> change = cohomology_volume_change(before, after, options);
  for (int i = 0; i < before.length(); ++i) ctx.log_generator_change[before.cohomology_label(i)] = change[i];
  ctx.description = "harmonic volumes of " + after.name() + " relative to " + before.name();
  return ctx;
}

}  // namespace l2t
