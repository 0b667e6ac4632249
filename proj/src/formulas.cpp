#include "l2t/formulas.hpp"

#include <cmath>

#include "pointwise.hpp"

namespace l2t {

namespace {

FactorTorsion factor(std::string name, const CochainComplex& c, const DetOptions& options) {
  FactorTorsion f;
  f.name = std::move(name);
  try {
    const TorsionReport r = torsion(c, options);
    f.log_value = r.log_value;
    f.determinant_class = r.determinant_class;
    f.weakly_acyclic = r.weakly_acyclic;
    f.line = r.line();
    if (!r.log_value) f.error = "not of determinant class";
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotDeterminantClass && e.kind() != ErrorKind::NonConvergent) throw;
    f.determinant_class = false;
    f.error = e.what();
  }
  return f;
}

bool all_weakly_acyclic(std::initializer_list<const FactorTorsion*> fs) {
  for (const auto* f : fs)
    if (!f->log_value || !f->weakly_acyclic) return false;
  return true;
}

// Real value through the determinant-line trivialization of a weakly acyclic factor.
double trivialized(const FactorTorsion& f) {
  TrivializationContext ctx;
  ctx.description = "empty cohomology";
  return trivialize(LineElement{f.line, *f.log_value, true}, ctx);
}

void require_unimodular(const CoefficientSystem& h) {
  if (!unimodularity_check(h).unimodular) fail(ErrorKind::NotUnimodular, "coefficient system is not unimodular");
}

// Pseudo-inverses of injective / surjective matrices.
DenseMatrix left_inverse(const DenseMatrix& a) {
  if (a.cols() == 0) return DenseMatrix(0, a.rows());
  return (a.adjoint() * a).ldlt().solve(a.adjoint());
}

DenseMatrix right_inverse(const DenseMatrix& b) {
  if (b.rows() == 0) return DenseMatrix(b.cols(), 0);
  return b.adjoint() * (b * b.adjoint()).ldlt().solve(DenseMatrix::Identity(b.rows(), b.rows()));
}

}  // namespace

// ---- long exact sequence ---------------------------------------------------

LesTorsion long_exact_sequence_torsion(const CochainComplex& l, const CochainComplex& m, const CochainComplex& n,
                                       const std::vector<GroupRingMatrix>& alpha,
                                       const std::vector<GroupRingMatrix>& beta, const DetOptions& options) {
  const int len = l.length();
  if (m.length() != len || n.length() != len) fail(ErrorKind::NotExact, "complexes differ in length");
  if (static_cast<int>(alpha.size()) != len || static_cast<int>(beta.size()) != len)
    fail(ErrorKind::NotExact, "one alpha and one beta per degree");
  const AlgebraModel& model = l.algebra();
  std::vector<Morphism> a, b;
  for (int k = 0; k < len; ++k) {
    a.emplace_back(l.module(k), m.module(k), alpha[k].rebased(model));
    b.emplace_back(m.module(k), n.module(k), beta[k].rebased(model));
    const double scale = std::max(1.0, alpha[k].max_abs() * beta[k].max_abs());
    if ((b[k].matrix() * a[k].matrix()).max_abs() > kComplexTolerance * scale)
      fail(ErrorKind::NotExact, "beta alpha != 0 in degree " + std::to_string(k));
    if (m.rank(k) != l.rank(k) + n.rank(k)) fail(ErrorKind::NotExact, "ranks do not add up in degree " + std::to_string(k));
    if (k + 1 < len) {
      const GroupRingMatrix ca = m.differential_matrix(k) * a[k].matrix() - alpha[k + 1].rebased(model) * l.differential_matrix(k);
      const GroupRingMatrix cb = n.differential_matrix(k) * b[k].matrix() - beta[k + 1].rebased(model) * m.differential_matrix(k);
      if (ca.max_abs() > kComplexTolerance * std::max(1.0, alpha[k].max_abs()) ||
          cb.max_abs() > kComplexTolerance * std::max(1.0, beta[k].max_abs()))
        fail(ErrorKind::NotExact, "alpha or beta is not a cochain map in degree " + std::to_string(k));
    }
  }

  const std::vector<int> rl = detail::differential_ranks(l, options.epsilon);
  const std::vector<int> rm = detail::differential_ranks(m, options.epsilon);
  const std::vector<int> rn = detail::differential_ranks(n, options.epsilon);
  const Eigen::Index group = model.group_order();
  const auto harmonic_dim = [&](const CochainComplex& c, const std::vector<int>& r, int k) {
    const int in = k >= 1 ? r[k - 1] : 0;
    const int out = k + 1 < len ? r[k] : 0;
    return static_cast<int>(group * c.rank(k)) - in - out;
  };
  std::vector<int> dims;
  for (int k = 0; k < len; ++k) {
    dims.push_back(harmonic_dim(l, rl, k));
    dims.push_back(harmonic_dim(m, rm, k));
    dims.push_back(harmonic_dim(n, rn, k));
  }
  // Exactness fixes every rank.
  std::vector<int> ranks(dims.size());
  int prev = 0;
  for (std::size_t j = 0; j < dims.size(); ++j) {
    ranks[j] = dims[j] - prev;
    const int next_dim = j + 1 < dims.size() ? dims[j + 1] : 0;
    if (ranks[j] < 0 || ranks[j] > next_dim)
      fail(ErrorKind::NotExact, "cohomology dimensions are incompatible with an exact sequence");
    prev = ranks[j];
  }
  if (prev != 0) fail(ErrorKind::NotExact, "long exact sequence does not close");

  LesTorsion out;
  std::vector<LineExpr> lines;
  for (int k = 0; k < len; ++k) {
    const std::string labels[3] = {l.cohomology_label(k), m.cohomology_label(k), n.cohomology_label(k)};
    for (int s = 0; s < 3; ++s) {
      const double d = static_cast<double>(dims[3 * k + s]) / group;
      out.dims.push_back(d);
      lines.push_back(d > 0 ? LineExpr::atom(labels[s]) : LineExpr());
    }
  }
  out.line = graded_alternating(lines);
  if (std::all_of(dims.begin(), dims.end(), [](int d) { return d == 0; })) return out;

  const detail::ComplexRealizer pl(l), pm(m), pn(n);
  const TorusIntegrand integrand = [&](std::span<const double> theta, int, std::span<double> value) {
    const detail::PointwiseComplex cl = pl.at(theta), cm = pm.at(theta), cn = pn.at(theta);
    double acc = 0.0;
    std::vector<DenseMatrix> hl(len), hm(len), hn(len);
    for (int k = 0; k < len; ++k) {
      hl[k] = detail::harmonic_basis(cl, k, rl);
      hm[k] = detail::harmonic_basis(cm, k, rm);
      hn[k] = detail::harmonic_basis(cn, k, rn);
    }
    for (int k = 0; k < len; ++k) {
      const DenseMatrix ak = a[k].symbol(theta), bk = b[k].symbol(theta);
      const int j = 3 * k;
      const double sign = k % 2 == 0 ? 1.0 : -1.0;  // (-1)^j for V_j -> V_{j+1}
      if (ranks[j] > 0) acc += sign * detail::log_top_singular(hm[k].adjoint() * ak * hl[k], ranks[j]);
      if (ranks[j + 1] > 0) acc -= sign * detail::log_top_singular(hn[k].adjoint() * bk * hm[k], ranks[j + 1]);
      if (ranks[j + 2] > 0) {
        const DenseMatrix lift = right_inverse(bk) * hn[k];
        const DenseMatrix pulled = left_inverse(a[k + 1].symbol(theta)) * (cm.d[k] * lift);
        acc += sign * detail::log_top_singular(hl[k + 1].adjoint() * pulled, ranks[j + 2]);
      }
    }
    value[0] = acc;
  };
  QuadratureOptions q = options.quadrature;
  q.tolerance *= static_cast<double>(group);
  const QuadratureResult res = integrate_over_torus(model.torus_rank(), 1, integrand, q);
  out.log_value = res.values[0] / static_cast<double>(group);
  return out;
}

// ---- sum formula -----------------------------------------------------------

SumReport verify_sum(const Pushout& p, const EquivariantCWComplex& x0, const EquivariantCWComplex& x1,
                     const EquivariantCWComplex& x2, const CoefficientSystem& h, const PreferredVolume& sigma,
                     double tol, const DetOptions& options) {
  require_unimodular(h);
  const MayerVietoris mv = mayer_vietoris(p, x0, x1, x2, h, sigma);
  SumReport rep;
  rep.tolerance = tol;
  rep.x = factor("X", mv.x, options);
  rep.x0 = factor("X0", mv.x0, options);
  rep.x1 = factor("X1", cochain_with_coefficients(x1.renamed("X1"), h, sigma), options);
  rep.x2 = factor("X2", cochain_with_coefficients(x2.renamed("X2"), h, sigma), options);
  try {
    rep.les = long_exact_sequence_torsion(mv.x, mv.middle, mv.x0, mv.alpha, mv.beta, options);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NonConvergent) throw;
  }
  if (rep.x.log_value && rep.x0.log_value && rep.x1.log_value && rep.x2.log_value && rep.les) {
    rep.residual = std::abs(*rep.x.log_value + *rep.x0.log_value + rep.les->log_value - *rep.x1.log_value -
                            *rep.x2.log_value);
    rep.passed = *rep.residual <= tol;
  }
  if (all_weakly_acyclic({&rep.x, &rep.x0, &rep.x1, &rep.x2})) {
    rep.naturality_residual =
        std::abs(trivialized(rep.x) + trivialized(rep.x0) - trivialized(rep.x1) - trivialized(rep.x2));
    rep.passed = rep.passed && *rep.naturality_residual <= tol;
  }
  return rep;
}

// ---- product formula -------------------------------------------------------

ProductReport verify_product(const EquivariantCWComplex& x1, const CoefficientSystem& h1,
                             const EquivariantCWComplex& x2, const CoefficientSystem& h2, double tol,
                             const DetOptions& options) {
  if (h1.multiplicity != 1 || h2.multiplicity != 1)
    fail(ErrorKind::DimensionNotOne, "product formula needs coefficients of von Neumann dimension 1");
  require_unimodular(h1);
  require_unimodular(h2);
  const CoefficientSystem h = tensor(h1, h2);
  const EquivariantCWComplex prod = product_space(x1, x2);
  ProductReport rep;
  rep.tolerance = tol;
  rep.chi1 = euler_char(x1);
  rep.chi2 = euler_char(x2);
  rep.product = factor("X1xX2", cochain_with_coefficients(prod.renamed("X1xX2"), h), options);
  rep.x1 = factor("X1", cochain_with_coefficients(x1.renamed("X1"), h1), options);
  rep.x2 = factor("X2", cochain_with_coefficients(x2.renamed("X2"), h2), options);
  if (rep.product.log_value) rep.lhs = rep.product.log_value;
  if (rep.x1.log_value && rep.x2.log_value) rep.rhs = rep.chi2 * *rep.x1.log_value + rep.chi1 * *rep.x2.log_value;
  if (rep.lhs && rep.rhs) {
    rep.residual = std::abs(*rep.lhs - *rep.rhs);
    rep.passed = *rep.residual <= tol;
  }
  if (all_weakly_acyclic({&rep.product, &rep.x1, &rep.x2})) {
    rep.naturality_residual = std::abs(trivialized(rep.product) - rep.chi2 * trivialized(rep.x1) -
                                       rep.chi1 * trivialized(rep.x2));
    rep.passed = rep.passed && *rep.naturality_residual <= tol;
  }
  return rep;
}

TensorDetReport det_tensor_identity_check(const GroupRingMatrix& alpha1, const GroupRingMatrix& alpha2, double tol,
                                          const DetOptions& options) {
  const DetResult d1 = fk_det(alpha1, options), d2 = fk_det(alpha2, options);
  if (!d1.invertible || !d2.invertible) fail(ErrorKind::NotInvertible, "tensor identity needs invertible factors");
  const DetResult d12 = fk_det(kron(alpha1, alpha2), options);
  TensorDetReport rep;
  rep.lhs = d12.log_det;
  rep.rhs = vn_dim(alpha2.rows()) * d1.log_det + vn_dim(alpha1.rows()) * d2.log_det;
  rep.residual = std::abs(rep.lhs - rep.rhs);
  rep.passed = rep.residual <= tol;
  return rep;
}

// ---- fibrations ------------------------------------------------------------

namespace {

void check_transport(const Bundle& b, const BaseFace& face, int cell) {
  const EquivariantCWComplex& f = b.fiber;
  if (face.transport.empty())
    fail(ErrorKind::MissingTransport, "base cell " + std::to_string(cell) + " has a face without transport");
  if (static_cast<int>(face.transport.size()) != f.dimension() + 1)
    fail(ErrorKind::MissingTransport, "base cell " + std::to_string(cell) + ": transport needs one map per fiber degree");
  for (int k = 0; k <= f.dimension(); ++k)
    if (face.transport[k].rows() != f.cell_count(k) || face.transport[k].cols() != f.cell_count(k))
      fail(ErrorKind::BadBundle, "base cell " + std::to_string(cell) + ": transport has the wrong shape in degree " +
                                     std::to_string(k));
}

void check_bundle(const Bundle& b) {
  if (b.base.empty()) fail(ErrorKind::BadBundle, "empty base");
  for (std::size_t j = 0; j < b.base.size(); ++j) {
    const BaseCell& c = b.base[j];
    const int cj = static_cast<int>(j);
    if (c.dimension < 0) fail(ErrorKind::BadBundle, "negative base cell dimension");
    const auto check_face = [&](const BaseFace& face, int dim) {
      if (face.cell < 0 || face.cell >= cj)
        fail(ErrorKind::BadBundle, "base cell " + std::to_string(j) + " refers to a later or missing cell");
      if (b.base[face.cell].dimension != dim)
        fail(ErrorKind::BadBundle, "base cell " + std::to_string(j) + " has a face of the wrong dimension");
      check_transport(b, face, cj);
    };
    if (c.dimension == 0) {
      if (!c.faces.empty()) fail(ErrorKind::BadBundle, "a 0-cell has no faces");
      continue;
    }
    if (c.dimension == 1) {
      if (c.faces.size() != 2 || c.faces[0].coefficient * c.faces[1].coefficient != -1 ||
          std::abs(c.faces[0].coefficient) != 1)
        fail(ErrorKind::BadBundle, "a 1-cell needs endpoint faces with coefficients +1 and -1");
      for (const auto& face : c.faces) check_face(face, 0);
      continue;
    }
    for (const auto& face : c.faces) check_face(face, c.dimension - 1);
    if (!c.basepoint) fail(ErrorKind::MissingTransport, "base cell " + std::to_string(j) + " needs a basepoint transport");
    check_face(*c.basepoint, 0);
  }
}

// Position of each base cell among the base cells of its dimension.
std::vector<int> index_in_degree(const Bundle& b) {
  std::vector<int> out, count;
  for (const auto& c : b.base) {
    if (static_cast<int>(count.size()) <= c.dimension) count.resize(c.dimension + 1, 0);
    out.push_back(count[c.dimension]++);
  }
  return out;
}

EquivariantCWComplex empty_like(const GroupPresentation& g, int dim, std::string name) {
  std::vector<int> cells(dim + 1, 0);
  std::vector<IntegralMatrix> bd(dim);
  return EquivariantCWComplex(g, cells, std::move(bd), std::move(name));
}

const BaseFace& endpoint(const BaseCell& c, int sign) {
  return c.faces[0].coefficient == sign ? c.faces[0] : c.faces[1];
}

struct TotalLayout {
  std::vector<std::vector<int>> offset;  // offset[k][j], -1 when base cell j has no cells in degree k
  std::vector<int> cells;
};

TotalLayout layout(const Bundle& b, int upto) {
  const EquivariantCWComplex& f = b.fiber;
  int top = 0;
  for (int j = 0; j < upto; ++j) top = std::max(top, b.base[j].dimension);
  const int dim = top + f.dimension();
  TotalLayout t;
  t.cells.assign(dim + 1, 0);
  t.offset.assign(dim + 1, std::vector<int>(upto, -1));
  for (int k = 0; k <= dim; ++k)
    for (int j = 0; j < upto; ++j) {
      const int fk = k - b.base[j].dimension;
      if (fk < 0 || fk > f.dimension()) continue;
      t.offset[k][j] = t.cells[k];
      t.cells[k] += f.cell_count(fk);
    }
  return t;
}

}  // namespace

EquivariantCWComplex base_space(const Bundle& b) {
  check_bundle(b);
  const std::vector<int> idx = index_in_degree(b);
  int dim = 0;
  for (const auto& c : b.base) dim = std::max(dim, c.dimension);
  std::vector<int> cells(dim + 1, 0);
  for (const auto& c : b.base) ++cells[c.dimension];
  std::vector<IntegralMatrix> bd;
  for (int k = 1; k <= dim; ++k) bd.emplace_back(cells[k - 1], cells[k]);
  for (std::size_t j = 0; j < b.base.size(); ++j) {
    const BaseCell& c = b.base[j];
    if (c.dimension == 0) continue;
    for (const auto& face : c.faces)
      bd[c.dimension - 1].at(idx[face.cell], idx[j]).add(Word{}, face.coefficient);
  }
  return EquivariantCWComplex(GroupPresentation::trivial(), cells, std::move(bd), "B");
}

EquivariantCWComplex total_space(const Bundle& b, int base_cells) {
  check_bundle(b);
  const int upto = base_cells < 0 ? static_cast<int>(b.base.size()) : base_cells;
  const EquivariantCWComplex& f = b.fiber;
  const TotalLayout t = layout(b, upto);
  const int dim = static_cast<int>(t.cells.size()) - 1;
  std::vector<IntegralMatrix> bd;
  for (int k = 1; k <= dim; ++k) bd.emplace_back(t.cells[k - 1], t.cells[k]);
  for (int k = 1; k <= dim; ++k)
    for (int j = 0; j < upto; ++j) {
      if (t.offset[k][j] < 0) continue;
      const BaseCell& c = b.base[j];
      const int fk = k - c.dimension;
      const IntegralMatrix df = f.boundary(fk);
      const long long sign = fk % 2 == 0 ? 1 : -1;
      for (int x = 0; x < f.cell_count(fk); ++x) {
        const int col = t.offset[k][j] + x;
        if (fk >= 1)
          for (int y = 0; y < f.cell_count(fk - 1); ++y)
            if (!df(y, x).is_zero()) bd[k - 1].at(t.offset[k - 1][j] + y, col) += df(y, x);
        if (c.dimension == 0) continue;
        for (const auto& face : c.faces)
          for (int y = 0; y < f.cell_count(fk); ++y)
            for (const auto& [w, coeff] : face.transport[fk](y, x).terms())
              bd[k - 1].at(t.offset[k - 1][face.cell] + y, col).add(w, sign * face.coefficient * coeff);
      }
    }
  return EquivariantCWComplex(f.group(), t.cells, std::move(bd), b.name);
}

Bundle trivial_bundle(const EquivariantCWComplex& fiber, const EquivariantCWComplex& base) {
  if (!base.group().generators.empty()) fail(ErrorKind::BadBundle, "base must be given over the trivial group");
  Bundle b;
  b.fiber = fiber;
  b.name = fiber.name() + " x " + base.name();
  ChainMap id;
  for (int k = 0; k <= fiber.dimension(); ++k) id.push_back(IntegralMatrix::identity(fiber.cell_count(k)));
  std::vector<int> first(base.dimension() + 2, 0);
  for (int k = 0; k <= base.dimension(); ++k) first[k + 1] = first[k] + base.cell_count(k);
  const auto integer = [&](const IntegralElement& e) -> long long {
    if (e.is_zero()) return 0;
    if (e.terms().size() != 1 || !e.terms().begin()->first.is_identity())
      fail(ErrorKind::BadBundle, "base boundary must be integral");
    return e.terms().begin()->second;
  };
  for (int k = 0; k <= base.dimension(); ++k)
    for (int i = 0; i < base.cell_count(k); ++i) {
      BaseCell c;
      c.dimension = k;
      if (k >= 1) {
        const IntegralMatrix d = base.boundary(k);
        for (int r = 0; r < d.rows(); ++r)
          if (const long long v = integer(d(r, i)); v != 0)
            c.faces.push_back(BaseFace{first[k - 1] + r, static_cast<int>(v), id});
        if (k == 1 && c.faces.empty()) {
          if (base.cell_count(0) != 1) fail(ErrorKind::BadBundle, "cannot tell where a closed 1-cell is attached");
          c.faces = {BaseFace{0, 1, id}, BaseFace{0, -1, id}};
        }
        if (k >= 2) c.basepoint = BaseFace{0, 1, id};
      }
      b.base.push_back(std::move(c));
    }
  return b;
}

FibrationReport verify_fibration(const Bundle& b, const CoefficientSystem& h, const PreferredVolume& sigma,
                                 double tol, const DetOptions& options) {
  check_bundle(b);
  const EquivariantCWComplex& f = b.fiber;
  FibrationReport rep;
  rep.tolerance = tol;
  rep.chi_fiber = euler_char(f);
  if (rep.chi_fiber != 0)
    fail(ErrorKind::EulerNotZero, "fiber has Euler characteristic " + std::to_string(rep.chi_fiber));
  require_unimodular(h);
  check_homomorphism(f.group(), h);
  for (std::size_t j = 0; j < b.base.size(); ++j) {
    std::vector<const BaseFace*> faces;
    for (const auto& face : b.base[j].faces) faces.push_back(&face);
    if (b.base[j].basepoint) faces.push_back(&*b.base[j].basepoint);
    for (const BaseFace* face : faces) {
      for (int k = 1; k <= f.dimension(); ++k) {
        const GroupRingMatrix lhs = h.apply(then(f.boundary(k), face->transport[k - 1]));
        const GroupRingMatrix rhs = h.apply(then(face->transport[k], f.boundary(k)));
        if ((lhs - rhs).max_abs() > 1e-9)
          fail(ErrorKind::BadBundle, "transport over base cell " + std::to_string(j) + " is not a chain map");
      }
      for (int k = 0; k <= f.dimension(); ++k)
        if (f.cell_count(k) > 0 && !fk_det(h.cochain_map(face->transport[k]), options).invertible)
          fail(ErrorKind::BadBundle, "transport over base cell " + std::to_string(j) + " is not invertible");
    }
  }
  const EquivariantCWComplex base = base_space(b);
  rep.chi_base = euler_char(base);
  if (!b.fiber_injective)
    rep.injectivity_note =
        "pi_1 injectivity not asserted: the identity is checked for these coefficients only";

  const CoefficientSystem point_h = CoefficientSystem::trivial(GroupPresentation::trivial());
  bool steps_ok = true;
  for (std::size_t j = 0; j < b.base.size(); ++j) {
    const BaseCell& c = b.base[j];
    const int n = c.dimension;
    FibrationStep step;
    step.base_cell = static_cast<int>(j);
    step.dimension = n;
    const EquivariantCWComplex disk = builtin_space("disk", {n}).space;
    const EquivariantCWComplex x1 = product_space(f, disk);
    const EquivariantCWComplex sphere = n >= 1 ? builtin_space("sphere", {n - 1}).space : EquivariantCWComplex{};
    const EquivariantCWComplex x0 =
        n >= 1 ? product_space(f, sphere) : empty_like(f.group(), f.dimension(), "empty");
    const EquivariantCWComplex x2 = total_space(b, static_cast<int>(j));
    const TotalLayout t = layout(b, static_cast<int>(j));

    std::vector<std::vector<int>> j1(x0.dimension() + 1);
    ChainMap j2;
    for (int k = 0; k <= x0.dimension(); ++k) {
      j1[k].assign(x0.cell_count(k), -1);
      j2.emplace_back(x2.cell_count(k), x0.cell_count(k));
    }
    if (n >= 1) {
      for (int s = 0; s <= sphere.dimension(); ++s)
        for (int si = 0; si < sphere.cell_count(s); ++si)
          for (int fk = 0; fk <= f.dimension(); ++fk)
            for (int x = 0; x < f.cell_count(fk); ++x) {
              const int k = fk + s;
              const int col = product_cell_index(f, sphere, fk, x, s, si);
              j1[k][col] = product_cell_index(f, disk, fk, x, s, si);
              // Faces hit by this sphere cell, with their coefficients.
              std::vector<const BaseFace*> hit;
              std::vector<int> coeff;
              if (n == 1) {
                hit.push_back(&endpoint(c, si == 0 ? -1 : 1));
                coeff.push_back(1);
              } else if (s == 0) {
                hit.push_back(&*c.basepoint);
                coeff.push_back(1);
              } else {
                for (const auto& face : c.faces) {
                  hit.push_back(&face);
                  coeff.push_back(face.coefficient);
                }
              }
              for (std::size_t q = 0; q < hit.size(); ++q) {
                const BaseFace& face = *hit[q];
                for (int y = 0; y < f.cell_count(fk); ++y)
                  for (const auto& [w, cf] : face.transport[fk](y, x).terms())
                    j2[k].at(t.offset[k][face.cell] + y, col).add(w, coeff[q] * cf);
              }
            }
    }
    const Pushout p = pushout_assemble(x0, x1, x2, j1, j2, h);
    step.sum = verify_sum(p, x0, x1, x2, h, sigma, tol, options);
    step.disk = verify_product(f, h, disk, point_h, tol, options);
    if (n >= 1) step.sphere = verify_product(f, h, sphere, point_h, tol, options);
    steps_ok = steps_ok && step.sum.passed && step.disk->passed && (!step.sphere || step.sphere->passed);
    rep.steps.push_back(std::move(step));
  }

  const EquivariantCWComplex total = total_space(b);
  rep.total = factor(b.name, cochain_with_coefficients(total, h, sigma), options);
  rep.fiber = factor("F", cochain_with_coefficients(f.renamed("F"), h, sigma), options);
  if (rep.total.log_value && rep.fiber.log_value) {
    rep.residual = std::abs(*rep.total.log_value - rep.chi_base * *rep.fiber.log_value);
    rep.passed = *rep.residual <= tol && steps_ok;
  }
  return rep;
}

// ---- builtin bundles -------------------------------------------------------

namespace {

ChainMap identity_map(const EquivariantCWComplex& f) {
  ChainMap id;
  for (int k = 0; k <= f.dimension(); ++k) id.push_back(IntegralMatrix::identity(f.cell_count(k)));
  return id;
}

}  // namespace

BuiltinBundle builtin_bundle(std::string_view name) {
  if (name == "klein_bottle") {
    // Fiber circle a, base direction b; the monodromy reverses the fiber.
    GroupPresentation g{"pi1(K)", {"a", "b"}, {}};
    const Word a = Word::generator(0), bw = Word::generator(1);
    g.relators.push_back(bw * a * bw.inverse() * a);
    IntegralMatrix d1(1, 1);
    d1.at(0, 0) = IntegralElement::word(a) - IntegralElement::one();
    const EquivariantCWComplex fiber(g, {1, 1}, {d1}, "F");
    IntegralMatrix t0(1, 1), t1(1, 1);
    t0.at(0, 0) = IntegralElement::word(bw);
    t1.at(0, 0) = IntegralElement::word(bw * a.inverse(), -1);
    Bundle b;
    b.fiber = fiber;
    b.name = "K";
    b.base = {BaseCell{0, {}, {}}, BaseCell{1, {BaseFace{0, 1, {t0, t1}}, BaseFace{0, -1, identity_map(fiber)}}, {}}};
    CoefficientSystem h = builtin_space("klein_bottle").coefficients;
    return {std::move(b), std::move(h)};
  }
  if (name == "circle_x_sphere" || name == "circle_x_circle") {
    const BuiltinSpace s1 = builtin_space("circle_Z");
    const EquivariantCWComplex base = builtin_space("sphere", {name == "circle_x_sphere" ? 2 : 1}).space;
    Bundle b = trivial_bundle(s1.space.renamed("F"), base);
    return {std::move(b), s1.coefficients};
  }
  if (name == "sphere_x_circle") {
    const BuiltinSpace s2 = builtin_space("sphere", {2});
    Bundle b = trivial_bundle(s2.space.renamed("F"), builtin_space("sphere", {1}).space);
    return {std::move(b), s2.coefficients};
  }
  fail(ErrorKind::UnknownSpace, "unknown builtin bundle '" + std::string(name) + "'");
}

}  // namespace l2t
