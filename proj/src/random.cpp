#include "l2t/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace l2t::gen {

int Rng::uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

double Rng::real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

bool Rng::coin(double p) { return real(0.0, 1.0) < p; }

std::vector<int> Rng::permutation(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), engine_);
  return p;
}

FiniteGroupTable small_group(Rng& rng, int max_order) {
  std::vector<FiniteGroupTable> pool;
  for (int n = 1; n <= max_order; ++n) pool.push_back(FiniteGroupTable::cyclic(n));
  if (max_order >= 4) pool.push_back(FiniteGroupTable::product(FiniteGroupTable::cyclic(2), FiniteGroupTable::cyclic(2)));
  if (max_order >= 6) pool.push_back(FiniteGroupTable::dihedral(3));
  if (max_order >= 8) {
    pool.push_back(FiniteGroupTable::dihedral(4));
    pool.push_back(FiniteGroupTable::quaternion());
    pool.push_back(FiniteGroupTable::product(FiniteGroupTable::cyclic(2), FiniteGroupTable::cyclic(4)));
  }
  return rng.pick(pool);
}

GroupRingElement element(Rng& rng, const AlgebraModel& model, int max_terms) {
  GroupRingElement a(model);
  const int terms = rng.uniform(1, max_terms);
  for (int t = 0; t < terms; ++t)
    a.add_term(GroupKey{rng.uniform(0, model.group_order() - 1), {}}, cplx(rng.real(-1, 1), rng.real(-1, 1)));
  return a;
}

GroupRingMatrix matrix(Rng& rng, const AlgebraModel& model, int rows, int cols, int max_terms) {
  GroupRingMatrix m(model, rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m.set(i, j, element(rng, model, max_terms));
  return m;
}

GroupRingMatrix invertible(Rng& rng, const AlgebraModel& model, int n) {
  for (;;) {
    GroupRingMatrix m = matrix(rng, model, n, n);
    if (n == 0) return m;
    const Eigen::VectorXd sv = Eigen::JacobiSVD<DenseMatrix>(realize(m).dense()).singularValues();
    if (sv[sv.size() - 1] * 50.0 >= sv[0]) return m;
  }
}

GroupRingMatrix positive(Rng& rng, const AlgebraModel& model, int n) {
  const GroupRingMatrix b = invertible(rng, model, n);
  return b.star() * b + GroupRingMatrix::identity(model, n, 0.5);
}

GroupRingMatrix inverse(const GroupRingMatrix& m) {
  if (!m.model().is_finite()) fail(ErrorKind::Unsupported, "inverse needs a finite model");
  if (!m.is_square()) fail(ErrorKind::ShapeMismatch, "inverse of a non-square matrix");
  return derealize(m.model(), realize(m).dense().inverse(), m.rows(), m.cols());
}

namespace {

GroupRingElement unit(const AlgebraModel& model, int g, cplx c = 1.0) {
  return GroupRingElement::monomial(model, GroupKey{g, {}}, c);
}

GroupRingElement singular_element(Rng& rng, const AlgebraModel& model) {
  const int n = model.group_order();
  if (n == 1) return GroupRingElement::zero(model);
  const int g = rng.uniform(1, n - 1);
  return (unit(model, 0) - unit(model, g)) * element(rng, model);
}

// Ranks and differentials of a complex under assembly.
struct Blocks {
  std::vector<int> ranks;
  std::vector<GroupRingMatrix> d;

  Blocks(const AlgebraModel& model, int len) : ranks(len, 0) {
    for (int i = 0; i + 1 < len; ++i) d.push_back(GroupRingMatrix::zero(model, 0, 0));
  }
  int total() const { return std::accumulate(ranks.begin(), ranks.end(), 0); }
  // Appends a piece given by its ranks and differentials (same length).
  void append(const AlgebraModel& model, const std::vector<int>& r, const std::vector<GroupRingMatrix>& pd) {
    for (std::size_t i = 0; i < d.size(); ++i) {
      const GroupRingMatrix blk = pd[i].rows() == r[i + 1] && pd[i].cols() == r[i]
                                      ? pd[i]
                                      : GroupRingMatrix::zero(model, r[i + 1], r[i]);
      d[i] = GroupRingMatrix::block_diagonal(d[i], blk);
    }
    for (std::size_t i = 0; i < ranks.size(); ++i) ranks[i] += r[i];
  }
};

}  // namespace

CochainComplex complex(Rng& rng, const AlgebraModel& model, const ComplexShape& shape, std::string name) {
  const int len = shape.length > 0 ? shape.length : rng.uniform(2, std::max(2, shape.max_length));
  const int budget = rng.uniform(std::min(2, shape.max_total_rank), shape.max_total_rank);
  const int n = model.group_order();
  Blocks blocks(model, len);
  const auto empty_piece = [&] {
    std::vector<GroupRingMatrix> pd;
    for (int i = 0; i + 1 < len; ++i) pd.push_back(GroupRingMatrix::zero(model, 0, 0));
    return pd;
  };
  for (int guard = 0; guard < 64 && blocks.total() < budget; ++guard) {
    const int room = budget - blocks.total();
    std::vector<int> r(len, 0);
    std::vector<GroupRingMatrix> pd = empty_piece();
    const int kind = shape.weakly_acyclic ? 0 : rng.uniform(0, 3);
    if (kind == 0 || kind == 1) {
      if (room < 2) break;
      const int k = rng.uniform(0, len - 2);
      const int rank = room >= 4 && rng.coin(0.3) ? 2 : 1;
      r[k] = r[k + 1] = rank;
      if (kind == 0 || rng.coin(0.3)) {
        pd[k] = invertible(rng, model, rank);
      } else {
        GroupRingMatrix m = invertible(rng, model, rank);
        m.set(0, 0, singular_element(rng, model));
        if (rank == 2) m.set(0, 1, GroupRingElement::zero(model));
        pd[k] = m;
      }
    } else if (kind == 2 || n == 1 || len < 3 || room < 3) {
      r[rng.uniform(0, len - 1)] = 1;
    } else {
      const int k = rng.uniform(0, len - 3);
      const int g = rng.uniform(1, n - 1);
      GroupRingElement norm(model);
      for (int h = 0, x = 0; h == 0 || x != 0; ++h) {
        norm.add_term(GroupKey{x, {}}, 1.0);
        x = model.group().mult(x, g);
      }
      r[k] = r[k + 1] = r[k + 2] = 1;
      pd[k] = GroupRingMatrix::from_element(unit(model, 0) - unit(model, g));
      pd[k + 1] = GroupRingMatrix::from_element(norm);
    }
    blocks.append(model, r, pd);
  }
  if (blocks.total() == 0) {
    std::vector<int> r(len, 0);
    r[0] = 1;
    blocks.append(model, r, empty_piece());
  }

  std::vector<GroupRingMatrix> base, base_inv;
  for (int i = 0; i < len; ++i) {
    const GroupRingMatrix b = rng.coin(0.75) ? invertible(rng, model, blocks.ranks[i])
                                             : GroupRingMatrix::identity(model, blocks.ranks[i]);
    base.push_back(b);
    base_inv.push_back(inverse(b));
  }
  std::vector<GroupRingMatrix> ds;
  for (int i = 0; i + 1 < len; ++i) ds.push_back(base[i + 1] * blocks.d[i] * base_inv[i]);
  std::vector<HilbertianModule> mods;
  for (int i = 0; i < len; ++i) {
    if (shape.random_grams && blocks.ranks[i] > 0 && rng.coin(0.6))
      mods.emplace_back(model, blocks.ranks[i], positive(rng, model, blocks.ranks[i]), std::string{});
    else
      mods.emplace_back(model, blocks.ranks[i]);
  }
  return CochainComplex(model, std::move(mods), std::move(ds), name).renamed(name);
}

// ---- integral spaces --------------------------------------------------------------

CoefficientSystem cyclic_coefficients(int p) {
  CoefficientSystem h;
  h.target = AlgebraModel::finite_group(FiniteGroupTable::cyclic(p));
  h.images = {GeneratorImage{1.0, GroupKey{1, {}}}};
  h.label = "l2(Z/" + std::to_string(p) + ")";
  return h;
}

namespace {

Word t_power(int j) { return j == 0 ? Word{} : Word::generator(0, j); }

IntegralElement integral_element(Rng& rng, int p) {
  IntegralElement a;
  while (a.is_zero()) {
    const int terms = rng.uniform(1, 3);
    for (int i = 0; i < terms; ++i) {
      int c = rng.uniform(-2, 2);
      if (c == 0) c = 1;
      a.add(t_power(rng.uniform(0, p - 1)), c);
    }
  }
  return a;
}

// min over characters of |a(zeta^j)|
double character_floor(const IntegralElement& a, int p) {
  double lo = INFINITY;
  for (int j = 0; j < p; ++j) {
    cplx v = 0.0;
    for (const auto& [w, c] : a.terms()) {
      int e = 0;
      for (const auto& [g, pw] : w.letters) e += pw;
      v += static_cast<double>(c) * std::polar(1.0, 2.0 * M_PI * j * e / p);
    }
    lo = std::min(lo, std::abs(v));
  }
  return lo;
}

IntegralElement unit_element(Rng& rng, int p) {
  for (;;) {
    IntegralElement a = integral_element(rng, p);
    if (character_floor(a, p) > 0.25) return a;
  }
}

IntegralElement any_element(Rng& rng, int p) {
  switch (rng.uniform(0, 3)) {
    case 0:
      return unit_element(rng, p);
    case 1:
      return (IntegralElement::word(t_power(1)) - IntegralElement::one()) * integral_element(rng, p);
    case 2: {
      IntegralElement norm;
      for (int j = 0; j < p; ++j) norm.add(t_power(j), 1);
      return norm;
    }
    default:
      return integral_element(rng, p);
  }
}

// Cells per degree with their boundary columns (over the cells of one degree lower
// at the time of use; shorter columns are padded with zeros).
struct ChainBuilder {
  std::vector<std::vector<std::vector<IntegralElement>>> cols;

  static ChainBuilder from(const EquivariantCWComplex& x) {
    ChainBuilder b;
    for (int k = 0; k <= x.dimension(); ++k) {
      b.cols.emplace_back();
      const IntegralMatrix d = x.boundary(k);
      for (int j = 0; j < x.cell_count(k); ++j) {
        std::vector<IntegralElement> c;
        for (int i = 0; k > 0 && i < d.rows(); ++i) c.push_back(d(i, j));
        b.cols[k].push_back(std::move(c));
      }
    }
    return b;
  }

  int count(int k) const { return k >= 0 && k < static_cast<int>(cols.size()) ? static_cast<int>(cols[k].size()) : 0; }

  int add(int k, std::vector<IntegralElement> boundary) {
    if (static_cast<int>(cols.size()) <= k) cols.resize(k + 1);
    cols[k].push_back(std::move(boundary));
    return count(k) - 1;
  }

  // Boundary of the chain sum_j w_j e_j over the k-cells.
  std::vector<IntegralElement> boundary_of(int k, const std::vector<IntegralElement>& w) const {
    std::vector<IntegralElement> z(count(k - 1));
    for (int j = 0; j < count(k) && j < static_cast<int>(w.size()); ++j)
      for (std::size_t i = 0; i < cols[k][j].size(); ++i) z[i] += w[j] * cols[k][j][i];
    return z;
  }

  EquivariantCWComplex build(const GroupPresentation& g, std::string name) const {
    int top = static_cast<int>(cols.size()) - 1;
    while (top > 0 && count(top) == 0) --top;
    std::vector<int> cells;
    for (int k = 0; k <= top; ++k) cells.push_back(count(k));
    std::vector<IntegralMatrix> bd;
    for (int k = 1; k <= top; ++k) {
      IntegralMatrix m(count(k - 1), count(k));
      for (int j = 0; j < count(k); ++j)
        for (std::size_t i = 0; i < cols[k][j].size(); ++i) m.at(static_cast<int>(i), j) = cols[k][j][i];
      bd.push_back(std::move(m));
    }
    return EquivariantCWComplex(g, std::move(cells), std::move(bd), std::move(name));
  }
};

IntegralMatrix plus(const IntegralMatrix& a, const IntegralMatrix& b, long long sign = 1) {
  IntegralMatrix out = a;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      for (const auto& [w, c] : b(i, j).terms()) out.at(i, j).add(w, sign * c);
  return out;
}

// d'_k = B_{k-1}^{-1} d_k B_k with B = I + U unitriangular, U strictly upper.
EquivariantCWComplex unitriangular_change(Rng& rng, const EquivariantCWComplex& x, int p) {
  std::vector<IntegralMatrix> b, binv;
  for (int k = 0; k <= x.dimension(); ++k) {
    const int n = x.cell_count(k);
    IntegralMatrix u(n, n);
    if (n >= 2) {
      const int j = rng.uniform(1, n - 1);
      u.at(rng.uniform(0, j - 1), j) = IntegralElement::word(t_power(rng.uniform(0, p - 1)), rng.coin() ? 1 : -1);
    }
    IntegralMatrix inv = IntegralMatrix::identity(n), power = IntegralMatrix::identity(n);
    for (int m = 1; m < n; ++m) {
      power = then(power, u);
      inv = plus(inv, power, m % 2 == 1 ? -1 : 1);
    }
    b.push_back(plus(IntegralMatrix::identity(n), u));
    binv.push_back(std::move(inv));
  }
  std::vector<IntegralMatrix> bd;
  for (int k = 1; k <= x.dimension(); ++k) bd.push_back(then(then(b[k], x.boundary(k)), binv[k - 1]));
  return EquivariantCWComplex(x.group(), x.cells(), std::move(bd), x.name());
}

// Attaches e_k with boundary z = dw (w a chain of X0) and f_{k+1} with boundary
// a e - a w; the pair is relatively acyclic when a is a unit of C[Z/p].
void attach_pair(Rng& rng, ChainBuilder& b, int x0_dim, int p, bool acyclic) {
  const int k = rng.uniform(0, std::min(x0_dim, 2));
  std::vector<IntegralElement> w(b.count(k));
  for (auto& e : w)
    if (rng.coin(0.6)) e = integral_element(rng, p);
  const IntegralElement a = acyclic ? unit_element(rng, p) : any_element(rng, p);
  const std::vector<IntegralElement> z = b.boundary_of(k, w);
  const int e = b.add(k, z);
  std::vector<IntegralElement> fb(b.count(k));
  for (std::size_t j = 0; j < w.size(); ++j) fb[j] = -(a * w[j]);
  fb[e] = a;
  b.add(k + 1, std::move(fb));
}

Word random_lift(Rng& rng, int p) { return t_power(rng.uniform(1, p - 1)); }

}  // namespace

EquivariantCWComplex cyclic_space(Rng& rng, int p, bool acyclic, std::string name) {
  ChainBuilder b;
  b.cols.resize(1);
  const int pieces = rng.uniform(1, 2);
  for (int piece = 0; piece < pieces; ++piece) {
    const int kind = acyclic ? 0 : rng.uniform(0, 2);
    if (kind == 0) {
      const int k = rng.uniform(0, 1);
      const int e = b.add(k, std::vector<IntegralElement>(b.count(k - 1)));
      std::vector<IntegralElement> fb(b.count(k));
      fb[e] = acyclic ? unit_element(rng, p) : any_element(rng, p);
      b.add(k + 1, std::move(fb));
    } else if (kind == 1) {
      b.add(rng.uniform(0, 1), {});
    } else {
      const int e = b.add(0, {});
      std::vector<IntegralElement> fb(b.count(0));
      fb[e] = IntegralElement::word(t_power(1)) - IntegralElement::one();
      const int f = b.add(1, std::move(fb));
      IntegralElement norm;
      for (int j = 0; j < p; ++j) norm.add(t_power(j), 1);
      std::vector<IntegralElement> gb(b.count(1));
      gb[f] = norm;
      b.add(2, std::move(gb));
    }
  }
  return unitriangular_change(rng, b.build(GroupPresentation::cyclic(p), name), p);
}

EquivariantCWComplex shuffle_cells(Rng& rng, const EquivariantCWComplex& x, int moves) {
  EquivariantCWComplex out = x;
  const int gens = static_cast<int>(x.group().generators.size());
  for (int m = 0; m < moves; ++m) {
    const int k = rng.uniform(0, x.dimension());
    if (x.cell_count(k) == 0) continue;
    if (gens > 0 && rng.coin()) {
      const int power = rng.coin() ? rng.uniform(1, 2) : -rng.uniform(1, 2);
      out = relift_cell(out, k, rng.uniform(0, x.cell_count(k) - 1), Word::generator(rng.uniform(0, gens - 1), power));
    } else {
      out = reorder_cells(out, k, rng.permutation(x.cell_count(k)));
    }
  }
  return out;
}

PushoutCase pushout(Rng& rng, int p) {
  PushoutCase c;
  c.acyclic = rng.coin();
  c.h = cyclic_coefficients(p);
  c.x0 = cyclic_space(rng, p, c.acyclic, "X0");
  const int dim0 = c.x0.dimension();
  const GroupPresentation g = c.x0.group();

  // X1: new cells after the X0 cells, then reordered and relifted off X0.
  ChainBuilder b1 = ChainBuilder::from(c.x0);
  for (int i = rng.uniform(1, 2); i > 0; --i) attach_pair(rng, b1, dim0, p, c.acyclic);
  EquivariantCWComplex x1 = b1.build(g, "X1");
  std::vector<std::vector<int>> j1(dim0 + 1);
  for (int k = 0; k <= dim0; ++k) {
    j1[k].resize(c.x0.cell_count(k));
    std::iota(j1[k].begin(), j1[k].end(), 0);
  }
  for (int k = 0; k <= x1.dimension(); ++k) {
    const std::vector<int> perm = rng.permutation(x1.cell_count(k));
    x1 = reorder_cells(x1, k, perm);
    std::vector<int> pos(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) pos[perm[i]] = static_cast<int>(i);
    if (k <= dim0)
      for (int& idx : j1[k]) idx = pos[idx];
    for (int i = 0; i < x1.cell_count(k); ++i) {
      const bool from_x0 = k <= dim0 && std::find(j1[k].begin(), j1[k].end(), i) != j1[k].end();
      if (!from_x0 && rng.coin()) x1 = relift_cell(x1, k, i, random_lift(rng, p));
    }
  }

  // X2: any cell may move; j2 follows the moves.
  ChainBuilder b2 = ChainBuilder::from(c.x0);
  for (int i = rng.uniform(1, 2); i > 0; --i) attach_pair(rng, b2, dim0, p, c.acyclic);
  EquivariantCWComplex x2 = b2.build(g, "X2");
  ChainMap j2;
  for (int k = 0; k <= dim0; ++k) {
    IntegralMatrix m(x2.cell_count(k), c.x0.cell_count(k));
    for (int i = 0; i < c.x0.cell_count(k); ++i) m.at(i, i) = IntegralElement::one();
    j2.push_back(std::move(m));
  }
  for (int k = 0; k <= x2.dimension(); ++k) {
    for (int i = 0; i < x2.cell_count(k); ++i) {
      if (!rng.coin()) continue;
      const Word lift = random_lift(rng, p);
      x2 = relift_cell(x2, k, i, lift);
      if (k <= dim0)
        for (int col = 0; col < j2[k].cols(); ++col) j2[k].at(i, col) = j2[k](i, col).right_multiplied(lift.inverse());
    }
    const std::vector<int> perm = rng.permutation(x2.cell_count(k));
    x2 = reorder_cells(x2, k, perm);
    if (k <= dim0) {
      IntegralMatrix m(j2[k].rows(), j2[k].cols());
      for (int r = 0; r < m.rows(); ++r)
        for (int col = 0; col < m.cols(); ++col) m.at(r, col) = j2[k](perm[r], col);
      j2[k] = std::move(m);
    }
  }
  c.x1 = std::move(x1);
  c.x2 = std::move(x2);
  c.pushout = pushout_assemble(c.x0, c.x1, c.x2, j1, j2, c.h);
  c.j1 = std::move(j1);
  c.j2 = std::move(j2);
  return c;
}

TwistedCase twisted(Rng& rng, const AlgebraModel& model, int max_total_rank) {
  ComplexShape shape;
  shape.weakly_acyclic = true;
  shape.length = rng.uniform(2, 4);
  shape.max_total_rank = std::max(2, max_total_rank / 2);
  TwistedCase c{complex(rng, model, shape, "L"), complex(rng, model, shape, "N"), complex(rng, model, shape, "N")};
  std::vector<GroupRingMatrix> h;
  for (int i = 0; i < shape.length; ++i) h.push_back(matrix(rng, model, c.l.rank(i), c.n.rank(i)));
  c.m = twisted_sum(c.l, c.n, homotopy_twist(c.l, c.n, h), "M");
  return c;
}

}  // namespace l2t::gen
