#include "l2t/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace l2t {

// ---- FiniteGroupTable ----------------------------------------------------

FiniteGroupTable::FiniteGroupTable(std::vector<std::vector<int>> rows, std::string name,
                                   std::vector<int> generators)
    : order_(static_cast<int>(rows.size())), name_(std::move(name)), generators_(std::move(generators)) {
  const int n = order_;
  if (n == 0) fail(ErrorKind::InvalidInput, "group table is empty");
  mult_.assign(static_cast<std::size_t>(n) * n, 0);
  for (int a = 0; a < n; ++a) {
    if (static_cast<int>(rows[a].size()) != n)
      fail(ErrorKind::InvalidInput, "group table is not square");
    for (int b = 0; b < n; ++b) {
      const int v = rows[a][b];
      if (v < 0 || v >= n) fail(ErrorKind::InvalidInput, "group table entry out of range");
      mult_[static_cast<std::size_t>(a) * n + b] = v;
    }
  }
  for (int g = 0; g < n; ++g)
    if (mult(0, g) != g || mult(g, 0) != g)
      fail(ErrorKind::InvalidInput, "element 0 is not the identity");
  // Latin square: every row and column is a permutation.
  std::vector<char> seen(n);
  for (int a = 0; a < n; ++a) {
    std::fill(seen.begin(), seen.end(), 0);
    for (int b = 0; b < n; ++b) seen[mult(a, b)] = 1;
    if (std::count(seen.begin(), seen.end(), 1) != n)
      fail(ErrorKind::InvalidInput, "group table row is not a permutation");
    std::fill(seen.begin(), seen.end(), 0);
    for (int b = 0; b < n; ++b) seen[mult(b, a)] = 1;
    if (std::count(seen.begin(), seen.end(), 1) != n)
      fail(ErrorKind::InvalidInput, "group table column is not a permutation");
  }
  inverse_.assign(n, -1);
  for (int g = 0; g < n; ++g) {
    for (int h = 0; h < n; ++h)
      if (mult(g, h) == 0) inverse_[g] = h;
    if (mult(inverse_[g], g) != 0) fail(ErrorKind::InvalidInput, "left and right inverses differ");
  }
  if (n <= 64) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          if (mult(mult(a, b), c) != mult(a, mult(b, c)))
            fail(ErrorKind::InvalidInput, "group table is not associative");
  }
  for (int g : generators_)
    if (g < 0 || g >= n) fail(ErrorKind::InvalidInput, "generator index out of range");
}

FiniteGroupTable FiniteGroupTable::trivial() { return FiniteGroupTable({{0}}, "1"); }

FiniteGroupTable FiniteGroupTable::cyclic(int n) {
  if (n < 1) fail(ErrorKind::BadParams, "cyclic group order must be positive");
  std::vector<std::vector<int>> rows(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) rows[a][b] = (a + b) % n;
  return FiniteGroupTable(std::move(rows), "Z/" + std::to_string(n),
                          n > 1 ? std::vector<int>{1} : std::vector<int>{0});
}

FiniteGroupTable FiniteGroupTable::dihedral(int n) {
  if (n < 1) fail(ErrorKind::BadParams, "dihedral parameter must be positive");
  const int order = 2 * n;
  std::vector<std::vector<int>> rows(order, std::vector<int>(order));
  for (int x = 0; x < order; ++x) {
    const int i = x % n, a = x / n;
    for (int y = 0; y < order; ++y) {
      const int k = y % n, b = y / n;
      // r^i s^a r^k s^b = r^(i + (-1)^a k) s^(a+b)
      const int rot = ((i + (a ? -k : k)) % n + n) % n;
      rows[x][y] = rot + n * ((a + b) % 2);
    }
  }
  return FiniteGroupTable(std::move(rows), "D" + std::to_string(n), {n > 1 ? 1 : 0, n});
}

FiniteGroupTable FiniteGroupTable::quaternion() {
  // Units 1,i,j,k -> 0..3; index = unit + 4*(negative).
  static const int unit[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  static const int sign[4][4] = {{1, 1, 1, 1}, {1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, -1, -1}};
  std::vector<std::vector<int>> rows(8, std::vector<int>(8));
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y) {
      const int u = x % 4, v = y % 4;
      int s = sign[u][v] * (x >= 4 ? -1 : 1) * (y >= 4 ? -1 : 1);
      rows[x][y] = unit[u][v] + (s < 0 ? 4 : 0);
    }
  return FiniteGroupTable(std::move(rows), "Q8", {1, 2});
}

FiniteGroupTable FiniteGroupTable::heisenberg(int p) {
  if (p < 2) fail(ErrorKind::BadParams, "heisenberg modulus must be at least 2");
  const int order = p * p * p;
  std::vector<std::vector<int>> rows(order, std::vector<int>(order));
  for (int x = 0; x < order; ++x) {
    const int a = x % p, b = (x / p) % p, c = x / (p * p);
    for (int y = 0; y < order; ++y) {
      const int a2 = y % p, b2 = (y / p) % p, c2 = y / (p * p);
      const int ra = (a + a2) % p, rb = (b + b2) % p, rc = (c + c2 + a * b2) % p;
      rows[x][y] = ra + p * rb + p * p * rc;
    }
  }
  return FiniteGroupTable(std::move(rows), "Heis(Z/" + std::to_string(p) + ")", {1, p, p * p});
}

FiniteGroupTable FiniteGroupTable::product(const FiniteGroupTable& g, const FiniteGroupTable& h) {
  const int ng = g.order(), nh = h.order(), n = ng * nh;
  std::vector<std::vector<int>> rows(n, std::vector<int>(n));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      rows[x][y] = g.mult(x / nh, y / nh) * nh + h.mult(x % nh, y % nh);
  std::vector<int> gens;
  for (int a : g.generators()) gens.push_back(a * nh);
  for (int b : h.generators()) gens.push_back(b);
  std::string name = g.order() == 1 ? h.name() : h.order() == 1 ? g.name() : g.name() + "x" + h.name();
  return FiniteGroupTable(std::move(rows), name, gens);
}

int FiniteGroupTable::power(int a, int exponent) const {
  int base = exponent < 0 ? inverse(a) : a;
  int e = exponent < 0 ? -exponent : exponent;
  int result = 0;
  for (int i = 0; i < e; ++i) result = mult(result, base);
  return result;
}

std::vector<std::vector<int>> FiniteGroupTable::rows() const {
  std::vector<std::vector<int>> out(order_, std::vector<int>(order_));
  for (int a = 0; a < order_; ++a)
    for (int b = 0; b < order_; ++b) out[a][b] = mult(a, b);
  return out;
}

// ---- AlgebraModel ----------------------------------------------------------

AlgebraModel::AlgebraModel(std::shared_ptr<const FiniteGroupTable> group, int rank)
    : group_(std::move(group)), rank_(rank) {
  if (rank_ < 0) fail(ErrorKind::BadParams, "torus rank must be nonnegative");
}

AlgebraModel AlgebraModel::scalars() {
  static const auto trivial = std::make_shared<const FiniteGroupTable>(FiniteGroupTable::trivial());
  return AlgebraModel(trivial, 0);
}

AlgebraModel AlgebraModel::finite_group(FiniteGroupTable table) {
  return AlgebraModel(std::make_shared<const FiniteGroupTable>(std::move(table)), 0);
}

AlgebraModel AlgebraModel::torus(int rank) {
  if (rank < 1) fail(ErrorKind::BadParams, "torus rank must be positive");
  if (rank > kMaxTorusRank) fail(ErrorKind::UnsupportedModelPair, "torus rank above 3");
  return AlgebraModel(scalars().group_, rank);
}

AlgebraModel AlgebraModel::mixed(FiniteGroupTable table, int rank) {
  if (rank > kMaxTorusRank) fail(ErrorKind::UnsupportedModelPair, "torus rank above 3");
  return AlgebraModel(std::make_shared<const FiniteGroupTable>(std::move(table)), rank);
}

AlgebraModel::Kind AlgebraModel::kind() const noexcept {
  if (rank_ == 0) return Kind::FiniteGroup;
  if (group_->order() == 1) return Kind::Torus;
  return Kind::Mixed;
}

GroupKey AlgebraModel::identity() const { return GroupKey{0, std::vector<int>(rank_, 0)}; }

GroupKey AlgebraModel::multiply(const GroupKey& a, const GroupKey& b) const {
  GroupKey out{group_->mult(a.element, b.element), a.exponents};
  for (int d = 0; d < rank_; ++d) out.exponents[d] += b.exponents[d];
  return out;
}

GroupKey AlgebraModel::inverse(const GroupKey& a) const {
  GroupKey out{group_->inverse(a.element), a.exponents};
  for (int& e : out.exponents) e = -e;
  return out;
}

bool AlgebraModel::valid_key(const GroupKey& k) const {
  return k.element >= 0 && k.element < group_->order() &&
         static_cast<int>(k.exponents.size()) == rank_;
}

std::string AlgebraModel::describe() const {
  std::ostringstream os;
  switch (kind()) {
    case Kind::FiniteGroup: os << "finite_group(" << group_->name() << ")"; break;
    case Kind::Torus: os << "torus(" << rank_ << ")"; break;
    case Kind::Mixed: os << "mixed(" << group_->name() << ", " << rank_ << ")"; break;
  }
  return os.str();
}

bool AlgebraModel::operator==(const AlgebraModel& other) const {
  if (rank_ != other.rank_) return false;
  if (group_ == other.group_) return true;
  return group_->order() == other.group_->order() && *group_ == *other.group_;
}

AlgebraModel tensor(const AlgebraModel& a, const AlgebraModel& b) {
  const int rank = a.torus_rank() + b.torus_rank();
  if (rank > kMaxTorusRank)
    fail(ErrorKind::UnsupportedModelPair,
         "tensor of " + a.describe() + " and " + b.describe() + " exceeds torus rank 3");
  if (b.group_order() == 1) return AlgebraModel::mixed(a.group(), rank);
  if (a.group_order() == 1) return AlgebraModel::mixed(b.group(), rank);
  return AlgebraModel::mixed(FiniteGroupTable::product(a.group(), b.group()), rank);
}

GroupKey tensor_key(const AlgebraModel& a, const GroupKey& ka, const AlgebraModel& b,
                    const GroupKey& kb) {
  GroupKey out{ka.element * b.group_order() + kb.element, ka.exponents};
  out.exponents.insert(out.exponents.end(), kb.exponents.begin(), kb.exponents.end());
  (void)a;
  return out;
}

// ---- GroupRingElement ------------------------------------------------------

namespace {
void require_same_model(const AlgebraModel& a, const AlgebraModel& b) {
  if (!(a == b)) fail(ErrorKind::ModelMismatch, a.describe() + " vs " + b.describe());
}
}  // namespace

GroupRingElement::GroupRingElement(AlgebraModel model) : model_(std::move(model)) {}

GroupRingElement GroupRingElement::scalar(const AlgebraModel& model, cplx c) {
  GroupRingElement e(model);
  e.add_term(model.identity(), c);
  return e;
}

GroupRingElement GroupRingElement::monomial(const AlgebraModel& model, const GroupKey& key, cplx c) {
  if (!model.valid_key(key)) fail(ErrorKind::InvalidInput, "key does not belong to " + model.describe());
  GroupRingElement e(model);
  e.add_term(key, c);
  return e;
}

cplx GroupRingElement::coefficient(const GroupKey& key) const {
  auto it = terms_.find(key);
  return it == terms_.end() ? cplx(0.0) : it->second;
}

double GroupRingElement::max_abs() const {
  double m = 0.0;
  for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

void GroupRingElement::add_term(const GroupKey& key, cplx c) {
  if (c == cplx(0.0)) return;
  auto [it, inserted] = terms_.emplace(key, c);
  if (!inserted) {
    it->second += c;
    if (it->second == cplx(0.0)) terms_.erase(it);
  }
}

GroupRingElement GroupRingElement::pruned(double tol) const {
  GroupRingElement out(model_);
  for (const auto& [k, c] : terms_)
    if (std::abs(c) > tol) out.terms_.emplace(k, c);
  return out;
}

GroupRingElement GroupRingElement::rebased(const AlgebraModel& model) const {
  require_same_model(model_, model);
  GroupRingElement out(model);
  out.terms_ = terms_;
  return out;
}

GroupRingElement& GroupRingElement::operator+=(const GroupRingElement& other) {
  require_same_model(model_, other.model_);
  for (const auto& [k, c] : other.terms_) add_term(k, c);
  return *this;
}

GroupRingElement& GroupRingElement::operator-=(const GroupRingElement& other) {
  require_same_model(model_, other.model_);
  for (const auto& [k, c] : other.terms_) add_term(k, -c);
  return *this;
}

GroupRingElement& GroupRingElement::operator*=(cplx c) {
  if (c == cplx(0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, v] : terms_) v *= c;
  return *this;
}

GroupRingElement operator*(const GroupRingElement& a, const GroupRingElement& b) {
  require_same_model(a.model_, b.model_);
  GroupRingElement out(a.model_);
  for (const auto& [ka, ca] : a.terms_)
    for (const auto& [kb, cb] : b.terms_) out.add_term(a.model_.multiply(ka, kb), ca * cb);
  return out;
}

GroupRingElement GroupRingElement::operator-() const {
  GroupRingElement out(*this);
  for (auto& [k, v] : out.terms_) v = -v;
  return out;
}

cplx trace(const GroupRingElement& a) { return a.coefficient(a.model().identity()); }

GroupRingElement involute(const GroupRingElement& a) {
  GroupRingElement out(a.model());
  for (const auto& [k, c] : a.terms()) out.add_term(a.model().inverse(k), std::conj(c));
  return out;
}

// ---- GroupRingMatrix -------------------------------------------------------

GroupRingMatrix::GroupRingMatrix(AlgebraModel model, int rows, int cols)
    : model_(std::move(model)), rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) fail(ErrorKind::ShapeMismatch, "negative matrix dimension");
  entries_.assign(static_cast<std::size_t>(rows) * cols, GroupRingElement(model_));
}

GroupRingMatrix GroupRingMatrix::identity(const AlgebraModel& model, int n, cplx c) {
  GroupRingMatrix m(model, n, n);
  for (int i = 0; i < n; ++i) m.set(i, i, GroupRingElement::scalar(model, c));
  return m;
}

GroupRingMatrix GroupRingMatrix::from_element(const GroupRingElement& a) {
  GroupRingMatrix m(a.model(), 1, 1);
  m.set(0, 0, a);
  return m;
}

std::size_t GroupRingMatrix::index(int i, int j) const {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
    fail(ErrorKind::ShapeMismatch, "matrix index out of range");
  return static_cast<std::size_t>(i) * cols_ + j;
}

void GroupRingMatrix::set(int i, int j, GroupRingElement value) {
  require_same_model(model_, value.model());
  entries_[index(i, j)] = std::move(value);
}

void GroupRingMatrix::add_to(int i, int j, const GroupRingElement& value) {
  entries_[index(i, j)] += value;
}

GroupRingMatrix GroupRingMatrix::transpose() const {
  GroupRingMatrix out(model_, cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out.entries_[out.index(j, i)] = (*this)(i, j);
  return out;
}

GroupRingMatrix GroupRingMatrix::star() const {
  GroupRingMatrix out(model_, cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out.entries_[out.index(j, i)] = involute((*this)(i, j));
  return out;
}

GroupRingMatrix GroupRingMatrix::pruned(double tol) const {
  GroupRingMatrix out(*this);
  for (auto& e : out.entries_) e = e.pruned(tol);
  return out;
}

GroupRingMatrix GroupRingMatrix::rebased(const AlgebraModel& model) const {
  require_same_model(model_, model);
  GroupRingMatrix out(model, rows_, cols_);
  for (std::size_t k = 0; k < entries_.size(); ++k) out.entries_[k] = entries_[k].rebased(model);
  return out;
}

double GroupRingMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, e.max_abs());
  return m;
}

bool GroupRingMatrix::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.is_zero(); });
}

GroupRingMatrix& GroupRingMatrix::operator+=(const GroupRingMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) fail(ErrorKind::ShapeMismatch, "matrix sum");
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += other.entries_[k];
  return *this;
}

GroupRingMatrix& GroupRingMatrix::operator-=(const GroupRingMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) fail(ErrorKind::ShapeMismatch, "matrix difference");
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= other.entries_[k];
  return *this;
}

GroupRingMatrix& GroupRingMatrix::operator*=(cplx c) {
  for (auto& e : entries_) e *= c;
  return *this;
}

GroupRingMatrix operator*(const GroupRingMatrix& a, const GroupRingMatrix& b) {
  if (a.cols_ != b.rows_)
    fail(ErrorKind::ShapeMismatch, "matrix product " + std::to_string(a.rows_) + "x" +
                                       std::to_string(a.cols_) + " * " + std::to_string(b.rows_) +
                                       "x" + std::to_string(b.cols_));
  require_same_model(a.model_, b.model_);
  GroupRingMatrix out(a.model_, a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i)
    for (int k = 0; k < a.cols_; ++k) {
      const auto& aik = a(i, k);
      if (aik.is_zero()) continue;
      for (int j = 0; j < b.cols_; ++j) {
        const auto& bkj = b(k, j);
        if (!bkj.is_zero()) out.entries_[out.index(i, j)] += aik * bkj;
      }
    }
  return out;
}

bool GroupRingMatrix::operator==(const GroupRingMatrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ && model_ == other.model_ &&
         entries_ == other.entries_;
}

GroupRingMatrix GroupRingMatrix::block(int row0, int col0, int rows, int cols) const {
  GroupRingMatrix out(model_, rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out.entries_[out.index(i, j)] = (*this)(row0 + i, col0 + j);
  return out;
}

GroupRingMatrix GroupRingMatrix::hstack(const GroupRingMatrix& a, const GroupRingMatrix& b) {
  if (a.rows_ != b.rows_) fail(ErrorKind::ShapeMismatch, "hstack row counts differ");
  require_same_model(a.model_, b.model_);
  GroupRingMatrix out(a.model_, a.rows_, a.cols_ + b.cols_);
  for (int i = 0; i < a.rows_; ++i) {
    for (int j = 0; j < a.cols_; ++j) out.entries_[out.index(i, j)] = a(i, j);
    for (int j = 0; j < b.cols_; ++j) out.entries_[out.index(i, a.cols_ + j)] = b(i, j);
  }
  return out;
}

GroupRingMatrix GroupRingMatrix::vstack(const GroupRingMatrix& a, const GroupRingMatrix& b) {
  if (a.cols_ != b.cols_) fail(ErrorKind::ShapeMismatch, "vstack column counts differ");
  require_same_model(a.model_, b.model_);
  GroupRingMatrix out(a.model_, a.rows_ + b.rows_, a.cols_);
  for (int j = 0; j < a.cols_; ++j) {
    for (int i = 0; i < a.rows_; ++i) out.entries_[out.index(i, j)] = a(i, j);
    for (int i = 0; i < b.rows_; ++i) out.entries_[out.index(a.rows_ + i, j)] = b(i, j);
  }
  return out;
}

GroupRingMatrix GroupRingMatrix::block_diagonal(const GroupRingMatrix& a, const GroupRingMatrix& b) {
  require_same_model(a.model_, b.model_);
  GroupRingMatrix out(a.model_, a.rows_ + b.rows_, a.cols_ + b.cols_);
  for (int i = 0; i < a.rows_; ++i)
    for (int j = 0; j < a.cols_; ++j) out.entries_[out.index(i, j)] = a(i, j);
  for (int i = 0; i < b.rows_; ++i)
    for (int j = 0; j < b.cols_; ++j) out.entries_[out.index(a.rows_ + i, a.cols_ + j)] = b(i, j);
  return out;
}

GroupRingMatrix GroupRingMatrix::permuted(const std::vector<int>& row_of,
                                          const std::vector<int>& col_of) const {
  if (static_cast<int>(row_of.size()) != rows_ || static_cast<int>(col_of.size()) != cols_)
    fail(ErrorKind::ShapeMismatch, "permutation length");
  GroupRingMatrix out(model_, rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out.entries_[out.index(i, j)] = (*this)(row_of[i], col_of[j]);
  return out;
}

cplx trace(const GroupRingMatrix& m) {
  if (!m.is_square()) fail(ErrorKind::ShapeMismatch, "trace of a non-square matrix");
  cplx t = 0.0;
  for (int i = 0; i < m.rows(); ++i) t += trace(m(i, i));
  return t;
}

GroupRingMatrix kron(const GroupRingMatrix& a, const GroupRingMatrix& b) {
  const AlgebraModel& ma = a.model();
  const AlgebraModel& mb = b.model();
  const AlgebraModel model = tensor(ma, mb);
  GroupRingMatrix out(model, a.rows() * b.rows(), a.cols() * b.cols());
  for (int i1 = 0; i1 < a.rows(); ++i1)
    for (int j1 = 0; j1 < a.cols(); ++j1) {
      const auto& x = a(i1, j1);
      if (x.is_zero()) continue;
      for (int i2 = 0; i2 < b.rows(); ++i2)
        for (int j2 = 0; j2 < b.cols(); ++j2) {
          const auto& y = b(i2, j2);
          if (y.is_zero()) continue;
          GroupRingElement e(model);
          for (const auto& [kx, cx] : x.terms())
            for (const auto& [ky, cy] : y.terms()) e.add_term(tensor_key(ma, kx, mb, ky), cx * cy);
          out.set(i1 * b.rows() + i2, j1 * b.cols() + j2, std::move(e));
        }
    }
  return out;
}

// ---- realization -----------------------------------------------------------

Realization::Realization(const GroupRingMatrix& m)
    : model_(m.model()),
      rows_(static_cast<Eigen::Index>(m.rows()) * m.model().group_order()),
      cols_(static_cast<Eigen::Index>(m.cols()) * m.model().group_order()) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      for (const auto& [k, c] : m(i, j).terms()) terms_.push_back(Term{i, j, k.element, k.exponents, c});
}

DenseMatrix Realization::at(std::span<const double> theta) const {
  const int n = model_.group_order();
  const int rank = model_.torus_rank();
  if (static_cast<int>(theta.size()) != rank)
    fail(ErrorKind::ShapeMismatch, "sample point has the wrong dimension");
  const FiniteGroupTable& g = model_.group();
  DenseMatrix out = DenseMatrix::Zero(rows_, cols_);
  for (const Term& t : terms_) {
    double phase = 0.0;
    for (int d = 0; d < rank; ++d) phase += t.exponents[d] * theta[d];
    const cplx v = rank == 0 ? t.coefficient : t.coefficient * std::polar(1.0, phase);
    const Eigen::Index r0 = static_cast<Eigen::Index>(t.row) * n;
    const Eigen::Index c0 = static_cast<Eigen::Index>(t.col) * n;
    for (int h = 0; h < n; ++h) out(r0 + g.mult(t.element, h), c0 + h) += v;
  }
  return out;
}

DenseMatrix Realization::dense() const {
  if (model_.torus_rank() != 0) fail(ErrorKind::Unsupported, "dense realization of a torus model");
  return at({});
}

GroupRingMatrix derealize(const AlgebraModel& model, const DenseMatrix& dense, int rows, int cols) {
  if (!model.is_finite()) fail(ErrorKind::Unsupported, "derealize needs a finite model");
  const int n = model.group_order();
  if (dense.rows() != static_cast<Eigen::Index>(rows) * n || dense.cols() != static_cast<Eigen::Index>(cols) * n)
    fail(ErrorKind::ShapeMismatch, "derealize dimensions");
  GroupRingMatrix out(model, rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      GroupRingElement e(model);
      for (int g = 0; g < n; ++g) e.add_term(GroupKey{g, {}}, dense(i * n + g, j * n));
      out.set(i, j, std::move(e));
    }
  return out;
}

// ---- determinants ----------------------------------------------------------

double DetResult::det() const { return std::exp(log_det); }

int numerical_rank(const Eigen::VectorXd& sv, double epsilon) {
  if (sv.size() == 0) return 0;
  const double smax = sv.maxCoeff();
  if (smax == 0.0) return 0;
  const double cut = epsilon * smax;
  int r = 0;
  for (Eigen::Index j = 0; j < sv.size(); ++j) {
    if (sv[j] >= cut / 10.0 && sv[j] <= cut * 10.0)
      fail(ErrorKind::IllConditioned, "singular value " + std::to_string(sv[j] / smax) +
                                          " (relative) lies within a decade of the cutoff");
    if (sv[j] > cut) ++r;
  }
  return r;
}

namespace {

Eigen::VectorXd singular_values(const DenseMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return Eigen::VectorXd();
  if (m.rows() == 1 && m.cols() == 1) return Eigen::VectorXd::Constant(1, std::abs(m(0, 0)));
  Eigen::JacobiSVD<DenseMatrix> svd(m);
  return svd.singularValues();
}

struct RankScan {
  int rank = 0;
  double scale = 0.0;
};

RankScan scan_rank(const AlgebraModel& model, const SymbolFunction& symbol, double epsilon) {
  RankScan out;
  if (model.is_finite()) {
    const Eigen::VectorXd sv = singular_values(symbol({}));
    out.rank = numerical_rank(sv, epsilon);
    out.scale = sv.size() ? sv.maxCoeff() : 0.0;
    return out;
  }
  for (const auto& theta : generic_sample_points(model.torus_rank())) {
    const Eigen::VectorXd sv = singular_values(symbol(theta));
    if (sv.size() == 0) continue;
    const double smax = sv.maxCoeff();
    out.scale = std::max(out.scale, smax);
    int r = 0;
    for (Eigen::Index j = 0; j < sv.size(); ++j)
      if (sv[j] > epsilon * smax) ++r;
    out.rank = std::max(out.rank, r);
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> generic_sample_points(int rank) {
  // Kronecker sequence with irrational steps; avoids rational angles where symbols
  // of integer Laurent polynomials tend to vanish.
  static const double alpha[3] = {0.41421356237309515, 0.7320508075688772, 0.23606797749978969};
  std::vector<std::vector<double>> pts;
  for (int j = 1; j <= 7; ++j) {
    std::vector<double> t(rank);
    for (int d = 0; d < rank; ++d) {
      const double x = 0.1234 + j * alpha[d];
      t[d] = 2.0 * M_PI * (x - std::floor(x));
    }
    pts.push_back(std::move(t));
  }
  return pts;
}

int generic_rank(const AlgebraModel& model, const SymbolFunction& symbol, double epsilon) {
  return scan_rank(model, symbol, epsilon).rank;
}

DetResult spectral_log_det(const AlgebraModel& model, const SymbolFunction& symbol,
                           const DetOptions& options) {
  const double n_group = model.group_order();
  DetResult res;
  if (model.is_finite()) {
    const DenseMatrix m = symbol({});
    const Eigen::VectorXd sv = singular_values(m);
    const int r = numerical_rank(sv, options.epsilon);
    double acc = 0.0;
    for (int j = 0; j < r; ++j) acc += std::log(sv[j]);
    res.log_det = acc / n_group;
    res.generic_rank = r;
    res.invertible = m.rows() == m.cols() && r == m.rows();
    return res;
  }

  const RankScan scan = scan_rank(model, symbol, options.epsilon);
  res.generic_rank = scan.rank;
  if (scan.rank == 0) {
    const DenseMatrix probe = symbol(generic_sample_points(model.torus_rank()).front());
    res.invertible = probe.rows() == 0 && probe.cols() == 0;
    return res;
  }
  const int r = scan.rank;
  std::array<double, 3> floors;
  for (int i = 0; i < 3; ++i) floors[i] = options.floor_ladder[i] * scan.scale;
  std::map<int, double> min_sigma;
  std::mutex min_mutex;
  const TorusIntegrand integrand = [&](std::span<const double> theta, int resolution, std::span<double> out) {
    const Eigen::VectorXd sv = singular_values(symbol(theta));
    for (int i = 0; i < 3; ++i) {
      double acc = 0.0;
      for (int j = 0; j < r; ++j) acc += std::log(std::max(sv[j], floors[i]));
      out[i] = acc;
    }
    std::lock_guard<std::mutex> lock(min_mutex);
    auto [it, inserted] = min_sigma.emplace(resolution, sv[r - 1]);
    if (!inserted) it->second = std::min(it->second, sv[r - 1]);
  };
  QuadratureOptions q = options.quadrature;
  q.tolerance *= n_group;
  const QuadratureResult quad = integrate_over_torus(model.torus_rank(), 3, integrand, q);
  res.log_det = quad.values[2] / n_group;
  res.resolution = quad.resolution;
  res.error_estimate = quad.errors[2] / n_group;
  const double d1 = std::abs(quad.values[0] - quad.values[1]);
  const double d2 = std::abs(quad.values[1] - quad.values[2]);
  res.determinant_class = d2 <= std::max(q.tolerance, 0.5 * d1);

  const DenseMatrix probe = symbol(generic_sample_points(model.torus_rank()).front());
  bool square_full = probe.rows() == probe.cols() && r == probe.rows();
  bool bounded_below = false;
  if (min_sigma.size() >= 2) {
    auto last = std::prev(min_sigma.end());
    auto prev = std::prev(last);
    bounded_below = last->second > 0.75 * prev->second && last->second > 1e-8 * scan.scale;
  }
  res.bounded_below = bounded_below;
  res.invertible = square_full && bounded_below;
  return res;
}

namespace {

// Scalar Laurent polynomial symbol without matrix allocation.
DetResult scalar_torus_log_det(const GroupRingElement& a, const DetOptions& options) {
  const AlgebraModel& model = a.model();
  const int rank = model.torus_rank();
  std::vector<std::pair<std::vector<int>, cplx>> terms(a.terms().size());
  std::transform(a.terms().begin(), a.terms().end(), terms.begin(),
                 [](const auto& kv) { return std::make_pair(kv.first.exponents, kv.second); });
  auto eval = [&](std::span<const double> theta) {
    cplx s = 0.0;
    for (const auto& [v, c] : terms) {
      double ph = 0.0;
      for (int d = 0; d < rank; ++d) ph += v[d] * theta[d];
      s += c * std::polar(1.0, ph);
    }
    return std::abs(s);
  };
  DetResult res;
  if (terms.empty()) {
    res.generic_rank = 0;
    res.invertible = false;
    return res;
  }
  double scale = 0.0;
  for (const auto& t : generic_sample_points(rank)) scale = std::max(scale, eval(t));
  res.generic_rank = 1;
  std::array<double, 3> floors;
  for (int i = 0; i < 3; ++i) floors[i] = options.floor_ladder[i] * scale;
  std::map<int, double> min_sigma;
  std::mutex min_mutex;
  const TorusIntegrand integrand = [&](std::span<const double> theta, int resolution, std::span<double> out) {
    const double s = eval(theta);
    for (int i = 0; i < 3; ++i) out[i] = std::log(std::max(s, floors[i]));
    std::lock_guard<std::mutex> lock(min_mutex);
    auto [it, inserted] = min_sigma.emplace(resolution, s);
    if (!inserted) it->second = std::min(it->second, s);
  };
  const QuadratureResult quad = integrate_over_torus(rank, 3, integrand, options.quadrature);
  res.log_det = quad.values[2];
  res.resolution = quad.resolution;
  res.error_estimate = quad.errors[2];
  const double d1 = std::abs(quad.values[0] - quad.values[1]);
  const double d2 = std::abs(quad.values[1] - quad.values[2]);
  res.determinant_class = d2 <= std::max(options.quadrature.tolerance, 0.5 * d1);
  if (min_sigma.size() >= 2) {
    auto last = std::prev(min_sigma.end());
    auto prev = std::prev(last);
    res.invertible = last->second > 0.75 * prev->second && last->second > 1e-8 * scale;
  } else {
    res.invertible = false;
  }
  res.bounded_below = res.invertible;
  return res;
}

}  // namespace

DetResult fk_det(const GroupRingMatrix& m, const DetOptions& options) {
  if (!m.is_square()) fail(ErrorKind::ShapeMismatch, "fk_det needs a square matrix");
  if (m.rows() == 1 && m.model().group_order() == 1 && m.model().torus_rank() > 0)
    return scalar_torus_log_det(m(0, 0), options);
  const Realization real(m);
  return spectral_log_det(m.model(), [&](std::span<const double> t) { return real.at(t); }, options);
}

double vn_dim(int rank) {
  if (rank < 0) fail(ErrorKind::BadParams, "negative rank");
  return static_cast<double>(rank);
}

double vn_dim(const GroupRingMatrix& p, double tol) {
  if (!p.is_square()) fail(ErrorKind::NotProjection, "projection must be square");
  const double scale = std::max(1.0, p.max_abs());
  if ((p * p - p).max_abs() > tol * scale) fail(ErrorKind::NotProjection, "p^2 != p");
  if ((p.star() - p).max_abs() > tol * scale) fail(ErrorKind::NotProjection, "p* != p");
  return trace(p).real();
}

}  // namespace l2t
