#include "l2t/spaces.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace l2t {

// ---- words ----------------------------------------------------------------

Word Word::generator(int g, int power) {
  Word w;
  if (power != 0) w.letters.emplace_back(g, power);
  return w;
}

Word Word::operator*(const Word& other) const {
  Word out(*this);
  for (const auto& [g, p] : other.letters) {
    if (!out.letters.empty() && out.letters.back().first == g) {
      out.letters.back().second += p;
      if (out.letters.back().second == 0) out.letters.pop_back();
    } else {
      out.letters.emplace_back(g, p);
    }
  }
  return out;
}

Word Word::inverse() const {
  Word out;
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) out.letters.emplace_back(it->first, -it->second);
  return out;
}

int GroupPresentation::generator_index(std::string_view g) const {
  for (std::size_t i = 0; i < generators.size(); ++i)
    if (generators[i] == g) return static_cast<int>(i);
  return -1;
}

std::string GroupPresentation::format(const Word& w) const {
  if (w.is_identity()) return "1";
  std::ostringstream os;
  for (std::size_t i = 0; i < w.letters.size(); ++i) {
    if (i) os << '*';
    os << generators.at(w.letters[i].first);
    if (w.letters[i].second != 1) os << '^' << w.letters[i].second;
  }
  return os.str();
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\n");
  return std::string(s.substr(b, e - b + 1));
}

int parse_int(std::string_view s, std::string_view what) {
  const std::string t = trim(s);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
    fail(ErrorKind::InvalidInput, "cannot read integer '" + t + "' in " + std::string(what));
  return v;
}

}  // namespace

Word GroupPresentation::parse(std::string_view text) const {
  Word out;
  std::string token;
  const auto flush = [&] {
    const std::string t = trim(token);
    token.clear();
    if (t.empty()) return;
    std::string base = t;
    int power = 1;
    if (const auto caret = t.find('^'); caret != std::string::npos) {
      base = trim(std::string_view(t).substr(0, caret));
      power = parse_int(std::string_view(t).substr(caret + 1), t);
    }
    const int g = generator_index(base);
    if (g < 0) {
      if (base == "1" || base == "e") return;
      fail(ErrorKind::InvalidInput, "unknown generator '" + base + "'");
    }
    out = out * Word::generator(g, power);
  };
  for (char ch : text) {
    if (ch == '*' || ch == ' ' || ch == '.')
      flush();
    else
      token.push_back(ch);
  }
  flush();
  return out;
}

GroupPresentation GroupPresentation::trivial() { return GroupPresentation{"1", {}, {}}; }

GroupPresentation GroupPresentation::cyclic(int p) {
  if (p < 1) fail(ErrorKind::BadParams, "cyclic group order must be positive");
  return GroupPresentation{"Z/" + std::to_string(p), {"t"}, {Word::generator(0, p)}};
}

namespace {

Word commutator(int a, int b) {
  return Word::generator(a) * Word::generator(b) * Word::generator(a, -1) * Word::generator(b, -1);
}

Word shifted(const Word& w, int offset) {
  Word out(w);
  for (auto& l : out.letters) l.first += offset;
  return out;
}

}  // namespace

GroupPresentation GroupPresentation::free_abelian(int k) {
  if (k < 0) fail(ErrorKind::BadParams, "negative rank");
  GroupPresentation g{k == 1 ? "Z" : "Z^" + std::to_string(k), {}, {}};
  for (int i = 0; i < k; ++i) g.generators.push_back(k == 1 ? "t" : "t" + std::to_string(i + 1));
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) g.relators.push_back(commutator(i, j));
  return g;
}

GroupPresentation GroupPresentation::product(const GroupPresentation& a, const GroupPresentation& b) {
  GroupPresentation out{a.name + " x " + b.name, a.generators, a.relators};
  const int off = static_cast<int>(a.generators.size());
  for (const auto& g : b.generators) {
    std::string name = g;
    for (int suffix = 2; std::find(out.generators.begin(), out.generators.end(), name) != out.generators.end();
         ++suffix)
      name = g + "_" + std::to_string(suffix);
    out.generators.push_back(name);
  }
  for (const auto& r : b.relators) out.relators.push_back(shifted(r, off));
  for (int i = 0; i < off; ++i)
    for (std::size_t j = 0; j < b.generators.size(); ++j) out.relators.push_back(commutator(i, off + static_cast<int>(j)));
  return out;
}

// ---- integral group ring ----------------------------------------------------

IntegralElement IntegralElement::word(const Word& w, long long c) {
  IntegralElement e;
  e.add(w, c);
  return e;
}

void IntegralElement::add(const Word& w, long long c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

IntegralElement& IntegralElement::operator+=(const IntegralElement& o) {
  for (const auto& [w, c] : o.terms_) add(w, c);
  return *this;
}

IntegralElement& IntegralElement::operator-=(const IntegralElement& o) {
  for (const auto& [w, c] : o.terms_) add(w, -c);
  return *this;
}

IntegralElement operator*(const IntegralElement& a, const IntegralElement& b) {
  IntegralElement out;
  for (const auto& [wa, ca] : a.terms_)
    for (const auto& [wb, cb] : b.terms_) out.add(wa * wb, ca * cb);
  return out;
}

IntegralElement IntegralElement::operator-() const {
  IntegralElement out;
  for (const auto& [w, c] : terms_) out.add(w, -c);
  return out;
}

IntegralElement IntegralElement::left_multiplied(const Word& g) const {
  IntegralElement out;
  for (const auto& [w, c] : terms_) out.add(g * w, c);
  return out;
}

IntegralElement IntegralElement::right_multiplied(const Word& g) const {
  IntegralElement out;
  for (const auto& [w, c] : terms_) out.add(w * g, c);
  return out;
}

IntegralMatrix::IntegralMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), entries_(static_cast<std::size_t>(rows) * std::max(cols, 0)) {
  if (rows < 0 || cols < 0) fail(ErrorKind::ShapeMismatch, "negative matrix shape");
}

IntegralMatrix IntegralMatrix::identity(int n) {
  IntegralMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = IntegralElement::one();
  return m;
}

const IntegralElement& IntegralMatrix::operator()(int i, int j) const {
  return entries_.at(static_cast<std::size_t>(i) * cols_ + j);
}

IntegralElement& IntegralMatrix::at(int i, int j) {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_) fail(ErrorKind::ShapeMismatch, "index out of range");
  return entries_[static_cast<std::size_t>(i) * cols_ + j];
}

bool IntegralMatrix::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.is_zero(); });
}

IntegralMatrix then(const IntegralMatrix& f, const IntegralMatrix& g) {
  if (f.rows() != g.cols()) fail(ErrorKind::ShapeMismatch, "chain maps do not compose");
  IntegralMatrix out(g.rows(), f.cols());
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < f.cols(); ++j)
      for (int k = 0; k < f.rows(); ++k)
        if (!f(k, j).is_zero() && !g(i, k).is_zero()) out.at(i, j) += f(k, j) * g(i, k);
  return out;
}

// ---- CW complexes -----------------------------------------------------------

EquivariantCWComplex::EquivariantCWComplex(GroupPresentation group, std::vector<int> cells,
                                           std::vector<IntegralMatrix> boundary, std::string name)
    : group_(std::move(group)), cells_(std::move(cells)), boundary_(std::move(boundary)), name_(std::move(name)) {
  if (cells_.empty()) fail(ErrorKind::InvalidInput, "complex has no cells");
  for (int c : cells_)
    if (c < 0) fail(ErrorKind::InvalidInput, "negative cell count");
  if (boundary_.size() + 1 != cells_.size())
    fail(ErrorKind::ShapeMismatch, "expected " + std::to_string(cells_.size() - 1) + " boundary matrices, got " +
                                       std::to_string(boundary_.size()));
  const int ngen = static_cast<int>(group_.generators.size());
  for (std::size_t k = 0; k < boundary_.size(); ++k) {
    const auto& b = boundary_[k];
    if (b.rows() != cells_[k] || b.cols() != cells_[k + 1])
      fail(ErrorKind::ShapeMismatch, "boundary d_" + std::to_string(k + 1) + " has the wrong shape");
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j)
        for (const auto& [w, c] : b(i, j).terms())
          for (const auto& [g, p] : w.letters)
            if (g < 0 || g >= ngen) fail(ErrorKind::InvalidInput, "boundary word uses an unknown generator");
  }
}

IntegralMatrix EquivariantCWComplex::boundary(int k) const {
  if (k >= 1 && k <= dimension()) return boundary_[k - 1];
  return IntegralMatrix(cell_count(k - 1), cell_count(k));
}

EquivariantCWComplex EquivariantCWComplex::renamed(std::string name) const {
  EquivariantCWComplex out(*this);
  out.name_ = std::move(name);
  return out;
}

int euler_char(const EquivariantCWComplex& x) {
  int chi = 0;
  for (int k = 0; k <= x.dimension(); ++k) chi += (k % 2 == 0 ? 1 : -1) * x.cell_count(k);
  return chi;
}

// ---- coefficients -----------------------------------------------------------

CoefficientSystem CoefficientSystem::trivial(const GroupPresentation& group) {
  CoefficientSystem h;
  h.images.assign(group.generators.size(), GeneratorImage{1.0, h.target.identity()});
  return h;
}

namespace {

GroupKey key_power(const AlgebraModel& model, const GroupKey& key, int p) {
  GroupKey base = p < 0 ? model.inverse(key) : key;
  GroupKey out = model.identity();
  for (int i = 0; i < std::abs(p); ++i) out = model.multiply(out, base);
  return out;
}

}  // namespace

GroupRingElement CoefficientSystem::apply(const Word& w) const {
  cplx scale = 1.0;
  GroupKey key = target.identity();
  for (const auto& [g, p] : w.letters) {
    if (g < 0 || g >= static_cast<int>(images.size()))
      fail(ErrorKind::HomomorphismInvalid, "no image for generator " + std::to_string(g));
    scale *= std::pow(images[g].scale, p);
    key = target.multiply(key, key_power(target, images[g].key, p));
  }
  return GroupRingElement::monomial(target, key, scale);
}

GroupRingElement CoefficientSystem::apply(const IntegralElement& a) const {
  GroupRingElement out(target);
  for (const auto& [w, c] : a.terms()) {
    const GroupRingElement m = apply(w);
    for (const auto& [key, v] : m.terms()) out.add_term(key, static_cast<double>(c) * v);
  }
  return out;
}

GroupRingMatrix CoefficientSystem::apply(const IntegralMatrix& m) const {
  GroupRingMatrix out(target, m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (!m(i, j).is_zero()) out.set(i, j, apply(m(i, j)));
  return out;
}

GroupRingMatrix CoefficientSystem::cochain_map(const IntegralMatrix& chain) const {
  const int mult = multiplicity;
  GroupRingMatrix out(target, chain.cols() * mult, chain.rows() * mult);
  for (int i = 0; i < chain.rows(); ++i)
    for (int j = 0; j < chain.cols(); ++j) {
      if (chain(i, j).is_zero()) continue;
      const GroupRingElement v = apply(chain(i, j));
      for (int s = 0; s < mult; ++s) out.set(j * mult + s, i * mult + s, v);
    }
  return out;
}

void check_homomorphism(const GroupPresentation& group, const CoefficientSystem& h) {
  if (h.multiplicity < 1) fail(ErrorKind::HomomorphismInvalid, "multiplicity must be positive");
  if (h.images.size() != group.generators.size())
    fail(ErrorKind::HomomorphismInvalid, std::to_string(group.generators.size()) + " generators but " +
                                             std::to_string(h.images.size()) + " images");
  for (std::size_t g = 0; g < h.images.size(); ++g) {
    if (!h.target.valid_key(h.images[g].key))
      fail(ErrorKind::HomomorphismInvalid, "image of " + group.generators[g] + " is not in " + h.target.describe());
    if (std::abs(h.images[g].scale) == 0.0)
      fail(ErrorKind::HomomorphismInvalid, "image of " + group.generators[g] + " is zero");
  }
  for (const auto& r : group.relators) {
    const GroupRingElement v = h.apply(r);
    const cplx c = v.coefficient(h.target.identity());
    if (v.terms().size() != 1 || std::abs(c - 1.0) > 1e-12)
      fail(ErrorKind::HomomorphismInvalid, "relator " + group.format(r) + " does not map to 1");
  }
}

CoefficientSystem tensor(const CoefficientSystem& a, const CoefficientSystem& b) {
  CoefficientSystem out;
  out.target = tensor(a.target, b.target);
  out.multiplicity = a.multiplicity * b.multiplicity;
  out.label = a.label + "(x)" + b.label;
  for (const auto& im : a.images)
    out.images.push_back({im.scale, tensor_key(a.target, im.key, b.target, b.target.identity())});
  for (const auto& im : b.images)
    out.images.push_back({im.scale, tensor_key(a.target, a.target.identity(), b.target, im.key)});
  return out;
}

CochainComplex cochain_with_coefficients(const EquivariantCWComplex& x, const CoefficientSystem& h,
                                         const PreferredVolume& sigma) {
  check_homomorphism(x.group(), h);
  const int m = h.multiplicity;
  if (sigma.gram && (sigma.gram->rows() != m || sigma.gram->cols() != m || !(sigma.gram->model() == h.target)))
    fail(ErrorKind::ShapeMismatch, "preferred inner product does not match the coefficients");
  std::vector<HilbertianModule> modules;
  for (int k = 0; k <= x.dimension(); ++k) {
    const int n = x.cell_count(k) * m;
    const std::string label = "C^" + std::to_string(k) + "(" + x.name() + ")";
    if (!sigma.gram) {
      modules.emplace_back(h.target, n, label);
      continue;
    }
    GroupRingMatrix gram(h.target, n, n);
    for (int c = 0; c < x.cell_count(k); ++c)
      for (int s = 0; s < m; ++s)
        for (int t = 0; t < m; ++t) gram.set(c * m + s, c * m + t, (*sigma.gram)(s, t));
    modules.emplace_back(h.target, n, std::move(gram), label);
  }
  std::vector<GroupRingMatrix> d;
  for (int k = 0; k < x.dimension(); ++k) d.push_back(h.cochain_map(x.boundary(k + 1)));
  return CochainComplex(h.target, std::move(modules), std::move(d), x.name());
}

UnimodularityReport unimodularity_check(const CoefficientSystem& h) {
  UnimodularityReport r;
  for (const auto& im : h.images) {
    const GroupRingMatrix lg =
        GroupRingMatrix::from_element(GroupRingElement::monomial(h.target, im.key, im.scale));
    const double v = fk_det(lg).log_det;
    r.log_dets.push_back(v);
    if (std::abs(v) > 1e-12) r.unimodular = false;
  }
  return r;
}

TorsionReport l2_torsion(const EquivariantCWComplex& x, const CoefficientSystem& h, const PreferredVolume& sigma,
                         const DetOptions& options) {
  check_homomorphism(x.group(), h);
  const UnimodularityReport u = unimodularity_check(h);
  if (!u.unimodular) fail(ErrorKind::NotUnimodular, "phi does not take values of determinant 1");
  const CochainComplex c = cochain_with_coefficients(x, h, sigma);
  const ComplexDiagnostics diag = validate(c);
  for (std::size_t i = 0; i < diag.d_squared.size(); ++i)
    if (diag.d_squared[i] > kComplexTolerance)
      fail(ErrorKind::NotComplex, "d^" + std::to_string(i + 1) + " d^" + std::to_string(i) +
                                      " != 0 (max coefficient " + std::to_string(diag.d_squared[i]) + ")");
  return torsion(c, options);
}

// ---- constructions ----------------------------------------------------------

EquivariantCWComplex mapping_torus(const EquivariantCWComplex& y, const std::vector<IntegralMatrix>& f) {
  if (!y.group().generators.empty()) fail(ErrorKind::InvalidInput, "mapping torus needs a complex over the trivial group");
  const int n = y.dimension();
  if (static_cast<int>(f.size()) != n + 1) fail(ErrorKind::ShapeMismatch, "chain map needs one matrix per degree");
  for (int k = 0; k <= n; ++k)
    if (f[k].rows() != y.cell_count(k) || f[k].cols() != y.cell_count(k))
      fail(ErrorKind::ShapeMismatch, "chain map has the wrong shape in degree " + std::to_string(k));
  for (int k = 1; k <= n; ++k)
    if (!(then(y.boundary(k), f[k - 1]) == then(f[k], y.boundary(k))))
      fail(ErrorKind::NotCellular, "f does not commute with the boundary in degree " + std::to_string(k));

  // Degree k: cells e of Y_k, then c x I for c in Y_{k-1}.
  std::vector<int> cells(n + 2);
  for (int k = 0; k <= n + 1; ++k) cells[k] = y.cell_count(k) + y.cell_count(k - 1);
  const Word t = Word::generator(0);
  std::vector<IntegralMatrix> bd;
  for (int k = 1; k <= n + 1; ++k) {
    IntegralMatrix b(cells[k - 1], cells[k]);
    const int rk = y.cell_count(k - 1), ck = y.cell_count(k);
    const IntegralMatrix dy = y.boundary(k), dy1 = y.boundary(k - 1);
    for (int i = 0; i < dy.rows(); ++i)
      for (int j = 0; j < dy.cols(); ++j) b.at(i, j) = dy(i, j);
    const long long sign = (k - 1) % 2 == 0 ? 1 : -1;
    for (int c = 0; c < rk; ++c) {
      const int col = ck + c;
      for (int i = 0; i < rk; ++i) {
        IntegralElement v = f[k - 1](i, c).left_multiplied(t);
        if (i == c) v -= IntegralElement::one();
        for (auto& [w, coeff] : v.terms()) b.at(i, col).add(w, sign * coeff);
      }
      for (int i = 0; i < dy1.rows(); ++i) b.at(rk + i, col) = dy1(i, c);
    }
    bd.push_back(std::move(b));
  }
  return EquivariantCWComplex(GroupPresentation::free_abelian(1), std::move(cells), std::move(bd),
                              "T(" + y.name() + ")");
}

int product_cell_index(const EquivariantCWComplex& x1, const EquivariantCWComplex& x2, int a, int i, int b, int j) {
  int idx = 0;
  for (int a2 = 0; a2 < a; ++a2) idx += x1.cell_count(a2) * x2.cell_count(a + b - a2);
  return idx + i * x2.cell_count(b) + j;
}

EquivariantCWComplex product_space(const EquivariantCWComplex& x1, const EquivariantCWComplex& x2) {
  const int n1 = x1.dimension(), n2 = x2.dimension(), n = n1 + n2;
  const int off = static_cast<int>(x1.group().generators.size());
  std::vector<int> cells(n + 1, 0);
  for (int a = 0; a <= n1; ++a)
    for (int b = 0; b <= n2; ++b) cells[a + b] += x1.cell_count(a) * x2.cell_count(b);
  std::vector<IntegralMatrix> bd;
  for (int k = 1; k <= n; ++k) {
    IntegralMatrix m(cells[k - 1], cells[k]);
    for (int a = std::max(0, k - n2); a <= std::min(k, n1); ++a) {
      const int b = k - a;
      const IntegralMatrix d1 = x1.boundary(a), d2 = x2.boundary(b);
      const long long sign = a % 2 == 0 ? 1 : -1;
      for (int i = 0; i < x1.cell_count(a); ++i)
        for (int j = 0; j < x2.cell_count(b); ++j) {
          const int col = product_cell_index(x1, x2, a, i, b, j);
          if (a >= 1)
            for (int i2 = 0; i2 < x1.cell_count(a - 1); ++i2)
              if (!d1(i2, i).is_zero()) m.at(product_cell_index(x1, x2, a - 1, i2, b, j), col) += d1(i2, i);
          if (b >= 1)
            for (int j2 = 0; j2 < x2.cell_count(b - 1); ++j2)
              for (const auto& [w, c] : d2(j2, j).terms())
                m.at(product_cell_index(x1, x2, a, i, b - 1, j2), col).add(shifted(w, off), sign * c);
        }
    }
    bd.push_back(std::move(m));
  }
  return EquivariantCWComplex(GroupPresentation::product(x1.group(), x2.group()), std::move(cells), std::move(bd),
                              x1.name() + " x " + x2.name());
}

EquivariantCWComplex relift_cell(const EquivariantCWComplex& x, int k, int j, const Word& g) {
  if (j < 0 || j >= x.cell_count(k)) fail(ErrorKind::InvalidInput, "no such cell");
  std::vector<IntegralMatrix> bd;
  for (int d = 1; d <= x.dimension(); ++d) {
    IntegralMatrix b = x.boundary(d);
    if (d == k)
      for (int i = 0; i < b.rows(); ++i) b.at(i, j) = b(i, j).left_multiplied(g);
    if (d == k + 1)
      for (int c = 0; c < b.cols(); ++c) b.at(j, c) = b(j, c).right_multiplied(g.inverse());
    bd.push_back(std::move(b));
  }
  return EquivariantCWComplex(x.group(), x.cells(), std::move(bd), x.name());
}

EquivariantCWComplex reorder_cells(const EquivariantCWComplex& x, int k, const std::vector<int>& perm) {
  const int n = x.cell_count(k);
  std::vector<int> sorted(perm);
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expected(n);
  std::iota(expected.begin(), expected.end(), 0);
  if (sorted != expected) fail(ErrorKind::InvalidInput, "not a permutation of the degree-" + std::to_string(k) + " cells");
  std::vector<IntegralMatrix> bd;
  for (int d = 1; d <= x.dimension(); ++d) {
    const IntegralMatrix b = x.boundary(d);
    IntegralMatrix out(b.rows(), b.cols());
    for (int i = 0; i < b.rows(); ++i)
      for (int c = 0; c < b.cols(); ++c) {
        const int si = d - 1 == k ? perm[i] : i;
        const int sc = d == k ? perm[c] : c;
        out.at(i, c) = b(si, sc);
      }
    bd.push_back(std::move(out));
  }
  return EquivariantCWComplex(x.group(), x.cells(), std::move(bd), x.name());
}

// ---- pushouts ---------------------------------------------------------------

namespace {

bool same_image(const CoefficientSystem& h, const IntegralMatrix& a, const IntegralMatrix& b) {
  const GroupRingMatrix d = h.apply(a) - h.apply(b);
  return d.max_abs() <= 1e-9;
}

}  // namespace

Pushout pushout_assemble(const EquivariantCWComplex& x0, const EquivariantCWComplex& x1,
                         const EquivariantCWComplex& x2, const std::vector<std::vector<int>>& j1,
                         const ChainMap& j2, const CoefficientSystem& witness) {
  if (!(x0.group().generators == x1.group().generators) || !(x0.group().generators == x2.group().generators))
    fail(ErrorKind::InvalidInput, "pushout pieces must share the group");
  check_homomorphism(x0.group(), witness);
  const int n = std::max({x0.dimension(), x1.dimension(), x2.dimension()});

  // j1 must embed X0 as a subcomplex of X1.
  std::vector<std::vector<int>> emb(n + 1);
  std::vector<std::vector<int>> preimage(n + 1);
  Pushout out;
  for (int k = 0; k <= n; ++k) {
    emb[k] = k < static_cast<int>(j1.size()) ? j1[k] : std::vector<int>{};
    if (static_cast<int>(emb[k].size()) != x0.cell_count(k))
      fail(ErrorKind::NotSubcomplex, "j1 lists " + std::to_string(emb[k].size()) + " cells in degree " +
                                         std::to_string(k) + ", X0 has " + std::to_string(x0.cell_count(k)));
    preimage[k].assign(x1.cell_count(k), -1);
    for (int c = 0; c < x0.cell_count(k); ++c) {
      const int i = emb[k][c];
      if (i < 0 || i >= x1.cell_count(k) || preimage[k][i] >= 0)
        fail(ErrorKind::NotSubcomplex, "j1 is not injective into the cells of X1");
      preimage[k][i] = c;
    }
    IntegralMatrix jm(x1.cell_count(k), x0.cell_count(k));
    for (int c = 0; c < x0.cell_count(k); ++c) jm.at(emb[k][c], c) = IntegralElement::one();
    out.j1.push_back(std::move(jm));
  }
  for (int k = 1; k <= n; ++k)
    if (!same_image(witness, then(x0.boundary(k), out.j1[k - 1]), then(out.j1[k], x1.boundary(k))))
      fail(ErrorKind::NotSubcomplex, "boundary of X0 in degree " + std::to_string(k) + " is not the restriction of X1's");

  for (int k = 0; k <= n; ++k) {
    if (k < static_cast<int>(j2.size())) {
      if (j2[k].rows() != x2.cell_count(k) || j2[k].cols() != x0.cell_count(k))
        fail(ErrorKind::NotCellular, "j2 has the wrong shape in degree " + std::to_string(k));
      out.j2.push_back(j2[k]);
    } else {
      out.j2.emplace_back(x2.cell_count(k), x0.cell_count(k));
    }
  }
  for (int k = 1; k <= n; ++k)
    if (!same_image(witness, then(x0.boundary(k), out.j2[k - 1]), then(out.j2[k], x2.boundary(k))))
      fail(ErrorKind::NotCellular, "j2 does not commute with the boundary in degree " + std::to_string(k));

  out.new_cells.resize(n + 1);
  std::vector<std::vector<int>> new_index(n + 1);
  std::vector<int> cells(n + 1);
  for (int k = 0; k <= n; ++k) {
    new_index[k].assign(x1.cell_count(k), -1);
    for (int i = 0; i < x1.cell_count(k); ++i)
      if (preimage[k][i] < 0) {
        new_index[k][i] = x2.cell_count(k) + static_cast<int>(out.new_cells[k].size());
        out.new_cells[k].push_back(i);
      }
    cells[k] = x2.cell_count(k) + static_cast<int>(out.new_cells[k].size());
  }
  while (cells.size() > 1 && cells.back() == 0) cells.pop_back();

  const int dim = static_cast<int>(cells.size()) - 1;
  std::vector<IntegralMatrix> bd;
  for (int k = 1; k <= dim; ++k) {
    IntegralMatrix b(cells[k - 1], cells[k]);
    const IntegralMatrix d2 = x2.boundary(k), d1 = x1.boundary(k);
    for (int i = 0; i < d2.rows(); ++i)
      for (int j = 0; j < d2.cols(); ++j) b.at(i, j) = d2(i, j);
    for (int a : out.new_cells[k]) {
      const int col = new_index[k][a];
      for (int i = 0; i < d1.rows(); ++i) {
        const IntegralElement& lam = d1(i, a);
        if (lam.is_zero()) continue;
        if (preimage[k - 1][i] < 0) {
          b.at(new_index[k - 1][i], col) += lam;
        } else {
          const int c = preimage[k - 1][i];
          for (int m = 0; m < x2.cell_count(k - 1); ++m)
            if (!out.j2[k - 1](m, c).is_zero()) b.at(m, col) += lam * out.j2[k - 1](m, c);
        }
      }
    }
    bd.push_back(std::move(b));
  }
  out.space = EquivariantCWComplex(x0.group(), cells, std::move(bd), x1.name() + " u " + x2.name());

  for (int k = 0; k <= n; ++k) {
    const int nk = k <= dim ? cells[k] : 0;
    IntegralMatrix i1(nk, x1.cell_count(k)), i2(nk, x2.cell_count(k));
    for (int m = 0; m < x2.cell_count(k); ++m) i2.at(m, m) = IntegralElement::one();
    for (int i = 0; i < x1.cell_count(k); ++i) {
      if (preimage[k][i] < 0) {
        i1.at(new_index[k][i], i) = IntegralElement::one();
      } else {
        for (int m = 0; m < x2.cell_count(k); ++m) i1.at(m, i) = out.j2[k](m, preimage[k][i]);
      }
    }
    out.i1.push_back(std::move(i1));
    out.i2.push_back(std::move(i2));
  }
  return out;
}

MayerVietoris mayer_vietoris(const Pushout& p, const EquivariantCWComplex& x0, const EquivariantCWComplex& x1,
                             const EquivariantCWComplex& x2, const CoefficientSystem& h,
                             const PreferredVolume& sigma) {
  const CochainComplex cx = cochain_with_coefficients(p.space.renamed("X"), h, sigma);
  const CochainComplex c1 = cochain_with_coefficients(x1.renamed("X1"), h, sigma);
  const CochainComplex c2 = cochain_with_coefficients(x2.renamed("X2"), h, sigma);
  const CochainComplex c0 = cochain_with_coefficients(x0.renamed("X0"), h, sigma);
  const int n = std::max({cx.length(), c1.length(), c2.length(), c0.length()});
  const auto pad = [&](const CochainComplex& c) {
    std::vector<HilbertianModule> mods(c.modules());
    std::vector<GroupRingMatrix> d;
    for (int i = 0; i + 1 < n; ++i) d.push_back(c.differential_matrix(i));
    for (int i = c.length(); i < n; ++i) mods.emplace_back(h.target, 0, c.chain_label(i));
    return CochainComplex(h.target, std::move(mods), std::move(d), c.name());
  };
  MayerVietoris mv{pad(cx), direct_sum(pad(c1), pad(c2), "X1+X2"), pad(c0), {}, {}};
  const auto cm = [&](const ChainMap& f, int k, int rows, int cols) {
    if (k < static_cast<int>(f.size())) return h.cochain_map(f[k]);
    return GroupRingMatrix(h.target, rows, cols);
  };
  for (int k = 0; k < n; ++k) {
    const int m = h.multiplicity;
    const int nx = mv.x.rank(k), n1 = x1.cell_count(k) * m, n2 = x2.cell_count(k) * m, n0 = x0.cell_count(k) * m;
    mv.alpha.push_back(GroupRingMatrix::vstack(cm(p.i1, k, n1, nx), cm(p.i2, k, n2, nx)));
    mv.beta.push_back(GroupRingMatrix::hstack(cm(p.j1, k, n0, n1), -1.0 * cm(p.j2, k, n0, n2)));
  }
  return mv;
}

// ---- builtins ---------------------------------------------------------------

namespace {

IntegralElement el(std::initializer_list<std::pair<Word, long long>> terms) {
  IntegralElement e;
  for (const auto& [w, c] : terms) e.add(w, c);
  return e;
}

IntegralMatrix column(std::initializer_list<IntegralElement> entries) {
  IntegralMatrix m(static_cast<int>(entries.size()), 1);
  int i = 0;
  for (const auto& e : entries) m.at(i++, 0) = e;
  return m;
}

IntegralMatrix row(std::initializer_list<IntegralElement> entries) {
  IntegralMatrix m(1, static_cast<int>(entries.size()));
  int j = 0;
  for (const auto& e : entries) m.at(0, j++) = e;
  return m;
}

BuiltinSpace trivial_coefficients(EquivariantCWComplex x) {
  CoefficientSystem h = CoefficientSystem::trivial(x.group());
  return {std::move(x), std::move(h)};
}

EquivariantCWComplex sphere_complex(int n) {
  const GroupPresentation g = GroupPresentation::trivial();
  if (n == 0) return EquivariantCWComplex(g, {2}, {}, "S^0");
  std::vector<int> cells(n + 1, 0);
  cells[0] = 1;
  cells[n] = 1;
  std::vector<IntegralMatrix> bd;
  for (int k = 1; k <= n; ++k) bd.emplace_back(cells[k - 1], cells[k]);
  return EquivariantCWComplex(g, cells, std::move(bd), "S^" + std::to_string(n));
}

EquivariantCWComplex disk_complex(int n) {
  const GroupPresentation g = GroupPresentation::trivial();
  if (n == 0) return EquivariantCWComplex(g, {1}, {}, "D^0");
  if (n == 1) return EquivariantCWComplex(g, {2, 1}, {column({-IntegralElement::one(), IntegralElement::one()})}, "D^1");
  std::vector<int> cells(n + 1, 0);
  cells[0] = cells[n - 1] = cells[n] = 1;
  std::vector<IntegralMatrix> bd;
  for (int k = 1; k <= n; ++k) bd.emplace_back(cells[k - 1], cells[k]);
  bd[n - 1].at(0, 0) = IntegralElement::one();
  return EquivariantCWComplex(g, cells, std::move(bd), "D^" + std::to_string(n));
}

BuiltinSpace circle_z() {
  const GroupPresentation g = GroupPresentation::free_abelian(1);
  const Word t = Word::generator(0);
  EquivariantCWComplex x(g, {1, 1}, {row({el({{t, 1}, {Word{}, -1}})})}, "S^1");
  CoefficientSystem h;
  h.target = AlgebraModel::torus(1);
  h.images = {GeneratorImage{1.0, GroupKey{0, {1}}}};
  return {std::move(x), std::move(h)};
}

BuiltinSpace lens(int p, int q) {
  if (p < 2) fail(ErrorKind::BadParams, "lens space needs p >= 2");
  if (std::gcd(p, q) != 1) fail(ErrorKind::BadParams, "lens space needs gcd(p, q) = 1");
  q = ((q % p) + p) % p;
  const GroupPresentation g = GroupPresentation::cyclic(p);
  const auto t = [](int j) { return Word::generator(0, j); };
  IntegralElement norm;
  for (int j = 0; j < p; ++j) norm.add(t(j), 1);
  EquivariantCWComplex x(g, {1, 1, 1, 1},
                         {row({el({{t(1), 1}, {Word{}, -1}})}), row({norm}), row({el({{t(q), 1}, {Word{}, -1}})})},
                         "L(" + std::to_string(p) + "," + std::to_string(q) + ")");
  CoefficientSystem h;
  h.target = AlgebraModel::finite_group(FiniteGroupTable::cyclic(p));
  h.images = {GeneratorImage{1.0, GroupKey{1, {}}}};
  return {std::move(x), std::move(h)};
}

BuiltinSpace klein() {
  // <a, b | b a b^-1 a>, one 0-cell, two 1-cells, one 2-cell (Fox derivatives).
  GroupPresentation g{"pi1(K)", {"a", "b"}, {}};
  const Word a = Word::generator(0), b = Word::generator(1);
  g.relators.push_back(b * a * b.inverse() * a);
  const Word bab = b * a * b.inverse();
  EquivariantCWComplex x(g, {1, 2, 1},
                         {row({el({{a, 1}, {Word{}, -1}}), el({{b, 1}, {Word{}, -1}})}),
                          column({el({{b, 1}, {bab, 1}}), el({{Word{}, 1}, {bab, -1}})})},
                         "K");
  CoefficientSystem h;
  const FiniteGroupTable d4 = FiniteGroupTable::dihedral(4);
  h.target = AlgebraModel::finite_group(d4);
  h.images = {GeneratorImage{1.0, GroupKey{1, {}}}, GeneratorImage{1.0, GroupKey{4, {}}}};
  return {std::move(x), std::move(h)};
}

BuiltinSpace heisenberg_space() {
  // Nil 3-manifold, pi = <x, y, t | [x,y], t^-1 x t x^-1, t^-1 y t y^-1 x^-1>.
  GroupPresentation g{"Heis(Z)", {"x", "y", "t"}, {}};
  const Word x = Word::generator(0), y = Word::generator(1), t = Word::generator(2), e;
  g.relators = {x * y * x.inverse() * y.inverse(), t.inverse() * x * t * x.inverse(),
                t.inverse() * y * t * y.inverse() * x.inverse()};
  const IntegralElement one = IntegralElement::one();
  IntegralMatrix d1(1, 3), d2(3, 3), d3(3, 1);
  d1.at(0, 0) = el({{x, 1}, {e, -1}});
  d1.at(0, 1) = el({{y, 1}, {e, -1}});
  d1.at(0, 2) = el({{t, 1}, {e, -1}});
  // 2-cells e_xy, e_xt, e_yt.
  d2.at(0, 0) = el({{e, 1}, {y, -1}});
  d2.at(1, 0) = el({{x, 1}, {e, -1}});
  d2.at(0, 1) = el({{e, 1}, {t, -1}});
  d2.at(2, 1) = el({{x, 1}, {e, -1}});
  d2.at(0, 2) = el({{t, -1}});
  d2.at(1, 2) = el({{e, 1}, {t * x, -1}});
  d2.at(2, 2) = el({{y, 1}, {e, -1}});
  d3.at(0, 0) = el({{t * x, 1}, {e, -1}});
  d3.at(1, 0) = el({{e, 1}, {y, -1}});
  d3.at(2, 0) = el({{x, 1}, {e, -1}});
  EquivariantCWComplex space(g, {1, 3, 3, 1}, {d1, d2, d3}, "Nil");
  CoefficientSystem h;
  const FiniteGroupTable heis = FiniteGroupTable::heisenberg(3);
  h.target = AlgebraModel::finite_group(heis);
  h.images = {GeneratorImage{1.0, GroupKey{heis.inverse(9), {}}}, GeneratorImage{1.0, GroupKey{3, {}}},
              GeneratorImage{1.0, GroupKey{1, {}}}};
  return {std::move(space), std::move(h)};
}

BuiltinSpace circle_mapping_torus(int d) {
  const EquivariantCWComplex s1 = sphere_complex(1);
  IntegralMatrix f0 = IntegralMatrix::identity(1), f1(1, 1);
  f1.at(0, 0) = IntegralElement::integer(d);
  EquivariantCWComplex x = mapping_torus(s1, {f0, f1}).renamed("T_" + std::to_string(d));
  CoefficientSystem h;
  h.target = AlgebraModel::torus(1);
  h.images = {GeneratorImage{1.0, GroupKey{0, {1}}}};
  return {std::move(x), std::move(h)};
}

int int_param(std::span<const std::string> p, std::size_t i, std::string_view space, int fallback, bool required) {
  if (i >= p.size()) {
    if (required) fail(ErrorKind::BadParams, std::string(space) + " needs parameter " + std::to_string(i + 1));
    return fallback;
  }
  const std::string& s = p[i];
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    fail(ErrorKind::BadParams, std::string(space) + ": '" + s + "' is not an integer");
  return v;
}

void expect_count(std::span<const std::string> p, std::size_t lo, std::size_t hi, std::string_view space) {
  if (p.size() < lo || p.size() > hi)
    fail(ErrorKind::BadParams, std::string(space) + " takes " + std::to_string(lo) +
                                   (hi != lo ? "-" + std::to_string(hi) : std::string()) + " parameters, got " +
                                   std::to_string(p.size()));
}

BuiltinSpace product_builtin(const BuiltinSpace& a, const BuiltinSpace& b) {
  return {product_space(a.space, b.space), tensor(a.coefficients, b.coefficients)};
}

}  // namespace

BuiltinSpace builtin_space(std::string_view name, std::span<const std::string> params) {
  if (name == "product") {
    const auto sep = std::find(params.begin(), params.end(), "x");
    if (sep == params.end() || sep == params.begin() || sep + 1 == params.end())
      fail(ErrorKind::BadParams, "product expects '<space> [params] x <space> [params]'");
    const std::vector<std::string> left(params.begin() + 1, sep), right(sep + 2, params.end());
    return product_builtin(builtin_space(params.front(), left), builtin_space(*(sep + 1), right));
  }
  if (name == "point") {
    expect_count(params, 0, 0, name);
    return trivial_coefficients(EquivariantCWComplex(GroupPresentation::trivial(), {1}, {}, "pt"));
  }
  if (name == "sphere") {
    expect_count(params, 0, 1, name);
    const int n = int_param(params, 0, name, 2, false);
    if (n < 0) fail(ErrorKind::BadParams, "sphere dimension must be >= 0");
    return trivial_coefficients(sphere_complex(n));
  }
  if (name == "disk") {
    expect_count(params, 0, 1, name);
    const int n = int_param(params, 0, name, 2, false);
    if (n < 0) fail(ErrorKind::BadParams, "disk dimension must be >= 0");
    return trivial_coefficients(disk_complex(n));
  }
  if (name == "circle_Z") {
    expect_count(params, 0, 0, name);
    return circle_z();
  }
  if (name == "torus") {
    expect_count(params, 0, 1, name);
    const int k = int_param(params, 0, name, 2, false);
    if (k < 1 || k > kMaxTorusRank) fail(ErrorKind::BadParams, "torus rank must be 1.." + std::to_string(kMaxTorusRank));
    BuiltinSpace out = circle_z();
    for (int i = 1; i < k; ++i) out = product_builtin(out, circle_z());
    out.space = out.space.renamed("T^" + std::to_string(k));
    return out;
  }
  if (name == "lens") {
    expect_count(params, 1, 2, name);
    return lens(int_param(params, 0, name, 0, true), int_param(params, 1, name, 1, false));
  }
  if (name == "klein_bottle") {
    expect_count(params, 0, 0, name);
    return klein();
  }
  if (name == "heisenberg") {
    expect_count(params, 0, 0, name);
    return heisenberg_space();
  }
  if (name == "mapping_torus") {
    expect_count(params, 0, 1, name);
    return circle_mapping_torus(int_param(params, 0, name, 2, false));
  }
  fail(ErrorKind::UnknownSpace, "unknown builtin space '" + std::string(name) + "'");
}

BuiltinSpace builtin_space(std::string_view name, std::initializer_list<int> params) {
  std::vector<std::string> p;
  for (int v : params) p.push_back(std::to_string(v));
  return builtin_space(name, std::span<const std::string>(p));
}

}  // namespace l2t
