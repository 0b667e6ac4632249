#include "l2t/document.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string_view>

namespace l2t::doc {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  fail(ErrorKind::InvalidInput, where + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) bad(where, std::string("missing field '") + key + "'");
  return *it;
}

const Json* optional_field(const Json& j, const char* key) {
  if (!j.is_object()) return nullptr;
  const auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

int as_int(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where, "expected an integer");
  return j.get<int>();
}

double as_double(const Json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  return j.get<double>();
}

std::string as_string(const Json& j, const std::string& where) {
  if (!j.is_string()) bad(where, "expected a string");
  return j.get<std::string>();
}

const Json& as_array(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array");
  return j;
}

std::vector<int> int_list(const Json& j, const std::string& where) {
  std::vector<int> out;
  for (std::size_t i = 0; i < as_array(j, where).size(); ++i) out.push_back(as_int(j[i], where));
  return out;
}

std::string at(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }

// Runs a nested reader and prefixes the location of any input error it raises.
template <class F>
auto within(const std::string& where, F&& read) {
  try {
    return read();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InvalidInput) throw;
    constexpr std::string_view prefix = "InvalidInput: ";
    std::string msg = e.what();
    if (msg.starts_with(prefix)) msg.erase(0, prefix.size());
    bad(where, msg);
  }
}

void write(std::string& out, const Json& j, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(k).dump();
        out += indent < 0 ? ":" : ": ";
        write(out, v, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& v : j) flat = flat && !v.is_structured();
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += flat && indent >= 0 ? ", " : ",";
        if (!flat) newline(depth + 1);
        write(out, j[i], indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  if (!std::strpbrk(buf, ".e")) std::strcat(buf, ".0");
  return buf;
}

std::string dump(const Json& j, int indent) {
  std::string out;
  write(out, j, indent, 0);
  return out;
}

// ---- algebra -------------------------------------------------------------------

namespace {

Json table_json(const FiniteGroupTable& g) {
  Json rows = Json::array();
  for (const auto& r : g.rows()) rows.push_back(r);
  Json j = Json::object();
  j["name"] = g.name();
  j["table"] = std::move(rows);
  j["generators"] = g.generators();
  return j;
}

FiniteGroupTable table_from_json(const Json& j, const std::string& where) {
  const Json& t = as_array(field(j, "table", where), where + ".table");
  std::vector<std::vector<int>> rows;
  for (std::size_t i = 0; i < t.size(); ++i) rows.push_back(int_list(t[i], at(where + ".table", i)));
  std::string name = "G";
  if (const Json* n = optional_field(j, "name")) name = as_string(*n, where + ".name");
  std::vector<int> gens;
  if (const Json* g = optional_field(j, "generators")) gens = int_list(*g, where + ".generators");
  try {
    return FiniteGroupTable(std::move(rows), std::move(name), std::move(gens));
  } catch (const Error& e) {
    bad(where, e.what());
  }
}

}  // namespace

Json to_json(const AlgebraModel& model) {
  Json j = Json::object();
  switch (model.kind()) {
    case AlgebraModel::Kind::FiniteGroup:
      j["type"] = "finite_group";
      break;
    case AlgebraModel::Kind::Torus:
      j["type"] = "torus";
      j["rank"] = model.torus_rank();
      return j;
    case AlgebraModel::Kind::Mixed:
      j["type"] = "mixed";
      j["rank"] = model.torus_rank();
      break;
  }
  const Json table = table_json(model.group());
  for (const auto& [k, v] : table.items()) j[k] = v;
  return j;
}

AlgebraModel algebra_from_json(const Json& j) {
  const std::string where = "algebra";
  const std::string type = as_string(field(j, "type", where), where + ".type");
  if (type == "finite_group") return AlgebraModel::finite_group(table_from_json(j, where));
  const int rank = as_int(field(j, "rank", where), where + ".rank");
  if (rank < 0 || rank > kMaxTorusRank)
    bad(where + ".rank", "torus rank must lie in 0.." + std::to_string(kMaxTorusRank));
  if (type == "torus") return AlgebraModel::torus(rank);
  if (type == "mixed") return AlgebraModel::mixed(table_from_json(j, where), rank);
  bad(where + ".type", "unknown algebra type '" + type + "'");
}

Json key_to_json(const GroupKey& key, const AlgebraModel& model) {
  switch (model.kind()) {
    case AlgebraModel::Kind::FiniteGroup:
      return key.element;
    case AlgebraModel::Kind::Torus:
      return key.exponents;
    case AlgebraModel::Kind::Mixed:
      break;
  }
  Json j = Json::object();
  j["g"] = key.element;
  j["v"] = key.exponents;
  return j;
}

GroupKey key_from_json(const Json& j, const AlgebraModel& model) {
  const std::string where = "key";
  GroupKey k;
  switch (model.kind()) {
    case AlgebraModel::Kind::FiniteGroup:
      k.element = as_int(j, where);
      break;
    case AlgebraModel::Kind::Torus:
      // A bare integer is accepted for rank one.
      if (j.is_number_integer() && model.torus_rank() == 1)
        k.exponents = {j.get<int>()};
      else
        k.exponents = int_list(j, where);
      break;
    case AlgebraModel::Kind::Mixed:
      k.element = as_int(field(j, "g", where), where + ".g");
      k.exponents = int_list(field(j, "v", where), where + ".v");
      break;
  }
  if (!model.valid_key(k)) bad(where, "key " + j.dump() + " does not belong to " + model.describe());
  return k;
}

Json to_json(const GroupRingElement& a) {
  Json out = Json::array();
  for (const auto& [key, c] : a.terms()) {
    Json t = Json::object();
    t["key"] = key_to_json(key, a.model());
    t["re"] = c.real();
    t["im"] = c.imag();
    out.push_back(std::move(t));
  }
  return out;
}

GroupRingElement element_from_json(const Json& j, const AlgebraModel& model) {
  GroupRingElement a(model);
  const std::string where = "element";
  // A plain number is the scalar multiple of the unit.
  if (j.is_number()) {
    a.add_term(model.identity(), j.get<double>());
    return a;
  }
  for (std::size_t i = 0; i < as_array(j, where).size(); ++i) {
    const Json& t = j[i];
    const GroupKey key = key_from_json(field(t, "key", at(where, i)), model);
    const double re = as_double(field(t, "re", at(where, i)), at(where, i) + ".re");
    double im = 0.0;
    if (const Json* v = optional_field(t, "im")) im = as_double(*v, at(where, i) + ".im");
    a.add_term(key, cplx(re, im));
  }
  return a;
}

Json to_json(const GroupRingMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) {
    Json j = Json::object();
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    return j;
  }
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (int c = 0; c < m.cols(); ++c) r.push_back(to_json(m(i, c)));
    rows.push_back(std::move(r));
  }
  return rows;
}

GroupRingMatrix matrix_from_json(const Json& j, const AlgebraModel& model) {
  const std::string where = "matrix";
  if (j.is_object()) {
    const int r = as_int(field(j, "rows", where), where + ".rows");
    const int c = as_int(field(j, "cols", where), where + ".cols");
    if (r < 0 || c < 0 || (r > 0 && c > 0)) bad(where, "only empty matrices use the rows/cols form");
    return GroupRingMatrix::zero(model, r, c);
  }
  const Json& rows = as_array(j, where);
  if (rows.empty()) bad(where, "use {\"rows\": r, \"cols\": c} for empty matrices");
  const int cols = static_cast<int>(as_array(rows[0], at(where, 0)).size());
  GroupRingMatrix m(model, static_cast<int>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (as_array(rows[i], at(where, i)).size() != static_cast<std::size_t>(cols)) bad(at(where, i), "ragged matrix");
    for (int c = 0; c < cols; ++c)
      m.set(static_cast<int>(i), c,
            within(at(at(where, i), static_cast<std::size_t>(c)), [&] { return element_from_json(rows[i][c], model); }));
  }
  return m;
}

// ---- spaces ------------------------------------------------------------------------

Json to_json(const GroupPresentation& g) {
  Json j = Json::object();
  j["name"] = g.name;
  j["generators"] = g.generators;
  Json rel = Json::array();
  for (const Word& w : g.relators) rel.push_back(g.format(w));
  j["relators"] = std::move(rel);
  return j;
}

GroupPresentation presentation_from_json(const Json& j) {
  const std::string where = "group";
  GroupPresentation g;
  if (const Json* n = optional_field(j, "name")) g.name = as_string(*n, where + ".name");
  const Json& gens = as_array(field(j, "generators", where), where + ".generators");
  for (std::size_t i = 0; i < gens.size(); ++i) g.generators.push_back(as_string(gens[i], at(where + ".generators", i)));
  if (const Json* rel = optional_field(j, "relators"))
    for (std::size_t i = 0; i < as_array(*rel, where + ".relators").size(); ++i)
      g.relators.push_back(g.parse(as_string((*rel)[i], at(where + ".relators", i))));
  return g;
}

Json to_json(const IntegralMatrix& m, const GroupPresentation& g) {
  if (m.rows() == 0 || m.cols() == 0) {
    Json j = Json::object();
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    return j;
  }
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (int c = 0; c < m.cols(); ++c) {
      Json e = Json::array();
      for (const auto& [w, coeff] : m(i, c).terms()) {
        Json t = Json::object();
        t["word"] = g.format(w);
        t["coeff"] = coeff;
        e.push_back(std::move(t));
      }
      r.push_back(std::move(e));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

IntegralMatrix integral_from_json(const Json& j, const GroupPresentation& g, int rows, int cols) {
  const std::string where = "integral matrix";
  IntegralMatrix m(rows, cols);
  if (j.is_object()) {
    if (as_int(field(j, "rows", where), where) != rows || as_int(field(j, "cols", where), where) != cols)
      bad(where, "expected shape " + std::to_string(rows) + "x" + std::to_string(cols));
    if (rows > 0 && cols > 0) bad(where, "only empty matrices use the rows/cols form");
    return m;
  }
  if (as_array(j, where).size() != static_cast<std::size_t>(rows))
    bad(where, "expected " + std::to_string(rows) + " rows");
  for (int i = 0; i < rows; ++i) {
    const Json& r = as_array(j[i], at(where, i));
    if (r.size() != static_cast<std::size_t>(cols)) bad(at(where, i), "expected " + std::to_string(cols) + " columns");
    for (int c = 0; c < cols; ++c) {
      const Json& e = r[c];
      if (e.is_number_integer()) {
        m.at(i, c) = IntegralElement::integer(e.get<long long>());
        continue;
      }
      for (std::size_t t = 0; t < as_array(e, at(where, i)).size(); ++t) {
        const std::string w = at(at(where, i), c);
        long long coeff = 1;
        if (const Json* k = optional_field(e[t], "coeff")) {
          if (!k->is_number_integer()) bad(w, "coefficients must be integers");
          coeff = k->get<long long>();
        }
        m.at(i, c).add(g.parse(as_string(field(e[t], "word", w), w)), coeff);
      }
    }
  }
  return m;
}

Json to_json(const EquivariantCWComplex& x) {
  Json j = Json::object();
  j["name"] = x.name();
  j["group"] = to_json(x.group());
  j["cells"] = x.cells();
  Json bd = Json::array();
  for (int k = 1; k <= x.dimension(); ++k) bd.push_back(to_json(x.boundary(k), x.group()));
  j["boundary"] = std::move(bd);
  return j;
}

EquivariantCWComplex space_from_json(const Json& j) {
  const std::string where = "space";
  const GroupPresentation g = presentation_from_json(field(j, "group", where));
  const std::vector<int> cells = int_list(field(j, "cells", where), where + ".cells");
  if (cells.empty()) bad(where + ".cells", "a space needs at least one degree");
  for (int c : cells)
    if (c < 0) bad(where + ".cells", "negative cell count");
  std::vector<IntegralMatrix> bd;
  const Json* b = optional_field(j, "boundary");
  const std::size_t given = b ? as_array(*b, where + ".boundary").size() : 0;
  if (given != cells.size() - 1)
    bad(where + ".boundary", "expected " + std::to_string(cells.size() - 1) + " boundary matrices");
  for (std::size_t k = 1; k < cells.size(); ++k)
    bd.push_back(integral_from_json((*b)[k - 1], g, cells[k - 1], cells[k]));
  std::string name = "X";
  if (const Json* n = optional_field(j, "name")) name = as_string(*n, where + ".name");
  return EquivariantCWComplex(g, cells, std::move(bd), std::move(name));
}

Json to_json(const CoefficientSystem& h, const GroupPresentation& g) {
  Json j = Json::object();
  Json images = Json::array();
  for (std::size_t i = 0; i < h.images.size(); ++i) {
    Json t = Json::object();
    t["generator"] = i < g.generators.size() ? g.generators[i] : std::to_string(i);
    t["key"] = key_to_json(h.images[i].key, h.target);
    t["re"] = h.images[i].scale.real();
    t["im"] = h.images[i].scale.imag();
    images.push_back(std::move(t));
  }
  j["images"] = std::move(images);
  j["multiplicity"] = h.multiplicity;
  j["label"] = h.label;
  return j;
}

CoefficientSystem coefficients_from_json(const Json& j, const GroupPresentation& g, const AlgebraModel& target) {
  const std::string where = "coefficients";
  CoefficientSystem h;
  h.target = target;
  h.images.assign(g.generators.size(), GeneratorImage{1.0, target.identity()});
  std::vector<bool> seen(g.generators.size(), false);
  const Json& images = as_array(field(j, "images", where), where + ".images");
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string w = at(where + ".images", i);
    const std::string gen = as_string(field(images[i], "generator", w), w + ".generator");
    const int idx = g.generator_index(gen);
    if (idx < 0) bad(w, "unknown generator '" + gen + "'");
    if (seen[idx]) bad(w, "generator '" + gen + "' listed twice");
    seen[idx] = true;
    GeneratorImage img;
    img.key = key_from_json(field(images[i], "key", w), target);
    double re = 1.0, im = 0.0;
    if (const Json* v = optional_field(images[i], "re")) re = as_double(*v, w + ".re");
    if (const Json* v = optional_field(images[i], "im")) im = as_double(*v, w + ".im");
    img.scale = cplx(re, im);
    h.images[idx] = img;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) bad(where + ".images", "no image for generator '" + g.generators[i] + "'");
  if (const Json* m = optional_field(j, "multiplicity")) h.multiplicity = as_int(*m, where + ".multiplicity");
  if (h.multiplicity < 1) bad(where + ".multiplicity", "must be positive");
  if (const Json* l = optional_field(j, "label")) h.label = as_string(*l, where + ".label");
  check_homomorphism(g, h);
  return h;
}

Json to_json(const CochainComplex& c) {
  Json j = Json::object();
  j["name"] = c.name();
  std::vector<int> ranks;
  for (int i = 0; i < c.length(); ++i) ranks.push_back(c.rank(i));
  j["ranks"] = ranks;
  Json d = Json::array();
  for (int i = 0; i + 1 < c.length(); ++i) d.push_back(to_json(c.differential_matrix(i)));
  j["differentials"] = std::move(d);
  Json grams = Json::array();
  bool any = false;
  for (const auto& m : c.modules()) {
    grams.push_back(m.standard() ? Json(nullptr) : to_json(m.gram()));
    any = any || !m.standard();
  }
  if (any) j["grams"] = std::move(grams);
  return j;
}

CochainComplex complex_from_json(const Json& j, const AlgebraModel& model) {
  const std::string where = "complex";
  const std::vector<int> ranks = int_list(field(j, "ranks", where), where + ".ranks");
  for (int r : ranks)
    if (r < 0) bad(where + ".ranks", "negative rank");
  std::vector<GroupRingMatrix> d;
  const Json* dj = optional_field(j, "differentials");
  const std::size_t want = ranks.empty() ? 0 : ranks.size() - 1;
  if ((dj ? as_array(*dj, where + ".differentials").size() : 0) != want)
    bad(where + ".differentials", "expected " + std::to_string(want) + " matrices");
  for (std::size_t i = 0; i < want; ++i) {
    GroupRingMatrix m = matrix_from_json((*dj)[i], model);
    if (m.rows() != ranks[i + 1] || m.cols() != ranks[i])
      bad(at(where + ".differentials", i), "expected shape " + std::to_string(ranks[i + 1]) + "x" + std::to_string(ranks[i]));
    d.push_back(std::move(m));
  }
  std::string name = "C";
  if (const Json* n = optional_field(j, "name")) name = as_string(*n, where + ".name");
  std::vector<HilbertianModule> mods;
  const Json* gj = optional_field(j, "grams");
  if (gj && as_array(*gj, where + ".grams").size() != ranks.size())
    bad(where + ".grams", "expected one entry (or null) per degree");
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (gj && !(*gj)[i].is_null()) {
      GroupRingMatrix g = matrix_from_json((*gj)[i], model);
      if (g.rows() != ranks[i] || g.cols() != ranks[i]) bad(at(where + ".grams", i), "gram shape does not match rank");
      mods.emplace_back(model, ranks[i], std::move(g), std::string{});
    } else {
      mods.emplace_back(model, ranks[i]);
    }
  }
  return CochainComplex(model, std::move(mods), std::move(d), name).renamed(name);
}

// ---- bundles -------------------------------------------------------------------------

namespace {

Json face_json(const BaseFace& f, const GroupPresentation& g) {
  Json j = Json::object();
  j["cell"] = f.cell;
  j["coefficient"] = f.coefficient;
  Json t = Json::array();
  for (const auto& m : f.transport) t.push_back(to_json(m, g));
  j["transport"] = std::move(t);
  return j;
}

BaseFace face_from_json(const Json& j, const EquivariantCWComplex& fiber, const std::string& where) {
  BaseFace f;
  f.cell = as_int(field(j, "cell", where), where + ".cell");
  if (const Json* c = optional_field(j, "coefficient")) f.coefficient = as_int(*c, where + ".coefficient");
  const Json& t = as_array(field(j, "transport", where), where + ".transport");
  if (t.size() != static_cast<std::size_t>(fiber.dimension() + 1))
    bad(where + ".transport", "expected one matrix per fiber degree");
  for (int k = 0; k <= fiber.dimension(); ++k)
    f.transport.push_back(integral_from_json(t[k], fiber.group(), fiber.cell_count(k), fiber.cell_count(k)));
  return f;
}

}  // namespace

Json to_json(const Bundle& b) {
  Json j = Json::object();
  j["name"] = b.name;
  j["fiber"] = to_json(b.fiber);
  j["fiber_injective"] = b.fiber_injective;
  Json base = Json::array();
  for (const BaseCell& c : b.base) {
    Json cj = Json::object();
    cj["dimension"] = c.dimension;
    Json faces = Json::array();
    for (const auto& f : c.faces) faces.push_back(face_json(f, b.fiber.group()));
    cj["faces"] = std::move(faces);
    if (c.basepoint) cj["basepoint"] = face_json(*c.basepoint, b.fiber.group());
    base.push_back(std::move(cj));
  }
  j["base"] = std::move(base);
  return j;
}

Bundle bundle_from_json(const Json& j) {
  const std::string where = "bundle";
  Bundle b;
  b.fiber = space_from_json(field(j, "fiber", where));
  if (const Json* n = optional_field(j, "name")) b.name = as_string(*n, where + ".name");
  if (const Json* f = optional_field(j, "fiber_injective")) {
    if (!f->is_boolean()) bad(where + ".fiber_injective", "expected a boolean");
    b.fiber_injective = f->get<bool>();
  }
  const Json& base = as_array(field(j, "base", where), where + ".base");
  for (std::size_t i = 0; i < base.size(); ++i) {
    const std::string w = at(where + ".base", i);
    BaseCell c;
    c.dimension = as_int(field(base[i], "dimension", w), w + ".dimension");
    if (const Json* faces = optional_field(base[i], "faces"))
      for (std::size_t k = 0; k < as_array(*faces, w + ".faces").size(); ++k)
        c.faces.push_back(face_from_json((*faces)[k], b.fiber, at(w + ".faces", k)));
    if (const Json* p = optional_field(base[i], "basepoint")) c.basepoint = face_from_json(*p, b.fiber, w + ".basepoint");
    b.base.push_back(std::move(c));
  }
  return b;
}

// ---- documents -------------------------------------------------------------------------

std::string to_string(Subject s) {
  switch (s) {
    case Subject::Matrix:
      return "matrix";
    case Subject::Polynomial:
      return "polynomial";
    case Subject::Complex:
      return "complex";
    case Subject::Space:
      return "space";
    case Subject::Product:
      return "product";
    case Subject::Pushout:
      return "pushout";
    case Subject::Bundle:
      return "bundle";
  }
  return "?";
}

namespace {

constexpr Subject kSubjects[] = {Subject::Matrix, Subject::Polynomial, Subject::Complex, Subject::Space,
                                 Subject::Product, Subject::Pushout, Subject::Bundle};

// Coefficients default to the trivial system when both blocks are absent.
CoefficientSystem read_coefficients(const Json& j, const GroupPresentation& g, const std::optional<AlgebraModel>& a) {
  const Json* c = optional_field(j, "coefficients");
  if (!c) {
    if (a && !(*a == AlgebraModel::scalars()))
      bad("coefficients", "required when the algebra is not the scalars");
    return CoefficientSystem::trivial(g);
  }
  if (!a) bad("algebra", "required with a coefficients block");
  return coefficients_from_json(*c, g, *a);
}

Json factor_json(const Factor& f) {
  Json j = Json::object();
  j["algebra"] = to_json(f.coefficients.target);
  j["space"] = to_json(f.space);
  j["coefficients"] = to_json(f.coefficients, f.space.group());
  return j;
}

Factor factor_from_json(const Json& j, const std::string& where) {
  Factor f;
  f.space = space_from_json(field(j, "space", where));
  std::optional<AlgebraModel> a;
  if (const Json* aj = optional_field(j, "algebra")) a = algebra_from_json(*aj);
  f.coefficients = read_coefficients(j, f.space.group(), a);
  return f;
}

}  // namespace

Document parse(const Json& j) {
  if (!j.is_object()) bad("document", "expected a JSON object");
  if (const Json* v = optional_field(j, "version"))
    if (as_string(*v, "version") != kVersion) bad("version", "unsupported document version '" + v->get<std::string>() + "'");
  Document d;
  int found = 0;
  for (Subject s : kSubjects)
    if (optional_field(j, to_string(s).c_str())) {
      d.subject = s;
      ++found;
    }
  if (found != 1)
    bad("document", found == 0 ? "no computation subject (matrix, polynomial, complex, space, product, pushout, bundle)"
                               : "more than one computation subject");
  if (const Json* a = optional_field(j, "algebra")) d.algebra = algebra_from_json(*a);
  const Json& body = j[to_string(d.subject)];
  const auto need_algebra = [&] {
    if (!d.algebra) bad("algebra", "required for a " + to_string(d.subject) + " document");
    return *d.algebra;
  };
  switch (d.subject) {
    case Subject::Matrix:
      d.matrix = matrix_from_json(body, need_algebra());
      break;
    case Subject::Polynomial:
      d.polynomial = element_from_json(body, need_algebra());
      break;
    case Subject::Complex:
      d.complex = complex_from_json(body, need_algebra());
      break;
    case Subject::Space:
      d.space = space_from_json(body);
      d.coefficients = read_coefficients(j, d.space->group(), d.algebra);
      break;
    case Subject::Product:
      if (d.algebra) bad("algebra", "a product document carries one algebra per factor");
      d.product = std::make_pair(factor_from_json(field(body, "x1", "product"), "product.x1"),
                                 factor_from_json(field(body, "x2", "product"), "product.x2"));
      break;
    case Subject::Pushout: {
      PushoutData p;
      p.x0 = space_from_json(field(body, "x0", "pushout"));
      p.x1 = space_from_json(field(body, "x1", "pushout"));
      p.x2 = space_from_json(field(body, "x2", "pushout"));
      const Json& j1 = as_array(field(body, "j1", "pushout"), "pushout.j1");
      for (std::size_t k = 0; k < j1.size(); ++k) p.j1.push_back(int_list(j1[k], at("pushout.j1", k)));
      const Json& j2 = as_array(field(body, "j2", "pushout"), "pushout.j2");
      if (j2.size() != static_cast<std::size_t>(p.x0.dimension() + 1))
        bad("pushout.j2", "expected one matrix per degree of x0");
      for (int k = 0; k <= p.x0.dimension(); ++k)
        p.j2.push_back(integral_from_json(j2[k], p.x0.group(), p.x2.cell_count(k), p.x0.cell_count(k)));
      d.coefficients = read_coefficients(j, p.x0.group(), d.algebra);
      d.pushout = std::move(p);
      break;
    }
    case Subject::Bundle:
      d.bundle = bundle_from_json(body);
      d.coefficients = read_coefficients(j, d.bundle->fiber.group(), d.algebra);
      break;
  }
  if (const Json* s = optional_field(j, "sigma")) {
    if (!d.coefficients) bad("sigma", "only meaningful with a coefficient system");
    GroupRingMatrix g = matrix_from_json(*s, d.coefficients->target);
    if (g.rows() != d.coefficients->multiplicity || g.cols() != d.coefficients->multiplicity)
      bad("sigma", "must be multiplicity x multiplicity");
    d.sigma.gram = std::move(g);
  }
  return d;
}

Document parse_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
  return parse(j);
}

Json emit(const Document& d) {
  Json j = Json::object();
  j["version"] = kVersion;
  const std::optional<AlgebraModel> algebra =
      d.coefficients ? std::optional<AlgebraModel>(d.coefficients->target) : d.algebra;
  if (algebra && d.subject != Subject::Product) j["algebra"] = to_json(*algebra);
  const std::string key = to_string(d.subject);
  switch (d.subject) {
    case Subject::Matrix:
      j[key] = to_json(*d.matrix);
      break;
    case Subject::Polynomial:
      j[key] = to_json(*d.polynomial);
      break;
    case Subject::Complex:
      j[key] = to_json(*d.complex);
      break;
    case Subject::Space:
      j[key] = to_json(*d.space);
      break;
    case Subject::Product: {
      Json p = Json::object();
      p["x1"] = factor_json(d.product->first);
      p["x2"] = factor_json(d.product->second);
      j[key] = std::move(p);
      break;
    }
    case Subject::Pushout: {
      const PushoutData& p = *d.pushout;
      Json pj = Json::object();
      pj["x0"] = to_json(p.x0);
      pj["x1"] = to_json(p.x1);
      pj["x2"] = to_json(p.x2);
      pj["j1"] = p.j1;
      Json j2 = Json::array();
      for (const auto& m : p.j2) j2.push_back(to_json(m, p.x0.group()));
      pj["j2"] = std::move(j2);
      j[key] = std::move(pj);
      break;
    }
    case Subject::Bundle:
      j[key] = to_json(*d.bundle);
      break;
  }
  if (d.coefficients) {
    const GroupPresentation& g = d.subject == Subject::Space     ? d.space->group()
                                 : d.subject == Subject::Pushout ? d.pushout->x0.group()
                                                                 : d.bundle->fiber.group();
    j["coefficients"] = to_json(*d.coefficients, g);
  }
  if (d.sigma.gram) j["sigma"] = to_json(*d.sigma.gram);
  return j;
}

Document space_document(const EquivariantCWComplex& x, const CoefficientSystem& h) {
  Document d;
  d.subject = Subject::Space;
  d.space = x;
  d.coefficients = h;
  return d;
}

Document bundle_document(const Bundle& b, const CoefficientSystem& h) {
  Document d;
  d.subject = Subject::Bundle;
  d.bundle = b;
  d.coefficients = h;
  return d;
}

Document product_document(Factor x1, Factor x2) {
  Document d;
  d.subject = Subject::Product;
  d.product = std::make_pair(std::move(x1), std::move(x2));
  return d;
}

Document pushout_document(PushoutData p, const CoefficientSystem& h) {
  Document d;
  d.subject = Subject::Pushout;
  d.pushout = std::move(p);
  d.coefficients = h;
  return d;
}

}  // namespace l2t::doc
