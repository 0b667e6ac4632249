#include "l2t/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "l2t/acceptance.hpp"
#include "l2t/document.hpp"
#include "l2t/oracle.hpp"
#include "l2t/random.hpp"

namespace l2t::cli {

using doc::Json;

ExitCode exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonConvergent:
    case ErrorKind::NotDeterminantClass:
    case ErrorKind::IllConditioned:
      return kUncertified;
    default:
      return kInvalid;
  }
}

namespace {

struct Flags {
  double tolerance = 1e-8;
  int grid = 256;
  double epsilon = 0.0;  // 0: library default
  std::string format = "table";
  bool oracle = false;

  DetOptions det() const {
    DetOptions o;
    if (epsilon > 0.0) o.epsilon = epsilon;
    o.quadrature.start_resolution = grid;
    o.quadrature.tolerance = std::min(o.quadrature.tolerance, tolerance);
    return o;
  }
  OracleOptions oracle_options() const {
    OracleOptions o;
    o.tolerance = std::min(o.tolerance, tolerance);
    if (epsilon > 0.0) o.cutoff = epsilon;
    return o;
  }
};

// ---- report assembly -------------------------------------------------------------

// snprintf without a setlocale call formats in the "C" locale.
std::string num(double x) {
  if (std::isnan(x)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string num(const std::optional<double>& x) { return x ? num(*x) : "-"; }

std::string yes(bool b) { return b ? "yes" : "no"; }

Json opt(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }
Json opt_exp(const std::optional<double>& x) { return x ? Json(std::exp(*x)) : Json(nullptr); }

struct Table {
  std::string title;
  std::vector<std::vector<std::string>> rows;  // first row is the header when `header`
  bool header = false;
};

struct Output {
  Json json = Json::object();
  std::vector<Table> tables;
};

void render(const Output& o, const Flags& f, std::ostream& out) {
  if (f.format == "json") {
    out << doc::dump(o.json) << '\n';
    return;
  }
  bool first = true;
  for (const Table& t : o.tables) {
    if (!first) out << '\n';
    first = false;
    if (!t.title.empty()) out << t.title << '\n';
    std::vector<std::size_t> width;
    for (const auto& r : t.rows)
      for (std::size_t c = 0; c < r.size(); ++c) {
        if (width.size() <= c) width.push_back(0);
        width[c] = std::max(width[c], r[c].size());
      }
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      std::string line = "  ";
      for (std::size_t c = 0; c < t.rows[i].size(); ++c) {
        line += t.rows[i][c];
        if (c + 1 < t.rows[i].size()) line.append(width[c] - t.rows[i][c].size() + 2, ' ');
      }
      out << line << '\n';
      if (t.header && i == 0) {
        std::size_t total = 0;
        for (std::size_t w : width) total += w + 2;
        out << "  " << std::string(total - 2, '-') << '\n';
      }
    }
  }
}

Json header(const std::string& command, const doc::Document& d) {
  Json j = Json::object();
  j["version"] = doc::kVersion;
  j["command"] = command;
  j["subject"] = doc::to_string(d.subject);
  return j;
}

Json factor_json(const FactorTorsion& f) {
  Json j = Json::object();
  j["name"] = f.name;
  j["log_torsion"] = opt(f.log_value);
  j["torsion"] = opt_exp(f.log_value);
  j["determinant_class"] = f.determinant_class;
  j["weakly_acyclic"] = f.weakly_acyclic;
  j["line"] = f.line.to_string();
  if (!f.error.empty()) j["error"] = f.error;
  return j;
}

std::vector<std::string> factor_row(const std::string& role, const FactorTorsion& f) {
  return {role, f.name, num(f.log_value), f.log_value ? num(std::exp(*f.log_value)) : "-", yes(f.weakly_acyclic),
          f.error.empty() ? yes(f.determinant_class) : f.error};
}

Table factor_table(std::vector<std::pair<std::string, const FactorTorsion*>> fs) {
  Table t{"factors", {{"role", "name", "log rho", "rho", "acyclic", "det class"}}, true};
  for (const auto& [role, f] : fs) t.rows.push_back(factor_row(role, *f));
  return t;
}

// ---- input -----------------------------------------------------------------------

std::string read_input(const std::string& path, std::istream& in) {
  std::ostringstream s;
  if (path == "-") {
    s << in.rdbuf();
    return s.str();
  }
  std::ifstream file(path);
  if (!file) fail(ErrorKind::InvalidInput, "cannot open '" + path + "'");
  s << file.rdbuf();
  return s.str();
}

void require(const doc::Document& d, std::initializer_list<doc::Subject> allowed, const std::string& command) {
  if (std::find(allowed.begin(), allowed.end(), d.subject) == allowed.end())
    fail(ErrorKind::InvalidInput, command + " does not take a " + doc::to_string(d.subject) + " document");
}

// ---- oracles ---------------------------------------------------------------------------

struct OracleCheck {
  Json json = Json::object();
  Table table{"oracle", {{"check", "main", "oracle", "|difference|"}}, true};
  double worst = 0.0;
  bool ran = false;

  void add(const std::string& name, double main, double oracle) {
    const double diff = std::abs(main - oracle);
    worst = std::max(worst, diff);
    ran = true;
    Json e = Json::object();
    e["main"] = main;
    e["oracle"] = oracle;
    e["difference"] = diff;
    json[name] = std::move(e);
    table.rows.push_back({name, num(main), num(oracle), num(diff)});
  }
  void skip(const std::string& name, const std::string& why) {
    json[name] = why;
    table.rows.push_back({name, "-", "-", why});
  }
  // Adds the oracle block; true when within tolerance.
  bool finish(Output& o, double tol) {
    json["worst"] = worst;
    json["tolerance"] = tol;
    json["passed"] = worst <= tol;
    o.json["oracle"] = json;
    table.rows.push_back({"worst", "", "", num(worst) + (worst <= tol ? " <= " : " > ") + num(tol)});
    o.tables.push_back(table);
    return worst <= tol;
  }
};

// Laplacian oracle always, dense oracle on finite models.
void complex_oracles(OracleCheck& check, const std::string& name, const CochainComplex& c, double main,
                     const Flags& f) {
  check.add(name + " laplacian", main, torsion_via_laplacian(c, f.oracle_options()));
  if (c.algebra().is_finite()) check.add(name + " dense", main, torsion_via_dense(c, f.oracle_options()));
}

void factor_oracle(OracleCheck& check, const FactorTorsion& factor, const CochainComplex& c, const Flags& f) {
  if (!factor.log_value) {
    check.skip(factor.name, "no real value");
    return;
  }
  complex_oracles(check, factor.name, c, *factor.log_value, f);
}

// ---- det and mahler ------------------------------------------------------------------

GroupRingMatrix matrix_subject(const doc::Document& d) {
  return d.subject == doc::Subject::Matrix ? *d.matrix : GroupRingMatrix::from_element(*d.polynomial);
}

int cmd_det(const doc::Document& d, const Flags& f, std::ostream& out) {
  require(d, {doc::Subject::Matrix, doc::Subject::Polynomial}, "det");
  const GroupRingMatrix m = matrix_subject(d);
  const DetResult r = fk_det(m, f.det());
  Output o;
  o.json = header("det", d);
  Json res = Json::object();
  res["log_det"] = r.log_det;
  res["det"] = std::exp(r.log_det);
  res["determinant_class"] = r.determinant_class;
  res["invertible"] = r.invertible;
  res["bounded_below"] = r.bounded_below;
  res["generic_rank"] = r.generic_rank;
  res["resolution"] = r.resolution;
  res["error_estimate"] = r.error_estimate;
  o.json["result"] = res;
  o.tables.push_back(Table{"Fuglede-Kadison determinant (" + m.model().describe() + ")",
                           {{"log Det'", num(r.log_det)},
                            {"Det'", num(std::exp(r.log_det))},
                            {"determinant class", yes(r.determinant_class)},
                            {"invertible", yes(r.invertible)},
                            {"generic rank", std::to_string(r.generic_rank)},
                            {"resolution", std::to_string(r.resolution)},
                            {"error estimate", num(r.error_estimate)}}});
  bool ok = true;
  if (f.oracle) {
    OracleCheck check;
    if (m.model().is_finite()) {
      // Normalized log pseudo-determinant of the regular representation.
      const Eigen::VectorXd sv = Eigen::JacobiSVD<DenseMatrix>(realize(m).dense()).singularValues();
      double s = 0.0;
      for (int j = 0; j < r.generic_rank && j < sv.size(); ++j) s += std::log(sv[j]);
      check.add("dense svd", r.log_det, s / m.model().group_order());
    } else if (m.model().group_order() == 1 && m.rows() == 1 && m.cols() == 1 && !m(0, 0).is_zero()) {
      check.add("mahler", r.log_det, mahler_refine(m(0, 0), f.tolerance).value);
    } else {
      check.skip("oracle", "only finite models and 1x1 torus matrices");
    }
    ok = check.finish(o, f.tolerance);
  }
  o.json["document"] = doc::emit(d);
  render(o, f, out);
  if (!r.determinant_class) return kUncertified;
  return ok ? kOk : kFailed;
}

int cmd_mahler(const doc::Document& d, const Flags& f, std::ostream& out) {
  require(d, {doc::Subject::Matrix, doc::Subject::Polynomial}, "mahler");
  const GroupRingMatrix m = matrix_subject(d);
  if (m.rows() != 1 || m.cols() != 1) fail(ErrorKind::InvalidInput, "mahler takes a single polynomial");
  const MahlerEstimate est = mahler_refine(m(0, 0), f.tolerance);
  Output o;
  o.json = header("mahler", d);
  Json res = Json::object();
  res["log_mahler"] = est.value;
  res["mahler"] = std::exp(est.value);
  res["error_bound"] = est.error;
  res["resolution"] = est.resolution;
  o.json["result"] = res;
  o.tables.push_back(Table{"Mahler measure (" + m.model().describe() + ")",
                           {{"log M", num(est.value)},
                            {"M", num(std::exp(est.value))},
                            {"error bound", num(est.error)},
                            {"resolution", std::to_string(est.resolution) + " per axis"}}});
  bool ok = true;
  if (f.oracle) {
    OracleCheck check;
    check.add("spectral", est.value, fk_det(m, f.det()).log_det);
    ok = check.finish(o, f.tolerance);
  }
  o.json["document"] = doc::emit(d);
  render(o, f, out);
  return ok ? kOk : kFailed;
}

// ---- torsion -------------------------------------------------------------------------------

struct SpaceSubject {
  EquivariantCWComplex space;
  CoefficientSystem h;
};

SpaceSubject space_subject(const doc::Document& d) {
  switch (d.subject) {
    case doc::Subject::Space:
      return {*d.space, *d.coefficients};
    case doc::Subject::Product: {
      const auto& [a, b] = *d.product;
      return {product_space(a.space, b.space), tensor(a.coefficients, b.coefficients)};
    }
    case doc::Subject::Pushout: {
      const auto& p = *d.pushout;
      return {pushout_assemble(p.x0, p.x1, p.x2, p.j1, p.j2, *d.coefficients).space, *d.coefficients};
    }
    case doc::Subject::Bundle:
      return {total_space(*d.bundle), *d.coefficients};
    default:
      fail(ErrorKind::InvalidInput, "not a space document");
  }
}

int cmd_torsion(const doc::Document& d, const Flags& f, std::ostream& out) {
  require(d,
          {doc::Subject::Complex, doc::Subject::Space, doc::Subject::Product, doc::Subject::Pushout,
           doc::Subject::Bundle},
          "torsion");
  std::optional<CochainComplex> c;
  TorsionReport rep;
  std::optional<int> chi;
  if (d.subject == doc::Subject::Complex) {
    c = *d.complex;
    rep = torsion(*c, f.det());
  } else {
    const SpaceSubject s = space_subject(d);
    rep = l2_torsion(s.space, s.h, d.sigma, f.det());
    c = cochain_with_coefficients(s.space, s.h, d.sigma);
    chi = euler_char(s.space);
  }
  Output o;
  o.json = header("torsion", d);
  Json res = Json::object();
  res["log_torsion"] = opt(rep.log_value);
  res["torsion"] = opt_exp(rep.log_value);
  res["determinant_class"] = rep.determinant_class;
  res["weakly_acyclic"] = rep.weakly_acyclic;
  res["line"] = rep.line().to_string();
  res["line_log_scalar"] = rep.element.log_scalar;
  res["trivialization"] = rep.trivialization;
  res["betti"] = rep.betti;
  res["log_dets"] = rep.log_dets;
  if (chi) res["euler_characteristic"] = *chi;
  o.json["result"] = res;

  Table t{"L2-torsion of " + c->name() + " (" + c->algebra().describe() + ")", {}};
  t.rows.push_back({"log rho", num(rep.log_value)});
  t.rows.push_back({"rho", rep.log_value ? num(std::exp(*rep.log_value)) : "-"});
  t.rows.push_back({"determinant class", yes(rep.determinant_class)});
  t.rows.push_back({"weakly acyclic", yes(rep.weakly_acyclic)});
  t.rows.push_back({"line", rep.line().trivial() ? "R" : rep.line().to_string()});
  t.rows.push_back({"trivialization", rep.trivialization});
  if (chi) t.rows.push_back({"euler characteristic", std::to_string(*chi)});
  o.tables.push_back(std::move(t));
  Table deg{"per degree", {{"degree", "betti", "log Det'(d)"}}, true};
  for (std::size_t i = 0; i < rep.betti.size(); ++i)
    deg.rows.push_back({std::to_string(i), num(rep.betti[i]), i < rep.log_dets.size() ? num(rep.log_dets[i]) : "-"});
  o.tables.push_back(std::move(deg));

  bool ok = true;
  if (f.oracle && rep.log_value) {
    OracleCheck check;
    complex_oracles(check, "torsion", *c, *rep.log_value, f);
    ok = check.finish(o, f.tolerance);
  }
  o.json["document"] = doc::emit(d);
  render(o, f, out);
  if (!rep.log_value) return kUncertified;
  return ok ? kOk : kFailed;
}

// ---- verify -------------------------------------------------------------------------------

Json verdict(Json j, const std::optional<double>& residual, const std::optional<double>& naturality, double tol,
             bool passed) {
  j["residual"] = opt(residual);
  j["naturality_residual"] = opt(naturality);
  j["tolerance"] = tol;
  j["passed"] = passed;
  return j;
}

Table verdict_table(const std::optional<double>& residual, const std::optional<double>& naturality, double tol,
                    bool passed) {
  Table t{"verdict", {}};
  t.rows.push_back({"residual", num(residual)});
  if (naturality) t.rows.push_back({"naturality residual", num(naturality)});
  t.rows.push_back({"tolerance", num(tol)});
  t.rows.push_back({"result", passed ? "PASS" : "FAIL"});
  return t;
}

Json sum_json(const SumReport& r) {
  Json j = Json::object();
  Json factors = Json::array();
  for (const FactorTorsion* x : {&r.x, &r.x0, &r.x1, &r.x2}) factors.push_back(factor_json(*x));
  j["factors"] = std::move(factors);
  if (r.les) {
    Json les = Json::object();
    les["log_torsion"] = r.les->log_value;
    les["torsion"] = std::exp(r.les->log_value);
    les["dimensions"] = r.les->dims;
    les["line"] = r.les->line.to_string();
    j["long_exact_sequence"] = std::move(les);
  }
  return verdict(std::move(j), r.residual, r.naturality_residual, r.tolerance, r.passed);
}

int finish_verify(Output& o, const doc::Document& d, const Flags& f, std::ostream& out, bool passed,
                  bool have_residual, OracleCheck* check) {
  bool ok = passed;
  if (check && check->ran) ok = check->finish(o, f.tolerance) && ok;
  o.json["document"] = doc::emit(d);
  render(o, f, out);
  if (!have_residual) return kUncertified;
  return ok ? kOk : kFailed;
}

int cmd_verify_sum(const doc::Document& d, const Flags& f, std::ostream& out) {
  require(d, {doc::Subject::Pushout}, "verify sum");
  const doc::PushoutData& p = *d.pushout;
  const CoefficientSystem& h = *d.coefficients;
  const Pushout po = pushout_assemble(p.x0, p.x1, p.x2, p.j1, p.j2, h);
  const SumReport r = verify_sum(po, p.x0, p.x1, p.x2, h, d.sigma, f.tolerance, f.det());
  Output o;
  o.json = header("verify sum", d);
  o.json["result"] = sum_json(r);
  o.tables.push_back(factor_table({{"X", &r.x}, {"X0", &r.x0}, {"X1", &r.x1}, {"X2", &r.x2}}));
  if (r.les)
    o.tables.push_back(Table{"long exact sequence",
                             {{"log rho", num(r.les->log_value)}, {"line", r.les->line.to_string()}}});
  o.tables.push_back(verdict_table(r.residual, r.naturality_residual, r.tolerance, r.passed));
  OracleCheck check;
  if (f.oracle) {
    factor_oracle(check, r.x, cochain_with_coefficients(po.space, h, d.sigma), f);
    factor_oracle(check, r.x0, cochain_with_coefficients(p.x0, h, d.sigma), f);
    factor_oracle(check, r.x1, cochain_with_coefficients(p.x1, h, d.sigma), f);
    factor_oracle(check, r.x2, cochain_with_coefficients(p.x2, h, d.sigma), f);
  }
  return finish_verify(o, d, f, out, r.passed, r.residual.has_value(), f.oracle ? &check : nullptr);
}

int cmd_verify_product(const doc::Document& d, const Flags& f, std::ostream& out) {
  require(d, {doc::Subject::Product}, "verify product");
  const auto& [a, b] = *d.product;
  const ProductReport r = verify_product(a.space, a.coefficients, b.space, b.coefficients, f.tolerance, f.det());
  Output o;
  o.json = header("verify product", d);
  Json j = Json::object();
  Json factors = Json::array();
  for (const FactorTorsion* x : {&r.product, &r.x1, &r.x2}) factors.push_back(factor_json(*x));
  j["factors"] = std::move(factors);
  j["chi1"] = r.chi1;
  j["chi2"] = r.chi2;
  j["lhs"] = opt(r.lhs);
  j["rhs"] = opt(r.rhs);
  o.json["result"] = verdict(std::move(j), r.residual, r.naturality_residual, r.tolerance, r.passed);
  o.tables.push_back(factor_table({{"X1 x X2", &r.product}, {"X1", &r.x1}, {"X2", &r.x2}}));
  o.tables.push_back(Table{"product formula",
                           {{"chi(X1)", std::to_string(r.chi1)},
                            {"chi(X2)", std::to_string(r.chi2)},
                            {"log rho(X1 x X2)", num(r.lhs)},
                            {"chi2 log rho(X1) + chi1 log rho(X2)", num(r.rhs)}}});
  o.tables.push_back(verdict_table(r.residual, r.naturality_residual, r.tolerance, r.passed));
  OracleCheck check;
  if (f.oracle) {
    factor_oracle(check, r.product,
                  cochain_with_coefficients(product_space(a.space, b.space), tensor(a.coefficients, b.coefficients)),
                  f);
    factor_oracle(check, r.x1, cochain_with_coefficients(a.space, a.coefficients), f);
    factor_oracle(check, r.x2, cochain_with_coefficients(b.space, b.coefficients), f);
  }
  return finish_verify(o, d, f, out, r.passed, r.residual.has_value(), f.oracle ? &check : nullptr);
}

int cmd_verify_fibration(const doc::Document& d, const Flags& f, std::ostream& out) {
  require(d, {doc::Subject::Bundle}, "verify fibration");
  const Bundle& b = *d.bundle;
  const CoefficientSystem& h = *d.coefficients;
  const FibrationReport r = verify_fibration(b, h, d.sigma, f.tolerance, f.det());
  Output o;
  o.json = header("verify fibration", d);
  Json j = Json::object();
  j["chi_base"] = r.chi_base;
  j["chi_fiber"] = r.chi_fiber;
  j["total"] = factor_json(r.total);
  j["fiber"] = factor_json(r.fiber);
  Json steps = Json::array();
  for (const FibrationStep& s : r.steps) {
    Json sj = Json::object();
    sj["base_cell"] = s.base_cell;
    sj["dimension"] = s.dimension;
    sj["sum"] = sum_json(s.sum);
    steps.push_back(std::move(sj));
  }
  j["steps"] = std::move(steps);
  j["injectivity_note"] = r.injectivity_note;
  o.json["result"] = verdict(std::move(j), r.residual, std::nullopt, r.tolerance, r.passed);
  o.tables.push_back(factor_table({{"E", &r.total}, {"F", &r.fiber}}));
  Table steps_t{"cell-by-cell sum steps", {{"base cell", "dim", "residual", "result"}}, true};
  for (const FibrationStep& s : r.steps)
    steps_t.rows.push_back({std::to_string(s.base_cell), std::to_string(s.dimension), num(s.sum.residual),
                            s.sum.passed ? "PASS" : "FAIL"});
  o.tables.push_back(std::move(steps_t));
  o.tables.push_back(Table{"fibration formula",
                           {{"chi(B)", std::to_string(r.chi_base)},
                            {"chi(F)", std::to_string(r.chi_fiber)},
                            {"note", r.injectivity_note}}});
  o.tables.push_back(verdict_table(r.residual, std::nullopt, r.tolerance, r.passed));
  OracleCheck check;
  if (f.oracle) {
    factor_oracle(check, r.total, cochain_with_coefficients(total_space(b), h, d.sigma), f);
    factor_oracle(check, r.fiber, cochain_with_coefficients(b.fiber, h, d.sigma), f);
  }
  return finish_verify(o, d, f, out, r.passed, r.residual.has_value(), f.oracle ? &check : nullptr);
}

// ---- builtin -----------------------------------------------------------------------------

int int_arg(const std::vector<std::string>& params, std::size_t i, const std::string& name) {
  if (i >= params.size()) fail(ErrorKind::BadParams, name + " needs parameter " + std::to_string(i + 1));
  try {
    std::size_t used = 0;
    const int v = std::stoi(params[i], &used);
    if (used == params[i].size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::BadParams, name + ": '" + params[i] + "' is not an integer");
}

doc::Factor factor(const BuiltinSpace& s) { return {s.space, s.coefficients}; }

doc::Document builtin_document(const std::string& name, const std::vector<std::string>& params, bool bundle) {
  if (bundle) {
    if (!params.empty()) fail(ErrorKind::BadParams, "builtin bundles take no parameters");
    const BuiltinBundle b = builtin_bundle(name);
    return doc::bundle_document(b.bundle, b.coefficients);
  }
  if (name == "product") {
    const auto sep = std::find(params.begin(), params.end(), "x");
    if (sep == params.end() || sep == params.begin() || sep + 1 == params.end())
      fail(ErrorKind::BadParams, "product expects '<space> [params] x <space> [params]'");
    const std::vector<std::string> left(params.begin() + 1, sep), right(sep + 2, params.end());
    return doc::product_document(factor(builtin_space(params.front(), left)), factor(builtin_space(*(sep + 1), right)));
  }
  if (name == "sphere_pushout") {
    // S^2 as two disks glued along their boundary circle.
    if (!params.empty()) fail(ErrorKind::BadParams, "sphere_pushout takes no parameters");
    doc::PushoutData p;
    p.x0 = builtin_space("sphere", {1}).space;
    p.x1 = builtin_space("disk", {2}).space.renamed("D+");
    p.x2 = builtin_space("disk", {2}).space.renamed("D-");
    p.j1 = {{0}, {0}};
    p.j2 = {IntegralMatrix::identity(1), IntegralMatrix::identity(1)};
    return doc::pushout_document(std::move(p), CoefficientSystem::trivial(GroupPresentation::trivial()));
  }
  if (name == "random_pushout") {
    if (params.size() != 2) fail(ErrorKind::BadParams, "random_pushout expects <p> <seed>");
    const int p = int_arg(params, 0, name);
    if (p < 2) fail(ErrorKind::BadParams, "random_pushout needs p >= 2");
    gen::Rng rng(static_cast<std::uint64_t>(int_arg(params, 1, name)));
    const gen::PushoutCase c = gen::pushout(rng, p);
    return doc::pushout_document({c.x0, c.x1, c.x2, c.j1, c.j2}, c.h);
  }
  const BuiltinSpace s = builtin_space(name, params);
  return doc::space_document(s.space, s.coefficients);
}

// ---- selftest ------------------------------------------------------------------------------

int cmd_selftest(const std::vector<int>& only, std::uint64_t seed, const Flags& f, std::ostream& out) {
  Json results = Json::array();
  bool all = true;
  for (int id : acceptance::criterion_ids()) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const acceptance::CriterionResult r = acceptance::run_criterion(id, seed);
    all = all && r.passed;
    if (f.format == "json") {
      Json j = Json::object();
      j["id"] = r.id;
      j["name"] = r.name;
      j["passed"] = r.passed;
      j["worst"] = r.worst;
      j["tolerance"] = r.tolerance;
      j["cases"] = r.cases;
      j["seconds"] = r.seconds;
      j["budget"] = r.budget;
      j["detail"] = r.detail;
      results.push_back(std::move(j));
    } else {
      out << acceptance::format_line(r) << std::endl;
    }
  }
  if (f.format == "json") {
    Json j = Json::object();
    j["version"] = doc::kVersion;
    j["command"] = "selftest";
    j["seed"] = seed;
    j["criteria"] = std::move(results);
    j["passed"] = all;
    out << doc::dump(j) << '\n';
  }
  return all ? kOk : kFailed;
}

}  // namespace

int execute(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"L2-torsion of finite equivariant CW complexes and verification of its gluing formulas",
               "l2torsion"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  app.add_option("--tolerance", flags.tolerance, "acceptance tolerance on log residuals")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--grid", flags.grid, "torus start resolution per axis")->capture_default_str()->check(CLI::Range(4, 1 << 14));
  app.add_option("--epsilon", flags.epsilon, "relative spectral cutoff")->check(CLI::PositiveNumber);
  app.add_option("--format", flags.format, "report format")->capture_default_str()->check(CLI::IsMember({"json", "table"}));
  app.add_flag("--oracle", flags.oracle, "also run the oracle path and report disagreement");

  std::string file;
  const auto with_file = [&](CLI::App* sub) {
    sub->add_option("file", file, "JSON document, '-' for stdin")->required();
    sub->fallthrough();
    return sub;
  };
  CLI::App* det = with_file(app.add_subcommand("det", "Fuglede-Kadison determinant of a matrix"));
  CLI::App* mahler = with_file(app.add_subcommand("mahler", "Mahler measure of a torus polynomial with error bound"));
  CLI::App* tors = with_file(app.add_subcommand("torsion", "L2-torsion of a space or cochain complex"));
  CLI::App* verify = app.add_subcommand("verify", "check a gluing formula");
  verify->require_subcommand(1);
  verify->fallthrough();
  CLI::App* v_sum = with_file(verify->add_subcommand("sum", "sum formula for a pushout"));
  CLI::App* v_prod = with_file(verify->add_subcommand("product", "product formula"));
  CLI::App* v_fib = with_file(verify->add_subcommand("fibration", "fibration formula for a bundle"));

  CLI::App* builtin = app.add_subcommand("builtin", "emit a built-in document");
  builtin->fallthrough();
  std::string builtin_name;
  std::vector<std::string> builtin_params;
  bool as_bundle = false;
  builtin->add_option("name", builtin_name,
                      "point, sphere n, disk n, circle_Z, torus k, lens p q, klein_bottle, heisenberg, "
                      "mapping_torus d, product <a> [params] x <b> [params], sphere_pushout, random_pushout p seed; "
                      "with --bundle: klein_bottle, circle_x_sphere, circle_x_circle, sphere_x_circle")
      ->required();
  builtin->add_option("params", builtin_params, "parameters");
  builtin->add_flag("--bundle", as_bundle, "emit a bundle document");

  CLI::App* selftest = app.add_subcommand("selftest", "run the acceptance suites");
  selftest->fallthrough();
  std::vector<int> only;
  std::uint64_t seed = acceptance::kDefaultSeed;
  selftest->add_option("--criterion", only, "run only these criteria");
  selftest->add_option("--seed", seed, "generator seed")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*builtin) {
      const doc::Document d = builtin_document(builtin_name, builtin_params, as_bundle);
      out << doc::dump(doc::emit(d)) << '\n';
      return kOk;
    }
    if (*selftest) return cmd_selftest(only, seed, flags, out);
    const doc::Document d = doc::parse_text(read_input(file, in));
    if (*det) return cmd_det(d, flags, out);
    if (*mahler) return cmd_mahler(d, flags, out);
    if (*tors) return cmd_torsion(d, flags, out);
    if (*v_sum) return cmd_verify_sum(d, flags, out);
    if (*v_prod) return cmd_verify_product(d, flags, out);
    if (*v_fib) return cmd_verify_fibration(d, flags, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const nlohmann::json::exception& e) {
    err << "error: InvalidInput: " << e.what() << '\n';
    return kInvalid;
  }
  err << "error: no command\n";
  return kInvalid;
}

}  // namespace l2t::cli
