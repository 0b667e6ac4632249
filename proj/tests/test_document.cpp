#include "support.hpp"

#include "l2t/document.hpp"

#include <fstream>
#include <sstream>

using namespace l2t;
using namespace l2t::test;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream f(std::string(L2T_DATA_DIR) + "/" + name);
  REQUIRE(f);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Parse, emit, parse again: the second emission must match the first.
void round_trip(const doc::Document& d) {
  const std::string once = doc::dump(doc::emit(d));
  const std::string twice = doc::dump(doc::emit(doc::parse_text(once)));
  CHECK(once == twice);
}

}  // namespace

TEST_CASE("double formatting") {
  CHECK(doc::format_double(1.0) == "1.0");
  CHECK(doc::format_double(-2.0) == "-2.0");
  CHECK(doc::format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(doc::format_double(M_PI)) == M_PI);
  CHECK(doc::dump(doc::Json(std::nan(""))) == "null");
}

TEST_CASE("algebras and elements round-trip") {
  for (const AlgebraModel& m : {cyclic(4), AlgebraModel::torus(2), AlgebraModel::mixed(FiniteGroupTable::dihedral(3), 1)}) {
    const AlgebraModel back = doc::algebra_from_json(doc::to_json(m));
    CHECK(back == m);
    gen::Rng rng(71);
    if (m.is_finite()) {
      const GroupRingMatrix a = gen::matrix(rng, m, 2, 3);
      CHECK(doc::matrix_from_json(doc::to_json(a), m) == a);
    }
  }
  const AlgebraModel t2 = AlgebraModel::torus(2);
  const GroupRingElement p = laurent(t2, {{{1, -2}, cplx(0.5, -1.0)}, {{0, 0}, 3.0}});
  CHECK(doc::element_from_json(doc::to_json(p), t2) == p);
  // A bare number is a scalar; a bare int is a rank-one torus key.
  CHECK(doc::element_from_json(doc::Json(2.5), t2) == GroupRingElement::scalar(t2, 2.5));
  CHECK(doc::key_from_json(doc::Json(3), AlgebraModel::torus(1)) == GroupKey{0, {3}});
}

TEST_CASE("documents for every subject round-trip") {
  for (const char* f : {"t_minus_1_z5.json", "mahler_1_z_w.json", "lens31_x_circle.json", "sphere_pushout.json",
                        "klein_bottle_bundle.json"}) {
    CAPTURE(f);
    round_trip(doc::parse_text(slurp(f)));
  }
  const BuiltinSpace k = builtin_space("klein_bottle", {});
  round_trip(doc::space_document(k.space, k.coefficients));
  gen::Rng rng(72);
  const gen::PushoutCase c = gen::pushout(rng, 5);
  round_trip(doc::pushout_document({c.x0, c.x1, c.x2, c.j1, c.j2}, c.h));

  doc::Document cd;
  cd.subject = doc::Subject::Complex;
  const AlgebraModel z3 = cyclic(3);
  cd.algebra = z3;
  gen::ComplexShape shape;
  shape.max_total_rank = 6;
  cd.complex = gen::complex(rng, z3, shape, "C");
  round_trip(cd);
  const doc::Document back = doc::parse_text(doc::dump(doc::emit(cd)));
  CHECK(torsion(*back.complex).value() == doctest::Approx(torsion(*cd.complex).value()).epsilon(1e-12));
}

TEST_CASE("malformed documents are refused") {
  const auto bad = [](const std::string& text) {
    CAPTURE(text);
    CHECK_THROWS(doc::parse_text(text));
  };
  bad("not json");
  bad("{}");
  bad(R"({"version": "l2t/1", "algebra": {"type": "torus", "rank": 1}, "matrix": [[1]], "polynomial": [1]})");
  bad(R"({"version": "l2t/1", "algebra": {"type": "torus", "rank": 9}, "polynomial": [1]})");
  bad(R"({"version": "l2t/1", "algebra": {"type": "finite_group", "table": [[0, 1], [1, 1]]}, "matrix": [[1]]})");
  bad(R"({"version": "l2t/1", "algebra": {"type": "torus", "rank": 1}, "matrix": [[1, 2], [3]]})");
  bad(R"({"version": "l2t/1", "algebra": {"type": "torus", "rank": 2}, "polynomial": [{"key": [1], "re": 1, "im": 0}]})");
  bad(R"({"version": "l2t/0", "algebra": {"type": "torus", "rank": 1}, "polynomial": [1]})");
  try {
    doc::parse_text(R"({"version": "l2t/1", "algebra": {"type": "torus", "rank": 1}, "matrix": [[{"key": "x"}]]})");
    FAIL("accepted a string key");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidInput);
    CHECK(std::string(e.what()).find("matrix") != std::string::npos);
  }
}
