#include "support.hpp"

#include "l2t/cli.hpp"
#include "l2t/document.hpp"

#include <algorithm>
#include <sstream>

using namespace l2t;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
  doc::Json json() const { return doc::Json::parse(out); }
};

Run run(std::vector<std::string> args, const std::string& input = {}) {
  if (!args.empty() && args.front() != "builtin" && args.front() != "selftest" &&
      std::find(args.begin(), args.end(), "--format") == args.end())
    args.push_back("--format=json");
  std::istringstream in(input);
  std::ostringstream out, err;
  Run r;
  r.code = cli::execute(args, in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string data(const std::string& name) { return std::string(L2T_DATA_DIR) + "/" + name; }

}  // namespace

TEST_CASE("builtin sphere piped into torsion") {
  const Run b = run({"builtin", "sphere", "2"});
  REQUIRE(b.code == 0);
  const Run t = run({"torsion", "-"}, b.out);
  CHECK(t.code == 0);
  const doc::Json j = t.json();
  CHECK(j["command"] == "torsion");
  CHECK(j["result"]["torsion"].get<double>() == doctest::Approx(1.0));
  CHECK(j["version"] == doc::kVersion);
}

TEST_CASE("product verification with oracles") {
  const Run r = run({"verify", "product", data("lens31_x_circle.json"), "--oracle"});
  CHECK(r.code == 0);
  const doc::Json j = r.json();
  CHECK(j["result"]["residual"].get<double>() < 1e-8);
  CHECK(j.contains("oracle"));
}

TEST_CASE("d^2 != 0 is an input error") {
  const Run r = run({"torsion", data("bad_dsquared.json")});
  CHECK(r.code == cli::kInvalid);
  CHECK(r.err.find("NotComplex") != std::string::npos);
  CHECK(r.out.empty());
}

TEST_CASE("determinants and Mahler measures") {
  const Run d = run({"det", data("t_minus_1_z5.json"), "--oracle"});
  CHECK(d.code == 0);
  CHECK(d.json()["result"]["log_det"].get<double>() == doctest::Approx(std::log(5.0) / 5.0).epsilon(1e-12));
  const Run m = run({"mahler", data("mahler_1_z_w.json")});
  CHECK(m.code == 0);
  CHECK(std::abs(m.json()["result"]["log_mahler"].get<double>() - 0.3230659472) < 1e-6);
}

TEST_CASE("sum and fibration verification") {
  CHECK(run({"verify", "sum", data("sphere_pushout.json")}).code == 0);
  CHECK(run({"verify", "fibration", data("klein_bottle_bundle.json")}).code == 0);
  const Run bad = run({"verify", "fibration", data("sphere_x_circle_bundle.json")});
  CHECK(bad.code == cli::kInvalid);
  CHECK(bad.err.find("EulerNotZero") != std::string::npos);
}

TEST_CASE("usage errors and help") {
  CHECK(run({}).code == cli::kInvalid);
  CHECK(run({"frobnicate"}).code == cli::kInvalid);
  CHECK(run({"torsion"}).code == cli::kInvalid);
  CHECK(run({"torsion", "/nonexistent.json"}).code == cli::kInvalid);
  CHECK(run({"builtin", "lens", "4", "2"}).code == cli::kInvalid);
  CHECK(run({"det", data("t_minus_1_z5.json"), "--grid", "2"}).code == cli::kInvalid);
  CHECK(run({"--help"}).code == cli::kOk);
  CHECK(run({"builtin", "--help"}).code == cli::kOk);
}

TEST_CASE("output is deterministic and round-trips through the document") {
  const Run a = run({"torsion", data("sphere_pushout.json")});
  const Run b = run({"torsion", data("sphere_pushout.json")});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const std::string again = doc::dump(a.json()["document"]);
  const Run c = run({"torsion", "-"}, again);
  CHECK(c.out == a.out);
}

TEST_CASE("table format") {
  const Run r = run({"torsion", data("t_minus_1_z5.json"), "--format", "table"});
  CHECK(r.code == cli::kInvalid);  // a matrix is not a torsion subject
  const Run t = run({"det", data("t_minus_1_z5.json"), "--format", "table"});
  CHECK(t.code == 0);
  CHECK(t.out.find("log Det'") != std::string::npos);
  CHECK(t.out.find('{') == std::string::npos);
}
