#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "l2t/formulas.hpp"

namespace l2t::doc {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "l2t/1";

// Serialized JSON with every double written to 17 significant digits ("1.0" style
// for integral values so the number type survives a re-read).
std::string dump(const Json& j, int indent = 2);
std::string format_double(double x);

// ---- building blocks --------------------------------------------------------
// All readers throw Error(InvalidInput) on malformed data, naming the offending path.

Json to_json(const AlgebraModel& model);
AlgebraModel algebra_from_json(const Json& j);

// finite: integer, torus: exponent array, mixed: {"g": int, "v": [...]}.
Json key_to_json(const GroupKey& key, const AlgebraModel& model);
GroupKey key_from_json(const Json& j, const AlgebraModel& model);

// List of {"key", "re", "im"} in key order.
Json to_json(const GroupRingElement& a);
GroupRingElement element_from_json(const Json& j, const AlgebraModel& model);

// Nested rows of elements. Empty matrices carry explicit "rows"/"cols".
Json to_json(const GroupRingMatrix& m);
GroupRingMatrix matrix_from_json(const Json& j, const AlgebraModel& model);

Json to_json(const GroupPresentation& g);
GroupPresentation presentation_from_json(const Json& j);

// Entries are lists of {"word", "coeff"}.
Json to_json(const IntegralMatrix& m, const GroupPresentation& g);
IntegralMatrix integral_from_json(const Json& j, const GroupPresentation& g, int rows, int cols);

Json to_json(const EquivariantCWComplex& x);
EquivariantCWComplex space_from_json(const Json& j);

// Target algebra is carried by the enclosing block.
Json to_json(const CoefficientSystem& h, const GroupPresentation& g);
CoefficientSystem coefficients_from_json(const Json& j, const GroupPresentation& g, const AlgebraModel& target);

Json to_json(const CochainComplex& c);
CochainComplex complex_from_json(const Json& j, const AlgebraModel& model);

Json to_json(const Bundle& b);
Bundle bundle_from_json(const Json& j);

// ---- documents ----------------------------------------------------------------

enum class Subject { Matrix, Polynomial, Complex, Space, Product, Pushout, Bundle };
std::string to_string(Subject s);

struct Factor {
  EquivariantCWComplex space;
  CoefficientSystem coefficients;
};

struct PushoutData {
  EquivariantCWComplex x0, x1, x2;
  std::vector<std::vector<int>> j1;
  ChainMap j2;
};

// One computation subject plus what it needs. `coefficients` goes with space, pushout
// and bundle subjects; a product carries its own per factor.
struct Document {
  Subject subject = Subject::Matrix;
  std::optional<AlgebraModel> algebra;
  std::optional<GroupRingMatrix> matrix;
  std::optional<GroupRingElement> polynomial;
  std::optional<CochainComplex> complex;
  std::optional<EquivariantCWComplex> space;
  std::optional<CoefficientSystem> coefficients;
  std::optional<std::pair<Factor, Factor>> product;
  std::optional<PushoutData> pushout;
  std::optional<Bundle> bundle;
  PreferredVolume sigma;
};

Document parse(const Json& j);
Document parse_text(const std::string& text);
Json emit(const Document& d);

Document space_document(const EquivariantCWComplex& x, const CoefficientSystem& h);
Document bundle_document(const Bundle& b, const CoefficientSystem& h);
Document product_document(Factor x1, Factor x2);
Document pushout_document(PushoutData p, const CoefficientSystem& h);

}  // namespace l2t::doc
