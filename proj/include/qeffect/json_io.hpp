#pragma once

#include "qeffect/effects.hpp"
#include "qeffect/order_maps.hpp"
#include "qeffect/report.hpp"
#include "qeffect/sharp.hpp"

#include <string>

namespace qeffect::io {

/// {"rows": n, "cols": m, "data": [[re, im], ...]} in row-major order.
/// Doubles are written in shortest round-trip form, so parsing the output
/// reproduces every bit.
Json matrix_to_json(const Matrix& m);
Json matrix_to_json(const Matrix& m, const char* kind);
/// Errors name the offending field (e.g. "matrix.data[3][1]").
Matrix matrix_from_json(const Json& j, const std::string& path = "matrix");

/// Validates the optional "kind" tag against `expected` before decoding.
Matrix tagged_matrix_from_json(const Json& j, const char* expected, const std::string& path);

Effect effect_from_json(const Json& j, const std::string& path = "effect");
State state_from_json(const Json& j, const std::string& path = "state");
Ray ray_from_json(const Json& j, const std::string& path = "ray");
Json ray_to_json(const Ray& r);

Json spec_to_json(const EffectMapSpec& spec);
EffectMapSpec spec_from_json(const Json& j, const std::string& path = "spec");

Json semilinear_to_json(const SemilinearOperator& a);
SemilinearOperator semilinear_from_json(const Json& j, const std::string& path = "operator");

Json witness_to_json(const Witness& w);
Json report_to_json(const MapReport& r);
Json report_to_json(const ClassificationReport& r);

Json parse_file(const std::string& path);
/// Parses text; syntax errors become InvalidInput naming `origin`.
Json parse_text(const std::string& text, const std::string& origin);

}  // namespace qeffect::io
