#pragma once

// Serialization. Floats are written with 17 significant digits; words are
// written 1-based as Y1*Y2*..., the empty word as 1.

#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mqg/ncpoly.hpp"

namespace mqg::io {

using Json = nlohmann::ordered_json;

/// "%.17g"; non-finite values become "nan", "inf", "-inf".
std::string format_double(double x);

/// Deterministic JSON text: two-space indent, insertion-ordered keys, floats
/// via format_double. Non-finite floats are written as null.
std::string dump_json(const Json& j);

std::string word_to_text(const Word& w);
/// Inverse of word_to_text. Throws std::invalid_argument on malformed input.
Word word_from_text(std::string_view s);

/// One term per line, "<coefficient %+.16e> <word>", shortlex order.
std::string poly_to_text(const NCPoly<double>& p);
NCPoly<double> poly_from_text(std::string_view text);

/// One term per line, "<coefficient> <left> | <right>".
std::string tensor_to_text(const NCTensor<double>& t);
NCTensor<double> tensor_from_text(std::string_view text);

/// {"terms": [{"word": [1, 2], "coeff": c}, ...]}, letters 1-based.
Json poly_to_json(const NCPoly<double>& p);
NCPoly<double> poly_from_json(const Json& j);

Json matrix_to_json(const Mat<double>& m);
std::string matrix_to_csv(const Mat<double>& m);

/// Reads a whitespace or comma separated square matrix.
Mat<double> matrix_from_text(std::string_view text);

void write_file(const std::string& path, std::string_view contents);
std::string read_file(const std::string& path);

} // namespace mqg::io
