#pragma once

// JSON and CSV formats. Complex numbers are [re, im]; plain reals are accepted
// on input. Non-finite doubles are written as the strings "inf", "-inf", "nan".

#include "mpspec/pencil.hpp"
#include "mpspec/pseudospectrum.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace mpspec {

using json = nlohmann::json;

json to_json(cplx z);
json to_json(const CVector& v);
json to_json(const CMatrix& a);
json number_json(double x);

cplx complex_from_json(const json& j);
CVector vector_from_json(const json& j);
CMatrix matrix_from_json(const json& j);

/// {"k", "l", "m", "terms": [{"exp": [...], "matrix": [[...]]}]} or the linear
/// shorthand {"A": [A0, A1, ..., Am]}.
MultiParamPencil pencil_from_json(const json& j);
json pencil_to_json(const MultiParamPencil& p);

/// {"axes": [{"fixed": [re, im]} | {"real": [a, b, n]} | {"complex": [a, b, c, d, nre, nim]}]}
GridSpec grid_from_json(const json& j);
json grid_to_json(const GridSpec& g);

std::string read_file(const std::string& path);
json read_json(const std::string& path);
MultiParamPencil load_pencil(const std::string& path);

/// Real data: numbers separated by commas, whitespace or newlines; an optional
/// non-numeric header line is skipped.
RVector load_data(const std::string& path);

/// "1.5", "2-3j", "-1e-3+2i", "4j".
cplx parse_complex(const std::string& s);
/// Comma-separated complex numbers.
std::vector<cplx> parse_complex_list(const std::string& s);
/// Comma-separated reals.
std::vector<double> parse_real_list(const std::string& s);

}  // namespace mpspec
