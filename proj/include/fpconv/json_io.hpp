#ifndef FPCONV_JSON_IO_HPP
#define FPCONV_JSON_IO_HPP

#include <string>

#include <json.hpp>

#include "fpconv/measure.hpp"

namespace fpconv {

// Measure spec schema:
//   {"type":"semicircle","beta":1.0}
//   {"type":"marchenko_pastur","beta":0.5}
//   {"type":"atomic","atoms":[[-1.0,0.5],[1.0,0.5]]}
//   {"type":"jacobi","a":-1.0,"b":1.0,"p":0.5,"q":0.5}
// Atom weights must sum to 1 within 1e-9.
nlohmann::json measure_to_json(const Measure& m);
Measure measure_from_json(const nlohmann::json& j);

// Accepts inline JSON, "@path" for a JSON file, or the shorthand tokens
// "sc", "sc:BETA", "mp", "mp:BETA".
Measure parse_measure_spec(const std::string& token);

// JSON has no infinity literal; +-inf travel as the strings "inf"/"-inf".
nlohmann::json json_number(double v);

} // namespace fpconv

#endif
