#pragma once

#include "potlab/rearrangement.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace potlab {

// Bad input: unreadable file, malformed JSON/CSV, schema violation.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A NaN reached an output; always fatal.
struct NanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 17 significant digits, '.' decimal, "inf"/"-inf" for infinities; throws NanError on NaN.
std::string format_double(double v);
// Number for JSON output; infinities become the strings "inf"/"-inf".
nlohmann::json json_number(double v);
// Accepts numbers and the strings "inf"/"-inf".
double number_from_json(const nlohmann::json& j);

std::string read_text(const std::string& path);
// Parse errors carry "source:line:column: message".
nlohmann::json parse_json(const std::string& text, const std::string& source = "<input>");
nlohmann::json read_json(const std::string& path);

// Rows "t,v": v is the value on [t, next t); the last row carries value 0 and marks the support.
// An optional "t,v" header is skipped.
StepProfile parse_step_profile_csv(const std::string& text, const std::string& source = "<input>");
std::string step_profile_csv(const StepProfile& p);

// First line "dim,shape_1..shape_dim,spacing,origin_1..origin_dim" (origin is the lower corner),
// then the values in row-major order (last axis fastest), one per line.
GridFunction parse_grid_csv(const std::string& text, const std::string& source = "<input>");
std::string grid_csv(const GridFunction& g);

// One point per row, comma-separated coordinates; an optional header of non-numeric names is skipped.
std::vector<std::vector<double>> parse_points_csv(const std::string& text, const std::string& source = "<input>");

}  // namespace potlab
