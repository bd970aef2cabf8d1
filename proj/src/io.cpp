#include "potlab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace potlab {

std::string format_double(double v) {
  if (std::isnan(v)) throw NanError("NaN in numeric output");
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

nlohmann::json json_number(double v) {
  if (std::isnan(v)) throw NanError("NaN in numeric output");
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
  }
  throw InputError("expected a number or \"inf\", got " + j.dump());
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json parse_json(const std::string& text, const std::string& source) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    size_t pos = e.byte == 0 ? 0 : e.byte - 1;
    size_t line = 1, col = 1;
    for (size_t i = 0; i < pos && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    if (auto k = msg.find("parse error"); k != std::string::npos) msg = msg.substr(k);
    throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }
}

nlohmann::json read_json(const std::string& path) { return parse_json(read_text(path), path); }

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_num(const std::string& s, double& v) {
  if (s == "inf" || s == "+inf") {
    v = HUGE_VAL;
    return true;
  }
  const char* b = s.data();
  if (!s.empty() && s[0] == '+') ++b;
  auto r = std::from_chars(b, s.data() + s.size(), v);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

struct Lines {
  std::vector<std::pair<size_t, std::string>> rows;  // 1-based line number, content
};

Lines lines_of(const std::string& text) {
  Lines L;
  std::istringstream ss(text);
  std::string line;
  size_t no = 0;
  while (std::getline(ss, line)) {
    ++no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    L.rows.emplace_back(no, line);
  }
  return L;
}

[[noreturn]] void fail(const std::string& source, size_t line, size_t col, const std::string& msg) {
  throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
}

std::vector<double> numbers(const std::string& source, size_t line, const std::string& text) {
  std::vector<double> v;
  size_t col = 1;
  for (const auto& cell : split(text)) {
    double x;
    if (!parse_num(cell, x)) fail(source, line, col, "expected a number, got '" + cell + "'");
    if (std::isnan(x)) fail(source, line, col, "NaN in input");
    v.push_back(x);
    col += cell.size() + 1;
  }
  return v;
}

bool numeric_row(const std::string& text) {
  for (const auto& cell : split(text)) {
    double x;
    if (!parse_num(cell, x)) return false;
  }
  return true;
}

}  // namespace

StepProfile parse_step_profile_csv(const std::string& text, const std::string& source) {
  auto L = lines_of(text);
  std::vector<double> b, v;
  for (size_t i = 0; i < L.rows.size(); ++i) {
    const auto& [no, row] = L.rows[i];
    if (i == 0 && !numeric_row(row)) continue;
    auto x = numbers(source, no, row);
    if (x.size() != 2) fail(source, no, 1, "expected two columns t,v");
    b.push_back(x[0]);
    v.push_back(x[1]);
  }
  if (b.empty()) return StepProfile();
  if (v.back() != 0.0) throw InputError(source + ": last row must have value 0 and mark the support");
  v.pop_back();
  try {
    return StepProfile(b, v);
  } catch (const std::invalid_argument& e) {
    throw InputError(source + ": " + e.what());
  }
}

std::string step_profile_csv(const StepProfile& p) {
  std::string out = "t,v\n";
  for (size_t k = 0; k < p.size(); ++k) out += format_double(p.breaks()[k]) + "," + format_double(p.values()[k]) + "\n";
  if (!p.empty()) out += format_double(p.support()) + ",0\n";
  return out;
}

GridFunction parse_grid_csv(const std::string& text, const std::string& source) {
  auto L = lines_of(text);
  if (L.rows.empty()) throw InputError(source + ": empty grid file");
  auto head = numbers(source, L.rows[0].first, L.rows[0].second);
  if (head.empty() || head[0] < 1 || head[0] != std::floor(head[0])) fail(source, L.rows[0].first, 1, "first field must be the dimension");
  const int dim = static_cast<int>(head[0]);
  if (head.size() != static_cast<size_t>(2 * dim + 2))
    fail(source, L.rows[0].first, 1, "header must be dim,shape...,spacing,origin...");
  std::vector<int> shape;
  size_t total = 1;
  for (int k = 0; k < dim; ++k) {
    double s = head[1 + k];
    if (!(s >= 1) || s != std::floor(s)) fail(source, L.rows[0].first, 1, "shape entries must be positive integers");
    shape.push_back(static_cast<int>(s));
    total *= static_cast<size_t>(s);
  }
  double h = head[1 + dim];
  std::vector<double> origin(head.begin() + 2 + dim, head.end());
  std::vector<double> values;
  values.reserve(total);
  for (size_t i = 1; i < L.rows.size(); ++i) {
    auto x = numbers(source, L.rows[i].first, L.rows[i].second);
    if (x.size() != 1) fail(source, L.rows[i].first, 1, "one value per line expected");
    values.push_back(x[0]);
  }
  if (values.size() != total)
    throw InputError(source + ": expected " + std::to_string(total) + " values, found " + std::to_string(values.size()));
  try {
    return GridFunction(dim, shape, h, origin, values);
  } catch (const std::invalid_argument& e) {
    throw InputError(source + ": " + e.what());
  }
}

std::string grid_csv(const GridFunction& g) {
  std::string out = std::to_string(g.dim());
  for (int s : g.shape()) out += "," + std::to_string(s);
  out += "," + format_double(g.spacing());
  for (double o : g.origin()) out += "," + format_double(o);
  out += "\n";
  for (double v : g.values()) out += format_double(v) + "\n";
  return out;
}

std::vector<std::vector<double>> parse_points_csv(const std::string& text, const std::string& source) {
  auto L = lines_of(text);
  std::vector<std::vector<double>> pts;
  for (size_t i = 0; i < L.rows.size(); ++i) {
    const auto& [no, row] = L.rows[i];
    if (i == 0 && !numeric_row(row)) continue;
    pts.push_back(numbers(source, no, row));
    if (pts.back().size() != pts.front().size()) fail(source, no, 1, "all points must have the same dimension");
  }
  return pts;
}

}  // namespace potlab
