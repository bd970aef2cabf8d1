#include "potlab/monotone.hpp"

#include "potlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <variant>

namespace potlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Identity {};
struct Power {
  double e, c;
};
struct Zygmund {
  double p, a, s;
  bool derivative, loglog;
};
struct Llog {
  bool derivative;
};
struct Llogl {
  bool derivative;
};
struct Table {
  std::vector<double> t, v;
};
struct Sum {
  std::vector<MonotoneFn> terms;
};
struct Scaled {
  double outer, inner;
  MonotoneFn base;
};
struct Compose {
  MonotoneFn outer, inner;
};
struct Inverse {
  MonotoneFn base;
};
struct Conjugate {
  MonotoneFn G, g;
};

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double bisect_inverse(const MonotoneFn& f, double y) {
  if (f(0.0) >= y) return 0.0;
  double hi = 1.0;
  if (f(hi) < y) {
    double lo = hi;
    for (int k = 0; f(hi) < y; ++k) {
      if (k > 1100 || !std::isfinite(hi)) throw std::domain_error("inverse: value outside the range of the function");
      lo = hi;
      hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      double mid = 0.5 * (lo + hi);
      (f(mid) >= y ? hi : lo) = mid;
    }
    return hi;
  }
  // f(1) >= y > f(0): descend with doubling exponents, then bisect in log scale.
  double lo = 0.5;
  for (int e = 1;; e = std::min(2 * e, 1074)) {
    lo = std::ldexp(1.0, -e);
    if (f(lo) < y) break;
    hi = lo;
    if (e == 1074) return 0.0;
  }
  for (int it = 0; it < 300 && hi - lo > 1e-15 * hi; ++it) {
    double mid = std::sqrt(lo) * std::sqrt(hi);
    if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
    (f(mid) >= y ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

struct MonotoneFn::Node {
  std::variant<Identity, Power, Zygmund, Llog, Llogl, Table, Sum, Scaled, Compose, Inverse, Conjugate> v;
};

MonotoneFn::MonotoneFn() : node_(std::make_shared<Node>(Node{Identity{}})) {}

MonotoneFn MonotoneFn::identity() { return MonotoneFn(); }

MonotoneFn MonotoneFn::power(double exponent, double coeff) {
  require(exponent >= 0 && coeff >= 0 && std::isfinite(exponent) && std::isfinite(coeff), "power: need exponent >= 0, coeff >= 0");
  return MonotoneFn(std::make_shared<Node>(Node{Power{exponent, coeff}}));
}

MonotoneFn MonotoneFn::zygmund(double p, double alpha, double s) {
  require(p > 0 && s > 1, "zygmund: need p > 0, s > 1");
  return MonotoneFn(std::make_shared<Node>(Node{Zygmund{p, alpha, s, false, false}}));
}
MonotoneFn MonotoneFn::zygmund_derivative(double p, double alpha, double s) {
  require(p > 1 && s > 1, "zygmund: need p > 1, s > 1");
  return MonotoneFn(std::make_shared<Node>(Node{Zygmund{p, alpha, s, true, false}}));
}
MonotoneFn MonotoneFn::zygmund_loglog(double p, double alpha, double s) {
  require(p > 0 && s > std::numbers::e, "zygmund_loglog: need p > 0, s > e");
  return MonotoneFn(std::make_shared<Node>(Node{Zygmund{p, alpha, s, false, true}}));
}
MonotoneFn MonotoneFn::zygmund_loglog_derivative(double p, double alpha, double s) {
  require(p > 1 && s > std::numbers::e, "zygmund_loglog: need p > 1, s > e");
  return MonotoneFn(std::make_shared<Node>(Node{Zygmund{p, alpha, s, true, true}}));
}
MonotoneFn MonotoneFn::llog() { return MonotoneFn(std::make_shared<Node>(Node{Llog{false}})); }
MonotoneFn MonotoneFn::llog_derivative() { return MonotoneFn(std::make_shared<Node>(Node{Llog{true}})); }
MonotoneFn MonotoneFn::llogl() { return MonotoneFn(std::make_shared<Node>(Node{Llogl{false}})); }
MonotoneFn MonotoneFn::llogl_derivative() { return MonotoneFn(std::make_shared<Node>(Node{Llogl{true}})); }

MonotoneFn MonotoneFn::table(std::vector<double> t, std::vector<double> v) {
  require(!t.empty() && t.size() == v.size(), "table: t and v must be non-empty and of equal length");
  for (size_t i = 0; i < t.size(); ++i) {
    require(std::isfinite(t[i]) && std::isfinite(v[i]) && t[i] >= 0 && v[i] >= 0, "table: entries must be finite and >= 0");
    if (i > 0) require(t[i] > t[i - 1] && v[i] >= v[i - 1], "table: t must increase and v must not decrease");
  }
  return MonotoneFn(std::make_shared<Node>(Node{Table{std::move(t), std::move(v)}}));
}

MonotoneFn MonotoneFn::sum(std::vector<MonotoneFn> terms) {
  require(!terms.empty(), "sum: no terms");
  return MonotoneFn(std::make_shared<Node>(Node{Sum{std::move(terms)}}));
}

MonotoneFn MonotoneFn::scaled(double outer, double inner, const MonotoneFn& base) {
  require(outer > 0 && inner > 0, "scaled: factors must be positive");
  return MonotoneFn(std::make_shared<Node>(Node{Scaled{outer, inner, base}}));
}

MonotoneFn MonotoneFn::compose(const MonotoneFn& outer, const MonotoneFn& inner) {
  return MonotoneFn(std::make_shared<Node>(Node{Compose{outer, inner}}));
}

MonotoneFn MonotoneFn::inverse(const MonotoneFn& base) { return MonotoneFn(std::make_shared<Node>(Node{Inverse{base}})); }

MonotoneFn MonotoneFn::young_conjugate(const MonotoneFn& G, const MonotoneFn& g) {
  return MonotoneFn(std::make_shared<Node>(Node{Conjugate{G, g}}));
}

double MonotoneFn::operator()(double t) const {
  if (!(t >= 0)) throw std::domain_error("monotone function evaluated at a negative or NaN argument");
  return std::visit(
      [t](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Identity>) {
          return t;
        } else if constexpr (std::is_same_v<T, Power>) {
          if (n.e == 0.0) return n.c;
          return t == 0.0 ? 0.0 : n.c * std::pow(t, n.e);
        } else if constexpr (std::is_same_v<T, Zygmund>) {
          if (t == 0.0) return 0.0;
          double L = std::log(n.s + t);
          double ll = n.loglog ? std::log(L) : L;
          double base = std::pow(ll, n.a);
          if (!n.derivative) return std::pow(t, n.p) * base;
          double corr = n.loglog ? n.a * t / ((n.s + t) * L * ll) : n.a * t / ((n.s + t) * L);
          return std::pow(t, n.p - 1.0) * base * (corr + n.p);
        } else if constexpr (std::is_same_v<T, Llog>) {
          if (n.derivative) return std::log1p(t);
          if (t < 1e-4) return t * t * (0.5 - t * (1.0 / 6.0 - t / 12.0));
          return (1.0 + t) * std::log1p(t) - t;
        } else if constexpr (std::is_same_v<T, Llogl>) {
          double L = std::log(std::numbers::e + t);
          return n.derivative ? L + t / (std::numbers::e + t) : t * L;
        } else if constexpr (std::is_same_v<T, Table>) {
          auto it = std::lower_bound(n.t.begin(), n.t.end(), t);
          if (it == n.t.end()) return n.v.back();
          return n.v[static_cast<size_t>(it - n.t.begin())];
        } else if constexpr (std::is_same_v<T, Sum>) {
          double s = 0.0;
          for (const auto& f : n.terms) s += f(t);
          return s;
        } else if constexpr (std::is_same_v<T, Scaled>) {
          return n.outer * n.base(n.inner * t);
        } else if constexpr (std::is_same_v<T, Compose>) {
          return n.outer(n.inner(t));
        } else if constexpr (std::is_same_v<T, Inverse>) {
          try {
            return n.base.inverse_at(t);
          } catch (const std::domain_error&) {
            return kInf;
          }
        } else {
          double ts;
          try {
            ts = n.g.inverse_at(t);
          } catch (const std::domain_error&) {
            return kInf;
          }
          if (!std::isfinite(ts)) return kInf;
          return std::max(0.0, t * ts - n.G(ts));
        }
      },
      node_->v);
}

double MonotoneFn::inverse_at(double y) const {
  if (!(y >= 0)) throw std::domain_error("inverse evaluated at a negative or NaN argument");
  if (const auto* p = std::get_if<Identity>(&node_->v)) {
    (void)p;
    return y;
  }
  if (const auto* p = std::get_if<Power>(&node_->v)) {
    if (p->e == 0.0) {
      if (y <= p->c) return 0.0;
      throw std::domain_error("inverse: value outside the range of the function");
    }
    if (p->c == 0.0) {
      if (y == 0.0) return 0.0;
      throw std::domain_error("inverse: value outside the range of the function");
    }
    return std::pow(y / p->c, 1.0 / p->e);
  }
  if (const auto* p = std::get_if<Scaled>(&node_->v)) return p->base.inverse_at(y / p->outer) / p->inner;
  if (const auto* p = std::get_if<Table>(&node_->v)) {
    if (p->v[0] >= y) return 0.0;
    auto it = std::lower_bound(p->v.begin(), p->v.end(), y);
    if (it == p->v.end()) throw std::domain_error("inverse: value outside the range of the function");
    return p->t[static_cast<size_t>(it - p->v.begin()) - 1];
  }
  return bisect_inverse(*this, y);
}

double generalized_inverse(const MonotoneFn& fn, double y) { return fn.inverse_at(y); }

double MonotoneFn::limit_at_infinity() const {
  return std::visit(
      [](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Power>) {
          return n.e == 0.0 || n.c == 0.0 ? n.c : kInf;
        } else if constexpr (std::is_same_v<T, Table>) {
          return n.v.back();
        } else if constexpr (std::is_same_v<T, Sum>) {
          double s = 0.0;
          for (const auto& f : n.terms) s += f.limit_at_infinity();
          return s;
        } else if constexpr (std::is_same_v<T, Scaled>) {
          return n.outer * n.base.limit_at_infinity();
        } else if constexpr (std::is_same_v<T, Compose>) {
          double L = n.inner.limit_at_infinity();
          return std::isfinite(L) ? n.outer(L) : n.outer.limit_at_infinity();
        } else {
          return kInf;
        }
      },
      node_->v);
}

std::optional<double> MonotoneFn::exponent_at_zero() const {
  return std::visit(
      [](const auto& n) -> std::optional<double> {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Identity>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, Power>) {
          return n.c == 0.0 ? kInf : n.e;
        } else if constexpr (std::is_same_v<T, Zygmund>) {
          return n.derivative ? n.p - 1.0 : n.p;
        } else if constexpr (std::is_same_v<T, Llog>) {
          return n.derivative ? 1.0 : 2.0;
        } else if constexpr (std::is_same_v<T, Llogl>) {
          return n.derivative ? 0.0 : 1.0;
        } else if constexpr (std::is_same_v<T, Table>) {
          return n.v[0] > 0 ? 0.0 : kInf;
        } else if constexpr (std::is_same_v<T, Sum>) {
          double m = kInf;
          for (const auto& f : n.terms) {
            auto e = f.exponent_at_zero();
            if (!e) return std::nullopt;
            m = std::min(m, *e);
          }
          return m;
        } else if constexpr (std::is_same_v<T, Scaled>) {
          return n.base.exponent_at_zero();
        } else if constexpr (std::is_same_v<T, Compose>) {
          auto eo = n.outer.exponent_at_zero(), ei = n.inner.exponent_at_zero();
          if (!eo || !ei) return std::nullopt;
          if (*ei == 0.0) return n.outer(n.inner(0.0)) > 0 ? std::optional<double>(0.0) : std::nullopt;
          if (std::isinf(*ei)) return n.outer(0.0) > 0 ? 0.0 : kInf;
          return *eo * *ei;
        } else if constexpr (std::is_same_v<T, Inverse>) {
          auto e = n.base.exponent_at_zero();
          if (!e) return std::nullopt;
          if (std::isinf(*e)) return 0.0;
          if (*e == 0.0) return n.base(0.0) > 0 ? kInf : std::optional<double>();
          return 1.0 / *e;
        } else {
          auto e = n.G.exponent_at_zero();
          if (!e || !(*e > 1.0) || std::isinf(*e)) return std::nullopt;
          return *e / (*e - 1.0);
        }
      },
      node_->v);
}

std::optional<std::pair<double, double>> MonotoneFn::as_power() const {
  if (std::holds_alternative<Identity>(node_->v)) return std::pair{1.0, 1.0};
  if (const auto* p = std::get_if<Power>(&node_->v)) return std::pair{p->c, p->e};
  if (const auto* p = std::get_if<Scaled>(&node_->v)) {
    auto b = p->base.as_power();
    if (!b) return std::nullopt;
    return std::pair{p->outer * b->first * std::pow(p->inner, b->second), b->second};
  }
  if (const auto* p = std::get_if<Inverse>(&node_->v)) {
    auto b = p->base.as_power();
    if (!b || b->second == 0.0 || b->first == 0.0) return std::nullopt;
    return std::pair{std::pow(b->first, -1.0 / b->second), 1.0 / b->second};
  }
  if (const auto* p = std::get_if<Compose>(&node_->v)) {
    auto o = p->outer.as_power(), i = p->inner.as_power();
    if (!o || !i) return std::nullopt;
    return std::pair{o->first * std::pow(i->first, o->second), o->second * i->second};
  }
  return std::nullopt;
}

std::string MonotoneFn::kind() const {
  static const char* names[] = {"identity", "power",   "zygmund", "llog",    "llogl",        "table",
                                "sum",      "scaled",  "compose", "inverse", "young_conjugate"};
  return names[node_->v.index()];
}

nlohmann::json MonotoneFn::to_json() const {
  using nlohmann::json;
  return std::visit(
      [](const auto& n) -> json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Identity>) {
          return {{"family", "identity"}};
        } else if constexpr (std::is_same_v<T, Power>) {
          return {{"family", "power"}, {"exponent", n.e}, {"coeff", n.c}};
        } else if constexpr (std::is_same_v<T, Zygmund>) {
          std::string f = n.loglog ? "zygmund_loglog" : "zygmund";
          if (n.derivative) f += "_derivative";
          return {{"family", f}, {"p", n.p}, {"alpha", n.a}, {"s", n.s}};
        } else if constexpr (std::is_same_v<T, Llog>) {
          return {{"family", n.derivative ? "llog_derivative" : "llog"}};
        } else if constexpr (std::is_same_v<T, Llogl>) {
          return {{"family", n.derivative ? "llogl_derivative" : "llogl"}};
        } else if constexpr (std::is_same_v<T, Table>) {
          return {{"family", "table"}, {"t", n.t}, {"v", n.v}};
        } else if constexpr (std::is_same_v<T, Sum>) {
          json terms = json::array();
          for (const auto& f : n.terms) terms.push_back(f.to_json());
          return {{"family", "sum"}, {"terms", terms}};
        } else if constexpr (std::is_same_v<T, Scaled>) {
          return {{"family", "scaled"}, {"outer", n.outer}, {"inner", n.inner}, {"of", n.base.to_json()}};
        } else if constexpr (std::is_same_v<T, Compose>) {
          return {{"family", "compose"}, {"outer", n.outer.to_json()}, {"inner", n.inner.to_json()}};
        } else if constexpr (std::is_same_v<T, Inverse>) {
          return {{"family", "inverse"}, {"of", n.base.to_json()}};
        } else {
          return {{"family", "young_conjugate"}, {"G", n.G.to_json()}, {"g", n.g.to_json()}};
        }
      },
      node_->v);
}

namespace {

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw std::invalid_argument("expected a JSON object for a function descriptor");
  for (const auto& [k, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw std::invalid_argument("unknown key '" + k + "' in function descriptor");
  }
}

double num(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) throw std::invalid_argument(std::string("missing numeric key '") + key + "'");
  return j.at(key).get<double>();
}

}  // namespace

MonotoneFn MonotoneFn::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string())
    throw std::invalid_argument("function descriptor needs a string 'family'");
  const std::string f = j.at("family").get<std::string>();
  if (f == "identity") {
    check_keys(j, {"family"});
    return identity();
  }
  if (f == "power") {
    check_keys(j, {"family", "exponent", "coeff"});
    return power(num(j, "exponent"), j.contains("coeff") ? num(j, "coeff") : 1.0);
  }
  if (f == "zygmund" || f == "zygmund_derivative" || f == "zygmund_loglog" || f == "zygmund_loglog_derivative") {
    check_keys(j, {"family", "p", "alpha", "s"});
    double p = num(j, "p"), a = num(j, "alpha"), s = num(j, "s");
    if (f == "zygmund") return zygmund(p, a, s);
    if (f == "zygmund_derivative") return zygmund_derivative(p, a, s);
    if (f == "zygmund_loglog") return zygmund_loglog(p, a, s);
    return zygmund_loglog_derivative(p, a, s);
  }
  if (f == "llog" || f == "llog_derivative" || f == "llogl" || f == "llogl_derivative") {
    check_keys(j, {"family"});
    if (f == "llog") return llog();
    if (f == "llog_derivative") return llog_derivative();
    if (f == "llogl") return llogl();
    return llogl_derivative();
  }
  if (f == "table") {
    check_keys(j, {"family", "t", "v"});
    return table(j.at("t").get<std::vector<double>>(), j.at("v").get<std::vector<double>>());
  }
  if (f == "sum") {
    check_keys(j, {"family", "terms"});
    std::vector<MonotoneFn> terms;
    for (const auto& t : j.at("terms")) terms.push_back(from_json(t));
    return sum(std::move(terms));
  }
  if (f == "scaled") {
    check_keys(j, {"family", "outer", "inner", "of"});
    return scaled(j.contains("outer") ? num(j, "outer") : 1.0, j.contains("inner") ? num(j, "inner") : 1.0, from_json(j.at("of")));
  }
  if (f == "compose") {
    check_keys(j, {"family", "outer", "inner"});
    return compose(from_json(j.at("outer")), from_json(j.at("inner")));
  }
  if (f == "inverse") {
    check_keys(j, {"family", "of"});
    return inverse(from_json(j.at("of")));
  }
  if (f == "g_inverse") {
    check_keys(j, {"family", "G"});
    return NFunction::from_json(j.at("G")).g_inverse();
  }
  if (f == "young_conjugate") {
    check_keys(j, {"family", "G", "g"});
    return young_conjugate(from_json(j.at("G")), from_json(j.at("g")));
  }
  throw std::invalid_argument("unknown function family '" + f + "'");
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0 && hi > lo && points >= 2)) throw std::invalid_argument("log_grid: need 0 < lo < hi and points >= 2");
  std::vector<double> g(static_cast<size_t>(points));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < points; ++i) g[static_cast<size_t>(i)] = std::exp(a + (b - a) * i / (points - 1));
  return g;
}

NFunction::NFunction(MonotoneFn G, MonotoneFn g, std::string name, std::optional<std::pair<double, double>> exact)
    : G_(std::move(G)), g_(std::move(g)), name_(std::move(name)), exact_(exact) {
  spec_ = {{"family", "custom"}, {"G", G_.to_json()}, {"g", g_.to_json()}};
}

NFunction NFunction::power(double p) {
  if (!(p > 1)) throw std::invalid_argument("power N-function needs p > 1");
  NFunction f(MonotoneFn::power(p, 1.0 / p), MonotoneFn::power(p - 1.0), "power", std::pair{p, p});
  f.spec_ = {{"family", "power"}, {"p", p}};
  return f;
}

NFunction NFunction::zygmund(double p, double alpha, double s) {
  if (!(p > 1)) throw std::invalid_argument("zygmund N-function needs p > 1");
  if (!(s > 1) || !(std::abs(alpha) / std::log(s) < (p - 1) / 2))
    throw std::invalid_argument("zygmund N-function needs |alpha|/log(s) < (p-1)/2");
  NFunction f(MonotoneFn::zygmund(p, alpha, s), MonotoneFn::zygmund_derivative(p, alpha, s), "zygmund");
  f.spec_ = {{"family", "zygmund"}, {"p", p}, {"alpha", alpha}, {"s", s}};
  return f;
}

NFunction NFunction::zygmund_loglog(double p, double alpha, double s) {
  if (!(p > 1)) throw std::invalid_argument("zygmund_loglog N-function needs p > 1");
  if (!(s > std::numbers::e) || !(std::abs(alpha) / (std::log(s) * std::log(std::log(s))) < (p - 1) / 2))
    throw std::invalid_argument("zygmund_loglog N-function needs |alpha|/(log s loglog s) < (p-1)/2");
  NFunction f(MonotoneFn::zygmund_loglog(p, alpha, s), MonotoneFn::zygmund_loglog_derivative(p, alpha, s), "zygmund_loglog");
  f.spec_ = {{"family", "zygmund_loglog"}, {"p", p}, {"alpha", alpha}, {"s", s}};
  return f;
}

NFunction NFunction::llog() {
  NFunction f(MonotoneFn::llog(), MonotoneFn::llog_derivative(), "llog");
  f.spec_ = {{"family", "llog"}};
  return f;
}

NFunction NFunction::llogl() {
  NFunction f(MonotoneFn::llogl(), MonotoneFn::llogl_derivative(), "llogl");
  f.spec_ = {{"family", "llogl"}};
  return f;
}

NFunction NFunction::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string())
    throw std::invalid_argument("N-function descriptor needs a string 'family'");
  const std::string f = j.at("family").get<std::string>();
  if (f == "power") {
    check_keys(j, {"family", "p"});
    return power(num(j, "p"));
  }
  if (f == "zygmund" || f == "zygmund_loglog") {
    check_keys(j, {"family", "p", "alpha", "s"});
    return f == "zygmund" ? zygmund(num(j, "p"), num(j, "alpha"), num(j, "s"))
                          : zygmund_loglog(num(j, "p"), num(j, "alpha"), num(j, "s"));
  }
  if (f == "llog") {
    check_keys(j, {"family"});
    return llog();
  }
  if (f == "llogl") {
    check_keys(j, {"family"});
    return llogl();
  }
  if (f == "custom") {
    check_keys(j, {"family", "G", "g"});
    NFunction n(MonotoneFn::from_json(j.at("G")), MonotoneFn::from_json(j.at("g")));
    n.validate();
    return n;
  }
  throw std::invalid_argument("unknown N-function family '" + f + "'");
}

nlohmann::json NFunction::to_json() const { return spec_; }

double NFunction::conjugate(double s) const { return MonotoneFn::young_conjugate(G_, g_)(s); }

NFunction NFunction::conjugate_fn() const {
  std::optional<std::pair<double, double>> ex;
  if (exact_) ex = std::pair{exact_->second / (exact_->second - 1.0), exact_->first / (exact_->first - 1.0)};
  return NFunction(MonotoneFn::young_conjugate(G_, g_), MonotoneFn::inverse(g_), name_ + "~", ex);
}

Indices NFunction::indices(const std::vector<double>& grid) const {
  if (exact_) return {exact_->first, exact_->second, true, false};
  auto scan = [&](const std::vector<double>& pts) {
    double lo = kInf, hi = 0.0;
    for (double t : pts) {
      double G = G_(t), g = g_(t);
      if (!(G > 0) || !std::isfinite(G) || !std::isfinite(g)) continue;
      double r = t * g / G;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    return std::pair{lo, hi};
  };
  auto a = scan(grid);
  std::vector<double> fine;
  fine.reserve(2 * grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    fine.push_back(grid[i]);
    if (i + 1 < grid.size()) fine.push_back(std::sqrt(grid[i] * grid[i + 1]));
  }
  auto b = scan(fine);
  Indices r{a.first, a.second, false, false};
  r.coarse = std::abs(b.first - a.first) > 1e-2 * a.first || std::abs(b.second - a.second) > 1e-2 * a.second;
  return r;
}

namespace {

std::pair<bool, double> delta2_scan(const MonotoneFn& G, const std::vector<double>& grid) {
  std::vector<double> ratio;
  ratio.reserve(grid.size());
  for (double t : grid) {
    double a = G(t), b = G(2 * t);
    if (!(a > 0) || !std::isfinite(a) || !std::isfinite(b)) return {false, kInf};
    ratio.push_back(b / a);
  }
  double sup = *std::max_element(ratio.begin(), ratio.end());
  size_t w = std::max<size_t>(ratio.size() / 16, 1);
  size_t n = ratio.size();
  double top = *std::max_element(ratio.end() - static_cast<long>(w), ratio.end());
  double before = *std::max_element(ratio.end() - static_cast<long>(std::min(n, 2 * w)), ratio.end() - static_cast<long>(w));
  bool ok = sup <= 1e6 && top <= 1.05 * before;
  return {ok, sup};
}

}  // namespace

Doubling NFunction::doubling(const std::vector<double>& grid) const {
  Doubling d;
  std::tie(d.delta2, d.delta2_constant) = delta2_scan(G_, grid);
  std::tie(d.nabla2, d.nabla2_constant) = delta2_scan(MonotoneFn::young_conjugate(G_, g_), grid);
  return d;
}

void NFunction::validate(const std::vector<double>& grid) const {
  if (G_(0.0) != 0.0) throw std::invalid_argument("N-function must vanish at 0");
  double prev_q = 0.0, prev_t = 0.0, prev_G = 0.0, prev_g = g_(0.0);
  for (double t : grid) {
    double G = G_(t), g = g_(t);
    double q = (G - prev_G) / (t - prev_t);
    if (q < prev_q * (1 - 1e-9) - 1e-300) throw std::invalid_argument("N-function G is not convex on the test grid");
    if (g < prev_g * (1 - 1e-12)) throw std::invalid_argument("N-function derivative g is not non-decreasing on the test grid");
    prev_q = q;
    prev_t = t;
    prev_G = G;
    prev_g = g;
  }
}

namespace {

double integral_from_zero(const std::function<double(double)>& h, double t) {
  auto k = [&](double L) {
    double r = std::exp(L);
    return h(r) * r;
  };
  auto res = quad::integrate_ray(k, std::log(t), -1);
  return res.value;
}

}  // namespace

double orlicz_E(const MonotoneFn& A, double sigma, double t) {
  if (!(sigma > 1)) throw std::invalid_argument("orlicz_E needs sigma > 1");
  if (t == 0.0) return 0.0;
  double I = integral_from_zero([&](double r) { return std::pow(r / A(r), 1.0 / (sigma - 1.0)); }, t);
  return std::isfinite(I) ? std::pow(I, (sigma - 1.0) / sigma) : kInf;
}

double orlicz_F(const MonotoneFn& B, double sigma, double t) {
  if (!(sigma > 1)) throw std::invalid_argument("orlicz_F needs sigma > 1");
  if (t == 0.0) return 0.0;
  const double e = 1.0 + sigma / (sigma - 1.0);
  double I = integral_from_zero([&](double r) { return B(r) / std::pow(r, e); }, t);
  return std::isfinite(I) ? std::pow(I, (sigma - 1.0) / sigma) : kInf;
}

double orlicz_compatibility(const MonotoneFn& A, const MonotoneFn& B, double sigma, double delta,
                            const std::vector<double>& grid) {
  double worst = 0.0;
  for (double t : grid) {
    double lhs = orlicz_F(B, sigma, orlicz_E(A, sigma, t) / delta);
    double rhs = delta * A(t) / t;
    worst = std::max(worst, lhs / rhs);
  }
  return worst;
}

std::optional<double> check_compatibility(const MonotoneFn& A, const MonotoneFn& B, double sigma,
                                          std::vector<double> deltas, const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("check_compatibility: empty t grid");
  std::sort(deltas.begin(), deltas.end());
  for (double d : deltas)
    if (orlicz_compatibility(A, B, sigma, d, grid) <= 1.0) return d;
  return std::nullopt;
}

}  // namespace potlab
