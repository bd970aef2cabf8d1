#pragma once

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace potlab {

// Non-decreasing function on [0, inf). Immutable; copies share the expression tree.
class MonotoneFn {
 public:
  MonotoneFn();  // identity

  static MonotoneFn identity();
  static MonotoneFn power(double exponent, double coeff = 1.0);
  static MonotoneFn zygmund(double p, double alpha, double s);
  static MonotoneFn zygmund_derivative(double p, double alpha, double s);
  static MonotoneFn zygmund_loglog(double p, double alpha, double s);
  static MonotoneFn zygmund_loglog_derivative(double p, double alpha, double s);
  static MonotoneFn llog();             // (1+t)log(1+t) - t
  static MonotoneFn llog_derivative();  // log(1+t)
  static MonotoneFn llogl();            // t log(e+t)
  static MonotoneFn llogl_derivative();
  static MonotoneFn table(std::vector<double> t, std::vector<double> v);
  static MonotoneFn sum(std::vector<MonotoneFn> terms);
  static MonotoneFn scaled(double outer, double inner, const MonotoneFn& base);  // outer * base(inner * t)
  static MonotoneFn compose(const MonotoneFn& outer, const MonotoneFn& inner);
  static MonotoneFn inverse(const MonotoneFn& base);
  static MonotoneFn young_conjugate(const MonotoneFn& G, const MonotoneFn& g);

  double operator()(double t) const;
  // inf{t >= 0 : f(t) >= y}; throws std::domain_error when y exceeds the range.
  double inverse_at(double y) const;
  double limit_at_infinity() const;
  // Exponent rho with f(u) ~ c u^rho as u -> 0, when known in closed form.
  std::optional<double> exponent_at_zero() const;
  // c and rho when f is exactly c t^rho.
  std::optional<std::pair<double, double>> as_power() const;

  std::string kind() const;
  nlohmann::json to_json() const;
  static MonotoneFn from_json(const nlohmann::json& j);

  struct Node;

 private:
  explicit MonotoneFn(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

double generalized_inverse(const MonotoneFn& fn, double y);

struct Indices {
  double lower = 0.0;  // i_G
  double upper = 0.0;  // s_G
  bool exact = false;
  bool coarse = false;
};

struct Doubling {
  bool delta2 = false;
  bool nabla2 = false;
  double delta2_constant = 0.0;  // sup G(2t)/G(t) on the grid
  double nabla2_constant = 0.0;  // same for the conjugate
};

// Log-spaced test grid; the default is 512 points on [1e-8, 1e8].
std::vector<double> log_grid(double lo = 1e-8, double hi = 1e8, int points = 512);

class NFunction {
 public:
  NFunction(MonotoneFn G, MonotoneFn g, std::string name = "custom", std::optional<std::pair<double, double>> exact = {});

  static NFunction power(double p);  // t^p / p
  static NFunction zygmund(double p, double alpha, double s);
  static NFunction zygmund_loglog(double p, double alpha, double s);
  static NFunction llog();
  static NFunction llogl();
  static NFunction from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  const MonotoneFn& G() const { return G_; }
  const MonotoneFn& g() const { return g_; }
  MonotoneFn g_inverse() const { return MonotoneFn::inverse(g_); }
  const std::string& name() const { return name_; }

  double conjugate(double s) const;
  NFunction conjugate_fn() const;
  Indices indices(const std::vector<double>& grid = log_grid()) const;
  Doubling doubling(const std::vector<double>& grid = log_grid()) const;
  // Throws std::invalid_argument when G fails G(0)=0 or convexity on the grid.
  void validate(const std::vector<double>& grid = log_grid(1e-6, 1e6, 256)) const;

 private:
  MonotoneFn G_, g_;
  std::string name_;
  std::optional<std::pair<double, double>> exact_;
  nlohmann::json spec_;
};

// E(t) = (∫_0^t (r/A(r))^{1/(σ-1)} dr)^{(σ-1)/σ}; +inf when divergent at 0.
double orlicz_E(const MonotoneFn& A, double sigma, double t);
// F(t) = (∫_0^t B(r)/r^{1+σ/(σ-1)} dr)^{(σ-1)/σ}; +inf when divergent at 0.
double orlicz_F(const MonotoneFn& B, double sigma, double t);
// max over the grid of F(E(t)/δ) / (δ A(t)/t); compatible when <= 1.
double orlicz_compatibility(const MonotoneFn& A, const MonotoneFn& B, double sigma, double delta,
                            const std::vector<double>& grid);
// Smallest candidate δ with F(E(t)/δ) <= δ A(t)/t on the whole grid.
std::optional<double> check_compatibility(const MonotoneFn& A, const MonotoneFn& B, double sigma,
                                          std::vector<double> deltas, const std::vector<double>& grid);

}  // namespace potlab
