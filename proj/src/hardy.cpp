#include "potlab/hardy.hpp"

#include "potlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace potlab {

void ReductionParams::validate() const {
  if (n < 1) throw std::invalid_argument("dimension n must be >= 1");
  if (!(alpha > 0 && alpha < n)) throw std::invalid_argument("alpha must lie in (0, n)");
  if (!(L > 0)) throw std::invalid_argument("upper limit L must be positive");
  if (!(inner > 0) || !(outer > 0) || !std::isfinite(inner) || !std::isfinite(outer))
    throw std::invalid_argument("reduction constants must be positive and finite");
}

ReductionParams ReductionParams::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("reduction parameters must be a JSON object");
  for (const auto& [k, _] : j.items())
    if (k != "alpha" && k != "n" && k != "psi" && k != "lower" && k != "L" && k != "inner" && k != "outer")
      throw std::invalid_argument("unknown key '" + k + "' in reduction parameters");
  ReductionParams p;
  p.alpha = j.at("alpha").get<double>();
  p.n = j.at("n").get<int>();
  if (j.contains("psi")) p.psi = MonotoneFn::from_json(j.at("psi"));
  if (j.contains("lower")) {
    auto s = j.at("lower").get<std::string>();
    if (s == "t") {
      p.lower = LowerLimit::t;
    } else if (s == "t/2") {
      p.lower = LowerLimit::half_t;
    } else {
      throw std::invalid_argument("lower limit must be 't' or 't/2'");
    }
  }
  if (j.contains("L") && !j.at("L").is_null()) p.L = j.at("L").get<double>();
  p.inner = j.value("inner", 1.0);
  p.outer = j.value("outer", 1.0);
  p.validate();
  return p;
}

namespace {

double power_integral(double e, double a, double b) {
  if (!(b > a)) return 0.0;
  if (std::abs(e + 1) < 1e-14) return a == 0.0 || std::isinf(b) ? kInfinity : std::log(b / a);
  const double k = e + 1;
  if (a == 0.0 && k < 0) return kInfinity;
  if (std::isinf(b)) return k < 0 ? -std::pow(a, k) / k : kInfinity;
  return (std::pow(b, k) - std::pow(a, k)) / k;
}

}  // namespace

ReductionCurve::ReductionCurve(StepProfile phi, ReductionParams params) : phi_(std::move(phi)), p_(std::move(params)) {
  p_.validate();
  for (double b : phi_.breaks())
    if (b < p_.L) cuts_.push_back(b);
  cuts_.push_back(p_.L);
  suffix_.assign(cuts_.size(), 0.0);
  for (size_t i = cuts_.size() - 1; i-- > 0;) suffix_[i] = suffix_[i + 1] + segment(cuts_[i], cuts_[i + 1]);
}

double ReductionCurve::segment(double a, double b) const {
  if (!(b > a)) return 0.0;
  const double e = p_.alpha / p_.n - 1.0;
  const MonotoneFn& psi = p_.psi;
  const double S = phi_.support();
  if (a < S) {
    auto h = [&](double s) { return psi(p_.inner * std::pow(s, e) * phi_.integral(s)); };
    return quad::integrate_power_weight(h, e, a, b, {1e-12, 14});
  }
  // beyond the support ∫_0^s φ is the constant mass
  const double M = p_.inner * phi_.mass();
  if (auto pw = psi.as_power()) {
    auto [c, rho] = *pw;
    if (c == 0.0 || (M == 0.0 && rho > 0)) return 0.0;
    return c * (rho == 0.0 ? 1.0 : std::pow(M, rho)) * power_integral(e + rho * e, a, b);
  }
  auto k = [&](double L) {
    double v = psi(M * std::exp(e * L));
    return v == 0.0 ? 0.0 : std::exp((e + 1) * L + std::log(v));
  };
  if (std::isfinite(b)) return quad::integrate(k, std::log(a), std::log(b), {1e-12, 14});
  quad::RayOptions ro;
  ro.inner.rel_tol = 1e-12;
  auto r = quad::integrate_ray(k, std::log(a), +1, ro);
  return r.divergent ? kInfinity : r.value;
}

double ReductionCurve::operator()(double t) const {
  if (!(t > 0)) throw std::invalid_argument("reduction operator needs t > 0");
  const double lo = p_.lower == LowerLimit::t ? t : 0.5 * t;
  if (lo >= p_.L) return 0.0;
  size_t i = static_cast<size_t>(std::upper_bound(cuts_.begin(), cuts_.end(), lo) - cuts_.begin()) - 1;
  return p_.outer * (segment(lo, cuts_[i + 1]) + suffix_[i + 1]);
}

double reduction_op(const StepProfile& phi, const ReductionParams& params, double t) { return ReductionCurve(phi, params)(t); }

double rhs_rearrangement_bound(const StepProfile& f_star, const ReductionParams& params, double t, double C) {
  ReductionParams q = params;
  q.inner = C;
  q.lower = LowerLimit::t;
  q.L = kInfinity;
  return ReductionCurve(f_star, q)(t);
}

namespace {

// ∫ t^p φ^q dt over the steps.
double weighted_lq(const StepProfile& phi, double p, double q) {
  double s = 0.0;
  for (size_t k = 0; k < phi.size(); ++k) s += std::pow(phi.values()[k], q) * power_integral(p, phi.breaks()[k], phi.breaks()[k + 1]);
  return s;
}

}  // namespace

HardyReport hardy1_check(const StepProfile& phi, double p, double q) {
  if (!(q >= 1) || !(p < q - 1)) throw std::invalid_argument("first Hardy inequality needs q >= 1 and p < q - 1");
  HardyReport r;
  r.rhs = std::pow(q / (q - p - 1), q) * weighted_lq(phi, p, q);
  const auto& b = phi.breaks();
  for (size_t k = 0; k < phi.size(); ++k) {
    if (k == 0) {
      r.lhs += std::pow(phi.values()[0], q) * power_integral(p, 0.0, b[1]);
      continue;
    }
    auto h = [&](double t) { return std::pow(phi.integral(t), q); };
    r.lhs += quad::integrate_power_weight(h, p - q, b[k], b[k + 1], {1e-13, 12});
  }
  if (!phi.empty()) r.lhs += std::pow(phi.mass(), q) * power_integral(p - q, phi.support(), kInfinity);
  r.holds = r.lhs <= r.rhs * (1 + 1e-12);
  return r;
}

HardyReport hardy2_check(const StepProfile& phi, double p, double q) {
  if (!(q >= 1) || !(p > q - 1)) throw std::invalid_argument("second Hardy inequality needs q >= 1 and p > q - 1");
  HardyReport r;
  r.rhs = std::pow(q / (p + 1 - q), q) * weighted_lq(phi, p, q);
  const auto& b = phi.breaks();
  const double M = phi.mass();
  for (size_t k = 0; k < phi.size(); ++k) {
    auto h = [&](double t) { return std::pow(M - phi.integral(t), q); };
    r.lhs += quad::integrate_power_weight(h, p - q, b[k], b[k + 1], {1e-13, 12});
  }
  r.holds = r.lhs <= r.rhs * (1 + 1e-12);
  return r;
}

}  // namespace potlab
