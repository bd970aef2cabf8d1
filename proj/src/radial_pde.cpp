#include "potlab/radial_pde.hpp"

#include "potlab/geometry.hpp"
#include "potlab/potentials.hpp"
#include "potlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace potlab {

void RadialProblem::validate() const {
  if (n < 1) throw std::invalid_argument("dimension n must be >= 1");
  if (!(R_dom > 0) || !std::isfinite(R_dom)) throw std::invalid_argument("domain radius must be positive and finite");
}

RadialProblem RadialProblem::from_json(const nlohmann::json& j, StepProfile f) {
  if (!j.is_object()) throw std::invalid_argument("problem must be a JSON object");
  for (const auto& [k, _] : j.items())
    if (k != "n" && k != "G" && k != "R_dom" && k != "f")
      throw std::invalid_argument("unknown key '" + k + "' in problem");
  RadialProblem p;
  p.n = j.at("n").get<int>();
  if (j.contains("G")) p.G = NFunction::from_json(j.at("G"));
  p.R_dom = j.value("R_dom", 1.0);
  p.f = std::move(f);
  p.validate();
  return p;
}

RadialSolution::RadialSolution(RadialProblem prob) : prob_(std::move(prob)), ginv_(prob_.G.g_inverse()) {
  prob_.validate();
  for (double b : prob_.f.breaks())
    if (b < prob_.R_dom) cuts_.push_back(b);
  cuts_.push_back(prob_.R_dom);
  suffix_.assign(cuts_.size(), 0.0);
  for (size_t i = cuts_.size() - 1; i-- > 0;) suffix_[i] = suffix_[i + 1] + segment(cuts_[i], cuts_[i + 1]);
}

double RadialSolution::flux(double s) const {
  if (!(s > 0)) return 0.0;
  const int n = prob_.n;
  const auto& b = prob_.f.breaks();
  const auto& v = prob_.f.values();
  double m = 0.0;
  for (size_t k = 0; k < prob_.f.size() && b[k] < s; ++k) m += v[k] * (std::pow(std::min(s, b[k + 1]), n) - std::pow(b[k], n));
  return m / n * std::pow(s, 1 - n);
}

double RadialSolution::segment(double a, double b) const {
  if (!(b > a)) return 0.0;
  auto h = [&](double s) { return ginv_(flux(s)); };
  if (a > 0) return quad::integrate(h, a, b, {1e-12, 12});
  // near 0 the flux is v_0 s / n; w^4 substitution smooths a fractional power
  if (auto pw = ginv_.as_power(); pw && prob_.f.size() > 0 && b <= prob_.f.breaks()[1]) {
    auto [c, rho] = *pw;
    double v0 = prob_.f.values()[0] / prob_.n;
    if (v0 == 0.0) return 0.0;
    return c * std::pow(v0, rho) * std::pow(b, rho + 1) / (rho + 1);
  }
  auto g = [&](double w) { return h(b * w * w * w * w) * 4 * b * w * w * w; };
  return quad::integrate(g, 0.0, 1.0, {1e-12, 12});
}

double RadialSolution::operator()(double r) const {
  if (!(r >= 0)) throw std::invalid_argument("radius must be non-negative");
  if (r >= prob_.R_dom) return 0.0;
  size_t i = static_cast<size_t>(std::upper_bound(cuts_.begin(), cuts_.end(), r) - cuts_.begin()) - 1;
  return segment(r, cuts_[i + 1]) + suffix_[i + 1];
}

double RadialSolution::slope(double r) const { return r >= prob_.R_dom ? 0.0 : ginv_(flux(r)); }

std::vector<double> RadialSolution::sample(const std::vector<double>& r) const {
  std::vector<double> u;
  u.reserve(r.size());
  for (double x : r) u.push_back((*this)(x));
  return u;
}

RadialSolution solve_radial(const RadialProblem& prob) { return RadialSolution(prob); }

StepProfile datum_as_rearrangement(const StepProfile& f_of_r, int n) {
  const double w = unit_ball_volume(n);
  std::vector<double> b;
  for (double r : f_of_r.breaks()) b.push_back(w * std::pow(r, n));
  return StepProfile(b, f_of_r.values());
}

namespace {

StepProfile clip(const StepProfile& f, double R) {
  std::vector<double> b{0.0}, v;
  for (size_t k = 0; k < f.size() && f.breaks()[k] < R; ++k) {
    b.push_back(std::min(f.breaks()[k + 1], R));
    v.push_back(f.values()[k]);
  }
  return StepProfile(b, v);
}

double dyadic_floor(double x) { return std::exp2(std::floor(std::log2(x))); }
double dyadic_ceil(double x) { return std::exp2(std::ceil(std::log2(x))); }

}  // namespace

EstimateReport estimate_check(const RadialProblem& prob, const std::vector<double>& x_radii,
                              const std::vector<double>& R_sweep, bool matched) {
  prob.validate();
  EstimateReport rep;
  PotentialParams pp;
  pp.alpha = 1.0;
  pp.n = prob.n;
  pp.psi = prob.G.g_inverse();
  auto run = [&](const RadialProblem& pr, const std::vector<double>& Rs) {
    RadialSolution u(pr);
    RadialFunction lift(datum_as_rearrangement(clip(pr.f, pr.R_dom), pr.n), pr.n);
    std::vector<double> x(pr.n, 0.0);
    for (double xr : x_radii) {
      if (xr >= pr.R_dom) continue;
      x[0] = xr;
      double ux = u(xr);
      for (double R : Rs) {
        pp.R = R;
        EstimateSample s{xr, R, ux, wolff_truncated(lift, x, pp), u(std::min(xr + R, pr.R_dom))};
        rep.samples.push_back(s);
      }
    }
  };
  if (matched) {
    for (double R : R_sweep) {
      RadialProblem pr = prob;
      pr.R_dom = R;
      run(pr, {R});
    }
  } else {
    run(prob, R_sweep);
  }
  double lo = kInfinity, hi = 0.0;
  for (const auto& s : rep.samples) {
    if (s.W > s.R) lo = std::min(lo, s.u / (s.W - s.R));
    double den = s.inf_u + s.W + s.R;
    if (den > 0) hi = std::max(hi, s.u / den);
  }
  // no sample constrains C_L when every W <= R; 1 is reported then
  rep.C_L = std::isinf(lo) ? 1.0 : (lo > 0 ? dyadic_floor(lo) : 0.0);
  rep.C_U = hi > 0 ? dyadic_ceil(hi) : 1.0;
  rep.min_lower_slack = kInfinity;
  rep.min_upper_slack = kInfinity;
  for (const auto& s : rep.samples) {
    rep.min_lower_slack = std::min(rep.min_lower_slack, s.u - rep.C_L * (s.W - s.R));
    rep.min_upper_slack = std::min(rep.min_upper_slack, rep.C_U * (s.inf_u + s.W + s.R) - s.u);
  }
  if (rep.samples.empty()) rep.min_lower_slack = rep.min_upper_slack = 0.0;
  return rep;
}

}  // namespace potlab
