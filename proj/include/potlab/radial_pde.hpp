#pragma once

#include "potlab/monotone.hpp"
#include "potlab/rearrangement.hpp"

#include <vector>

namespace potlab {

// -div(g(|Du|) Du/|Du|) = f in B(0, R_dom), u = 0 on the boundary, with f(x) = datum(|x|).
// The datum is a step function of the radius r (breaks are radii), non-increasing.
struct RadialProblem {
  int n = 3;
  NFunction G = NFunction::power(2);
  StepProfile f;
  double R_dom = 1.0;

  void validate() const;
  static RadialProblem from_json(const nlohmann::json& j, StepProfile f);
};

// u(r) = ∫_r^{R_dom} g^{-1}(s^{1-n} ∫_0^s τ^{n-1} f(τ) dτ) ds.
class RadialSolution {
 public:
  explicit RadialSolution(RadialProblem prob);
  double operator()(double r) const;
  // -u'(r) = g^{-1}(r^{1-n} ∫_0^r τ^{n-1} f)
  double slope(double r) const;
  const RadialProblem& problem() const { return prob_; }
  std::vector<double> sample(const std::vector<double>& r) const;

 private:
  double flux(double s) const;  // s^{1-n} ∫_0^s τ^{n-1} f
  double segment(double a, double b) const;
  RadialProblem prob_;
  MonotoneFn ginv_;
  std::vector<double> cuts_, suffix_;
};

RadialSolution solve_radial(const RadialProblem& prob);

// The datum f(r) as a radial lift f*(t) with t = ω_n r^n.
StepProfile datum_as_rearrangement(const StepProfile& f_of_r, int n);

struct EstimateSample {
  double x = 0.0;  // |x|
  double R = 0.0;
  double u = 0.0;
  double W = 0.0;      // truncated potential ∫_0^R g^{-1}(r^{1-n} ∫_{B(x,r)} f) dr
  double inf_u = 0.0;  // inf of u over B(x,R) ∩ B(0,R_dom)
};

struct EstimateReport {
  std::vector<EstimateSample> samples;
  double C_L = 0.0;  // largest dyadic with C_L (W - R) <= u on all samples
  double C_U = 0.0;  // smallest dyadic with u <= C_U (inf u + W + R)
  double min_lower_slack = 0.0;
  double min_upper_slack = 0.0;
};

// matched = true solves a fresh problem with R_dom = R for every R in the sweep.
EstimateReport estimate_check(const RadialProblem& prob, const std::vector<double>& x_radii,
                              const std::vector<double>& R_sweep, bool matched = false);

}  // namespace potlab
