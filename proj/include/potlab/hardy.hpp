#pragma once

#include "potlab/monotone.hpp"
#include "potlab/potentials.hpp"
#include "potlab/rearrangement.hpp"

#include <vector>

namespace potlab {

enum class LowerLimit { t, half_t };

struct ReductionParams {
  double alpha = 1.0;
  int n = 3;
  MonotoneFn psi = MonotoneFn::identity();
  LowerLimit lower = LowerLimit::t;
  double L = kInfinity;  // upper limit
  double inner = 1.0;    // c in ψ(c ·)
  double outer = 1.0;    // k multiplying the integral

  void validate() const;
  static ReductionParams from_json(const nlohmann::json& j);
};

// outer · ∫_{lower(t)}^{L} s^{α/n-1} ψ(inner · s^{α/n-1} ∫_0^s φ) ds, +inf on divergence.
// Integrals over whole steps are cached, so repeated evaluation in t is cheap.
class ReductionCurve {
 public:
  ReductionCurve(StepProfile phi, ReductionParams params);
  double operator()(double t) const;
  const ReductionParams& params() const { return p_; }

 private:
  double segment(double a, double b) const;
  StepProfile phi_;
  ReductionParams p_;
  std::vector<double> cuts_;    // breakpoints clipped to L, plus L
  std::vector<double> suffix_;  // ∫ from cuts_[i] to L
};

double reduction_op(const StepProfile& phi, const ReductionParams& params, double t);

// ∫_t^∞ s^{α/n-1} ψ(C s^{α/n} f**(s)) ds; the upper limit and lower mode of params are ignored.
double rhs_rearrangement_bound(const StepProfile& f_star, const ReductionParams& params, double t, double C);

struct HardyReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

// ∫ t^p ((1/t)∫_0^t φ)^q dt <= (q/(q-p-1))^q ∫ t^p φ^q, for p < q-1.
HardyReport hardy1_check(const StepProfile& phi, double p, double q);
// ∫ t^p ((1/t)∫_t^∞ φ)^q dt <= (q/(p+1-q))^q ∫ t^p φ^q, for p > q-1.
HardyReport hardy2_check(const StepProfile& phi, double p, double q);

}  // namespace potlab
