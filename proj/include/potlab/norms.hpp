#pragma once

#include "potlab/monotone.hpp"
#include "potlab/potentials.hpp"
#include "potlab/rearrangement.hpp"

#include <optional>
#include <string>
#include <vector>

namespace potlab {

enum class LorentzVariant { star, double_star };

struct LorentzParams {
  double p = 2.0;
  double q = 2.0;  // may be +inf
  LorentzVariant variant = LorentzVariant::star;
  double domain_measure = kInfinity;

  void validate() const;
  bool banach() const;
  static LorentzParams from_json(const nlohmann::json& j);
};

// Λ^{p,q} (star) or Λ^{[p,q]} (double star) of a step profile; exact except for the
// double-star integral with q < inf, which is adaptive per step.
double lorentz_norm(const StepProfile& f, const LorentzParams& lp);
double lorentz_norm(const GridFunction& f, const LorentzParams& lp);

// Non-increasing positive samples of a rearrangement, interpolated log-log and extended by
// power laws at both ends (exponents from the end pairs unless given).
class SampledProfile {
 public:
  SampledProfile(std::vector<double> t, std::vector<double> v, std::optional<double> head_exponent = {},
                 std::optional<double> tail_exponent = {});
  double value(double s) const;
  const std::vector<double>& t() const { return t_; }
  const std::vector<double>& v() const { return v_; }
  double head_exponent() const { return head_; }
  double tail_exponent() const { return tail_; }
  // Local exponent on [t_i, t_{i+1}].
  double slope(size_t i) const;

 private:
  std::vector<double> t_, v_;
  double head_, tail_;
};

// Star variant only.
double lorentz_norm(const SampledProfile& f, const LorentzParams& lp);

// inf{λ > 0 : ∫_0^|Ω| A(f*/λ) <= 1}; +inf when the modular is infinite for every λ.
double luxemburg_norm(const MonotoneFn& A, const StepProfile& f, double domain_measure = kInfinity);
double luxemburg_norm(const NFunction& A, const StepProfile& f, double domain_measure = kInfinity);
double llogl_norm(const StepProfile& f, double domain_measure = kInfinity);

struct MorreyOptions {
  int center_stride = 1;     // every k-th cell centre along each axis
  int radii_per_octave = 2;
  double radius_cap_factor = 4.0;  // radii up to this multiple of diam(supp f)
};

// sup over lattice centres x0 and radii R >= h ω_n^{-1/n} of R^{(θ-n)/q} ‖f‖_{L^q(B(x0,R))},
// with cell-centre inclusion. A lower approximation of the true supremum.
double morrey_norm(const GridFunction& f, double q, double theta, const MorreyOptions& opt = {});
// Same lattice with R^{(θ-n)/t} ‖(f 1_{B(x0,R)})*‖_{Λ^{t,q}}.
double lorentz_morrey_norm(const GridFunction& f, double t, double q, double theta, const MorreyOptions& opt = {});

struct ModularFunctional {
  MonotoneFn H = MonotoneFn::identity();
  double sigma = 0.0;
  double rho = 0.0;
  std::string side = "X";
  double domain_measure = kInfinity;

  static ModularFunctional from_json(const nlohmann::json& j);
};

// ∫_0^|Ω| s^σ H(s^ρ f*(s)) ds; +inf on divergence.
double modular(const ModularFunctional& T, const StepProfile& f);

}  // namespace potlab
