#pragma once

#include "potlab/monotone.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace potlab {

// Right-continuous, non-increasing step function on [0, inf) with compact support.
// Value values[k] on [breaks[k], breaks[k+1]); zero beyond breaks.back().
class StepProfile {
 public:
  StepProfile() : breaks_{0.0}, prefix_{0.0} {}
  StepProfile(std::vector<double> breaks, std::vector<double> values);

  static StepProfile indicator(double measure, double value = 1.0);
  // f*(s) = min(s, eps)^{-a} on [0, support), cell averages on a geometric mesh.
  static StepProfile power_cutoff(double a, double eps, double support, int steps_per_decade = 16);

  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<double>& values() const { return values_; }
  size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double support() const { return breaks_.back(); }
  double mass() const { return prefix_.back(); }
  double sup() const { return empty() ? 0.0 : values_.front(); }
  // ∫_0^{breaks[k]} f*.
  double prefix(size_t k) const { return prefix_[k]; }

  double value(double t) const;      // f*(t)
  double integral(double t) const;   // ∫_0^t f*
  double maximal(double t) const;    // f**(t); f**(0) = f*(0)
  double distribution(double lambda) const;
  // Index k of the step containing t, or size() beyond the support.
  size_t piece(double t) const;

  StepProfile scaled(double c) const;

 private:
  std::vector<double> breaks_, values_, prefix_;
};

class GridFunction {
 public:
  GridFunction(int dim, std::vector<int> shape, double h, std::vector<double> origin, std::vector<double> values);

  int dim() const { return dim_; }
  const std::vector<int>& shape() const { return shape_; }
  double spacing() const { return h_; }
  const std::vector<double>& origin() const { return origin_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }
  size_t size() const { return values_.size(); }
  double cell_volume() const;
  // Centre of cell idx (row-major, last axis fastest).
  void center(size_t idx, double* out) const;
  std::vector<double> center(size_t idx) const;
  // Index of the cell containing x, or -1 outside the grid.
  long cell_of(std::span<const double> x) const;

 private:
  int dim_;
  std::vector<int> shape_;
  double h_;
  std::vector<double> origin_, values_;
};

// f(x) = f*(ω_n |x|^n) for a step profile f*.
class RadialFunction {
 public:
  RadialFunction(StepProfile profile, int n);
  const StepProfile& profile() const { return profile_; }
  int dim() const { return n_; }
  // Radii of the level spheres: ω_n radii[k]^n = breaks[k].
  const std::vector<double>& radii() const { return radii_; }
  double value_at_radius(double r) const;
  double value(std::span<const double> x) const;
  double ball_integral_at_origin(double r) const;

 private:
  StepProfile profile_;
  int n_;
  std::vector<double> radii_;
};

double distribution_function(const GridFunction& f, double lambda);
double distribution_function(const StepProfile& f, double lambda);
StepProfile decreasing_rearrangement(const GridFunction& f);
double maximal_rearrangement(const StepProfile& p, double t);
// (ψ(f*)); ψ must vanish at 0 for the result to keep compact support.
StepProfile psi_rearrangement(const StepProfile& p, const MonotoneFn& psi);
RadialFunction radial_lift(const StepProfile& p, int n);
GridFunction sample_on_grid(const RadialFunction& f, const std::vector<int>& shape, double h, const std::vector<double>& origin);

}  // namespace potlab
