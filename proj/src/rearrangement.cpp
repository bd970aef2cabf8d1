#include "potlab/rearrangement.hpp"

#include "potlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace potlab {

StepProfile::StepProfile(std::vector<double> breaks, std::vector<double> values) {
  if (breaks.size() != values.size() + 1) throw std::invalid_argument("step profile needs one more breakpoint than values");
  if (breaks[0] != 0.0) throw std::invalid_argument("step profile must start at t = 0");
  for (size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k]) || values[k] < 0) throw std::invalid_argument("step values must be finite and >= 0");
    if (!std::isfinite(breaks[k + 1]) || !(breaks[k + 1] > breaks[k])) throw std::invalid_argument("breakpoints must increase strictly");
    if (k > 0 && values[k] > values[k - 1]) throw std::invalid_argument("step values must be non-increasing");
  }
  breaks_.push_back(0.0);
  for (size_t k = 0; k < values.size(); ++k) {
    if (values[k] == 0.0) break;
    if (!values_.empty() && values_.back() == values[k]) {
      breaks_.back() = breaks[k + 1];
    } else {
      values_.push_back(values[k]);
      breaks_.push_back(breaks[k + 1]);
    }
  }
  prefix_.assign(breaks_.size(), 0.0);
  for (size_t k = 0; k < values_.size(); ++k) prefix_[k + 1] = prefix_[k] + values_[k] * (breaks_[k + 1] - breaks_[k]);
}

StepProfile StepProfile::indicator(double measure, double value) {
  if (!(measure > 0)) throw std::invalid_argument("indicator needs positive measure");
  return StepProfile({0.0, measure}, {value});
}

StepProfile StepProfile::power_cutoff(double a, double eps, double support, int steps_per_decade) {
  if (!(a > 0) || !(eps > 0) || !(support > eps) || steps_per_decade < 1)
    throw std::invalid_argument("power_cutoff needs a > 0 and 0 < eps < support");
  std::vector<double> b{0.0, eps}, v{std::pow(eps, -a)};
  const double q = std::pow(10.0, 1.0 / steps_per_decade);
  double s0 = eps;
  while (s0 < support) {
    double s1 = std::min(support, s0 * q);
    if (s1 > support / (1 + 1e-9)) s1 = support;
    double avg = std::abs(a - 1) < 1e-12 ? std::log(s1 / s0) / (s1 - s0)
                                         : (std::pow(s1, 1 - a) - std::pow(s0, 1 - a)) / ((1 - a) * (s1 - s0));
    avg = std::min(avg, v.back());
    b.push_back(s1);
    v.push_back(avg);
    s0 = s1;
  }
  return StepProfile(std::move(b), std::move(v));
}

size_t StepProfile::piece(double t) const {
  if (t >= support()) return size();
  if (t <= 0) return 0;
  return static_cast<size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), t) - breaks_.begin()) - 1;
}

double StepProfile::value(double t) const {
  size_t k = piece(t);
  return k < size() ? values_[k] : 0.0;
}

double StepProfile::integral(double t) const {
  if (t <= 0) return 0.0;
  size_t k = piece(t);
  if (k >= size()) return mass();
  return prefix_[k] + values_[k] * (t - breaks_[k]);
}

double StepProfile::maximal(double t) const {
  if (t <= 0) return sup();
  return integral(t) / t;
}

double StepProfile::distribution(double lambda) const {
  size_t K = 0;
  while (K < size() && values_[K] > lambda) ++K;
  return breaks_[K];
}

StepProfile StepProfile::scaled(double c) const {
  if (!(c >= 0)) throw std::invalid_argument("scale factor must be >= 0");
  if (c == 0.0) return StepProfile();
  std::vector<double> v(values_);
  for (double& x : v) x *= c;
  return StepProfile(breaks_, std::move(v));
}

GridFunction::GridFunction(int dim, std::vector<int> shape, double h, std::vector<double> origin, std::vector<double> values)
    : dim_(dim), shape_(std::move(shape)), h_(h), origin_(std::move(origin)), values_(std::move(values)) {
  if (dim_ < 1 || dim_ > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  if (static_cast<int>(shape_.size()) != dim_ || static_cast<int>(origin_.size()) != dim_)
    throw std::invalid_argument("grid shape and origin must have dim entries");
  if (!(h_ > 0) || !std::isfinite(h_)) throw std::invalid_argument("grid spacing must be positive");
  size_t count = 1;
  for (int s : shape_) {
    if (s < 1) throw std::invalid_argument("grid shape entries must be >= 1");
    count *= static_cast<size_t>(s);
  }
  if (count != values_.size()) throw std::invalid_argument("grid value count does not match the shape");
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("grid values must be finite");
}

double GridFunction::cell_volume() const { return std::pow(h_, dim_); }

void GridFunction::center(size_t idx, double* out) const {
  for (int d = dim_ - 1; d >= 0; --d) {
    size_t s = static_cast<size_t>(shape_[static_cast<size_t>(d)]);
    out[d] = origin_[static_cast<size_t>(d)] + (static_cast<double>(idx % s) + 0.5) * h_;
    idx /= s;
  }
}

std::vector<double> GridFunction::center(size_t idx) const {
  std::vector<double> c(static_cast<size_t>(dim_));
  center(idx, c.data());
  return c;
}

long GridFunction::cell_of(std::span<const double> x) const {
  long idx = 0;
  for (int d = 0; d < dim_; ++d) {
    double f = std::floor((x[static_cast<size_t>(d)] - origin_[static_cast<size_t>(d)]) / h_);
    if (f < 0 || f >= shape_[static_cast<size_t>(d)]) return -1;
    idx = idx * shape_[static_cast<size_t>(d)] + static_cast<long>(f);
  }
  return idx;
}

RadialFunction::RadialFunction(StepProfile profile, int n) : profile_(std::move(profile)), n_(n) {
  if (n < 1) throw std::invalid_argument("radial lift needs n >= 1");
  const double w = unit_ball_volume(n);
  radii_.reserve(profile_.breaks().size());
  for (double t : profile_.breaks()) radii_.push_back(std::pow(t / w, 1.0 / n));
}

double RadialFunction::value_at_radius(double r) const { return profile_.value(unit_ball_volume(n_) * std::pow(r, n_)); }

double RadialFunction::value(std::span<const double> x) const {
  double s = 0;
  for (double c : x) s += c * c;
  return value_at_radius(std::sqrt(s));
}

double RadialFunction::ball_integral_at_origin(double r) const {
  return profile_.integral(unit_ball_volume(n_) * std::pow(r, n_));
}

double distribution_function(const GridFunction& f, double lambda) {
  size_t count = 0;
  for (double v : f.values()) count += std::abs(v) > lambda;
  return static_cast<double>(count) * f.cell_volume();
}

double distribution_function(const StepProfile& f, double lambda) { return f.distribution(lambda); }

StepProfile decreasing_rearrangement(const GridFunction& f) {
  std::vector<double> a;
  a.reserve(f.size());
  for (double v : f.values())
    if (v != 0.0) a.push_back(std::abs(v));
  std::sort(a.begin(), a.end(), std::greater<>());
  const double vol = f.cell_volume();
  std::vector<double> b{0.0}, v;
  size_t i = 0;
  while (i < a.size()) {
    size_t j = i;
    while (j < a.size() && a[j] == a[i]) ++j;
    v.push_back(a[i]);
    b.push_back(static_cast<double>(j) * vol);
    i = j;
  }
  return StepProfile(std::move(b), std::move(v));
}

double maximal_rearrangement(const StepProfile& p, double t) { return p.maximal(t); }

StepProfile psi_rearrangement(const StepProfile& p, const MonotoneFn& psi) {
  if (psi(0.0) > 0.0) throw std::invalid_argument("psi(0) > 0: the rearrangement of psi(|f|) has unbounded support");
  std::vector<double> v;
  v.reserve(p.size());
  for (double x : p.values()) v.push_back(psi(x));
  return StepProfile(p.breaks(), std::move(v));
}

RadialFunction radial_lift(const StepProfile& p, int n) { return RadialFunction(p, n); }

GridFunction sample_on_grid(const RadialFunction& f, const std::vector<int>& shape, double h, const std::vector<double>& origin) {
  size_t count = 1;
  for (int s : shape) count *= static_cast<size_t>(std::max(s, 0));
  GridFunction g(f.dim(), shape, h, origin, std::vector<double>(count, 0.0));
  std::vector<double> c(static_cast<size_t>(f.dim()));
  for (size_t i = 0; i < count; ++i) {
    g.center(i, c.data());
    g.mutable_values()[i] = f.value(c);
  }
  return g;
}

}  // namespace potlab
