#include "potlab/geometry.hpp"

#include "potlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace potlab {

double unit_ball_volume(int n) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double cap_volume(int n, double R, double h) {
  h = std::clamp(h, 0.0, 2.0 * R);
  if (h == 0.0) return 0.0;
  if (n == 1) return h;
  if (n == 2) {
    // R^2 (x - sin x)/2 with x the central angle; series for small x
    const double x = 4 * std::asin(std::sqrt(h / (2 * R)));
    double m;
    if (x < 0.1) {
      const double x2 = x * x;
      m = x * x2 / 6 * (1 - x2 / 20 * (1 - x2 / 42 * (1 - x2 / 72 * (1 - x2 / 110))));
    } else {
      m = x - std::sin(x);
    }
    return 0.5 * R * R * m;
  }
  if (n == 3) return std::numbers::pi * h * h * (3 * R - h) / 3.0;
  const double w = unit_ball_volume(n - 1);
  auto slice = [&](double z) { return std::pow(std::max(0.0, R * R - z * z), 0.5 * (n - 1)); };
  return w * quad::integrate(slice, R - h, R, {1e-12, 20});
}

namespace {

bool trivial(int n, double d, double r, double rho, double& out) {
  if (r <= 0.0 || rho <= 0.0) {
    out = 0.0;
    return true;
  }
  if (d >= r + rho) {
    out = 0.0;
    return true;
  }
  if (d + r <= rho) {
    out = unit_ball_volume(n) * std::pow(r, n);
    return true;
  }
  if (d + rho <= r) {
    out = unit_ball_volume(n) * std::pow(rho, n);
    return true;
  }
  return false;
}

}  // namespace

double lens_volume_generic(int n, double d, double r, double rho) {
  double out;
  if (trivial(n, d, r, rho, out)) return out;
  // cap heights cut off by the radical hyperplane, in product form to avoid cancellation
  const double h_rho = (r - d + rho) * (r + d - rho) / (2 * d);
  const double h_r = (rho - d + r) * (rho + d - r) / (2 * d);
  return cap_volume(n, rho, h_rho) + cap_volume(n, r, h_r);
}

double lens_volume(int n, double d, double r, double rho) {
  double out;
  if (trivial(n, d, r, rho, out)) return out;
  if (n == 1) return std::max(0.0, std::min(d + r, rho) - std::max(d - r, -rho));
  return lens_volume_generic(n, d, r, rho);
}

}  // namespace potlab
