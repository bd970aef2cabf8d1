#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace potlab::quad {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Options {
  double rel_tol = 1e-9;
  unsigned max_depth = 18;
};

// Globally adaptive Gauss-Kronrod (7/15) on a finite interval: the panel with the largest error
// estimate is bisected until the summed estimate meets rel_tol, reaches the rounding floor, or a
// panel would fall below (b-a)/2^max_depth.
template <class F>
double integrate(F&& f, double a, double b, const Options& opt = {}) {
  if (!(b > a)) return 0.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  struct Panel {
    double a, b, value, err, l1;
    unsigned depth;
    bool operator<(const Panel& o) const { return err < o.err; }
  };
  auto panel = [&](double lo, double hi, unsigned depth) {
    double err = 0.0, l1 = 0.0;
    double v = GK::integrate(f, lo, hi, 0, 0.0, &err, &l1);
    // Boost reports the error of the rule on [-1, 1]
    return Panel{lo, hi, v, err * 0.5 * (hi - lo), l1, depth};
  };
  std::priority_queue<Panel> heap;
  heap.push(panel(a, b, 0));
  double total = heap.top().value, err = heap.top().err, l1 = heap.top().l1;
  std::vector<Panel> done;
  const double eps = std::numeric_limits<double>::epsilon();
  while (!heap.empty() && err > opt.rel_tol * std::abs(total) && err > 50 * eps * l1) {
    Panel p = heap.top();
    heap.pop();
    if (p.depth >= opt.max_depth) {
      done.push_back(p);
      continue;
    }
    const double mid = 0.5 * (p.a + p.b);
    Panel L = panel(p.a, mid, p.depth + 1), R = panel(mid, p.b, p.depth + 1);
    total += L.value + R.value - p.value;
    err += L.err + R.err - p.err;
    l1 += L.l1 + R.l1 - p.l1;
    heap.push(L);
    heap.push(R);
  }
  // re-sum to shed the drift of the running updates
  double s = 0.0;
  for (const auto& p : done) s += p.value;
  while (!heap.empty()) {
    s += heap.top().value;
    heap.pop();
  }
  return s;
}

// ∫_a^b t^e h(t) dt with the power weight absorbed by u = t^(e+1) (or log t when e = -1).
// Requires 0 <= a < b, and a > 0 when e <= -1.
template <class F>
double integrate_power_weight(F&& h, double e, double a, double b, const Options& opt = {}) {
  if (!(b > a)) return 0.0;
  const double k = e + 1.0;
  if (std::abs(k) < 1e-14) {
    auto g = [&](double u) { return h(std::exp(u)); };
    return integrate(g, std::log(a), std::log(b), opt);
  }
  const double inv = 1.0 / k;
  auto g = [&](double u) { return h(std::pow(u, inv)); };
  const double ua = std::pow(a, k), ub = std::pow(b, k);
  if (k > 0) return integrate(g, ua, ub, opt) * inv;
  return integrate(g, ub, ua, opt) * (-inv);
}

struct RayResult {
  double value = 0.0;
  bool divergent = false;
  bool converged = true;
};

struct RayOptions {
  double rel_tol = 1e-10;
  double block = 2.302585092994046;  // one decade in log variable
  int max_blocks = 160;
  Options inner{};
};

// ∫ k(L) dL over [L0, +inf) when dir > 0, or (-inf, L0] when dir < 0.
// Summed block by block; once consecutive block ratios settle (power-law regime)
// the geometric remainder is added in closed form.
template <class F>
RayResult integrate_ray(F&& k, double L0, int dir, const RayOptions& opt = {}) {
  RayResult res;
  double total = 0.0, prev = -1.0, prevq = -1.0;
  int zero_run = 0;
  for (int j = 0; j < opt.max_blocks; ++j) {
    double lo = dir > 0 ? L0 + j * opt.block : L0 - (j + 1) * opt.block;
    double c = integrate(k, lo, lo + opt.block, opt.inner);
    if (!std::isfinite(c)) {
      res.value = kInf;
      res.divergent = true;
      return res;
    }
    total += c;
    if (c == 0.0) {
      if (++zero_run >= 3) {
        res.value = total;
        return res;
      }
      prev = 0.0;
      prevq = -1.0;
      continue;
    }
    zero_run = 0;
    if (prev > 0.0) {
      double q = c / prev;
      if (q < 1.0 && c <= opt.rel_tol * total * (1.0 - q)) {
        res.value = total + c * q / (1.0 - q);
        return res;
      }
      if (prevq > 0.0 && std::abs(q - prevq) <= 1e-7 * q && j >= 3) {
        if (q >= 1.0 - 1e-9) {
          res.value = kInf;
          res.divergent = true;
          return res;
        }
        res.value = total + c * q / (1.0 - q);
        return res;
      }
      prevq = q;
    }
    prev = c;
  }
  res.converged = false;
  if (prevq >= 0.999) {
    res.value = kInf;
    res.divergent = true;
  } else {
    res.value = total;
  }
  return res;
}

}  // namespace potlab::quad
