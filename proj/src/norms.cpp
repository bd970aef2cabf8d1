#include "potlab/norms.hpp"

#include "potlab/geometry.hpp"
#include "potlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace potlab {

void LorentzParams::validate() const {
  if (!(p > 0) || !std::isfinite(p)) throw std::invalid_argument("Lorentz p must be in (0, inf)");
  if (!(q > 0)) throw std::invalid_argument("Lorentz q must be in (0, inf]");
  if (!(domain_measure > 0)) throw std::invalid_argument("domain measure must be positive");
}

bool LorentzParams::banach() const {
  if (variant == LorentzVariant::star) return 1 <= q && q <= p;
  return p >= 1 && q >= 1;
}

LorentzParams LorentzParams::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("Lorentz parameters must be a JSON object");
  for (const auto& [k, _] : j.items())
    if (k != "p" && k != "q" && k != "variant" && k != "domain_measure")
      throw std::invalid_argument("unknown key '" + k + "' in Lorentz parameters");
  LorentzParams lp;
  lp.p = j.at("p").get<double>();
  const auto& q = j.at("q");
  lp.q = q.is_string() && q.get<std::string>() == "inf" ? kInfinity : q.get<double>();
  if (j.contains("variant")) {
    auto v = j.at("variant").get<std::string>();
    if (v == "star") {
      lp.variant = LorentzVariant::star;
    } else if (v == "double_star") {
      lp.variant = LorentzVariant::double_star;
    } else {
      throw std::invalid_argument("Lorentz variant must be 'star' or 'double_star'");
    }
  }
  if (j.contains("domain_measure") && !j.at("domain_measure").is_null()) lp.domain_measure = j.at("domain_measure").get<double>();
  lp.validate();
  return lp;
}

namespace {

// ∫_a^b s^e ds for a >= 0, b possibly infinite.
double power_integral(double e, double a, double b) {
  if (!(b > a)) return 0.0;
  if (std::abs(e + 1) < 1e-14) return a == 0.0 || std::isinf(b) ? kInfinity : std::log(b / a);
  const double k = e + 1;
  if (a == 0.0 && k < 0) return kInfinity;
  if (std::isinf(b)) return k < 0 ? -std::pow(a, k) / k : kInfinity;
  return (std::pow(b, k) - std::pow(a, k)) / k;
}

double star_norm(const StepProfile& f, const LorentzParams& lp) {
  const auto& b = f.breaks();
  const auto& v = f.values();
  const double Om = lp.domain_measure;
  if (std::isinf(lp.q)) {
    double s = 0.0;
    for (size_t k = 0; k < v.size() && b[k] < Om; ++k) s = std::max(s, std::pow(std::min(b[k + 1], Om), 1 / lp.p) * v[k]);
    return s;
  }
  double s = 0.0;
  for (size_t k = 0; k < v.size() && b[k] < Om; ++k)
    s += std::pow(v[k], lp.q) * power_integral(lp.q / lp.p - 1, b[k], std::min(b[k + 1], Om));
  return std::pow(s, 1 / lp.q);
}

double double_star_norm(const StepProfile& f, const LorentzParams& lp) {
  const auto& b = f.breaks();
  const auto& v = f.values();
  const double Om = lp.domain_measure, p = lp.p, q = lp.q;
  const double S = f.support(), M = f.mass();
  if (f.empty()) return 0.0;
  if (std::isinf(q)) {
    // s^{1/p}(v + c/s) has no interior maximum on a step, so the sup sits at breakpoints or the tail
    double s = 0.0;
    for (size_t k = 1; k < b.size() && b[k - 1] < Om; ++k) {
      double t = std::min(b[k], Om);
      s = std::max(s, std::pow(t, 1 / p) * f.maximal(t));
    }
    if (Om > S) {
      if (p < 1) {
        s = std::max(s, std::isinf(Om) ? kInfinity : std::pow(Om, 1 / p - 1) * M);
      } else if (p == 1) {
        s = std::max(s, M);
      }
    }
    return s;
  }
  double sum = 0.0;
  quad::Options opt{1e-12, 20};
  for (size_t k = 0; k < v.size() && b[k] < Om; ++k) {
    const double a = b[k], e = std::min(b[k + 1], Om);
    const double c = f.prefix(k) - v[k] * a;
    if (k == 0 || c == 0.0) {
      sum += std::pow(v[k], q) * power_integral(q / p - 1, a, e);
    } else {
      auto h = [&](double s) { return std::pow(v[k] + c / s, q); };
      sum += quad::integrate_power_weight(h, q / p - 1, a, e, opt);
    }
  }
  if (Om > S) sum += std::pow(M, q) * power_integral(q / p - 1 - q, S, Om);
  return std::pow(sum, 1 / q);
}

}  // namespace

double lorentz_norm(const StepProfile& f, const LorentzParams& lp) {
  lp.validate();
  return lp.variant == LorentzVariant::star ? star_norm(f, lp) : double_star_norm(f, lp);
}

double lorentz_norm(const GridFunction& f, const LorentzParams& lp) { return lorentz_norm(decreasing_rearrangement(f), lp); }

SampledProfile::SampledProfile(std::vector<double> t, std::vector<double> v, std::optional<double> head_exponent,
                               std::optional<double> tail_exponent)
    : t_(std::move(t)), v_(std::move(v)) {
  if (t_.size() != v_.size() || t_.size() < 2) throw std::invalid_argument("sampled profile needs at least two samples");
  for (size_t i = 0; i < t_.size(); ++i) {
    if (!(t_[i] > 0) || !std::isfinite(t_[i]) || !(v_[i] > 0) || !std::isfinite(v_[i]))
      throw std::invalid_argument("sampled profile needs positive finite samples");
    if (i > 0 && (!(t_[i] > t_[i - 1]) || v_[i] > v_[i - 1]))
      throw std::invalid_argument("sampled profile must be non-increasing in increasing t");
  }
  head_ = head_exponent ? *head_exponent : slope(0);
  tail_ = tail_exponent ? *tail_exponent : slope(t_.size() - 2);
}

double SampledProfile::slope(size_t i) const { return std::log(v_[i + 1] / v_[i]) / std::log(t_[i + 1] / t_[i]); }

double SampledProfile::value(double s) const {
  if (s <= t_.front()) return v_.front() * std::pow(s / t_.front(), head_);
  if (s >= t_.back()) return v_.back() * std::pow(s / t_.back(), tail_);
  size_t i = static_cast<size_t>(std::upper_bound(t_.begin(), t_.end(), s) - t_.begin()) - 1;
  return v_[i] * std::pow(s / t_[i], slope(i));
}

double lorentz_norm(const SampledProfile& f, const LorentzParams& lp) {
  lp.validate();
  if (lp.variant != LorentzVariant::star) throw std::invalid_argument("sampled profiles support the star variant only");
  const double Om = lp.domain_measure, p = lp.p, q = lp.q;
  const auto& t = f.t();
  const auto& v = f.v();
  // pieces v_a (s/a)^k on [a, b]
  struct Piece {
    double a, b, va, k;
  };
  std::vector<Piece> pieces{{0.0, t.front(), v.front(), f.head_exponent()}};
  for (size_t i = 0; i + 1 < t.size(); ++i) pieces.push_back({t[i], t[i + 1], v[i], f.slope(i)});
  pieces.push_back({t.back(), kInfinity, v.back(), f.tail_exponent()});
  if (std::isinf(q)) {
    double s = 0.0;
    for (auto pc : pieces) {
      if (pc.a >= Om) break;
      const double ref = pc.a > 0 ? pc.a : pc.b;
      const double e = 1 / p + pc.k;
      double b = std::min(pc.b, Om);
      auto g = [&](double x) { return std::pow(x, 1 / p) * pc.va * std::pow(x / ref, pc.k); };
      if (pc.a == 0.0) {
        s = std::max(s, e < -1e-10 ? kInfinity : g(b));
      } else if (std::isinf(b)) {
        s = std::max(s, e > 1e-10 ? kInfinity : g(pc.a));
      } else {
        s = std::max({s, g(pc.a), g(b)});
      }
    }
    return s;
  }
  double sum = 0.0;
  for (auto pc : pieces) {
    if (pc.a >= Om) break;
    const double ref = pc.a > 0 ? pc.a : pc.b;
    const double b = std::min(pc.b, Om);
    sum += std::pow(pc.va, q) * std::pow(ref, -pc.k * q) * power_integral(q / p - 1 + pc.k * q, pc.a, b);
  }
  return std::pow(sum, 1 / q);
}

namespace {

double step_modular(const MonotoneFn& A, const StepProfile& f, double lambda, double Om) {
  const auto& b = f.breaks();
  const auto& v = f.values();
  double s = 0.0;
  for (size_t k = 0; k < v.size() && b[k] < Om; ++k) s += A(v[k] / lambda) * (std::min(b[k + 1], Om) - b[k]);
  return s;
}

}  // namespace

double luxemburg_norm(const MonotoneFn& A, const StepProfile& f, double domain_measure) {
  if (!(domain_measure > 0)) throw std::invalid_argument("domain measure must be positive");
  if (A(0.0) > 0.0) throw std::invalid_argument("Luxemburg modular needs A(0) = 0");
  if (f.empty()) return 0.0;
  auto mod = [&](double lam) { return step_modular(A, f, lam, domain_measure); };
  double hi = f.sup();
  int guard = 0;
  while (!(mod(hi) <= 1.0)) {
    hi *= 2;
    if (++guard > 2000 || std::isinf(hi)) return kInfinity;
  }
  double lo = hi;
  guard = 0;
  while (mod(lo) <= 1.0) {
    lo *= 0.5;
    if (++guard > 2000 || lo == 0.0) return 0.0;
  }
  // mod(lo) > 1 >= mod(hi)
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) mid = 0.5 * (lo + hi);
    if (mod(mid) <= 1.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double luxemburg_norm(const NFunction& A, const StepProfile& f, double domain_measure) {
  return luxemburg_norm(A.G(), f, domain_measure);
}

double llogl_norm(const StepProfile& f, double domain_measure) {
  static const MonotoneFn A = MonotoneFn::llogl();
  return luxemburg_norm(A, f, domain_measure);
}

namespace {

struct Lattice {
  std::vector<size_t> centres;
  std::vector<double> radii;
};

Lattice morrey_lattice(const GridFunction& f, const MorreyOptions& opt) {
  if (opt.center_stride < 1 || opt.radii_per_octave < 1 || !(opt.radius_cap_factor > 0))
    throw std::invalid_argument("Morrey lattice options must be positive");
  const int n = f.dim();
  Lattice L;
  std::vector<double> lo(static_cast<size_t>(n), kInfinity), hi(static_cast<size_t>(n), -kInfinity), c(static_cast<size_t>(n));
  bool any = false;
  for (size_t i = 0; i < f.size(); ++i) {
    f.center(i, c.data());
    bool keep = true;
    size_t idx = i;
    for (int d = n - 1; d >= 0; --d) {
      size_t s = static_cast<size_t>(f.shape()[static_cast<size_t>(d)]);
      if ((idx % s) % static_cast<size_t>(opt.center_stride) != 0) keep = false;
      idx /= s;
    }
    if (keep) L.centres.push_back(i);
    if (f.values()[i] != 0.0) {
      any = true;
      for (int d = 0; d < n; ++d) {
        lo[static_cast<size_t>(d)] = std::min(lo[static_cast<size_t>(d)], c[static_cast<size_t>(d)]);
        hi[static_cast<size_t>(d)] = std::max(hi[static_cast<size_t>(d)], c[static_cast<size_t>(d)]);
      }
    }
  }
  if (!any) return L;
  double diam = 0;
  for (int d = 0; d < n; ++d) diam += std::pow(hi[static_cast<size_t>(d)] - lo[static_cast<size_t>(d)] + f.spacing(), 2);
  diam = std::sqrt(diam);
  const double r0 = f.spacing() / std::pow(unit_ball_volume(n), 1.0 / n);
  const double rmax = opt.radius_cap_factor * diam;
  for (int k = 0;; ++k) {
    double r = r0 * std::pow(2.0, static_cast<double>(k) / opt.radii_per_octave);
    if (r > rmax) break;
    L.radii.push_back(r);
  }
  L.radii.push_back(rmax);
  return L;
}

// Cells sorted by distance from a centre, |f| values alongside.
void sorted_cells(const GridFunction& f, size_t centre, std::vector<std::pair<double, double>>& out) {
  const int n = f.dim();
  std::vector<double> x0(static_cast<size_t>(n)), c(static_cast<size_t>(n));
  f.center(centre, x0.data());
  out.clear();
  for (size_t i = 0; i < f.size(); ++i) {
    if (f.values()[i] == 0.0) continue;
    f.center(i, c.data());
    double s = 0;
    for (int d = 0; d < n; ++d) s += (c[static_cast<size_t>(d)] - x0[static_cast<size_t>(d)]) * (c[static_cast<size_t>(d)] - x0[static_cast<size_t>(d)]);
    out.emplace_back(std::sqrt(s), std::abs(f.values()[i]));
  }
  std::sort(out.begin(), out.end());
}

}  // namespace

double morrey_norm(const GridFunction& f, double q, double theta, const MorreyOptions& opt) {
  if (!(q >= 1) || !std::isfinite(q)) throw std::invalid_argument("Morrey exponent q must be in [1, inf)");
  if (!(theta >= 0 && theta <= f.dim())) throw std::invalid_argument("Morrey theta must lie in [0, n]");
  auto L = morrey_lattice(f, opt);
  if (L.radii.empty()) return 0.0;
  const double vol = f.cell_volume();
  const double e = (theta - f.dim()) / q;
  double best = 0.0;
  std::vector<std::pair<double, double>> cells;
  for (size_t c : L.centres) {
    sorted_cells(f, c, cells);
    size_t j = 0;
    double acc = 0.0;
    for (double R : L.radii) {
      while (j < cells.size() && cells[j].first < R) acc += std::pow(cells[j++].second, q) * vol;
      best = std::max(best, std::pow(R, e) * std::pow(acc, 1 / q));
    }
  }
  return best;
}

double lorentz_morrey_norm(const GridFunction& f, double t, double q, double theta, const MorreyOptions& opt) {
  if (!(t > 0) || !std::isfinite(t)) throw std::invalid_argument("Lorentz-Morrey exponent t must be in (0, inf)");
  if (!(q >= 1)) throw std::invalid_argument("Lorentz-Morrey exponent q must be in [1, inf]");
  if (!(theta >= 0 && theta <= f.dim())) throw std::invalid_argument("Morrey theta must lie in [0, n]");
  auto L = morrey_lattice(f, opt);
  if (L.radii.empty()) return 0.0;
  const double vol = f.cell_volume();
  const double e = (theta - f.dim()) / t;
  LorentzParams lp;
  lp.p = t;
  lp.q = q;
  double best = 0.0;
  std::vector<std::pair<double, double>> cells;
  std::vector<double> inside;
  for (size_t c : L.centres) {
    sorted_cells(f, c, cells);
    size_t j = 0;
    inside.clear();
    for (double R : L.radii) {
      while (j < cells.size() && cells[j].first < R) inside.push_back(cells[j++].second);
      if (inside.empty()) continue;
      std::vector<double> a(inside);
      std::sort(a.begin(), a.end(), std::greater<>());
      std::vector<double> b{0.0}, v;
      for (size_t i = 0; i < a.size(); ++i) {
        if (!v.empty() && v.back() == a[i]) {
          b.back() += vol;
        } else {
          v.push_back(a[i]);
          b.push_back(b.back() + vol);
        }
      }
      best = std::max(best, std::pow(R, e) * lorentz_norm(StepProfile(std::move(b), std::move(v)), lp));
    }
  }
  return best;
}

ModularFunctional ModularFunctional::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("modular functional must be a JSON object");
  for (const auto& [k, _] : j.items())
    if (k != "H" && k != "sigma" && k != "rho" && k != "side" && k != "domain_measure")
      throw std::invalid_argument("unknown key '" + k + "' in modular functional");
  ModularFunctional T;
  T.H = MonotoneFn::from_json(j.at("H"));
  T.sigma = j.value("sigma", 0.0);
  T.rho = j.value("rho", 0.0);
  T.side = j.value("side", std::string("X"));
  if (T.side != "X" && T.side != "Y") throw std::invalid_argument("modular side must be 'X' or 'Y'");
  if (j.contains("domain_measure") && !j.at("domain_measure").is_null()) T.domain_measure = j.at("domain_measure").get<double>();
  if (!(T.domain_measure > 0)) throw std::invalid_argument("domain measure must be positive");
  return T;
}

double modular(const ModularFunctional& T, const StepProfile& f) {
  const double Om = T.domain_measure;
  const auto& b = f.breaks();
  const auto& v = f.values();
  const auto pw = T.H.as_power();
  double total = 0.0;
  auto piece = [&](double value, double a, double e) -> double {
    if (!(e > a)) return 0.0;
    if (pw) {
      auto [c, r] = *pw;
      if (c == 0.0) return 0.0;
      if (value == 0.0) return r > 0 ? 0.0 : c * power_integral(T.sigma, a, e);
      return c * std::pow(value, r) * power_integral(T.sigma + T.rho * r, a, e);
    }
    auto k = [&](double L) {
      double h = T.H(std::exp(T.rho * L) * value);
      return h == 0.0 ? 0.0 : std::exp((T.sigma + 1) * L + std::log(h));
    };
    if (a == 0.0) {
      // (0, e]: the ray toward 0 in log s
      quad::RayOptions ro;
      ro.inner.rel_tol = 1e-11;
      auto r = quad::integrate_ray(k, std::log(e), -1, ro);
      return r.divergent ? kInfinity : r.value;
    }
    if (std::isinf(e)) {
      quad::RayOptions ro;
      ro.inner.rel_tol = 1e-11;
      auto r = quad::integrate_ray(k, std::log(a), +1, ro);
      return r.divergent ? kInfinity : r.value;
    }
    return quad::integrate(k, std::log(a), std::log(e), {1e-11, 20});
  };
  for (size_t k = 0; k < v.size() && b[k] < Om; ++k) total += piece(v[k], b[k], std::min(b[k + 1], Om));
  if (Om > f.support()) {
    double h0 = T.H(0.0);
    if (h0 > 0.0) total += h0 * power_integral(T.sigma, f.support(), Om);
  }
  return total;
}

}  // namespace potlab
