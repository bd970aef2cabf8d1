#include "potlab/potentials.hpp"

#include "potlab/geometry.hpp"
#include "potlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace potlab {

void PotentialParams::validate() const {
  if (n < 1) throw std::invalid_argument("dimension n must be >= 1");
  if (!(alpha > 0 && alpha < n)) throw std::invalid_argument("alpha must lie in (0, n)");
  if (!(R > 0)) throw std::invalid_argument("truncation radius R must be positive");
  if (quad.nodes_per_decade < 1 || !(quad.rel_tol > 0) || !(quad.tail_tol > 0))
    throw std::invalid_argument("quadrature parameters must be positive");
}

PotentialParams PotentialParams::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("potential parameters must be a JSON object");
  for (const auto& [k, _] : j.items())
    if (k != "alpha" && k != "n" && k != "psi" && k != "R" && k != "quadrature")
      throw std::invalid_argument("unknown key '" + k + "' in potential parameters");
  PotentialParams p;
  if (!j.contains("alpha") || !j.contains("n")) throw std::invalid_argument("potential parameters need 'alpha' and 'n'");
  p.alpha = j.at("alpha").get<double>();
  p.n = j.at("n").get<int>();
  if (j.contains("psi")) p.psi = MonotoneFn::from_json(j.at("psi"));
  if (j.contains("R") && !j.at("R").is_null()) p.R = j.at("R").get<double>();
  if (j.contains("quadrature")) {
    const auto& q = j.at("quadrature");
    for (const auto& [k, _] : q.items())
      if (k != "nodes_per_decade" && k != "rel_tol" && k != "tail_tol")
        throw std::invalid_argument("unknown key '" + k + "' in quadrature parameters");
    p.quad.nodes_per_decade = q.value("nodes_per_decade", p.quad.nodes_per_decade);
    p.quad.rel_tol = q.value("rel_tol", p.quad.rel_tol);
    p.quad.tail_tol = q.value("tail_tol", p.quad.tail_tol);
  }
  p.validate();
  return p;
}

const char* to_string(Finiteness f) {
  switch (f) {
    case Finiteness::finite:
      return "finite";
    case Finiteness::infinite:
      return "infinite";
    default:
      return "unknown";
  }
}

Finiteness finiteness_check(const MonotoneFn& psi, double alpha, int n) {
  if (psi(0.0) > 0.0) return Finiteness::infinite;
  auto e = psi.exponent_at_zero();
  if (!e) {
    // local log-slopes at two scales
    auto slope = [&](double u0, double u1) -> std::optional<double> {
      double a = psi(u0), b = psi(u1);
      if (a == 0.0 && b == 0.0) return kInfinity;
      if (!(a > 0 && b > 0)) return std::nullopt;
      return std::log(b / a) / std::log(u1 / u0);
    };
    auto s1 = slope(1e-60, 1e-45), s2 = slope(1e-45, 1e-30);
    if (!s1 || !s2) return Finiteness::unknown;
    if (std::isinf(*s1) && std::isinf(*s2)) return Finiteness::finite;
    if (std::abs(*s1 - *s2) > 1e-3 * std::max(1.0, std::abs(*s2))) return Finiteness::unknown;
    e = *s2;
  }
  if (std::isinf(*e)) return Finiteness::finite;
  const double kappa = *e * (1.0 - n / alpha);
  return kappa < -1.0 ? Finiteness::finite : Finiteness::infinite;
}

namespace {

struct Kernel {
  double a, b;  // ∫ r^{a-1} ψ(r^b m(r)) dr
  const MonotoneFn& psi;
  std::optional<std::pair<double, double>> pw;
};

double psi_times(const Kernel& k, double L, double M) {
  double v = k.psi(M * std::exp(k.b * L));
  if (v == 0.0) return 0.0;
  return std::exp(k.a * L + std::log(v));
}

// ∫_A^B r^{a-1} ψ(M r^b) dr for a constant mass M.
double const_piece(const Kernel& k, double M, double A, double B, int npd) {
  if (!(B > A)) return 0.0;
  if (k.pw) {
    auto [c, rho] = *k.pw;
    if (c == 0.0 || (M == 0.0 && rho > 0)) return 0.0;
    const double f = rho == 0.0 ? c : c * std::pow(M, rho);
    const double kap = k.a + k.b * rho;
    if (std::abs(kap) < 1e-14) return A == 0.0 ? kInfinity : f * std::log(B / A);
    if (A == 0.0) return kap > 0 ? f * std::pow(B, kap) / kap : kInfinity;
    if (!std::isfinite(B)) return kap < 0 ? f * std::pow(A, kap) / (-kap) : kInfinity;
    return f * (std::pow(B, kap) - std::pow(A, kap)) / kap;
  }
  const double psi0 = k.psi(0.0);
  if (M == 0.0) {
    if (psi0 == 0.0) return 0.0;
    return psi0 * (std::pow(B, k.a) - std::pow(A, k.a)) / k.a;
  }
  if (A == 0.0) throw std::logic_error("constant-mass panel starting at r = 0 with positive mass");
  static const double xg[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static const double wg[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const double L0 = std::log(A), L1 = std::log(B);
  const double width = std::log(10.0) / npd;
  const int panels = std::max(1, static_cast<int>(std::ceil((L1 - L0) / width)));
  const double hw = 0.5 * (L1 - L0) / panels;
  double s = 0.0;
  for (int i = 0; i < panels; ++i) {
    double mid = L0 + (2 * i + 1) * hw;
    for (int g = 0; g < 3; ++g) s += wg[g] * psi_times(k, mid + hw * xg[g], M);
  }
  return s * hw;
}

// ∫_{r0}^{R} r^{a-1} ψ(M r^b) dr, R possibly infinite.
double tail(const Kernel& k, double M, double r0, double R, const QuadratureParams& q) {
  if (!(R > r0)) return 0.0;
  if (k.pw) return const_piece(k, M, r0, R, q.nodes_per_decade);
  if (M == 0.0 && k.psi(0.0) == 0.0) return 0.0;
  auto h = [&](double L) { return psi_times(k, L, M); };
  if (std::isfinite(R)) return quad::integrate(h, std::log(r0), std::log(R), {q.rel_tol});
  quad::RayOptions ro;
  ro.rel_tol = q.tail_tol;
  ro.inner.rel_tol = std::min(q.rel_tol, 1e-10);
  return quad::integrate_ray(h, std::log(r0), +1, ro).value;
}

Kernel make_kernel(double a, double b, const MonotoneFn& psi) { return Kernel{a, b, psi, psi.as_power()}; }

double norm(std::span<const double> x) {
  double s = 0;
  for (double c : x) s += c * c;
  return std::sqrt(s);
}

void check_point(std::span<const double> x, int n) {
  if (static_cast<int>(x.size()) != n) throw std::invalid_argument("evaluation point has the wrong dimension");
  for (double c : x)
    if (!std::isfinite(c)) throw std::invalid_argument("evaluation point must be finite");
}

// ---- radial inputs -------------------------------------------------------

// Mass of f in B(d e_1, r): shells wholly inside or outside the ball come from prefix sums,
// only the shells crossing its boundary need a lens volume.
class ShellMass {
 public:
  explicit ShellMass(const RadialFunction& f) : n_(f.dim()), w_(unit_ball_volume(f.dim())) {
    const auto& v = f.profile().values();
    for (size_t k = 0; k < v.size(); ++k) {
      double dv = v[k] - (k + 1 < v.size() ? v[k + 1] : 0.0);
      if (dv == 0.0) continue;
      rho_.push_back(f.radii()[k + 1]);
      dv_.push_back(dv);
    }
    inside_.assign(rho_.size() + 1, 0.0);
    covering_.assign(rho_.size() + 1, 0.0);
    for (size_t k = 0; k < rho_.size(); ++k) inside_[k + 1] = inside_[k] + dv_[k] * w_ * std::pow(rho_[k], n_);
    for (size_t k = rho_.size(); k-- > 0;) covering_[k] = covering_[k + 1] + dv_[k];
  }

  double operator()(double d, double r) const {
    size_t lo = static_cast<size_t>(std::upper_bound(rho_.begin(), rho_.end(), r - d) - rho_.begin());
    size_t hi = static_cast<size_t>(std::lower_bound(rho_.begin(), rho_.end(), r + d) - rho_.begin());
    hi = std::max(hi, lo);
    double m = inside_[lo] + covering_[hi] * w_ * std::pow(r, n_);
    for (size_t k = lo; k < hi; ++k) m += dv_[k] * lens_volume(n_, d, r, rho_[k]);
    return m;
  }

 private:
  int n_;
  double w_;
  std::vector<double> rho_, dv_, inside_, covering_;
};

double radial_mass(const RadialFunction& f, double d, double r) { return ShellMass(f)(d, r); }

double radial_kernel(const RadialFunction& f, double d, const Kernel& k, double R, const QuadratureParams& q) {
  if (f.profile().empty()) return k.psi(0.0) == 0.0 ? 0.0 : (std::isfinite(R) ? k.psi(0.0) * std::pow(R, k.a) / k.a : kInfinity);
  const auto& rho = f.radii();
  std::vector<double> br{0.0};
  for (size_t i = 1; i < rho.size(); ++i) {
    br.push_back(std::abs(d - rho[i]));
    br.push_back(d + rho[i]);
  }
  std::sort(br.begin(), br.end());
  const double eps = 1e-12 * br.back();
  br.erase(std::unique(br.begin(), br.end(), [&](double a, double b) { return b - a <= eps; }), br.end());
  const double r_full = br.back();
  const double M = f.profile().mass();
  double total = 0.0;
  quad::Options opt{q.rel_tol, 20};
  const ShellMass mass(f);
  for (size_t i = 0; i + 1 < br.size(); ++i) {
    double A = br[i], B = std::min(br[i + 1], R);
    if (!(B > A)) break;
    if (B - A <= eps) continue;
    auto h = [&](double r) { return k.psi(std::pow(r, k.b) * mass(d, r)); };
    total += quad::integrate_power_weight(h, k.a - 1.0, A, B, opt);
  }
  if (R > r_full) total += tail(k, M, r_full, R, q);
  return total;
}

// ---- grid inputs ---------------------------------------------------------

struct GridEvents {
  double r_sw = 0.0;      // below r_sw the cell containing x is modelled as a ball of density `inner`
  double inner = 0.0;
  std::vector<double> d;  // sorted distances (clamped to >= r_sw)
  std::vector<double> w;  // masses, merged for equal distances
  double total = 0.0;
};

GridEvents grid_events(const GridFunction& f, std::span<const double> x) {
  GridEvents ev;
  const int n = f.dim();
  const double vol = f.cell_volume();
  long own = f.cell_of(x);
  if (own >= 0) {
    ev.r_sw = f.spacing() / std::pow(unit_ball_volume(n), 1.0 / n);
    ev.inner = std::abs(f.values()[static_cast<size_t>(own)]);
  }
  std::vector<std::pair<double, double>> e;
  e.reserve(f.size());
  std::vector<double> c(static_cast<size_t>(n));
  for (size_t i = 0; i < f.size(); ++i) {
    double v = std::abs(f.values()[i]);
    if (v == 0.0) continue;
    double dist;
    if (static_cast<long>(i) == own) {
      dist = ev.r_sw;
    } else {
      f.center(i, c.data());
      double s = 0;
      for (int k = 0; k < n; ++k) s += (c[static_cast<size_t>(k)] - x[static_cast<size_t>(k)]) * (c[static_cast<size_t>(k)] - x[static_cast<size_t>(k)]);
      dist = std::max(std::sqrt(s), ev.r_sw);
    }
    e.emplace_back(dist, v * vol);
  }
  std::sort(e.begin(), e.end());
  for (const auto& [dist, m] : e) {
    if (!ev.d.empty() && ev.d.back() == dist) {
      ev.w.back() += m;
    } else {
      ev.d.push_back(dist);
      ev.w.push_back(m);
    }
    ev.total += m;
  }
  return ev;
}

double grid_kernel(const GridEvents& ev, int n, const Kernel& k, double R, const QuadratureParams& q) {
  double total = 0.0;
  if (ev.r_sw > 0.0) {
    const double w = unit_ball_volume(n);
    auto h = [&](double r) { return k.psi(std::pow(r, k.b) * ev.inner * w * std::pow(r, n)); };
    total += quad::integrate_power_weight(h, k.a - 1.0, 0.0, std::min(ev.r_sw, R), {q.rel_tol, 20});
  }
  double start = ev.r_sw;
  if (ev.d.empty()) {
    total += const_piece(k, 0.0, start, R, q.nodes_per_decade);
    return total;
  }
  if (ev.d.front() > start) total += const_piece(k, 0.0, start, std::min(ev.d.front(), R), q.nodes_per_decade);
  double M = 0.0;
  for (size_t i = 0; i < ev.d.size(); ++i) {
    M += ev.w[i];
    double A = ev.d[i];
    if (A >= R) break;
    double B = i + 1 < ev.d.size() ? std::min(ev.d[i + 1], R) : R;
    if (i + 1 == ev.d.size()) {
      total += tail(k, M, A, R, q);
    } else {
      total += const_piece(k, M, A, B, q.nodes_per_decade);
    }
  }
  return total;
}

bool certified_infinite(const GridFunction& f, const PotentialParams& p) {
  if (finiteness_check(p.psi, p.alpha, p.n) != Finiteness::infinite) return false;
  for (double v : f.values())
    if (v != 0.0) return true;
  return p.psi(0.0) > 0.0;
}

bool certified_infinite(const RadialFunction& f, const PotentialParams& p) {
  if (finiteness_check(p.psi, p.alpha, p.n) != Finiteness::infinite) return false;
  return f.profile().mass() > 0.0 || p.psi(0.0) > 0.0;
}

template <class Source>
double check_and(const Source& f, std::span<const double> x, const PotentialParams& p) {
  p.validate();
  if (f.dim() != p.n) throw std::invalid_argument("input dimension does not match params.n");
  check_point(x, p.n);
  return 0.0;
}

}  // namespace

double ball_mass(const GridFunction& f, std::span<const double> x, double r) {
  if (!(r > 0)) throw std::invalid_argument("ball radius must be positive");
  check_point(x, f.dim());
  const double vol = f.cell_volume();
  std::vector<double> c(static_cast<size_t>(f.dim()));
  double m = 0.0;
  for (size_t i = 0; i < f.size(); ++i) {
    double v = f.values()[i];
    if (v == 0.0) continue;
    f.center(i, c.data());
    double s = 0;
    for (size_t k = 0; k < c.size(); ++k) s += (c[k] - x[k]) * (c[k] - x[k]);
    if (s < r * r) m += std::abs(v) * vol;
  }
  return m;
}

double ball_mass(const RadialFunction& f, std::span<const double> x, double r) {
  if (!(r > 0)) throw std::invalid_argument("ball radius must be positive");
  check_point(x, f.dim());
  return radial_mass(f, norm(x), r);
}

double wolff(const GridFunction& f, std::span<const double> x, const PotentialParams& p) {
  check_and(f, x, p);
  if (certified_infinite(f, p)) return kInfinity;
  return grid_kernel(grid_events(f, x), p.n, make_kernel(p.alpha, p.alpha - p.n, p.psi), kInfinity, p.quad);
}

double wolff(const RadialFunction& f, std::span<const double> x, const PotentialParams& p) {
  check_and(f, x, p);
  if (certified_infinite(f, p)) return kInfinity;
  return radial_kernel(f, norm(x), make_kernel(p.alpha, p.alpha - p.n, p.psi), kInfinity, p.quad);
}

double wolff_truncated(const GridFunction& f, std::span<const double> x, const PotentialParams& p) {
  check_and(f, x, p);
  if (!std::isfinite(p.R)) return wolff(f, x, p);
  return grid_kernel(grid_events(f, x), p.n, make_kernel(p.alpha, p.alpha - p.n, p.psi), p.R, p.quad);
}

double wolff_truncated(const RadialFunction& f, std::span<const double> x, const PotentialParams& p) {
  check_and(f, x, p);
  if (!std::isfinite(p.R)) return wolff(f, x, p);
  return radial_kernel(f, norm(x), make_kernel(p.alpha, p.alpha - p.n, p.psi), p.R, p.quad);
}

double riesz_truncated(const GridFunction& f, std::span<const double> x, double alpha, double R, const QuadratureParams&) {
  const int n = f.dim();
  if (!(alpha > 0 && alpha < n)) throw std::invalid_argument("alpha must lie in (0, n)");
  if (!(R > 0)) throw std::invalid_argument("truncation radius R must be positive");
  check_point(x, n);
  auto ev = grid_events(f, x);
  // closed form of ∫ r^{α-n-1} m(r) dr for the cell-centre mass model
  double s = ev.inner * unit_ball_volume(n) * std::pow(std::min(ev.r_sw, R), alpha) / alpha;
  const double tail_R = std::isfinite(R) ? std::pow(R, alpha - n) : 0.0;
  for (size_t i = 0; i < ev.d.size() && ev.d[i] < R; ++i) s += ev.w[i] * (std::pow(ev.d[i], alpha - n) - tail_R) / (n - alpha);
  return s;
}

double riesz(const GridFunction& f, std::span<const double> x, double alpha, const QuadratureParams& q) {
  return riesz_truncated(f, x, alpha, kInfinity, q);
}

double riesz_truncated(const RadialFunction& f, std::span<const double> x, double alpha, double R, const QuadratureParams& q) {
  const int n = f.dim();
  if (!(alpha > 0 && alpha < n)) throw std::invalid_argument("alpha must lie in (0, n)");
  if (!(R > 0)) throw std::invalid_argument("truncation radius R must be positive");
  check_point(x, n);
  static const MonotoneFn id = MonotoneFn::identity();
  return radial_kernel(f, norm(x), make_kernel(alpha, -static_cast<double>(n), id), R, q);
}

double riesz(const RadialFunction& f, std::span<const double> x, double alpha, const QuadratureParams& q) {
  return riesz_truncated(f, x, alpha, kInfinity, q);
}

GridFunction riesz_field(const GridFunction& f, double alpha) {
  const int n = f.dim();
  if (!(alpha > 0 && alpha < n)) throw std::invalid_argument("alpha must lie in (0, n)");
  const double h = f.spacing(), vol = f.cell_volume();
  const double r_sw = h / std::pow(unit_ball_volume(n), 1.0 / n);
  // kernel on index offsets; same cell-centre model as riesz()
  std::vector<int> span(3, 1), stride(3, 0);
  for (int d = 0; d < n; ++d) span[static_cast<size_t>(d)] = 2 * f.shape()[static_cast<size_t>(d)] - 1;
  std::vector<double> K(static_cast<size_t>(span[0]) * span[1] * span[2]);
  for (int i = 0; i < span[0]; ++i)
    for (int j = 0; j < span[1]; ++j)
      for (int k = 0; k < span[2]; ++k) {
        double di = n > 0 ? i - (span[0] - 1) / 2 : 0, dj = n > 1 ? j - (span[1] - 1) / 2 : 0, dk = n > 2 ? k - (span[2] - 1) / 2 : 0;
        double dist = h * std::sqrt(di * di + dj * dj + dk * dk);
        double v = vol * std::pow(std::max(dist, r_sw), alpha - n) / (n - alpha);
        if (dist == 0.0) v += unit_ball_volume(n) * std::pow(r_sw, alpha) / alpha;
        K[(static_cast<size_t>(i) * span[1] + j) * span[2] + k] = v;
      }
  std::vector<int> shp(3, 1);
  for (int d = 0; d < n; ++d) shp[static_cast<size_t>(d)] = f.shape()[static_cast<size_t>(d)];
  auto split = [&](size_t idx, int out[3]) {
    out[2] = static_cast<int>(idx % shp[2]);
    idx /= shp[2];
    out[1] = static_cast<int>(idx % shp[1]);
    out[0] = static_cast<int>(idx / shp[1]);
  };
  std::vector<std::pair<size_t, double>> src;
  for (size_t i = 0; i < f.size(); ++i)
    if (f.values()[i] != 0.0) src.emplace_back(i, std::abs(f.values()[i]));
  GridFunction out = f;
  const int c0 = (span[0] - 1) / 2, c1 = (span[1] - 1) / 2, c2 = (span[2] - 1) / 2;
  for (size_t i = 0; i < f.size(); ++i) {
    int a[3];
    split(i, a);
    double s = 0.0;
    for (const auto& [j, v] : src) {
      int b[3];
      split(j, b);
      s += v * K[(static_cast<size_t>(b[0] - a[0] + c0) * span[1] + (b[1] - a[1] + c1)) * span[2] + (b[2] - a[2] + c2)];
    }
    out.mutable_values()[i] = s;
  }
  return out;
}

double havin_mazya(const GridFunction& f, std::span<const double> x, const PotentialParams& p) {
  check_and(f, x, p);
  GridFunction u = riesz_field(f, p.alpha);
  for (double& v : u.mutable_values()) {
    v = p.psi(v);
    if (!std::isfinite(v)) return kInfinity;
  }
  return riesz(u, x, p.alpha, p.quad);
}

std::vector<double> havin_mazya(const RadialFunction& f, const std::vector<std::vector<double>>& xs, const PotentialParams& p,
                                const HavinMazyaOptions& opt) {
  for (const auto& x : xs) check_and(f, x, p);
  if (f.profile().empty()) return std::vector<double>(xs.size(), p.psi(0.0) == 0.0 ? 0.0 : kInfinity);
  const std::vector<double> diverged(xs.size(), kInfinity);
  const int n = p.n;
  const double w = unit_ball_volume(n);
  const double rho_max = f.radii().back();
  const double r_lo = rho_max * 1e-4, r_hi = rho_max * opt.outer_factor;
  const int steps = static_cast<int>(std::ceil(std::log10(r_hi / r_lo) * opt.per_decade));
  std::vector<double> b{0.0}, v;
  auto value_at = [&](double r) {
    std::vector<double> pt(static_cast<size_t>(n), 0.0);
    pt[0] = r;
    return p.psi(riesz(f, pt, p.alpha, p.quad));
  };
  double prev = value_at(0.5 * r_lo);
  if (!std::isfinite(prev)) return diverged;
  b.push_back(w * std::pow(r_lo, n));
  v.push_back(prev);
  for (int i = 0; i < steps; ++i) {
    double r0 = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / steps);
    double r1 = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i + 1) / steps);
    double val = std::min(prev, value_at(std::sqrt(r0 * r1)));
    if (!std::isfinite(val)) return diverged;
    b.push_back(w * std::pow(r1, n));
    v.push_back(val);
    prev = val;
  }
  RadialFunction inner(StepProfile(std::move(b), std::move(v)), n);
  // beyond the sampled range I_α f ≈ |f|_1 r^{α-n}/(n-α); that shell is treated as centred at x
  const auto k = make_kernel(p.alpha, p.alpha - n, p.psi);
  const double far = n * w / (n - p.alpha) * tail(k, f.profile().mass() / (n - p.alpha), r_hi, kInfinity, p.quad);
  if (!std::isfinite(far)) return diverged;
  std::vector<double> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(riesz(inner, x, p.alpha, p.quad) + far);
  return out;
}

double havin_mazya(const RadialFunction& f, std::span<const double> x, const PotentialParams& p, const HavinMazyaOptions& opt) {
  return havin_mazya(f, std::vector<std::vector<double>>{std::vector<double>(x.begin(), x.end())}, p, opt).front();
}

namespace {

using MassFn = std::function<double(std::span<const double>, double)>;

double maximal_search(const MassFn& mass, std::span<const double> x, std::span<const double> centroid, double Rs,
                      double r_min, int n, double alpha, const MaximalSearch& s) {
  std::vector<double> e(static_cast<size_t>(n), 0.0);
  double D = 0;
  for (int k = 0; k < n; ++k) D += (centroid[static_cast<size_t>(k)] - x[static_cast<size_t>(k)]) * (centroid[static_cast<size_t>(k)] - x[static_cast<size_t>(k)]);
  D = std::sqrt(D);
  if (D > 0) {
    for (int k = 0; k < n; ++k) e[static_cast<size_t>(k)] = (centroid[static_cast<size_t>(k)] - x[static_cast<size_t>(k)]) / D;
  } else {
    e[0] = 1.0;
  }
  const double w = unit_ball_volume(n);
  std::vector<double> c(static_cast<size_t>(n));
  auto obj = [&](double tau, double sr) {
    double r = std::abs(tau) + std::max(sr, 0.0);
    if (!(r > 0)) return 0.0;
    for (int k = 0; k < n; ++k) c[static_cast<size_t>(k)] = x[static_cast<size_t>(k)] + tau * e[static_cast<size_t>(k)];
    return std::pow(w * std::pow(r, n), alpha / n - 1.0) * mass(c, r);
  };
  const double tau_lo = -Rs, tau_hi = D + Rs;
  const double s_hi = 2.0 * (D + 2.0 * Rs);
  struct Cand {
    double v, tau, sr;
  };
  std::vector<Cand> cands;
  for (int i = 0; i < s.offsets; ++i) {
    double tau = tau_lo + (tau_hi - tau_lo) * i / (s.offsets - 1);
    if (i == 0 || std::abs(tau) < 0.5 * (tau_hi - tau_lo) / (s.offsets - 1)) {
      // keep centred balls in the candidate set
      cands.push_back({obj(0.0, r_min), 0.0, r_min});
    }
    for (int j = -1; j < s.radii; ++j) {
      double sr = j < 0 ? 0.0 : r_min * std::pow(s_hi / r_min, static_cast<double>(j) / (s.radii - 1));
      cands.push_back({obj(tau, sr), tau, sr});
    }
  }
  for (int j = 0; j < s.radii; ++j) {
    double sr = r_min * std::pow(s_hi / r_min, static_cast<double>(j) / (s.radii - 1));
    cands.push_back({obj(0.0, sr), 0.0, sr});
  }
  std::partial_sort(cands.begin(), cands.begin() + std::min<long>(s.starts, static_cast<long>(cands.size())), cands.end(),
                    [](const Cand& a, const Cand& b) { return a.v > b.v; });
  double best = cands.front().v;
  const double step_tau0 = (tau_hi - tau_lo) / (s.offsets - 1);
  for (int st = 0; st < std::min<int>(s.starts, static_cast<int>(cands.size())); ++st) {
    Cand cur = cands[static_cast<size_t>(st)];
    double dt = step_tau0, ds = std::max(cur.sr, r_min);
    const double floor = s.rel_step * (D + Rs);
    for (int it = 0; it < 4000 && (dt > floor || ds > floor); ++it) {
      bool moved = false;
      const double trials[8][2] = {{dt, 0}, {-dt, 0}, {0, ds}, {0, -ds}, {dt, -dt}, {-dt, dt}, {dt, dt}, {-dt, -dt}};
      for (const auto& tr : trials) {
        double nt = cur.tau + tr[0], ns = std::max(0.0, cur.sr + tr[1]);
        double v = obj(nt, ns);
        if (v > cur.v) {
          cur = {v, nt, ns};
          moved = true;
          break;
        }
      }
      if (!moved) {
        dt *= 0.5;
        ds *= 0.5;
      }
    }
    best = std::max(best, cur.v);
  }
  return best;
}

}  // namespace

double frac_maximal(const GridFunction& f, std::span<const double> x, double alpha, const MaximalSearch& s) {
  const int n = f.dim();
  if (!(alpha >= 0 && alpha < n)) throw std::invalid_argument("alpha must lie in [0, n)");
  check_point(x, n);
  std::vector<double> centroid(static_cast<size_t>(n), 0.0), c(static_cast<size_t>(n));
  size_t count = 0;
  for (size_t i = 0; i < f.size(); ++i) {
    if (f.values()[i] == 0.0) continue;
    f.center(i, c.data());
    for (int k = 0; k < n; ++k) centroid[static_cast<size_t>(k)] += c[static_cast<size_t>(k)];
    ++count;
  }
  if (count == 0) return 0.0;
  for (double& v : centroid) v /= static_cast<double>(count);
  double Rs = 0;
  for (size_t i = 0; i < f.size(); ++i) {
    if (f.values()[i] == 0.0) continue;
    f.center(i, c.data());
    double d = 0;
    for (int k = 0; k < n; ++k) d += (c[static_cast<size_t>(k)] - centroid[static_cast<size_t>(k)]) * (c[static_cast<size_t>(k)] - centroid[static_cast<size_t>(k)]);
    Rs = std::max(Rs, std::sqrt(d));
  }
  Rs += f.spacing() * std::sqrt(static_cast<double>(n));
  MassFn mass = [&](std::span<const double> y, double r) { return ball_mass(f, y, r); };
  return maximal_search(mass, x, centroid, Rs, 0.25 * f.spacing(), n, alpha, s);
}

double frac_maximal(const RadialFunction& f, std::span<const double> x, double alpha, const MaximalSearch& s) {
  const int n = f.dim();
  if (!(alpha >= 0 && alpha < n)) throw std::invalid_argument("alpha must lie in [0, n)");
  check_point(x, n);
  if (f.profile().empty()) return 0.0;
  std::vector<double> centroid(static_cast<size_t>(n), 0.0);
  const double Rs = f.radii().back();
  const ShellMass shells(f);
  MassFn mass = [&](std::span<const double> y, double r) { return shells(norm(y), r); };
  double r_min = Rs * 1e-6;
  if (f.radii().size() > 1) r_min = std::min(r_min, f.radii()[1] * 1e-3);
  return maximal_search(mass, x, centroid, Rs, r_min, n, alpha, s);
}

}  // namespace potlab
