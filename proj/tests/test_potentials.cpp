#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "potlab/geometry.hpp"
#include "potlab/potentials.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace potlab;
using std::numbers::pi;

namespace {

double gk(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 25, 1e-12);
}

// I_1 1_{B(0,1)} in R^3 at distance d. A shell of radius ρ contributes (2πρ/d)·ln|(d+ρ)/(d−ρ)| to
// ∫_B |x−y|^{-2} dy, and ((ρ²−d²)/2)·ln|(d+ρ)/(d−ρ)| + dρ is an antiderivative in ρ.
double riesz_ball_oracle(double d) {
  double lg = d == 1.0 ? 0.0 : (1 - d * d) / 2 * std::log(std::abs((1 + d) / (1 - d)));
  return 0.5 * 2 * pi / d * (lg + d);
}

RadialFunction unit_ball(int n) { return RadialFunction(StepProfile::indicator(unit_ball_volume(n)), n); }

GridFunction ball_grid(int n, double h, double radius, double value = 1.0) {
  int side = static_cast<int>(std::ceil(2 * radius / h)) + 2;
  std::vector<int> shape(static_cast<size_t>(n), side);
  std::vector<double> origin(static_cast<size_t>(n), -0.5 * side * h);
  RadialFunction f(StepProfile::indicator(unit_ball_volume(n) * std::pow(radius, n), value), n);
  return sample_on_grid(f, shape, h, origin);
}

PotentialParams params(double alpha, int n, MonotoneFn psi = MonotoneFn::identity(), double R = kInfinity) {
  PotentialParams p;
  p.alpha = alpha;
  p.n = n;
  p.psi = std::move(psi);
  p.R = R;
  return p;
}

}  // namespace

TEST_CASE("ball mass examples") {
  auto f = unit_ball(2);
  double o[2] = {0, 0}, a[2] = {1.5, 0}, b[2] = {1, 0};
  CHECK(ball_mass(f, o, 2.0) == doctest::Approx(pi).epsilon(1e-14));
  CHECK(ball_mass(f, a, 0.5) == doctest::Approx(0.0));
  CHECK(ball_mass(f, b, 1.0) == doctest::Approx(2 * pi / 3 - std::sqrt(3.0) / 2).epsilon(1e-12));
  CHECK_THROWS_AS(ball_mass(f, o, 0.0), std::invalid_argument);
  auto g = ball_grid(2, 0.01, 1.0);
  CHECK(ball_mass(g, b, 1.0) == doctest::Approx(2 * pi / 3 - std::sqrt(3.0) / 2).epsilon(0.01));
}

TEST_CASE("riesz of the unit ball at the origin") {
  double o3[3] = {0, 0, 0}, o2[2] = {0, 0};
  CHECK(riesz(unit_ball(3), o3, 1.0) == doctest::Approx(2 * pi).epsilon(1e-9));
  CHECK(riesz(unit_ball(2), o2, 1.0) == doctest::Approx(2 * pi).epsilon(1e-9));
}

TEST_CASE("riesz against the shell oracle") {
  auto f = unit_ball(3);
  for (double d : {0.3, 0.7, 0.99, 1.0, 1.2, 2.0, 5.0}) {
    double x[3] = {0, d, 0};
    CHECK(riesz(f, x, 1.0) == doctest::Approx(riesz_ball_oracle(d)).epsilon(1e-8));
  }
}

TEST_CASE("wolff examples") {
  double o[3] = {0, 0, 0};
  auto f = unit_ball(3);
  CHECK(wolff(f, o, params(1, 3)) == doctest::Approx(2 * pi).epsilon(1e-9));
  CHECK(wolff_truncated(f, o, params(1, 3, MonotoneFn::identity(), 1.0)) == doctest::Approx(2 * pi / 3).epsilon(1e-9));
  CHECK(wolff_truncated(f, o, params(1, 3, MonotoneFn::identity(), 1e-12)) == doctest::Approx(0.0));
  CHECK(std::isinf(wolff(f, o, params(1, 3, MonotoneFn::power(1.0 / 3)))));
  auto g = ball_grid(3, 0.2, 1.0);
  CHECK(std::isinf(wolff(g, o, params(1, 3, MonotoneFn::power(1.0 / 3)))));
  // truncation at a large radius reproduces the full potential
  auto psi = MonotoneFn::power(0.5);
  double w = wolff(f, o, params(0.5, 3, psi));
  CHECK(wolff_truncated(f, o, params(0.5, 3, psi, 1e9)) == doctest::Approx(w).epsilon(1e-6));
}

TEST_CASE("finiteness criterion") {
  CHECK(finiteness_check(MonotoneFn::power(1.0), 1, 3) == Finiteness::finite);
  CHECK(finiteness_check(MonotoneFn::power(1.0 / 3), 1, 3) == Finiteness::infinite);
  CHECK(finiteness_check(MonotoneFn::power(1.0, 0.0), 1, 3) == Finiteness::finite);
  CHECK(finiteness_check(MonotoneFn::table({1.0}, {0.0}), 1, 3) == Finiteness::finite);
  CHECK(finiteness_check(NFunction::zygmund(2, 1, 10).g_inverse(), 0.5, 3) == Finiteness::finite);
  CHECK(std::string(to_string(Finiteness::unknown)) == "unknown");
}

TEST_CASE("wolff at alpha/2 is riesz at alpha") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2, 2);
  RadialFunction f(StepProfile({0, 0.5, 2.0, 3.0}, {3, 1, 0.25}), 3);
  for (int i = 0; i < 10; ++i) {
    double x[3] = {u(rng), u(rng), u(rng)};
    double w = wolff(f, x, params(0.5, 3));
    CHECK(w == doctest::Approx(riesz(f, x, 1.0)).epsilon(1e-9));
  }
  auto g = ball_grid(3, 0.25, 1.0);
  for (int i = 0; i < 5; ++i) {
    double x[3] = {u(rng), u(rng), u(rng)};
    CHECK(wolff(g, x, params(0.5, 3)) == doctest::Approx(riesz(g, x, 1.0)).epsilon(1e-9));
  }
}

TEST_CASE("grid and radial inputs agree under refinement") {
  auto f = unit_ball(3);
  auto g = ball_grid(3, 0.05, 1.0);
  double x[3] = {1.6, 0.3, 0.0}, y[3] = {0.2, 0.1, 0.0};
  CHECK(riesz(g, x, 1.0) == doctest::Approx(riesz(f, x, 1.0)).epsilon(0.01));
  CHECK(riesz(g, y, 1.0) == doctest::Approx(riesz(f, y, 1.0)).epsilon(0.01));
  auto p = params(0.5, 3, MonotoneFn::power(0.5));
  CHECK(wolff(g, x, p) == doctest::Approx(wolff(f, x, p)).epsilon(0.02));
  CHECK(wolff(g, y, p) == doctest::Approx(wolff(f, y, p)).epsilon(0.02));
  auto z = params(0.5, 3, NFunction::zygmund(2, 1, 10).g_inverse());
  CHECK(wolff(g, x, z) == doctest::Approx(wolff(f, x, z)).epsilon(0.02));
}

TEST_CASE("homogeneity of the power case") {
  RadialFunction f(StepProfile({0, 1.0, 2.0}, {2, 1}), 3);
  for (double p : {1.5, 2.0, 3.0}) {
    auto psi = MonotoneFn::power(1 / (p - 1));
    auto prm = params(0.5, 3, psi);
    double x[3] = {0.4, 0.1, -0.2};
    double lam = 3.7;
    RadialFunction g(f.profile().scaled(lam), 3);
    CHECK(wolff(g, x, prm) == doctest::Approx(std::pow(lam, 1 / (p - 1)) * wolff(f, x, prm)).epsilon(1e-9));
  }
}

TEST_CASE("monotonicity in f") {
  auto psi = NFunction::zygmund(2, 1, 10).g_inverse();
  RadialFunction f(StepProfile({0, 1.0, 2.0}, {2, 1}), 3);
  RadialFunction g(StepProfile({0, 1.5, 2.5}, {2, 1.2}), 3);
  for (double d : {0.0, 0.5, 1.0, 3.0}) {
    double x[3] = {d, 0, 0};
    CHECK(wolff(f, x, params(0.5, 3, psi)) <= wolff(g, x, params(0.5, 3, psi)));
    CHECK(riesz(f, x, 1.0) <= riesz(g, x, 1.0));
  }
}

TEST_CASE("truncated potential is bounded by the maximal function") {
  auto f = unit_ball(3);
  const double w = unit_ball_volume(3);
  for (double alpha : {0.5, 1.0}) {
    for (double R : {0.25, 0.5, 1.0}) {
      auto psi = MonotoneFn::power(0.5);
      auto p = params(alpha, 3, psi, R);
      for (double d : {0.0, 0.5, 1.5}) {
        double x[3] = {d, 0, 0};
        double M = frac_maximal(f, x, alpha);
        double bound = std::pow(R, alpha) / alpha * psi(std::pow(w, 1 - alpha / 3) * M);
        CHECK(wolff_truncated(f, x, p) <= bound * (1 + 1e-6));
      }
    }
  }
}

TEST_CASE("tail of the potential beyond R") {
  RadialFunction f(StepProfile({0, 0.5, 2.0}, {3, 1}), 3);
  const int n = 3;
  const double w = unit_ball_volume(n);
  for (double p : {2.0, 3.0}) {
    auto psi = MonotoneFn::power(1 / (p - 1));
    for (double alpha : {0.5, 1.0}) {
      if (alpha * p >= n) continue;
      for (double R : {0.3, 1.0}) {
        const double c1 = std::pow(w, -alpha / n) / n, c2 = std::pow(w, 1 - alpha / n);
        auto integrand = [&](double s) {
          return std::pow(s, alpha / n - 1) * psi(c2 * std::pow(s, alpha / n) * f.profile().maximal(s));
        };
        double s0 = w * std::pow(R, n);
        double rhs = 0;
        std::vector<double> cuts{s0};
        for (double t : f.profile().breaks())
          if (t > s0) cuts.push_back(t);
        for (size_t i = 0; i + 1 < cuts.size(); ++i) rhs += gk(integrand, cuts[i], cuts[i + 1]);
        // beyond the support f**(s) = |f|_1 / s and the integrand is a pure power
        const double rho = 1 / (p - 1), kap = alpha / n + (alpha / n - 1) * rho;
        rhs += std::pow(c2 * f.profile().mass(), rho) * std::pow(cuts.back(), kap) / (-kap);
        rhs *= c1;
        for (double d : {0.0, 0.7, 2.0}) {
          double x[3] = {d, 0, 0};
          auto prm = params(alpha, n, psi, R);
          double lhs = wolff(f, x, prm) - wolff_truncated(f, x, prm);
          CHECK(lhs <= rhs * (1 + 1e-8));
        }
      }
    }
  }
}

TEST_CASE("fractional maximal examples") {
  RadialFunction f(StepProfile::indicator(2.0), 1);
  double a[1] = {3.0}, b[1] = {0.0}, c[1] = {0.5};
  CHECK(frac_maximal(f, a, 0.0) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(frac_maximal(f, b, 0.5) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  CHECK(frac_maximal(f, c, 0.0) == doctest::Approx(1.0).epsilon(1e-6));
  GridFunction g(1, {40}, 0.1, {-2.0}, std::vector<double>(40, 0.0));
  for (int i = 10; i < 30; ++i) g.mutable_values()[static_cast<size_t>(i)] = 1.0;
  CHECK(frac_maximal(g, a, 0.0) == doctest::Approx(0.5).epsilon(0.02));
  CHECK(frac_maximal(g, b, 0.5) == doctest::Approx(std::sqrt(2.0)).epsilon(0.02));
  GridFunction zero(1, {4}, 0.1, {0.0}, std::vector<double>(4, 0.0));
  CHECK(frac_maximal(zero, b, 0.5) == 0.0);
}

TEST_CASE("truncated riesz is bounded by R times the averaging maximal function") {
  auto f = unit_ball(3);
  const double w = unit_ball_volume(3);
  for (double R : {0.01, 0.1, 0.5, 2.0}) {
    for (double d : {0.0, 0.5, 1.2}) {
      double x[3] = {d, 0, 0};
      CHECK(riesz_truncated(f, x, 1.0, R) <= w * R * frac_maximal(f, x, 0.0) * (1 + 1e-9));
    }
  }
  // the literal form without ω_n fails for small R at the centre of the ball
  double o[3] = {0, 0, 0};
  CHECK(riesz_truncated(f, o, 1.0, 0.01) > 0.01 * frac_maximal(f, o, 1.0));
}

TEST_CASE("havin-mazya potential") {
  auto f = unit_ball(3);
  double o[3] = {0, 0, 0};
  double v = havin_mazya(f, o, params(1, 3));
  CHECK(v == doctest::Approx(std::pow(pi, 4) / 2).epsilon(0.02));
  // grid path: ψ(I_α f) lives on the box [-2.4, 2.4]^3, so compare with I_1(1_box u)(0) where
  // u = I_1 f; in polar form (1/2)∫_{S^2} U(ρ_box(θ)) dθ with U(ρ) = ∫_0^ρ u.
  auto g = ball_grid(3, 0.15, 1.0);
  REQUIRE(g.shape()[0] == 16);
  GridFunction big(3, {32, 32, 32}, 0.15, {-2.4, -2.4, -2.4}, std::vector<double>(32768, 0.0));
  {
    RadialFunction fb(StepProfile::indicator(unit_ball_volume(3)), 3);
    auto s = sample_on_grid(fb, {32, 32, 32}, 0.15, {-2.4, -2.4, -2.4});
    big = s;
  }
  double vg = havin_mazya(big, o, params(1, 3));
  std::vector<double> rr{0.0}, UU{0.0};
  for (int i = 1; i <= 420; ++i) {
    double r = 4.2 * i / 420;
    double prev = rr.back();
    double mid = 0.5 * (prev + r);
    UU.push_back(UU.back() + (r - prev) / 6 * (riesz_ball_oracle(std::max(prev, 1e-9)) + 4 * riesz_ball_oracle(mid) + riesz_ball_oracle(r)));
    rr.push_back(r);
  }
  auto U = [&](double r) {
    size_t i = std::min<size_t>(static_cast<size_t>(r / 4.2 * 420), 419);
    double t = (r - rr[i]) / (rr[i + 1] - rr[i]);
    return UU[i] + t * (UU[i + 1] - UU[i]);
  };
  const int dirs = 20000;
  double acc = 0;
  for (int i = 0; i < dirs; ++i) {
    double z = 1 - (2.0 * i + 1) / dirs, rxy = std::sqrt(1 - z * z), phi = i * pi * (3 - std::sqrt(5.0));
    double e[3] = {rxy * std::cos(phi), rxy * std::sin(phi), z};
    double m = std::max({std::abs(e[0]), std::abs(e[1]), std::abs(e[2])});
    acc += U(2.4 / m);
  }
  double oracle = 0.5 * 4 * pi * acc / dirs;
  CHECK(vg == doctest::Approx(oracle).epsilon(0.03));
  CHECK(vg < std::pow(pi, 4) / 2);
  RadialFunction empty(StepProfile(), 3);
  CHECK(havin_mazya(empty, o, params(1, 3)) == 0.0);
  // pointwise lower bound by the wolff potential of a rescaled f
  auto psi = MonotoneFn::power(0.5);
  const double alpha = 0.5, n = 3;
  const double scale = std::pow(2.0, alpha - n) / (n - alpha);
  RadialFunction fs(f.profile().scaled(scale), 3);
  for (double d : {0.0, 0.5, 1.5, 3.0}) {
    double x[3] = {d, 0, 0};
    double lower = unit_ball_volume(3) * wolff(fs, x, params(alpha, 3, psi));
    CHECK(lower <= havin_mazya(f, x, params(alpha, 3, psi)));
  }
}

TEST_CASE("params from json") {
  auto p = PotentialParams::from_json(nlohmann::json::parse(R"({"alpha":0.5,"n":3,"psi":{"family":"power","exponent":0.5},"R":2})"));
  CHECK(p.alpha == 0.5);
  CHECK(p.R == 2.0);
  CHECK(p.psi(4.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(PotentialParams::from_json(nlohmann::json::parse(R"({"alpha":3,"n":3})")), std::invalid_argument);
  CHECK_THROWS_AS(PotentialParams::from_json(nlohmann::json::parse(R"({"alpha":1,"n":3,"beta":1})")), std::invalid_argument);
}
