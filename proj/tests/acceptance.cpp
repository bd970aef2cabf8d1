#include "potlab/geometry.hpp"
#include "potlab/hardy.hpp"
#include "potlab/norms.hpp"
#include "potlab/potentials.hpp"
#include "potlab/radial_pde.hpp"
#include "potlab/rearrangement.hpp"
#include "potlab/verifier.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

using namespace potlab;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double time_limit, const std::function<Outcome()>& body) {
  auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool in_time = secs < time_limit;
  bool ok = o.pass && in_time;
  failures += !ok;
  std::printf("%s %2d %s: %s (%.2f s%s)\n", ok ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs, in_time ? "" : ", over time limit");
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

PotentialParams params(double alpha, int n, MonotoneFn psi = MonotoneFn::identity()) {
  PotentialParams p;
  p.alpha = alpha;
  p.n = n;
  p.psi = std::move(psi);
  return p;
}

StepProfile random_profile(std::mt19937_64& rng, int steps) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> b{0.0}, v;
  double level = 5 * u(rng);
  for (int k = 0; k < steps; ++k) {
    b.push_back(b.back() + u(rng));
    v.push_back(level);
    level *= u(rng);
  }
  return StepProfile(b, v);
}

GridFunction random_grid(std::mt19937_64& rng, int dim, int side) {
  std::uniform_int_distribution<int> lv(-8, 8);
  std::vector<int> shape(static_cast<size_t>(dim), side);
  size_t count = 1;
  for (int s : shape) count *= static_cast<size_t>(s);
  std::vector<double> v(count);
  for (double& x : v) x = 0.25 * lv(rng);
  return GridFunction(dim, shape, 0.1, std::vector<double>(static_cast<size_t>(dim), -0.5), v);
}

size_t distinct_cases(const Check& c) {
  std::set<std::string> names;
  for (const auto& s : c.samples) names.insert(s.case_name);
  return names.size();
}

Outcome bound_suite(const VerificationReport& r, const std::string& id, bool lower) {
  const auto& c = r.check(id);
  bool constants_ok = !c.constants.empty();
  for (const auto& [k, v] : c.constants) constants_ok = constants_ok && std::isfinite(v) && v > 0;
  size_t cases = distinct_cases(c);
  bool ok = r.pass && c.pass && constants_ok && c.violations == 0 && c.stability < 0.05 && cases >= (lower ? 1u : 20u);
  std::ostringstream d;
  d << cases << " cases, " << c.samples.size() << " samples";
  for (const auto& [k, v] : c.constants) d << ", " << k << "=" << v;
  d << ", violations=" << c.violations << ", stability=" << c.stability;
  return {ok, d.str()};
}

}  // namespace

int main() {
  criterion(1, "riesz closed form", 1.0, [] {
    RadialFunction ball(StepProfile::indicator(unit_ball_volume(3)), 3);
    double x[3] = {0, 0, 0};
    double v = riesz(ball, x, 1.0);
    double err = std::abs(v / (2 * pi) - 1);
    return Outcome{err <= 5e-3, fmt("I_1 = %.12g, rel err %.2e", v, err)};
  });

  criterion(2, "wolff at alpha/2 equals riesz", 10.0, [] {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.5, 2.5);
    double worst = 0;
    int points = 0;
    for (int n : {2, 3}) {
      RadialFunction f(StepProfile({0, 0.4, 1.5, 3.0}, {4, 1.5, 0.2}), n);
      for (int i = 0; i < 20; ++i) {
        std::vector<double> x(static_cast<size_t>(n));
        for (double& c : x) c = u(rng);
        double w = wolff(f, x, params(0.5, n)), r = riesz(f, x, 1.0);
        worst = std::max(worst, std::abs(w - r) / r);
        ++points;
      }
    }
    return Outcome{worst <= 1e-3, fmt("%d points, max rel diff %.2e", points, worst)};
  });

  criterion(3, "upper bound suite", 300.0, [] { return bound_suite(verify_upper_bound(BoundSuiteConfig::defaults()), "upper", false); });

  criterion(4, "sharpness on radial data", 300.0, [] { return bound_suite(verify_sharpness(BoundSuiteConfig::defaults()), "sharpness", true); });

  criterion(5, "hardy equality witness and sweeps", 60.0, [] {
    auto w = hardy2_check(StepProfile::indicator(1.0), 1, 1);
    bool eq = std::abs(w.lhs - 0.5) <= 1e-10 && std::abs(w.rhs - 0.5) <= 1e-10;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    int v1 = 0, v2 = 0;
    for (int i = 0; i < 100; ++i) {
      auto f = random_profile(rng, 1 + i % 8);
      double q = 1 + 3 * u(rng);
      v1 += !hardy1_check(f, -0.9 + (q - 0.1) * u(rng) * 0.98, q).holds;
      v2 += !hardy2_check(f, q - 1 + 3 * u(rng) + 1e-3, q).holds;
    }
    return Outcome{eq && v1 == 0 && v2 == 0, fmt("lhs=%.15g rhs=%.15g, violations %d/%d of 100", w.lhs, w.rhs, v1, v2)};
  });

  criterion(6, "power-function identities", 120.0, [] {
    auto r = verify_appendix(AppendixSuiteConfig::defaults());
    const auto& id = r.check("ginv_tail_identity");
    const auto& pw = r.check("ginv_tail_power");
    bool ok = id.raw <= 1e-10 && pw.raw <= 1e-8 && id.constants.at("c_G1") == 1.0 && id.constants.at("c_G2") == 1.0;
    return Outcome{ok, fmt("identity err %.2e, power err %.2e", id.raw, pw.raw)};
  });

  criterion(7, "radial pde", 60.0, [] {
    RadialProblem pr;
    pr.n = 3;
    pr.G = NFunction::power(2);
    pr.f = StepProfile::indicator(10.0);
    auto u = solve_radial(pr);
    double sup = 0;
    for (int i = 0; i < 100; ++i) {
      double r = i / 99.0;
      sup = std::max(sup, std::abs(u(r) - (1 - r * r) / 6));
    }
    double worst = 0;
    for (double p : {2.0, 3.0}) {
      pr.G = NFunction::power(p);
      double expect = std::pow(3 * unit_ball_volume(3), -1 / (p - 1));
      auto rep = estimate_check(pr, {0.0}, {0.25, 0.5, 1.0}, true);
      for (const auto& s : rep.samples) worst = std::max(worst, std::abs(s.u / s.W / expect - 1));
    }
    return Outcome{sup <= 1e-6 && worst <= 1e-3, fmt("sup err %.2e, ratio rel err %.2e", sup, worst)};
  });

  criterion(8, "rearrangement exactness", 60.0, [] {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> lam(0.0, 2.0);
    auto psi = MonotoneFn::table({0.1, 0.5, 1.0, 1.5}, {0.0, 0.3, 0.3, 2.0});
    int mismatches = 0, psi_mismatches = 0;
    for (int trial = 0; trial < 50; ++trial) {
      auto g = random_grid(rng, 1 + trial % 3, 6 + trial % 5);
      auto p = decreasing_rearrangement(g);
      for (int i = 0; i < 100; ++i) {
        double l = lam(rng);
        mismatches += distribution_function(g, l) != distribution_function(p, l);
      }
      auto h = g;
      for (double& v : h.mutable_values()) v = psi(std::abs(v));
      auto a = psi_rearrangement(p, psi), b = decreasing_rearrangement(h);
      psi_mismatches += a.breaks() != b.breaks() || a.values() != b.values();
    }
    return Outcome{mismatches == 0 && psi_mismatches == 0, fmt("50 grids, %d level mismatches, %d psi mismatches", mismatches, psi_mismatches)};
  });

  criterion(9, "lorentz closed forms", 10.0, [] {
    LorentzParams lp;
    lp.p = 2;
    lp.q = 1;
    double v = lorentz_norm(StepProfile::indicator(1.0), lp);
    std::mt19937_64 rng(9);
    int inexact = 0;
    for (int trial = 0; trial < 50; ++trial) {
      auto f = random_profile(rng, 6);
      for (double p : {0.5, 1.0, 2.0, 3.0}) {
        double oracle = 0;
        for (size_t k = 0; k < f.size(); ++k) oracle = std::max(oracle, std::pow(f.breaks()[k + 1], 1 / p) * f.values()[k]);
        LorentzParams weak;
        weak.p = p;
        weak.q = kInfinity;
        inexact += lorentz_norm(f, weak) != oracle;
      }
    }
    return Outcome{std::abs(v - 2) <= 1e-10 && inexact == 0, fmt("norm %.15g, %d inexact weak-type values", v, inexact)};
  });

  criterion(10, "zygmund inverse equivalence", 60.0, [] {
    auto r = verify_appendix(AppendixSuiteConfig::defaults());
    const auto& a = r.check("zygmund_inverse");
    const auto& b = r.check("zygmund_loglog_inverse");
    return Outcome{a.constants.at("C") < 4 && b.constants.at("C") < 4, fmt("C = %.4g, loglog C = %.4g", a.constants.at("C"), b.constants.at("C"))};
  });

  criterion(11, "havin-mazya dominates wolff", 300.0, [] {
    auto c = HmWolffSuiteConfig::defaults();
    auto r = verify_hm_wolff(c);
    const auto& ch = r.check("hm_wolff");
    bool ok = r.pass && ch.violations == 0 && c.cases.size() >= 5 && c.radii.size() >= 10 && ch.samples.size() == c.cases.size() * c.radii.size();
    return Outcome{ok, fmt("%zu cases x %zu points, violations %d, worst ratio %.3g", c.cases.size(), c.radii.size(), ch.violations, ch.raw)};
  });

  criterion(12, "lorentz mapping constant", 300.0, [] {
    auto c = LorentzSuiteConfig::defaults();
    auto r = verify_lorentz_mappings(c);
    const auto& ch = r.check("lorentz_mapping");
    bool ok = ch.pass && c.profiles.size() >= 10 && ch.stability < 0.05 && c.sigma == 2 && c.rho == 1 && c.beta == 1 && c.alpha == 0.5 && c.n == 3;
    return Outcome{ok, fmt("%zu profiles, c=%g, gamma=%g, stability %.2e", c.profiles.size(), ch.constants.at("c"), ch.constants.at("gamma"), ch.stability)};
  });

  criterion(13, "divergent potential is infinite", 10.0, [] {
    auto psi = MonotoneFn::power(1.0 / 3);
    RadialFunction ball(StepProfile::indicator(unit_ball_volume(3)), 3);
    double x[3] = {0.3, 0, 0};
    double v = wolff(ball, x, params(1, 3, psi));
    auto g = sample_on_grid(ball, {12, 12, 12}, 0.2, {-1.2, -1.2, -1.2});
    double vg = wolff(g, x, params(1, 3, psi));
    bool ok = std::isinf(v) && v > 0 && std::isinf(vg) && vg > 0 && finiteness_check(psi, 1, 3) == Finiteness::infinite;
    return Outcome{ok, fmt("radial %g, grid %g", v, vg)};
  });

  return failures == 0 ? 0 : 1;
}
