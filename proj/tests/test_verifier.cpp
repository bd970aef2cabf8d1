#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "potlab/verifier.hpp"

#include <cmath>
#include <sstream>

using namespace potlab;

namespace {

ProfileSpec ball(double measure) { return {"ball", {{"kind", "indicator"}, {"measure", measure}}}; }

std::vector<double> grid(double lo, double hi, int per_decade) {
  int m = static_cast<int>(std::lround(std::log10(hi / lo) * per_decade));
  return log_grid(lo, hi, m + 1);
}

BoundSuiteConfig small_bound() {
  auto c = BoundSuiteConfig::defaults();
  c.psis = {{"p=2", MonotoneFn::identity()}, {"p=3", MonotoneFn::power(0.5)}};
  c.profiles = {ball(1.0), {"two_step", {{"kind", "steps"}, {"breaks", {0.0, 0.5, 2.0}}, {"values", {3.0, 1.0}}}}};
  c.common.t_grid = grid(1e-2, 1e2, 3);
  return c;
}

}  // namespace

TEST_CASE("dyadic constant fitting") {
  std::vector<double> r{1.0, 2.0, 0.5};
  CHECK(estimate_constant(r, r, BoundDirection::upper) == 1.0);
  CHECK(estimate_constant(r, r, BoundDirection::lower) == 1.0);
  std::vector<double> twice{2.0, 4.0, 1.0};
  CHECK(estimate_constant(twice, r, BoundDirection::upper) == 2.0);
  std::vector<double> mixed{1.0, 5.0, 0.25};
  CHECK(estimate_constant(mixed, r, BoundDirection::upper) == 4.0);
  CHECK(estimate_constant(mixed, r, BoundDirection::lower) == 0.5);
  CHECK(worst_ratio(mixed, r, BoundDirection::upper) == 2.5);

  std::vector<double> near{2.0 * (1 + 1e-14)}, one{1.0};
  CHECK(estimate_constant(near, one, BoundDirection::upper) == 2.0);
  std::vector<double> above{2.0 * (1 + 1e-9)};
  CHECK(estimate_constant(above, one, BoundDirection::upper) == 4.0);

  std::vector<double> zeros{0.0, 0.0};
  CHECK(estimate_constant(zeros, zeros, BoundDirection::upper) == 1.0);
  std::vector<double> pos{1.0, 0.0};
  CHECK(std::isinf(estimate_constant(pos, zeros, BoundDirection::upper)));
  std::vector<double> nan{NAN};
  CHECK_THROWS(estimate_constant(nan, one, BoundDirection::upper));
  CHECK_THROWS(estimate_constant(r, one, BoundDirection::upper));
}

TEST_CASE("inner ladder picks the balanced rung") {
  std::vector<double> rhs{1.0, 2.0}, lhs{3.0, 6.0}, inner{1.0, 2.0, 4.0};
  // rhs grows linearly with the inner constant
  std::vector<std::vector<double>> table;
  for (double c : inner) table.push_back({c * rhs[0], c * rhs[1]});
  auto fit = estimate_constants(lhs, inner, table, BoundDirection::upper);
  CHECK(fit.inner == 2.0);
  CHECK(fit.outer == 2.0);
  CHECK(fit.index == 1);
  CHECK(fit.raw == doctest::Approx(1.5));
  CHECK(fit.raw_by_inner.size() == 3);

  // every rung gives max(outer, inner) = 4; the rung closest to 1 wins
  std::vector<std::vector<double>> sqrt_table;
  for (double c : inner) sqrt_table.push_back({std::sqrt(c) * rhs[0], std::sqrt(c) * rhs[1]});
  auto tie = estimate_constants(lhs, inner, sqrt_table, BoundDirection::upper);
  CHECK(tie.inner == 1.0);
  CHECK(tie.outer == 4.0);

  std::vector<double> low{1.0, 0.5, 0.25};
  std::vector<std::vector<double>> lt;
  for (double c : low) lt.push_back({rhs[0] / c, rhs[1] / c});
  std::vector<double> small{0.3, 0.6};
  auto lf = estimate_constants(small, low, lt, BoundDirection::lower);
  // outer = floor2(0.3 c): 0.25, 0.125, 0.0625 against inner 1, 0.5, 0.25
  CHECK(lf.inner == 1.0);
  CHECK(lf.outer == 0.25);
}

TEST_CASE("weighted maximal supremum against brute force") {
  StepProfile f({0.0, 0.1, 1.0, 5.0}, {10.0, 2.0, 0.3});
  for (double c : {0.0, 0.2, 0.5, 0.9}) {
    for (double t : {0.0, 0.05, 0.1, 0.7, 3.0, 5.0, 20.0}) {
      double brute = 0.0;
      auto ss = log_grid(std::max(t, 1e-9), 1e4, 20001);
      for (double b : f.breaks())
        if (b >= t) ss.push_back(b);
      for (double s : ss) brute = std::max(brute, std::pow(s, c) * f.maximal(s));
      double exact = sup_weighted_maximal(f, c, t);
      CHECK(exact >= brute * (1 - 1e-12));
      CHECK(exact <= brute * (1 + 1e-5));
    }
  }
  CHECK(sup_weighted_maximal(StepProfile(), 0.3, 1.0) == 0.0);
  CHECK(sup_weighted_maximal(f, 0.0, 0.0) == 10.0);
  CHECK_THROWS(sup_weighted_maximal(f, 1.0, 1.0));
}

TEST_CASE("maximal constant of an interval in one dimension") {
  // (M 1_[-1,1])*(t) = 4/(t+2) beyond t = 2 while f**(t) = 2/t, so the ratio climbs to 2
  auto c = MaximalSuiteConfig::defaults();
  c.n = 1;
  c.alphas = {0.0};
  c.profiles = {ball(2.0)};
  c.common.t_grid = grid(1e-1, 1e4, 2);
  auto r = verify_maximal(c);
  const auto& m = r.check("remax/alpha=0");
  CHECK(m.constants.at("C_M") == 2.0);
  CHECK(m.raw > 1.99);
  CHECK(m.raw <= 2.0);
  CHECK(m.pass);
}

TEST_CASE("bound suites on a small family") {
  auto c = small_bound();
  auto up = verify_upper_bound(c);
  CHECK(up.pass);
  const auto& u = up.check("upper");
  CHECK(u.samples.size() == 4 * c.common.t_grid.size());
  CHECK(u.violations == 0);
  CHECK(u.stability < 0.05);
  for (const auto& s : u.samples) CHECK(s.lhs <= u.constants.at("C_W1") * s.rhs * (1 + 1e-12));

  auto lo = verify_sharpness(c);
  CHECK(lo.pass);
  CHECK(lo.check("sharpness").constants.at("C_W3") > 0);

  c.psis.push_back({"too_flat", MonotoneFn::power(0.1)});
  auto ex = verify_upper_bound(c);
  CHECK(ex.excluded.size() == 2);
  CHECK(ex.pass);

  c.common.t_grid.clear();
  CHECK_THROWS_AS(verify_upper_bound(c), std::invalid_argument);
}

TEST_CASE("orlicz and lorentz suites flag their preconditions") {
  auto o = OrliczSuiteConfig::defaults();
  o.Gs = {{"power_2", NFunction::power(2)}};
  o.profiles = {ball(1.0)};
  o.common.t_grid = grid(1e-2, 1e2, 8);
  auto r = verify_orlicz_bounds(o);
  CHECK(r.pass);
  CHECK(r.check("weak_lorentz_one/q=1/power_2").pass);
  o.alpha = 2.0;
  auto ex = verify_orlicz_bounds(o);
  CHECK(ex.excluded.size() == 3);
  CHECK_THROWS(ex.check("finite_support_reduction/power_2"));

  auto l = LorentzSuiteConfig::defaults();
  l.alpha = 1.0;
  CHECK_THROWS_AS(verify_lorentz_mappings(l), std::invalid_argument);
}

TEST_CASE("appendix identities") {
  auto c = AppendixSuiteConfig::defaults();
  c.jensen_cases = 20;
  auto r = verify_appendix(c);
  CHECK(r.pass);
  CHECK(r.check("ginv_tail_identity").raw <= 1e-10);
  CHECK(r.check("ginv_tail_power").raw <= 1e-8);
  CHECK(r.check("zygmund_inverse").constants.at("C") < 4);
  CHECK(r.check("zygmund_loglog_inverse").constants.at("C") < 4);
  CHECK(r.check("jensen").violations == 0);
}

TEST_CASE("reports are deterministic and serialize") {
  nlohmann::json cfg = {{"psis", {{{"name", "id"}, {"psi", MonotoneFn::identity().to_json()}}}},
                        {"profiles", {{{"name", "ball"}, {"kind", "indicator"}, {"measure", 1.0}}}},
                        {"t_grid", {{"lo", 0.01}, {"hi", 100.0}, {"per_decade", 2}}}};
  auto a = run_suite("upper_bound", cfg);
  auto b = run_suite("upper_bound", cfg);
  CHECK(a.to_json().dump() == b.to_json().dump());
  std::ostringstream ca, cb;
  a.write_csv(ca);
  b.write_csv(cb);
  CHECK(ca.str() == cb.str());
  CHECK(ca.str().rfind("suite,check,case,x,lhs,rhs,ratio\n", 0) == 0);
  auto j = a.to_json();
  CHECK(j["metadata"].contains("stability_threshold"));
  CHECK(j["checks"][0]["samples"].size() == 9);

  CHECK_THROWS(run_suite("nope", nullptr));
  CHECK_THROWS(run_suite("upper_bound", {{"bogus", 1}}));
  CHECK_THROWS(ProfileSpec::from_json({{"kind", "spline"}}));
  CHECK(suite_names().size() == 7);
}

TEST_CASE("profile specs") {
  auto p = ProfileSpec::from_json({{"kind", "power_cutoff"}, {"a", 0.5}, {"eps", 1e-2}, {"support", 1.0}});
  CHECK(p.build(1).size() > p.build(0).size());
  auto s = ProfileSpec::from_json({{"kind", "indicator"}, {"measure", 2.0}, {"measure_scale", 3.0}, {"scale", 0.5}});
  CHECK(s.build(0).support() == 6.0);
  CHECK(s.build(0).sup() == 0.5);
}
