#pragma once

#include "potlab/monotone.hpp"
#include "potlab/potentials.hpp"
#include "potlab/rearrangement.hpp"

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace potlab {

enum class BoundDirection { upper, lower };

// Smallest (upper) or largest (lower) power of two c with lhs <= c rhs, resp. c rhs <= lhs, on all
// samples. Ratios within 1e-12 of a power of two snap to it. Samples with lhs = rhs = 0 are
// skipped; with no informative sample the result is 1.
double estimate_constant(std::span<const double> lhs, std::span<const double> rhs, BoundDirection d);
// max lhs/rhs (upper) or min lhs/rhs (lower) over the informative samples.
double worst_ratio(std::span<const double> lhs, std::span<const double> rhs, BoundDirection d);

struct InnerLadderFit {
  double outer = 1.0;
  double inner = 1.0;
  double raw = 0.0;
  size_t index = 0;
  std::vector<double> raw_by_inner;
};

// Inner-scaling mode: rhs_by_inner[k] are the rhs samples with inner constant inner[k].
// Upper bounds take the rung minimizing max(outer, inner); lower bounds the one maximizing
// min(outer, inner). Ties go to the rung closest to 1.
InnerLadderFit estimate_constants(std::span<const double> lhs, std::span<const double> inner,
                                  const std::vector<std::vector<double>>& rhs_by_inner, BoundDirection d);

// sup_{s > t} s^c f**(s) for c in [0, 1), exact on steps.
double sup_weighted_maximal(const StepProfile& f, double c, double t);

// Radially decreasing datum given as its rearrangement; "level" doubles the mesh of power cutoffs.
struct ProfileSpec {
  std::string name;
  nlohmann::json spec;

  StepProfile build(int level) const;
  static ProfileSpec from_json(const nlohmann::json& j);
};

struct PsiSpec {
  std::string name;
  MonotoneFn psi;
};

struct Sample {
  std::string case_name;
  double x = 0.0;  // t, radius, or point index depending on the check
  double lhs = 0.0;
  double rhs = 0.0;
};

struct Check {
  std::string id;
  BoundDirection direction = BoundDirection::upper;
  std::vector<Sample> samples;
  std::map<std::string, double> constants;
  double raw = 0.0;          // worst raw ratio (or error) at the fitted inner constant
  double raw_refined = 0.0;  // same quantity under 2x refinement
  double stability = 0.0;
  bool gate_stability = true;
  std::vector<double> ladder_raw;  // raw ratio per inner-constant rung, when fitted on a ladder
  size_t ladder_index = 0;
  int violations = 0;
  bool pass = true;
  std::string note;
};

struct VerificationReport {
  std::string suite;
  nlohmann::json config;
  std::vector<Check> checks;
  std::vector<std::string> excluded;
  double stability_threshold = 0.05;
  bool pass = true;

  const Check& check(const std::string& id) const;
  nlohmann::json to_json() const;
  // suite,check,case,x,lhs,rhs,ratio
  void write_csv(std::ostream& out) const;
};

struct SuiteCommon {
  std::vector<double> t_grid;  // base grid; refinement inserts geometric midpoints
  QuadratureParams quad{};
  double stability_threshold = 0.05;
};

struct BoundSuiteConfig {
  double alpha = 0.5;
  int n = 3;
  std::vector<PsiSpec> psis;
  std::vector<ProfileSpec> profiles;
  int ladder = 10;
  SuiteCommon common;

  static BoundSuiteConfig defaults();
  static BoundSuiteConfig from_json(const nlohmann::json& j);
};

struct OrliczSuiteConfig {
  double alpha = 0.5;
  int n = 3;
  std::vector<std::pair<std::string, NFunction>> Gs;
  std::vector<ProfileSpec> profiles;
  double beta = 2.0;
  std::vector<double> q_one{1.0, 0.5};
  std::vector<double> q_beta{2.0, kInfinity};
  SuiteCommon common;

  static OrliczSuiteConfig defaults();
  static OrliczSuiteConfig from_json(const nlohmann::json& j);
};

struct LorentzSuiteConfig {
  double sigma = 2.0, rho = 1.0, beta = 1.0;
  double alpha = 0.5;
  int n = 3;
  PsiSpec psi{"id", MonotoneFn::identity()};
  double rho_weak = 1.0;  // exponent for the L^1 -> weak Lorentz mapping
  std::vector<ProfileSpec> profiles;
  std::vector<double> R{0.5, 1.0, 2.0};
  SuiteCommon common;

  static LorentzSuiteConfig defaults();
  static LorentzSuiteConfig from_json(const nlohmann::json& j);
};

struct MaximalSuiteConfig {
  std::vector<double> alphas{0.0, 0.5, 1.5};
  int n = 3;
  std::vector<ProfileSpec> profiles;
  PsiSpec psi{"sqrt", MonotoneFn::power(0.5)};
  std::vector<double> R{0.25, 1.0};
  MaximalSearch search{};
  SuiteCommon common;

  static MaximalSuiteConfig defaults();
  static MaximalSuiteConfig from_json(const nlohmann::json& j);
};

struct AppendixSuiteConfig {
  std::vector<std::pair<std::string, NFunction>> Gs;
  std::vector<double> betas{2.0, 3.5};
  std::vector<double> Cs{1.0, 0.25, 8.0};
  double t_lo = 1e-4, t_hi = 1e4;
  int per_decade = 4;
  int jensen_cases = 100;
  unsigned seed = 7;
  double convex_threshold = 0.25;
  double zyg_p = 2.0, zyg_alpha = 1.0, zyg_s = 1e6;
  double zyg_t_lo = 1e-6, zyg_t_hi = 1e6;
  double zyg_bound = 4.0;
  double stability_threshold = 0.05;

  static AppendixSuiteConfig defaults();
  static AppendixSuiteConfig from_json(const nlohmann::json& j);
};

struct HmWolffCase {
  std::string name;
  PsiSpec psi;
  double alpha = 1.0;
  int n = 3;
  ProfileSpec profile;
};

struct HmWolffSuiteConfig {
  std::vector<HmWolffCase> cases;
  std::vector<double> radii;  // evaluation points (|x|)
  double rel_tol = 1e-3;      // combined quadrature tolerance
  HavinMazyaOptions hm{};
  SuiteCommon common;

  static HmWolffSuiteConfig defaults();
  static HmWolffSuiteConfig from_json(const nlohmann::json& j);
};

VerificationReport verify_upper_bound(const BoundSuiteConfig& c);
VerificationReport verify_sharpness(const BoundSuiteConfig& c);
VerificationReport verify_orlicz_bounds(const OrliczSuiteConfig& c);
VerificationReport verify_lorentz_mappings(const LorentzSuiteConfig& c);
VerificationReport verify_maximal(const MaximalSuiteConfig& c);
VerificationReport verify_appendix(const AppendixSuiteConfig& c);
VerificationReport verify_hm_wolff(const HmWolffSuiteConfig& c);

// Dispatch by suite name (upper_bound, sharpness, orlicz, lorentz_mappings, maximal, appendix,
// hm_wolff); a null config selects the defaults.
VerificationReport run_suite(const std::string& name, const nlohmann::json& config);
const std::vector<std::string>& suite_names();

}  // namespace potlab
