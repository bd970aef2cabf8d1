#pragma once

#include "potlab/monotone.hpp"
#include "potlab/rearrangement.hpp"

#include <limits>
#include <span>

namespace potlab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct QuadratureParams {
  int nodes_per_decade = 64;  // grid inputs: log-spaced sub-panels in r
  double rel_tol = 1e-9;      // adaptive panels for radial inputs
  double tail_tol = 1e-10;
};

struct PotentialParams {
  double alpha = 1.0;
  int n = 3;
  MonotoneFn psi = MonotoneFn::identity();
  double R = kInfinity;
  QuadratureParams quad{};

  void validate() const;
  static PotentialParams from_json(const nlohmann::json& j);
};

enum class Finiteness { finite, infinite, unknown };
const char* to_string(Finiteness f);

// W f is finite for some (every) compactly supported f != 0 iff ∫^∞ ψ(t^{1-n/α}) dt < ∞;
// decided through the exponent of ψ at 0.
Finiteness finiteness_check(const MonotoneFn& psi, double alpha, int n);

double ball_mass(const GridFunction& f, std::span<const double> x, double r);
double ball_mass(const RadialFunction& f, std::span<const double> x, double r);

// W_{α,ψ} f(x); +inf is the divergence marker. params.R is ignored.
double wolff(const GridFunction& f, std::span<const double> x, const PotentialParams& p);
double wolff(const RadialFunction& f, std::span<const double> x, const PotentialParams& p);
// W^R_{α,ψ} f(x) with R = params.R.
double wolff_truncated(const GridFunction& f, std::span<const double> x, const PotentialParams& p);
double wolff_truncated(const RadialFunction& f, std::span<const double> x, const PotentialParams& p);

double riesz(const GridFunction& f, std::span<const double> x, double alpha, const QuadratureParams& q = {});
double riesz(const RadialFunction& f, std::span<const double> x, double alpha, const QuadratureParams& q = {});
double riesz_truncated(const GridFunction& f, std::span<const double> x, double alpha, double R, const QuadratureParams& q = {});
double riesz_truncated(const RadialFunction& f, std::span<const double> x, double alpha, double R, const QuadratureParams& q = {});

// I_α f at every cell centre of the grid.
GridFunction riesz_field(const GridFunction& f, double alpha);

struct HavinMazyaOptions {
  int per_decade = 48;          // radial sampling of ψ(I_α f)
  double outer_factor = 1e3;    // sampled out to this multiple of the support radius
};

// V_{α,ψ} f(x) = I_α ψ(I_α f)(x). The grid path materializes ψ(I_α f) on the input grid;
// the radial path samples it on a geometric radial mesh.
double havin_mazya(const GridFunction& f, std::span<const double> x, const PotentialParams& p);
double havin_mazya(const RadialFunction& f, std::span<const double> x, const PotentialParams& p,
                   const HavinMazyaOptions& opt = {});
// Same, sharing the sampling of ψ(I_α f) across many points.
std::vector<double> havin_mazya(const RadialFunction& f, const std::vector<std::vector<double>>& xs, const PotentialParams& p,
                                const HavinMazyaOptions& opt = {});

struct MaximalSearch {
  int offsets = 33;
  int radii = 40;
  int starts = 4;
  double rel_step = 1e-10;
};

// Search-based lower bound for M_α f(x) = sup_{B ∋ x} |B|^{α/n-1} ∫_B |f|.
double frac_maximal(const GridFunction& f, std::span<const double> x, double alpha, const MaximalSearch& s = {});
double frac_maximal(const RadialFunction& f, std::span<const double> x, double alpha, const MaximalSearch& s = {});

}  // namespace potlab
