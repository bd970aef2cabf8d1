#include "potlab/cli.hpp"

#include "potlab/hardy.hpp"
#include "potlab/io.hpp"
#include "potlab/norms.hpp"
#include "potlab/potentials.hpp"
#include "potlab/radial_pde.hpp"
#include "potlab/verifier.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace potlab {

namespace {

struct Failed {
  std::string summary;
};

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << text;
}

StepProfile read_profile(const std::string& path) { return parse_step_profile_csv(read_text(path), path); }
GridFunction read_grid(const std::string& path) { return parse_grid_csv(read_text(path), path); }

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> keys, const std::string& what) {
  if (!j.is_object()) throw InputError(what + " must be a JSON object");
  for (const auto& [k, _] : j.items()) {
    bool ok = false;
    for (const char* key : keys) ok = ok || k == key;
    if (!ok) throw InputError("unknown key '" + k + "' in " + what);
  }
}

// ---- potential ----------------------------------------------------------------

struct PotentialArgs {
  std::string op, params, grid_input, profile, points, request, output;
  bool at_cells = false;
};

const std::vector<std::string> kOps{"wolff", "wolff_truncated", "riesz", "riesz_truncated", "havin_mazya", "frac_maximal"};

template <class Source>
double evaluate(const std::string& op, const Source& f, std::span<const double> x, const PotentialParams& p) {
  if (op == "wolff") return wolff(f, x, p);
  if (op == "wolff_truncated") return wolff_truncated(f, x, p);
  if (op == "riesz") return riesz(f, x, p.alpha, p.quad);
  if (op == "riesz_truncated") return riesz_truncated(f, x, p.alpha, p.R, p.quad);
  if (op == "havin_mazya") return havin_mazya(f, x, p);
  return frac_maximal(f, x, p.alpha);
}

void run_potential(PotentialArgs a, std::ostream& out) {
  nlohmann::json params;
  std::vector<std::vector<double>> pts;
  if (!a.request.empty()) {
    auto req = read_json(a.request);
    require_keys(req, {"operator", "params", "input", "profile", "points"}, "request");
    a.op = req.at("operator").get<std::string>();
    params = req.at("params");
    auto base = std::filesystem::path(a.request).parent_path();
    auto resolve = [&](const std::string& p) { return std::filesystem::path(p).is_absolute() ? p : (base / p).string(); };
    if (req.contains("input")) a.grid_input = resolve(req.at("input").get<std::string>());
    if (req.contains("profile")) a.profile = resolve(req.at("profile").get<std::string>());
    const auto& pj = req.at("points");
    if (pj.is_string() && pj.get<std::string>() == "grid") {
      a.at_cells = true;
    } else {
      pts = pj.get<std::vector<std::vector<double>>>();
    }
  } else {
    if (a.op.empty() || a.params.empty()) throw InputError("potential needs --op and --params (or --request)");
    params = read_json(a.params);
    if (!a.points.empty()) pts = parse_points_csv(read_text(a.points), a.points);
  }
  if (std::find(kOps.begin(), kOps.end(), a.op) == kOps.end()) throw InputError("unknown operator '" + a.op + "'");
  PotentialParams p = PotentialParams::from_json(params);
  if (a.grid_input.empty() == a.profile.empty()) throw InputError("give exactly one of a grid input or a profile");
  std::optional<GridFunction> grid;
  std::optional<RadialFunction> radial;
  if (!a.grid_input.empty()) {
    grid = read_grid(a.grid_input);
  } else {
    radial = radial_lift(read_profile(a.profile), p.n);
  }
  if (a.at_cells) {
    if (!grid) throw InputError("cell-centre evaluation needs a grid input");
    for (size_t i = 0; i < grid->size(); ++i) pts.push_back(grid->center(i));
  }
  if (pts.empty()) throw InputError("no evaluation points");
  std::string csv;
  for (int k = 0; k < p.n; ++k) csv += "x" + std::to_string(k + 1) + ",";
  csv += "value,flags\n";
  for (const auto& x : pts) {
    if (static_cast<int>(x.size()) != p.n) throw InputError("evaluation point dimension differs from n");
    double v = grid ? evaluate(a.op, *grid, x, p) : evaluate(a.op, *radial, x, p);
    for (double c : x) csv += format_double(c) + ",";
    std::string flags = std::isinf(v) ? "inf" : (a.op == "frac_maximal" ? "lower_bound" : "");
    csv += format_double(v) + "," + flags + "\n";
  }
  emit(csv, a.output, out);
}

// ---- rearrange / norm / reduce / hardy --------------------------------------------

void run_rearrange(const std::string& input, const std::string& psi, bool maximal, const std::string& output, std::ostream& out) {
  StepProfile f = decreasing_rearrangement(read_grid(input));
  if (!psi.empty()) f = psi_rearrangement(f, MonotoneFn::from_json(read_json(psi)));
  if (!maximal) {
    emit(step_profile_csv(f), output, out);
    return;
  }
  std::string csv = "t,f_star,f_star_star\n";
  for (size_t k = 0; k < f.size(); ++k) {
    double t = f.breaks()[k + 1];
    csv += format_double(t) + "," + format_double(f.values()[k]) + "," + format_double(f.maximal(t)) + "\n";
  }
  emit(csv, output, out);
}

double run_norm_value(const std::string& kind, const nlohmann::json& j, const std::string& profile, const std::string& grid_input) {
  if (profile.empty() == grid_input.empty()) throw InputError("give exactly one of --profile or --grid-input");
  std::optional<GridFunction> g;
  if (!grid_input.empty()) g = read_grid(grid_input);
  auto prof = [&] { return g ? decreasing_rearrangement(*g) : read_profile(profile); };
  if (kind == "lorentz") return g ? lorentz_norm(*g, LorentzParams::from_json(j)) : lorentz_norm(prof(), LorentzParams::from_json(j));
  if (kind == "luxemburg") {
    require_keys(j, {"G", "A", "domain_measure"}, "luxemburg parameters");
    double dm = j.contains("domain_measure") ? number_from_json(j.at("domain_measure")) : kInfinity;
    if (j.contains("G")) return luxemburg_norm(NFunction::from_json(j.at("G")), prof(), dm);
    return luxemburg_norm(MonotoneFn::from_json(j.at("A")), prof(), dm);
  }
  if (kind == "llogl") {
    require_keys(j, {"domain_measure"}, "llogl parameters");
    return llogl_norm(prof(), j.contains("domain_measure") ? number_from_json(j.at("domain_measure")) : kInfinity);
  }
  if (kind == "modular") return modular(ModularFunctional::from_json(j), prof());
  if (kind == "morrey" || kind == "lorentz_morrey") {
    if (!g) throw InputError(kind + " norm needs a grid input");
    require_keys(j, {"q", "theta", "t", "center_stride", "radii_per_octave", "radius_cap_factor"}, kind + " parameters");
    MorreyOptions o;
    o.center_stride = j.value("center_stride", o.center_stride);
    o.radii_per_octave = j.value("radii_per_octave", o.radii_per_octave);
    o.radius_cap_factor = j.value("radius_cap_factor", o.radius_cap_factor);
    double q = number_from_json(j.at("q")), theta = j.at("theta").get<double>();
    if (kind == "morrey") return morrey_norm(*g, q, theta, o);
    return lorentz_morrey_norm(*g, j.at("t").get<double>(), q, theta, o);
  }
  throw InputError("unknown norm '" + kind + "'");
}

std::vector<double> t_values(const std::vector<double>& ts, const std::vector<double>& range) {
  if (!ts.empty()) return ts;
  if (range.size() != 3) throw InputError("give --t values or --t-range lo,hi,per_decade");
  int m = static_cast<int>(std::lround(std::log10(range[1] / range[0]) * range[2]));
  if (!(range[0] > 0 && range[1] > range[0] && m >= 1)) throw InputError("--t-range needs 0 < lo < hi");
  return log_grid(range[0], range[1], m + 1);
}

void run_reduce(const std::string& params, const std::string& profile, const std::vector<double>& ts, const std::string& output,
                std::ostream& out) {
  ReductionCurve curve(read_profile(profile), ReductionParams::from_json(read_json(params)));
  std::string csv = "t,value\n";
  for (double t : ts) csv += format_double(t) + "," + format_double(curve(t)) + "\n";
  emit(csv, output, out);
}

void run_hardy(const std::string& profile, double p, double q, const std::string& which, const std::string& output, std::ostream& out) {
  StepProfile phi = read_profile(profile);
  std::string csv = "inequality,p,q,lhs,rhs,holds\n";
  auto row = [&](const char* name, const HardyReport& r) {
    csv += std::string(name) + "," + format_double(p) + "," + format_double(q) + "," + format_double(r.lhs) + "," + format_double(r.rhs) + "," +
           (r.holds ? "true" : "false") + "\n";
  };
  if (which == "1" || which == "both") row("hardy1", hardy1_check(phi, p, q));
  if (which == "2" || which == "both") row("hardy2", hardy2_check(phi, p, q));
  emit(csv, output, out);
}

// ---- pde -------------------------------------------------------------------------

struct PdeArgs {
  std::string problem, datum, output;
  std::vector<double> radii, R;
  int samples = 0;
  bool estimate = false, matched = false;
};

void run_pde(const PdeArgs& a, std::ostream& out) {
  RadialProblem prob = RadialProblem::from_json(read_json(a.problem), read_profile(a.datum));
  std::vector<double> r = a.radii;
  if (r.empty()) {
    if (a.samples < 1) throw InputError("give --radii or --samples");
    for (int i = 0; i < a.samples; ++i) r.push_back(prob.R_dom * i / a.samples);
  }
  std::string csv;
  if (!a.estimate) {
    RadialSolution u(prob);
    csv = "r,u,slope\n";
    for (double x : r) csv += format_double(x) + "," + format_double(u(x)) + "," + format_double(u.slope(x)) + "\n";
  } else {
    if (a.R.empty()) throw InputError("--estimate needs --R");
    auto rep = estimate_check(prob, r, a.R, a.matched);
    csv = "x,R,u,W,inf_u\n";
    for (const auto& s : rep.samples)
      csv += format_double(s.x) + "," + format_double(s.R) + "," + format_double(s.u) + "," + format_double(s.W) + "," + format_double(s.inf_u) + "\n";
    csv += "# C_L=" + format_double(rep.C_L) + " C_U=" + format_double(rep.C_U) + " min_lower_slack=" + format_double(rep.min_lower_slack) +
           " min_upper_slack=" + format_double(rep.min_upper_slack) + "\n";
  }
  emit(csv, a.output, out);
}

// ---- verify ------------------------------------------------------------------------

void run_verify(const std::string& suite, const std::string& config, const std::string& output, const std::string& json_out,
                std::ostream& out, std::ostream& err) {
  nlohmann::json cfg = config.empty() ? nlohmann::json() : read_json(config);
  VerificationReport rep;
  try {
    rep = run_suite(suite, cfg);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  std::ostringstream csv;
  rep.write_csv(csv);
  emit(csv.str(), output, out);
  if (!json_out.empty()) emit(rep.to_json().dump(2) + "\n", json_out, out);
  for (const auto& c : rep.checks)
    err << (c.pass ? "PASS " : "FAIL ") << rep.suite << "/" << c.id << " stability=" << format_double(c.stability) << "\n";
  for (const auto& e : rep.excluded) err << "excluded " << e << "\n";
  if (!rep.pass) throw Failed{rep.suite + " failed"};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonlinear potentials, rearrangements and the bounds relating them", "potlab"};
  app.require_subcommand(1);

  PotentialArgs pa;
  auto* pot = app.add_subcommand("potential", "Evaluate a potential at points");
  pot->add_option("--op", pa.op, "wolff | wolff_truncated | riesz | riesz_truncated | havin_mazya | frac_maximal");
  pot->add_option("--params", pa.params, "JSON: alpha, n, psi, R, quadrature");
  pot->add_option("--grid-input", pa.grid_input, "grid CSV input");
  pot->add_option("--profile", pa.profile, "step profile CSV of f*, lifted radially in dimension n");
  pot->add_option("--points", pa.points, "CSV of evaluation points");
  pot->add_flag("--at-cells", pa.at_cells, "evaluate at every cell centre of the grid input");
  pot->add_option("--request", pa.request, "JSON request {operator, params, input|profile, points|\"grid\"}");
  pot->add_option("-o,--output", pa.output, "output CSV (default stdout)");

  std::string r_input, r_psi, r_out;
  bool r_max = false;
  auto* rea = app.add_subcommand("rearrange", "Decreasing rearrangement of a grid function");
  rea->add_option("--input", r_input, "grid CSV input")->required();
  rea->add_option("--psi", r_psi, "JSON MonotoneFn; output (psi(f))*");
  rea->add_flag("--maximal", r_max, "tabulate f* and f** at the step ends");
  rea->add_option("-o,--output", r_out, "output CSV (default stdout)");

  std::string n_kind, n_params, n_profile, n_grid, n_out;
  auto* nrm = app.add_subcommand("norm", "Lorentz, Orlicz, Morrey and modular norms");
  nrm->add_option("--kind", n_kind, "lorentz | luxemburg | llogl | morrey | lorentz_morrey | modular")->required();
  nrm->add_option("--params", n_params, "JSON parameters of the norm")->required();
  nrm->add_option("--profile", n_profile, "step profile CSV of f*");
  nrm->add_option("--grid-input", n_grid, "grid CSV input");
  nrm->add_option("-o,--output", n_out, "output CSV (default stdout)");

  std::string d_params, d_profile, d_out;
  std::vector<double> d_t, d_range;
  auto* red = app.add_subcommand("reduce", "Reduction curve of a profile");
  red->add_option("--params", d_params, "JSON: alpha, n, psi, lower (t | t/2), L, inner, outer")->required();
  red->add_option("--profile", d_profile, "step profile CSV of phi")->required();
  red->add_option("--t", d_t, "evaluation points")->delimiter(',');
  red->add_option("--t-range", d_range, "lo,hi,per_decade log grid")->delimiter(',');
  red->add_option("-o,--output", d_out, "output CSV (default stdout)");

  std::string h_profile, h_which = "both", h_out;
  double h_p = 0.0, h_q = 1.0;
  auto* har = app.add_subcommand("hardy", "Weighted Hardy inequalities for a step function");
  har->add_option("--profile", h_profile, "step profile CSV of phi")->required();
  har->add_option("--p", h_p, "weight exponent")->required();
  har->add_option("--q", h_q, "power")->required();
  har->add_option("--which", h_which, "1 | 2 | both");
  har->add_option("-o,--output", h_out, "output CSV (default stdout)");

  PdeArgs da;
  auto* pde = app.add_subcommand("pde", "Radial Dirichlet problem for the G-Laplacian");
  pde->add_option("--problem", da.problem, "JSON: n, G, R_dom")->required();
  pde->add_option("--datum", da.datum, "step profile CSV of f as a function of the radius")->required();
  pde->add_option("--radii", da.radii, "evaluation radii")->delimiter(',');
  pde->add_option("--samples", da.samples, "evaluate at R_dom*i/N, i < N");
  pde->add_flag("--estimate", da.estimate, "compare u with the truncated potential");
  pde->add_option("--R", da.R, "truncation radii for --estimate")->delimiter(',');
  pde->add_flag("--matched", da.matched, "solve on B(0,R) for each R");
  pde->add_option("-o,--output", da.output, "output CSV (default stdout)");

  std::string v_suite, v_config, v_out, v_json;
  auto* ver = app.add_subcommand("verify", "Run a verification suite");
  ver->add_option("--suite", v_suite, "suite name")->required()->check(CLI::IsMember(suite_names()));
  ver->add_option("--config", v_config, "JSON suite configuration (defaults when omitted)");
  ver->add_option("-o,--output", v_out, "report CSV (default stdout)");
  ver->add_option("--json", v_json, "report JSON path");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*pot) {
      run_potential(pa, out);
    } else if (*rea) {
      run_rearrange(r_input, r_psi, r_max, r_out, out);
    } else if (*nrm) {
      double v = run_norm_value(n_kind, read_json(n_params), n_profile, n_grid);
      emit("norm,value\n" + n_kind + "," + format_double(v) + "\n", n_out, out);
    } else if (*red) {
      run_reduce(d_params, d_profile, t_values(d_t, d_range), d_out, out);
    } else if (*har) {
      if (h_which != "1" && h_which != "2" && h_which != "both") throw InputError("--which must be 1, 2 or both");
      run_hardy(h_profile, h_p, h_q, h_which, h_out, out);
    } else if (*pde) {
      run_pde(da, out);
    } else if (*ver) {
      run_verify(v_suite, v_config, v_out, v_json, out, err);
    }
  } catch (const Failed& f) {
    err << "verification failed: " << f.summary << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace potlab
