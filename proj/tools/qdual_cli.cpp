// Command-line front end: runs each experiment, writes CSV data plus JSON
// metadata into an output directory, and exports plot-ready figure tables.
//
// Exit codes: 0 ok, 1 usage, 2 validation, 3 numerical-gate failure.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdual/action_spectrum.hpp"
#include "qdual/catmap.hpp"
#include "qdual/catmap_quantum.hpp"
#include "qdual/classical_spin.hpp"
#include "qdual/dual_op.hpp"
#include "qdual/io_util.hpp"
#include "qdual/linear_fit.hpp"
#include "qdual/spin_chain.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace qdual;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string g17(double x) { return format_g17(x); }

void write_metadata(const fs::path& dir, json meta) {
  meta["tool_version"] = kVersion;
  fs::create_directories(dir);
  std::ofstream out(dir / "metadata.json", std::ios::binary);
  out << meta.dump(2) << '\n';
}

json spin_meta(const SpinChainParams& p, int T) {
  // Doubles stored as shortest-round-trip strings so the resolved config
  // round-trips bit-exactly through the file.
  return json{{"model", "spin-chain"},
              {"two_j", p.two_j},
              {"n_sites", p.n_sites},
              {"t_period", T},
              {"J", g17(p.J)},
              {"bx", g17(p.bx)},
              {"bz", g17(p.bz)},
              {"phi", g17(p.phi())}};
}

std::optional<TraceCache> open_cache() {
  if (const char* dir = std::getenv("QDUAL_CACHE_DIR")) {
    return TraceCache(fs::path(dir));
  }
  return std::nullopt;
}

std::string spin_cache_key(const SpinChainParams& p, int T) {
  return "spin-chain J=" + g17(p.J) + " bx=" + g17(p.bx) +
         " bz=" + g17(p.bz) + " N=" + std::to_string(p.n_sites) +
         " T=" + std::to_string(T);
}

// Floquet traces for j = 1..j_cut through the optional on-disk cache.
std::vector<cplx> cached_traces(const SpinChainParams& base, int T,
                                int j_cut) {
  auto cache = open_cache();
  if (!cache) return floquet_traces(base, T, j_cut);
  const std::string key = spin_cache_key(base, T);
  std::vector<cplx> traces(j_cut);
  for (int j = 1; j <= j_cut; ++j) {
    const std::string label = "j=" + std::to_string(j);
    if (const auto hit = cache->lookup(key, label)) {
      traces[j - 1] = *hit;
      continue;
    }
    SpinChainParams p = base;
    p.two_j = 2 * j;
    traces[j - 1] = floquet_trace(p, T);
    cache->store(key, label, traces[j - 1]);
  }
  return traces;
}

void write_spectrum_outputs(const fs::path& out, const ActionSpectrum& spec) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < spec.s_grid.size(); ++i) {
    rows.push_back({g17(spec.s_grid[i]), g17(spec.rho[i].real()),
                    g17(spec.rho[i].imag()), g17(std::abs(spec.rho[i]))});
  }
  write_csv(out / "spectrum.csv", {"s", "re_rho", "im_rho", "abs_rho"}, rows);
  const PeakSet peaks = detect_peaks(spec);
  std::vector<std::vector<std::string>> prow;
  for (const Peak& p : peaks.peaks) {
    prow.push_back({g17(p.s), g17(p.height), g17(p.width)});
  }
  write_csv(out / "peaks.csv", {"s", "height", "fwhm"}, prow);
}

// ---------------------------------------------------------------------------
// Subcommand bodies.  Each returns the process exit code.

struct SpinArgs {
  SpinChainParams p{1, 1, 0.7, 0.9, 0.9};
  int T = 1;
};

void add_spin_options(CLI::App* cmd, SpinArgs& a, bool with_two_j = true) {
  if (with_two_j) {
    cmd->add_option("--param.two_j,--two-j", a.p.two_j, "2j (integer)");
  }
  cmd->add_option("--param.N,--n-sites", a.p.n_sites, "chain length N");
  cmd->add_option("--param.T,--t-period", a.T, "Floquet power T");
  cmd->add_option("--param.J,--J", a.p.J, "Ising coupling");
  cmd->add_option("--param.bx,--bx", a.p.bx, "kick field x");
  cmd->add_option("--param.bz,--bz", a.p.bz, "kick field z");
}

int run_phase_portrait(const SpinArgs& a, const fs::path& out, int n_points,
                       int n_steps, unsigned seed) {
  SpinChainParams p = a.p;
  p.n_sites = 1;
  const PhasePortrait portrait = phase_portrait(p, n_points, n_steps, seed);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < portrait.orbits.size(); ++k) {
    for (std::size_t s = 0; s < portrait.orbits[k].size(); ++s) {
      rows.push_back({std::to_string(k), std::to_string(s),
                      g17(portrait.orbits[k][s].first),
                      g17(portrait.orbits[k][s].second)});
    }
  }
  write_csv(out / "portrait.csv", {"orbit_id", "step", "q", "p"}, rows);
  json meta = spin_meta(p, 1);
  meta["subcommand"] = "phase-portrait";
  meta["n_points"] = n_points;
  meta["n_steps"] = n_steps;
  meta["seed"] = seed;
  write_metadata(out, meta);
  return 0;
}

int run_find_orbits(const SpinArgs& a, const fs::path& out, int n_seeds,
                    unsigned seed) {
  const auto orbits = find_periodic_orbits(a.p, a.T, n_seeds, 1e-6, seed);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < orbits.size(); ++k) {
    const PeriodicOrbit& o = orbits[k];
    std::string prefactor = "nan";
    try {
      prefactor = g17(stability_prefactor(o));
    } catch (const NumericalError&) {
      // near-bifurcation orbit; prefactor left undefined
    }
    rows.push_back({std::to_string(k), g17(o.action), g17(o.residual),
                    std::to_string(o.T_p), std::to_string(o.N_p),
                    o.classification, prefactor});
  }
  write_csv(out / "orbits.csv",
            {"orbit_id", "action", "residual", "t_primitive", "n_primitive",
             "classification", "stability_prefactor"},
            rows);
  json meta = spin_meta(a.p, a.T);
  meta["subcommand"] = "find-orbits";
  meta["n_seeds"] = n_seeds;
  meta["seed"] = seed;
  meta["n_orbits"] = orbits.size();
  write_metadata(out, meta);
  return 0;
}

int run_manifolds(const SpinArgs& a, const fs::path& out) {
  const ManifoldFamily fam = manifold_solutions(a.p);
  std::vector<std::vector<std::string>> rows;
  for (double chi : fam.chi) {
    rows.push_back({g17(chi), g17(mod_2pi(2 * a.p.J * chi * chi))});
  }
  write_csv(out / "manifolds.csv", {"chi", "action_per_site"}, rows);
  json meta = spin_meta(a.p, 2);
  meta["subcommand"] = "manifolds";
  meta["regime"] = fam.regime;
  meta["s_man"] = g17(fam.s_man);
  write_metadata(out, meta);
  return 0;
}

int run_action_spectrum(const SpinArgs& a, const fs::path& out, int j_cut,
                        int grid) {
  const std::vector<cplx> traces = cached_traces(a.p, a.T, j_cut);
  const ActionSpectrum spec = spectrum_from_traces(traces, grid);
  write_spectrum_outputs(out, spec);
  json meta = spin_meta(a.p, a.T);
  meta["subcommand"] = "action-spectrum";
  meta["j_cut"] = j_cut;
  meta["grid"] = grid;
  write_metadata(out, meta);
  return 0;
}

int run_semiclassical(const SpinArgs& a, const fs::path& out, int j_cut,
                      int grid, int n_seeds, unsigned seed) {
  const auto orbits = find_periodic_orbits(a.p, a.T, n_seeds, 1e-6, seed);
  std::vector<SemiclassicalOrbit> terms;
  std::vector<std::vector<std::string>> orows;
  for (const PeriodicOrbit& o : orbits) {
    try {
      // Family weight: N_p cyclic-shift copies share the same action.
      terms.push_back({o.action, o.N_p * stability_prefactor(o)});
      orows.push_back({g17(o.action), g17(terms.back().weight)});
    } catch (const NumericalError&) {
      // skip near-bifurcation orbits (no isolated-orbit weight)
    }
  }
  if (terms.empty()) {
    throw ValidationError("no isolated orbits found; increase --orbit-seeds");
  }
  const ActionSpectrum spec = semiclassical_spectrum(terms, j_cut, grid);
  write_spectrum_outputs(out, spec);
  write_csv(out / "orbit_terms.csv", {"action", "weight"}, orows);
  json meta = spin_meta(a.p, a.T);
  meta["subcommand"] = "semiclassical-spectrum";
  meta["j_cut"] = j_cut;
  meta["grid"] = grid;
  meta["seed"] = seed;
  write_metadata(out, meta);
  return 0;
}

int run_dual_spectrum(const SpinArgs& a, const fs::path& out, int k) {
  CVector lead;
  const std::vector<cplx> vals =
      leading_dual_eigenvalues(a.p, a.T, k, &lead);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    rows.push_back({std::to_string(i), g17(vals[i].real()),
                    g17(vals[i].imag()), g17(std::abs(vals[i])),
                    g17(std::arg(vals[i]))});
  }
  write_csv(out / "eigenvalues.csv", {"rank", "re", "im", "abs", "arg"}, rows);
  const LocalizationReport loc =
      eigenvector_localization(lead, a.p.site_dim());
  json meta = spin_meta(a.p, a.T);
  meta["subcommand"] = "dual-spectrum";
  meta["k"] = k;
  meta["ipr_coordinate"] = g17(loc.ipr_coordinate);
  meta["ipr_momentum"] = g17(loc.ipr_momentum);
  write_metadata(out, meta);
  return 0;
}

int run_duality_check(const SpinArgs& a, const fs::path& out, double tol) {
  const double err = duality_check(a.p, a.T);
  std::cout << "duality relative error = " << g17(err) << " (tol " << g17(tol)
            << ")\n";
  json meta = spin_meta(a.p, a.T);
  meta["subcommand"] = "duality-check";
  meta["relative_error"] = g17(err);
  meta["tolerance"] = g17(tol);
  meta["pass"] = err < tol;
  write_metadata(out, meta);
  return err < tol ? 0 : 3;
}

int run_scaling_fit(const SpinArgs& a, const fs::path& out,
                    std::vector<int> j_cuts, double s_target,
                    bool auto_target) {
  if (j_cuts.empty()) throw ValidationError("need at least one --jcuts value");
  std::sort(j_cuts.begin(), j_cuts.end());
  const int j_max = j_cuts.back();
  const std::vector<cplx> traces = cached_traces(a.p, a.T, j_max);
  if (auto_target) {
    const ActionSpectrum spec = spectrum_from_traces(traces);
    const PeakSet peaks = detect_peaks(spec);
    if (peaks.peaks.empty()) {
      throw ValidationError("no dominant peak found for --s-target auto");
    }
    double best = 0, at = 0;
    for (const Peak& p : peaks.peaks) {
      if (p.height > best) {
        best = p.height;
        at = p.s;
      }
    }
    s_target = at;
  }
  const ScalingFit fit = peak_scaling_fit(traces, s_target, j_cuts);
  std::vector<std::vector<std::string>> rows;
  for (const auto& [jc, h] : fit.samples) {
    rows.push_back({std::to_string(jc), g17(h)});
  }
  write_csv(out / "scaling.csv", {"j_cut", "abs_rho"}, rows);
  json meta = spin_meta(a.p, a.T);
  meta["subcommand"] = "scaling-fit";
  meta["s_target"] = g17(s_target);
  meta["alpha"] = g17(fit.alpha);
  meta["alpha_stderr"] = g17(fit.alpha_stderr);
  meta["j_cuts"] = j_cuts;
  meta["integrable"] = (a.p.bx == 0.0);
  write_metadata(out, meta);
  std::cout << "alpha = " << g17(fit.alpha) << " +- " << g17(fit.alpha_stderr)
            << "\n";
  return 0;
}

int run_phase_domination(const SpinArgs& a, const fs::path& out, int j_cut,
                         double s_max, bool auto_target) {
  const std::vector<cplx> traces = cached_traces(a.p, a.T, j_cut);
  if (auto_target) {
    const ActionSpectrum spec = spectrum_from_traces(traces);
    const PeakSet peaks = detect_peaks(spec);
    if (peaks.peaks.empty()) {
      throw ValidationError("no dominant peak found for --s-max auto");
    }
    double best = 0;
    for (const Peak& p : peaks.peaks) {
      if (p.height > best) {
        best = p.height;
        s_max = p.s;
      }
    }
  }
  const auto delta = phase_domination(traces, s_max);
  std::vector<std::vector<std::string>> rows;
  std::vector<double> angles;
  for (const auto& [j, d] : delta) {
    rows.push_back({std::to_string(j), g17(d)});
    angles.push_back(d);
  }
  write_csv(out / "phase_domination.csv", {"j", "delta"}, rows);
  json meta = spin_meta(a.p, a.T);
  meta["subcommand"] = "phase-domination";
  meta["j_cut"] = j_cut;
  meta["s_max"] = g17(s_max);
  meta["circular_stddev"] = g17(circular_stddev(angles));
  write_metadata(out, meta);
  return 0;
}

// --- cat-map subcommands ---

struct CatArgs {
  int nu = 13;
  int n = 10;
  int t = 10;
  unsigned seed = 2024;
};

CatMapParams cat_params(const CatArgs& a) {
  CatMapParams p;
  p.a = a.nu / 2;
  p.b = a.nu - p.a;
  p.d = -1;
  p.n_sites = a.n;
  p.t_period = a.t;
  return p;
}

int run_cat_orbit(const CatArgs& a, const fs::path& out) {
  CatMapParams p = cat_params(a);
  std::mt19937_64 rng(a.seed);
  const SymbolArray m = random_symbol_array(a.n, a.t, a.nu, rng);
  const CatOrbit orbit = orbit_from_symbols(m, p);
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < a.n; ++i) {
    for (int j = 0; j < a.t; ++j) {
      rows.push_back({std::to_string(i), std::to_string(j),
                      std::to_string(m(i, j)), g17(orbit.q(i, j)),
                      g17(orbit.p(i, j))});
    }
  }
  write_csv(out / "orbit.csv", {"site", "time", "symbol", "q", "p"}, rows);
  json meta{{"model", "cat-map"},      {"subcommand", "cat-orbit"},
            {"nu", a.nu},              {"n_sites", a.n},
            {"t_period", a.t},         {"seed", a.seed},
            {"action", g17(orbit.action)},
            {"residual", g17(orbit.residual)},
            {"admissible", orbit.admissible}};
  write_metadata(out, meta);
  return 0;
}

int run_cat_partners(const CatArgs& a, const fs::path& out, int size,
                     int n_trials, int w_min, int w_max) {
  const auto rows =
      partner_width_experiment(size, a.nu, n_trials, w_min, w_max, a.seed);
  std::vector<std::vector<std::string>> csv;
  std::vector<double> ws, ds;
  for (const auto& r : rows) {
    csv.push_back({std::to_string(r.trial), std::to_string(r.width),
                   g17(r.abs_delta_s), g17(r.shadowing),
                   r.valid ? "1" : "0"});
    if (r.valid) {
      ws.push_back(r.width);
      ds.push_back(r.abs_delta_s);
    }
  }
  write_csv(out / "partners.csv",
            {"trial", "width", "abs_delta_s", "shadowing", "valid"}, csv);
  json meta{{"model", "cat-map"}, {"subcommand", "cat-partners"},
            {"nu", a.nu},         {"size", size},
            {"n_trials", n_trials}, {"w_min", w_min},
            {"w_max", w_max},     {"seed", a.seed},
            {"spearman_width_vs_abs_delta_s", g17(spearman_rho(ws, ds))}};
  write_metadata(out, meta);
  return 0;
}

struct CatQArgs {
  CatQuantumParams p;
  double eps = 0;
  unsigned seed = 99;
};

void add_catq_options(CLI::App* cmd, CatQArgs& a) {
  cmd->add_option("--param.L,--L", a.p.L, "Hilbert dimension per site");
  cmd->add_option("--param.a,--cat-a", a.p.a, "cat map a");
  cmd->add_option("--param.b,--cat-b", a.p.b, "cat map b");
  cmd->add_option("--param.N,--n-sites", a.p.n_sites, "chain length N");
  cmd->add_option("--param.T,--t-period", a.p.t_period, "trace power T");
  cmd->add_option("--param.eps,--eps", a.eps, "potential amplitude");
  cmd->add_option("--seed", a.seed, "RNG seed");
}

int run_cat_duality(CatQArgs a, const fs::path& out, double tol) {
  if (a.eps != 0) {
    std::mt19937_64 rng(a.seed);
    a.p.v = CatPotential::random(a.eps, rng);
  }
  const CatDualityReport rep = duality_check_cat(a.p);
  std::cout << "dual error = " << g17(rep.err_dual)
            << ", exchange error = " << g17(rep.err_exchange)
            << ", W unitarity defect = " << g17(rep.w_unitarity) << "\n";
  json meta{{"model", "cat-map-quantum"}, {"subcommand", "cat-duality"},
            {"L", a.p.L},                 {"a", a.p.a},
            {"b", a.p.b},                 {"n_sites", a.p.n_sites},
            {"t_period", a.p.t_period},   {"eps", g17(a.eps)},
            {"seed", a.seed},             {"err_dual", g17(rep.err_dual)},
            {"err_exchange", g17(rep.err_exchange)},
            {"w_unitarity", g17(rep.w_unitarity)}};
  const bool pass =
      rep.err_dual < tol && rep.err_exchange < tol && rep.w_unitarity < tol;
  meta["pass"] = pass;
  write_metadata(out, meta);
  return pass ? 0 : 3;
}

int run_cat_formfactor(const CatQArgs& a, const fs::path& out, int samples) {
  const FormFactorEstimate est = form_factor(a.p, a.eps, samples, a.seed);
  const double prediction = k_cat_prediction(a.p);
  write_csv(out / "formfactor.csv",
            {"N", "T", "L", "tau", "K", "stderr", "regime"},
            {{std::to_string(a.p.n_sites), std::to_string(a.p.t_period),
              std::to_string(a.p.L), g17(est.tau), g17(est.k_value),
              g17(est.stderr_value), est.regime}});
  json meta{{"model", "cat-map-quantum"}, {"subcommand", "cat-formfactor"},
            {"L", a.p.L},                 {"a", a.p.a},
            {"b", a.p.b},                 {"n_sites", a.p.n_sites},
            {"t_period", a.p.t_period},   {"eps", g17(a.eps)},
            {"beta", a.p.beta},           {"n_samples", samples},
            {"seed", a.seed},             {"prediction", g17(prediction)}};
  write_metadata(out, meta);
  std::cout << "K = " << g17(est.k_value) << " +- " << g17(est.stderr_value)
            << " (prediction " << g17(prediction) << ", " << est.regime
            << ")\n";
  return 0;
}

// --- figure export ---

std::vector<json> collect_runs(const fs::path& run_dir) {
  std::vector<json> metas;
  if (!fs::exists(run_dir)) {
    throw ValidationError("run directory does not exist: " +
                          run_dir.string());
  }
  std::vector<fs::path> dirs{run_dir};
  for (const auto& e : fs::directory_iterator(run_dir)) {
    if (e.is_directory()) dirs.push_back(e.path());
  }
  for (const fs::path& d : dirs) {
    const fs::path meta_file = d / "metadata.json";
    if (!fs::exists(meta_file)) continue;
    std::ifstream in(meta_file);
    json meta = json::parse(in);
    meta["_dir"] = d.string();
    metas.push_back(std::move(meta));
  }
  return metas;
}

int run_export_figure(const fs::path& run_dir, const std::string& figure,
                      const fs::path& out_file) {
  const std::vector<json> runs = collect_runs(run_dir);
  std::vector<std::vector<std::string>> rows;
  if (figure == "fig-1") {
    // Three stroboscopic point clouds at distinct kick angles.
    int found = 0;
    for (const json& meta : runs) {
      if (meta.value("subcommand", "") != "phase-portrait") continue;
      ++found;
      const std::string series = "phi=" + meta.value("phi", "?");
      const auto table = read_csv(fs::path(meta["_dir"]) / "portrait.csv");
      for (std::size_t i = 1; i < table.size(); ++i) {
        rows.push_back({table[i][2], table[i][3], series});
      }
    }
    if (found < 3) {
      throw ValidationError(
          "fig-1 needs three phase-portrait runs under the run directory");
    }
  } else if (figure == "fig-NdepScaling") {
    // Scaling exponent alpha versus chain length, one series per family.
    for (const json& meta : runs) {
      if (meta.value("subcommand", "") != "scaling-fit") continue;
      const bool integrable = meta.value("integrable", false);
      const std::string series =
          integrable ? "integrable"
                     : "T=" + std::to_string(meta.value("t_period", 0));
      rows.push_back({std::to_string(meta.value("n_sites", 0)),
                      meta.value("alpha", "nan"), series});
    }
    if (rows.empty()) {
      throw ValidationError(
          "fig-NdepScaling needs scaling-fit runs under the run directory");
    }
  } else {
    throw ValidationError("unknown figure id: " + figure);
  }
  write_csv(out_file, {"x", "y", "series"}, rows);
  std::cout << "wrote " << rows.size() << " rows to " << out_file.string()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for kicked spin chains, dual transfer "
               "operators, action spectra, and coupled cat maps"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.fallthrough();  // global options (e.g. --out) usable after subcommands

  std::string out_dir = "runs/last";
  app.add_option("--out", out_dir, "output directory")->capture_default_str();

  // spin-chain / kicked-top experiments
  SpinArgs spin;
  int n_points = 30, n_steps = 400, j_cut = 200, grid = 4096, n_seeds = 200;
  int k_eigs = 4;
  unsigned seed = 1234;
  double s_target = 0, s_max = 0, tol = 1e-9;
  std::vector<int> j_cuts{100, 150, 200, 300, 400};

  auto* pp = app.add_subcommand("phase-portrait",
                                "stroboscopic (q, p) clouds for N = 1");
  add_spin_options(pp, spin, false);
  pp->add_option("--points", n_points, "number of trajectories");
  pp->add_option("--steps", n_steps, "steps per trajectory");
  pp->add_option("--seed", seed, "RNG seed");

  auto* fo = app.add_subcommand("find-orbits",
                                "multistart Newton periodic-orbit search");
  add_spin_options(fo, spin, false);
  fo->add_option("--orbit-seeds", n_seeds, "number of Newton starts");
  fo->add_option("--seed", seed, "RNG seed");

  auto* mf =
      app.add_subcommand("manifolds", "period-2 invariant manifold solver");
  add_spin_options(mf, spin, false);

  auto* as = app.add_subcommand("action-spectrum",
                                "Fourier transform of Floquet traces over j");
  add_spin_options(as, spin, false);
  as->add_option("--j-cut", j_cut, "largest spin j");
  as->add_option("--grid", grid, "action grid size");

  auto* sc = app.add_subcommand("semiclassical-spectrum",
                                "periodic-orbit reconstruction of |rho|");
  add_spin_options(sc, spin, false);
  sc->add_option("--j-cut", j_cut, "largest spin j");
  sc->add_option("--grid", grid, "action grid size");
  sc->add_option("--orbit-seeds", n_seeds, "number of Newton starts");
  sc->add_option("--seed", seed, "RNG seed");

  auto* ds = app.add_subcommand("dual-spectrum",
                                "leading transfer-operator eigenvalues");
  add_spin_options(ds, spin);
  ds->add_option("--k", k_eigs, "number of eigenvalues");

  SpinArgs dual{/*p=*/{1, 4, 0.7, 0.9, 0.9}, /*T=*/2};
  auto* dc = app.add_subcommand("duality-check",
                                "exact trace duality Tr U^T = Tr W^N");
  add_spin_options(dc, dual);
  dc->add_option("--tol", tol, "numerical gate");

  auto* sf = app.add_subcommand("scaling-fit",
                                "peak-height scaling exponent alpha");
  add_spin_options(sf, spin, false);
  sf->add_option("--jcuts", j_cuts, "j_cut sample points");
  auto* sf_target = sf->add_option("--s-target", s_target, "action position");

  auto* pd = app.add_subcommand("phase-domination",
                                "Delta(j) against the dominant action");
  add_spin_options(pd, spin, false);
  pd->add_option("--j-cut", j_cut, "largest spin j");
  auto* pd_target = pd->add_option("--s-max", s_max, "dominant action");

  // cat-map experiments under one umbrella command
  auto* cat = app.add_subcommand("cat", "coupled cat-map experiments");
  cat->require_subcommand(1);
  cat->fallthrough();
  CatArgs ca;
  int torus = 25, trials = 50, w_min = 2, w_max = 5, samples = 200;
  CatQArgs cq;

  auto* co = cat->add_subcommand("orbit",
                                 "Green's-function orbit reconstruction");
  co->add_option("--param.nu,--nu", ca.nu, "trace parameter nu = a + b");
  co->add_option("--param.N,--n-sites", ca.n, "sites");
  co->add_option("--param.T,--t-period", ca.t, "period");
  co->add_option("--seed", ca.seed, "RNG seed");

  auto* cp = cat->add_subcommand("partners",
                                 "encounter-swap partner orbit sweep");
  cp->add_option("--param.nu,--nu", ca.nu, "trace parameter nu = a + b");
  cp->add_option("--size", torus, "symbol torus size");
  cp->add_option("--trials", trials, "random interiors per width");
  cp->add_option("--w-min", w_min, "smallest encounter width");
  cp->add_option("--w-max", w_max, "largest encounter width");
  cp->add_option("--seed", ca.seed, "RNG seed");

  auto* cd = cat->add_subcommand("duality", "quantum cat-map trace duality");
  add_catq_options(cd, cq);
  cd->add_option("--tol", tol, "numerical gate");

  auto* cf = cat->add_subcommand("formfactor",
                                 "spectral form factor over the V ensemble");
  add_catq_options(cf, cq);
  cf->add_option("--samples", samples, "ensemble size");
  cf->add_option("--beta", cq.p.beta, "RMT symmetry class (1 or 2)");

  // figure export
  std::string run_dir = "runs", figure = "fig-1",
              export_out = "figure.csv";
  auto* ex = app.add_subcommand("export-figure-data",
                                "plot-ready long-format figure tables");
  ex->add_option("--run-dir", run_dir, "directory holding prior runs")
      ->capture_default_str();
  ex->add_option("--figure", figure, "fig-1 | fig-NdepScaling")
      ->capture_default_str();
  ex->add_option("--table-out", export_out, "output CSV path")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  const fs::path out(out_dir);
  try {
    if (*pp) return run_phase_portrait(spin, out, n_points, n_steps, seed);
    if (*fo) return run_find_orbits(spin, out, n_seeds, seed);
    if (*mf) return run_manifolds(spin, out);
    if (*as) return run_action_spectrum(spin, out, j_cut, grid);
    if (*sc) return run_semiclassical(spin, out, j_cut, grid, n_seeds, seed);
    if (*ds) return run_dual_spectrum(spin, out, k_eigs);
    if (*dc) return run_duality_check(dual, out, tol);
    if (*sf)
      return run_scaling_fit(spin, out, j_cuts, s_target,
                             sf_target->count() == 0);
    if (*pd)
      return run_phase_domination(spin, out, j_cut, s_max,
                                  pd_target->count() == 0);
    if (*co) return run_cat_orbit(ca, out);
    if (*cp) return run_cat_partners(ca, out, torus, trials, w_min, w_max);
    if (*cd) return run_cat_duality(cq, out, tol);
    if (*cf) return run_cat_formfactor(cq, out, samples);
    if (*ex) return run_export_figure(run_dir, figure, export_out);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const CapExceededError& e) {
    std::cerr << "cap exceeded: " << e.what()
              << " (reduce two_j, N, T, or the grid)\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical gate failure: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
