#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "limabean/density.hpp"
#include "limabean/errors.hpp"
#include "limabean/lifetime.hpp"
#include "limabean/metrics.hpp"
#include "limabean/walk.hpp"
#include "limabean/wong_zakai.hpp"
#include "output.hpp"

namespace limabean::cli {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string resolve_out_dir(const ExperimentSpec& spec, const CliOptions& opt) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (!spec.output_dir.empty()) return spec.output_dir;
  throw SpecError("no output directory: pass --out or set output_dir in the spec");
}

std::uint64_t effective_seed(const ExperimentSpec& spec, const CliOptions& opt) {
  if (opt.seed) return *opt.seed;
  return spec.has_walk ? spec.walk.seed : 1;
}

WalkConfig effective_walk(const ExperimentSpec& spec, const CliOptions& opt) {
  WalkConfig cfg = spec.require_walk();
  if (opt.seed) cfg.seed = *opt.seed;
  return cfg;
}

void require_finite_k(const ExperimentSpec& spec) {
  if (spec.k_infinite)
    throw SpecError("command '" + spec.command + "' needs a finite walk.k");
}

json finite_or_string(double v) {
  if (std::isfinite(v)) return json(v);
  return json(v > 0 ? "infinity" : "-infinity");
}

// --- tiny CSV reader (for the compare command's own outputs) --------------

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw SpecError("malformed number '" + s + "' in " + where);
  }
}

// --- command handlers -----------------------------------------------------

int cmd_sample_esd(const ExperimentSpec& spec, const CliOptions& opt) {
  Timer timer;
  const WalkConfig cfg = effective_walk(spec, opt);
  require_finite_k(spec);
  const ESD esd = pooled_esd(cfg, opt.threads);

  std::string csv = "trial,index,re,im\n";
  for (int trial = 0; trial < esd.trials; ++trial) {
    for (int i = 0; i < esd.n; ++i) {
      const cplx z = esd.eigenvalues[static_cast<std::size_t>(trial) * esd.n + i];
      csv += std::to_string(trial);
      csv += ',';
      csv += std::to_string(i);
      csv += ',';
      csv += fmt17(z.real());
      csv += ',';
      csv += fmt17(z.imag());
      csv += '\n';
    }
  }

  OutputDir out(resolve_out_dir(spec, opt));
  out.write_data_file("esd.csv", csv);
  out.extras()["rows"] = esd.n * esd.trials;
  out.write_manifest(spec.command, spec.canonical, cfg.seed, timer.seconds());
  return 0;
}

int cmd_density_grid(const ExperimentSpec& spec, const CliOptions& opt) {
  Timer timer;
  const WalkConfig cfg = effective_walk(spec, opt);
  DensityGrid grid;
  if (spec.k_infinite) {
    if (!cfg.initial_law.is_trivial())
      throw SpecError("the limiting density is only available for the trivial "
                      "initial law");
    grid = build_density_grid_infinity(cfg.t, spec.grid.resolution, opt.threads);
  } else {
    grid = build_density_grid(cfg.step_law, cfg.initial_law, cfg.k, cfg.t,
                              spec.grid.resolution, opt.threads);
  }

  std::string csv = "r,theta,re,im,density,masked\n";
  const std::size_t nt = grid.angles.size();
  for (std::size_t ir = 0; ir < grid.radii.size(); ++ir) {
    const double r = grid.radii[ir];
    for (std::size_t it = 0; it < nt; ++it) {
      const double theta = grid.angles[it];
      csv += fmt17(r);
      csv += ',';
      csv += fmt17(theta);
      csv += ',';
      csv += fmt17(r * std::cos(theta));
      csv += ',';
      csv += fmt17(r * std::sin(theta));
      csv += ',';
      csv += fmt17(grid.values[ir * nt + it]);
      csv += ',';
      csv += (grid.mask[ir * nt + it] ? '0' : '1');
      csv += '\n';
    }
  }
  csv += "mass," + fmt17(grid.mass) + "\n";

  OutputDir out(resolve_out_dir(spec, opt));
  out.write_data_file("density.csv", csv);
  out.extras()["mass"] = grid.mass;
  out.extras()["masked_area"] = grid.masked_area;
  out.extras()["masked_fraction"] = grid.masked_fraction;
  out.extras()["min_value"] = grid.min_value;
  out.extras()["stencil_h"] = grid.h;
  out.extras()["resolution"] = spec.grid.resolution;
  out.write_manifest(spec.command, spec.canonical, effective_seed(spec, opt),
                     timer.seconds());
  return 0;
}

int cmd_domain(const ExperimentSpec& spec, const CliOptions& opt) {
  Timer timer;
  const WalkConfig cfg = effective_walk(spec, opt);
  require_finite_k(spec);

  constexpr int kSlices = 1024;
  std::string csv = "theta,r_minus,r_min,r_plus,t_star\n";
  for (int j = 0; j < kSlices; ++j) {
    const double theta = -kPi + (j + 0.5) * 2.0 * kPi / kSlices;
    const DomainSlice slice = boundary_radii(cfg.initial_law, cfg.k, cfg.t, theta);
    csv += fmt17(slice.theta);
    csv += ',';
    csv += fmt17(slice.r_minus);
    csv += ',';
    csv += fmt17(slice.r_min);
    csv += ',';
    csv += fmt17(slice.r_plus);
    csv += ',';
    csv += fmt17(slice.t_star);
    csv += '\n';
  }

  json phase;
  phase["k"] = cfg.k;
  if (cfg.initial_law.is_trivial()) {
    const PhaseClassification pc =
        classify_phase(cfg.initial_law, cfg.k, cfg.t, cfg.step_law.summary());
    phase["regime"] = to_string(pc.regime);
    phase["t_k_c"] = pc.t_collision;
    phase["k_inv_l2_sq"] = finite_or_string(pc.t_disk);
  } else {
    // The topological phase table is stated for the trivial initial
    // condition; for a general initial spectrum only the threshold grid is
    // reported.
    phase["regime"] = "not-applicable";
    phase["k_inv_l2_sq"] =
        finite_or_string(cfg.k * cfg.step_law.summary().inv_l2_sq);
  }

  OutputDir out(resolve_out_dir(spec, opt));
  out.write_data_file("domain.csv", csv);
  out.write_data_file("phase.json", phase.dump(2) + "\n");
  out.write_manifest(spec.command, spec.canonical, effective_seed(spec, opt),
                     timer.seconds());
  return 0;
}

struct LoadedManifest {
  json walk;
  bool k_infinite = false;
  int k = 0;
  double t = 0.0;
  InitialLaw initial_law;
};

LoadedManifest load_sibling_manifest(const std::string& data_path) {
  const std::filesystem::path manifest_path =
      std::filesystem::path(data_path).parent_path() / "manifest.json";
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in)
    throw SpecError("cannot open '" + manifest_path.string() +
                    "' (compare needs the manifest written next to each input)");
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    throw SpecError("malformed manifest '" + manifest_path.string() + "': " + e.what());
  }
  if (!manifest.contains("spec") || !manifest["spec"].contains("walk"))
    throw SpecError("manifest '" + manifest_path.string() + "' lacks a spec.walk section");

  LoadedManifest out;
  out.walk = manifest["spec"]["walk"];
  const json& k = out.walk.at("k");
  if (k.is_string()) {
    out.k_infinite = true;
  } else {
    out.k = k.get<int>();
  }
  out.t = out.walk.at("t").get<double>();
  if (out.walk.contains("initial_law")) {
    for (const json& a : out.walk["initial_law"]["atoms"]) {
      out.initial_law.atoms.push_back(
          {a.at("angle").get<double>(), a.at("weight").get<double>()});
    }
  } else {
    out.initial_law = InitialLaw::trivial();
  }
  return out;
}

std::vector<cplx> read_esd_csv(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty() || lines[0] != "trial,index,re,im")
    throw SpecError("'" + path + "' does not look like an esd.csv file");
  std::vector<cplx> samples;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_csv(lines[i]);
    if (fields.size() != 4) throw SpecError("malformed row in '" + path + "'");
    samples.emplace_back(parse_double(fields[2], path), parse_double(fields[3], path));
  }
  if (samples.empty()) throw SpecError("'" + path + "' has no eigenvalue rows");
  return samples;
}

DensityGrid read_density_csv(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty() || lines[0] != "r,theta,re,im,density,masked")
    throw SpecError("'" + path + "' does not look like a density.csv file");

  DensityGrid grid;
  bool saw_mass = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_csv(lines[i]);
    if (fields.size() == 2 && fields[0] == "mass") {
      grid.mass = parse_double(fields[1], path);
      saw_mass = true;
      continue;
    }
    if (fields.size() != 6) throw SpecError("malformed row in '" + path + "'");
    const double r = parse_double(fields[0], path);
    const double theta = parse_double(fields[1], path);
    if (grid.radii.empty() || grid.radii.back() != r) grid.radii.push_back(r);
    if (grid.radii.size() == 1) grid.angles.push_back(theta);
    grid.values.push_back(parse_double(fields[4], path));
    grid.mask.push_back(fields[5] == "1" ? 0 : 1);
  }
  if (!saw_mass) throw SpecError("'" + path + "' lacks the mass footer row");
  if (grid.radii.size() < 2 || grid.angles.size() < 2 ||
      grid.values.size() != grid.radii.size() * grid.angles.size())
    throw SpecError("'" + path + "' is not a complete polar grid");
  grid.dr = grid.radii[1] - grid.radii[0];
  grid.dtheta = 2.0 * kPi / static_cast<double>(grid.angles.size());
  return grid;
}

int cmd_compare(const ExperimentSpec& spec, const CliOptions& opt) {
  Timer timer;
  const CompareSpec& cs = spec.compare;
  if (cs.esd_path.empty() || cs.density_path.empty())
    throw SpecError("compare needs a compare section with esd and density paths");

  const LoadedManifest esd_meta = load_sibling_manifest(cs.esd_path);
  const LoadedManifest den_meta = load_sibling_manifest(cs.density_path);
  if (esd_meta.k_infinite)
    throw SpecError("compare: the eigenvalue input must come from a finite-k walk");
  if (den_meta.k_infinite || esd_meta.k != den_meta.k || esd_meta.t != den_meta.t) {
    std::ostringstream msg;
    msg << "refusing to compare mismatched configurations: esd has (k=" << esd_meta.k
        << ", t=" << esd_meta.t << "), density has (k="
        << (den_meta.k_infinite ? std::string("infinity") : std::to_string(den_meta.k))
        << ", t=" << den_meta.t << ")";
    throw SpecError(msg.str());
  }
  esd_meta.initial_law.validate();

  const std::vector<cplx> samples = read_esd_csv(cs.esd_path);
  const DensityGrid grid = read_density_csv(cs.density_path);

  std::vector<double> radii;
  radii.reserve(samples.size());
  for (const cplx& z : samples) radii.push_back(std::abs(z));

  const RadialMarginal marginal = radial_marginal(grid);
  const double w1 = wasserstein1_radial(radii, marginal);
  const SectorReport sectors = sector_compare(samples, grid, 8, 8);
  const SupportDilationReport support = outside_support_fraction(
      samples, esd_meta.initial_law, esd_meta.k, esd_meta.t, cs.dilation);

  json report;
  report["k"] = esd_meta.k;
  report["t"] = esd_meta.t;
  report["samples"] = samples.size();
  report["radial_w1"] = w1;
  report["dilation"] = cs.dilation;
  report["outside_fraction"] = support.fraction;
  report["outside_count"] = support.outside;
  json sector;
  sector["radial_bins"] = sectors.radial_bins;
  sector["angular_bins"] = sectors.angular_bins;
  sector["r_lo"] = sectors.r_lo;
  sector["r_hi"] = sectors.r_hi;
  sector["max_abs_z"] = sectors.max_abs_z;
  sector["tested_cells"] =
      std::count(sectors.tested.begin(), sectors.tested.end(), std::uint8_t{1});
  sector["outside_window"] = sectors.outside_window;
  sector["counts"] = sectors.counts;
  sector["expected"] = sectors.expected;
  sector["z_scores"] = sectors.z_scores;
  report["sector"] = sector;

  bool breach = false;
  if (cs.max_radial_w1 && w1 > *cs.max_radial_w1) breach = true;
  if (cs.max_abs_z && sectors.max_abs_z > *cs.max_abs_z) breach = true;
  if (cs.max_outside_fraction && support.fraction > *cs.max_outside_fraction)
    breach = true;
  report["pass"] = !breach;

  OutputDir out(resolve_out_dir(spec, opt));
  out.write_data_file("report.json", report.dump(2) + "\n");
  out.extras()["radial_w1"] = w1;
  out.extras()["max_abs_z"] = sectors.max_abs_z;
  out.extras()["outside_fraction"] = support.fraction;
  out.write_manifest(spec.command, spec.canonical, effective_seed(spec, opt),
                     timer.seconds());
  return breach ? 1 : 0;
}

int cmd_wz_convergence(const ExperimentSpec& spec, const CliOptions& opt) {
  Timer timer;
  const WzReport report =
      wz_convergence_experiment(spec.wz.n, spec.wz.horizon, spec.wz.p,
                                spec.wz.meshes, spec.wz.trials,
                                effective_seed(spec, opt), opt.threads);

  std::string csv = "mesh,lp_error\n";
  for (std::size_t i = 0; i < report.meshes.size(); ++i) {
    csv += fmt17(report.meshes[i]);
    csv += ',';
    csv += fmt17(report.lp_errors[i]);
    csv += '\n';
  }

  json slope;
  slope["slope"] = report.fitted_slope;
  slope["ci_low"] = report.slope_ci_low;
  slope["ci_high"] = report.slope_ci_high;
  slope["p"] = report.p;
  slope["n"] = spec.wz.n;
  slope["trials"] = spec.wz.trials;
  slope["meshes"] = report.meshes;

  OutputDir out(resolve_out_dir(spec, opt));
  out.write_data_file("wz.csv", csv);
  out.write_data_file("slope.json", slope.dump(2) + "\n");
  out.extras()["slope"] = report.fitted_slope;
  out.write_manifest(spec.command, spec.canonical, effective_seed(spec, opt),
                     timer.seconds());
  return 0;
}

double sample_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw SpecError("quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

int cmd_sigma_min(const ExperimentSpec& spec, const CliOptions& opt) {
  Timer timer;
  const WalkConfig base = effective_walk(spec, opt);
  require_finite_k(spec);
  const SigmaMinSpec& sm = spec.sigma_min;
  if (sm.sizes.size() < 2)
    throw SpecError("sigma_min.sizes needs at least two matrix sizes");
  for (std::size_t i = 0; i < sm.sizes.size(); ++i) {
    if (sm.sizes[i] < 2 || (i > 0 && sm.sizes[i] <= sm.sizes[i - 1]))
      throw SpecError("sigma_min.sizes must be strictly increasing and >= 2");
  }

  std::string csv = "n,q05,q25,median,q75,q95\n";
  std::vector<double> sizes_d, medians;
  json fractions = json::array();
  for (std::size_t idx = 0; idx < sm.sizes.size(); ++idx) {
    WalkConfig cfg = base;
    cfg.n = sm.sizes[idx];
    // Decorrelate the sizes: each row gets its own seed offset, and trials
    // within a row get their own streams.
    cfg.seed = base.seed + 0x9e3779b97f4a7c15ULL * idx;
    const SigmaMinTable table =
        sigma_min_shifted_experiment(cfg, sm.z, sm.epsilons, opt.threads);
    csv += std::to_string(cfg.n);
    csv += ',';
    csv += fmt17(sample_quantile(table.samples, 0.05));
    csv += ',';
    csv += fmt17(sample_quantile(table.samples, 0.25));
    csv += ',';
    csv += fmt17(table.median);
    csv += ',';
    csv += fmt17(sample_quantile(table.samples, 0.75));
    csv += ',';
    csv += fmt17(sample_quantile(table.samples, 0.95));
    csv += '\n';
    sizes_d.push_back(static_cast<double>(cfg.n));
    medians.push_back(table.median);
    fractions.push_back(table.fractions);
  }
  const double gamma = -fit_loglog_slope(sizes_d, medians).slope;
  csv += "gamma," + fmt17(gamma) + "\n";

  OutputDir out(resolve_out_dir(spec, opt));
  out.write_data_file("sigmin.csv", csv);
  out.extras()["gamma"] = gamma;
  out.extras()["z_re"] = sm.z.real();
  out.extras()["z_im"] = sm.z.imag();
  out.extras()["epsilons"] = sm.epsilons;
  out.extras()["fractions"] = fractions;
  out.write_manifest(spec.command, spec.canonical, effective_seed(spec, opt),
                     timer.seconds());
  return 0;
}

int cmd_k2_oracle(const ExperimentSpec& spec, const CliOptions& opt) {
  Timer timer;
  constexpr double kTolerance = 1e-5;
  constexpr int kResolution = 40;
  struct Case {
    const char* name;
    StepLaw step;
    double t;
  };
  const Case cases[] = {
      {"haar_t3", StepLaw::haar(), 3.0},
      {"circular_t1", StepLaw::circular(), 1.0},
      {"circular_t2", StepLaw::circular(), 2.0},
  };

  json configs;
  bool pass = true;
  for (const Case& c : cases) {
    const K2OracleResult res = k2_oracle_compare(c.step, c.t, kResolution);
    json entry;
    entry["max_abs_err"] = res.max_abs_err;
    entry["points"] = res.points;
    entry["skipped"] = res.skipped;
    configs[c.name] = entry;
    if (res.max_abs_err > kTolerance) pass = false;
  }

  json oracle;
  oracle["grid"] = kResolution;
  oracle["tolerance"] = kTolerance;
  oracle["configs"] = configs;
  oracle["pass"] = pass;

  OutputDir out(resolve_out_dir(spec, opt));
  out.write_data_file("oracle.json", oracle.dump(2) + "\n");
  out.extras()["pass"] = pass;
  out.write_manifest(spec.command, spec.canonical, effective_seed(spec, opt),
                     timer.seconds());
  return pass ? 0 : 1;
}

int cmd_limabean(const ExperimentSpec& spec, const CliOptions& opt) {
  Timer timer;
  const WalkConfig cfg = effective_walk(spec, opt);
  require_finite_k(spec);
  if (!cfg.initial_law.is_trivial())
    throw SpecError("the large-k convergence experiment needs the trivial "
                    "initial law");

  const std::vector<ConvergenceRow> rows = limabean_convergence(
      cfg.step_law, cfg.t, spec.limabean.k_values, spec.limabean.sup_angles,
      spec.limabean.sup_radii);

  std::string csv = "k,sup_gap,hausdorff\n";
  bool sup_monotone = true, haus_monotone = true;
  json points = json::array(), skipped = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv += std::to_string(rows[i].k);
    csv += ',';
    csv += fmt17(rows[i].sup_gap);
    csv += ',';
    csv += fmt17(rows[i].hausdorff);
    csv += '\n';
    if (i > 0) {
      if (!(rows[i].sup_gap < rows[i - 1].sup_gap)) sup_monotone = false;
      if (!(rows[i].hausdorff < rows[i - 1].hausdorff)) haus_monotone = false;
    }
    points.push_back(rows[i].points);
    skipped.push_back(rows[i].skipped);
  }

  OutputDir out(resolve_out_dir(spec, opt));
  out.write_data_file("conv.csv", csv);
  out.extras()["k_values"] = spec.limabean.k_values;
  out.extras()["sup_monotone"] = sup_monotone;
  out.extras()["hausdorff_monotone"] = haus_monotone;
  out.extras()["points_per_k"] = points;
  out.extras()["skipped_per_k"] = skipped;
  out.write_manifest(spec.command, spec.canonical, effective_seed(spec, opt),
                     timer.seconds());
  return (sup_monotone && haus_monotone) ? 0 : 1;
}

}  // namespace

int run_command(const ExperimentSpec& spec, const CliOptions& opt) {
  if (spec.command == "sample-esd") return cmd_sample_esd(spec, opt);
  if (spec.command == "density-grid") return cmd_density_grid(spec, opt);
  if (spec.command == "domain") return cmd_domain(spec, opt);
  if (spec.command == "compare") return cmd_compare(spec, opt);
  if (spec.command == "wz-convergence") return cmd_wz_convergence(spec, opt);
  if (spec.command == "sigma-min") return cmd_sigma_min(spec, opt);
  if (spec.command == "k2-oracle") return cmd_k2_oracle(spec, opt);
  if (spec.command == "limabean") return cmd_limabean(spec, opt);
  throw SpecError("unknown command '" + spec.command + "'");
}

}  // namespace limabean::cli
