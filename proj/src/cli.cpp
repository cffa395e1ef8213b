#include "unduloid/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "parallel.hpp"
#include "unduloid/calculus.hpp"
#include "unduloid/family.hpp"
#include "unduloid/geometry.hpp"
#include "unduloid/report.hpp"
#include "unduloid/spectrum.hpp"

namespace unduloid {

namespace {

using ordered_json = nlohmann::ordered_json;

// ===== OUTPUT =====

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Column {
  std::string name;
  std::vector<double> nums;
  std::vector<std::string> strs;  // textual column (verdict labels)
  bool integral = false;          // serialize numeric entries without decimals
  bool textual() const { return !strs.empty(); }
  std::size_t size() const { return textual() ? strs.size() : nums.size(); }
};

using Columns = std::vector<Column>;

std::string cell(const Column& col, std::size_t row) {
  if (col.textual()) return col.strs[row];
  const double x = col.nums[row];
  if (col.integral && !std::isnan(x)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(std::llround(x)));
    return buf;
  }
  return fmt(x);
}

// One emitted table: self-describing '#' echo, '# note:' diagnostics, then a
// header row and the data.  The JSON mirror keeps the same column order.
struct Emission {
  std::string echo;  // config echo (without the '# ' prefix)
  ordered_json config = ordered_json::object();
  std::vector<std::string> notes;
  Columns columns;
};

std::string to_csv(const Emission& e) {
  std::string out;
  out += "# ";
  out += e.echo;
  out += '\n';
  for (const std::string& note : e.notes) {
    out += "# note: ";
    out += note;
    out += '\n';
  }
  for (std::size_t c = 0; c < e.columns.size(); ++c) {
    if (c) out += ',';
    out += e.columns[c].name;
  }
  out += '\n';
  const std::size_t rows = e.columns.empty() ? 0 : e.columns[0].size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < e.columns.size(); ++c) {
      if (c) out += ',';
      out += cell(e.columns[c], r);
    }
    out += '\n';
  }
  return out;
}

ordered_json column_array(const Column& col) {
  ordered_json arr = ordered_json::array();
  if (col.textual()) {
    for (const std::string& s : col.strs) arr.push_back(s);
    return arr;
  }
  for (const double x : col.nums) {
    if (std::isnan(x))
      arr.push_back(nullptr);
    else if (col.integral)
      arr.push_back(static_cast<long long>(std::llround(x)));
    else
      arr.push_back(x);
  }
  return arr;
}

ordered_json table_json(const Columns& columns) {
  ordered_json table;
  ordered_json names = ordered_json::array();
  for (const Column& col : columns) names.push_back(col.name);
  table["columns"] = names;
  ordered_json data = ordered_json::object();
  for (const Column& col : columns) data[col.name] = column_array(col);
  table["data"] = data;
  return table;
}

ordered_json to_json(const char* command, const Emission& e) {
  ordered_json j;
  j["command"] = command;
  j["config"] = e.config;
  j["notes"] = e.notes;
  ordered_json table = table_json(e.columns);
  j["columns"] = table["columns"];
  j["data"] = table["data"];
  return j;
}

void write_text(const std::string& path, const std::string& body) {
  if (path.empty()) {
    std::cout << body;
    std::cout.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::invalid_argument("cannot open output file: " + path);
  file << body;
  if (!file) throw std::invalid_argument("failed to write output file: " + path);
}

void emit(const RunConfig& rc, const char* command, const Emission& e) {
  if (rc.output_format == "json")
    write_text(rc.output_path, to_json(command, e).dump(2) + "\n");
  else
    write_text(rc.output_path, to_csv(e));
}

// ===== CONFIGURATION =====

SlabConfig slab_config(const RunConfig& rc) {
  SlabConfig cfg;
  cfg.n = rc.n;
  cfg.d = rc.d;
  cfg.t_floor = rc.t_floor;
  return cfg;
}

QuadratureSpec quad_spec(const RunConfig& rc) {
  QuadratureSpec quad;
  quad.method = rc.method == "gauss" ? QuadMethod::SubstitutedGauss
                                     : QuadMethod::DoubleExponential;
  quad.rel_tol = rc.rel_tol;
  quad.abs_tol = rc.abs_tol;
  quad.max_level = rc.max_level;
  return quad;
}

std::string common_echo(const char* command, const RunConfig& rc) {
  std::string line = command;
  line += ": n=" + std::to_string(rc.n) + " d=" + fmt(rc.d) +
          " t_floor=" + fmt(rc.t_floor) + " method=" + rc.method +
          " rel_tol=" + fmt(rc.rel_tol) + " abs_tol=" + fmt(rc.abs_tol) +
          " max_level=" + std::to_string(rc.max_level);
  return line;
}

ordered_json common_config(const RunConfig& rc) {
  ordered_json cfg;
  cfg["n"] = rc.n;
  cfg["d"] = rc.d;
  cfg["t_floor"] = rc.t_floor;
  cfg["method"] = rc.method;
  cfg["rel_tol"] = rc.rel_tol;
  cfg["abs_tol"] = rc.abs_tol;
  cfg["max_level"] = rc.max_level;
  return cfg;
}

// steps + 1 uniform nodes on [lo, hi], endpoints exact.
std::vector<double> uniform_nodes(double lo, double hi, int steps) {
  std::vector<double> nodes(steps + 1);
  for (int i = 0; i <= steps; ++i)
    nodes[i] = lo + (hi - lo) * (static_cast<double>(i) / steps);
  nodes.front() = lo;
  nodes.back() = hi;
  return nodes;
}

// ===== SUBCOMMANDS =====

int cmd_family(const RunConfig& rc, double t) {
  validate(rc);
  const SlabConfig cfg = slab_config(rc);
  const QuadratureSpec quad = quad_spec(rc);
  FamilyParam param;
  param.t = t;
  const ProfileSamples samples = profile_samples(param, cfg, quad, rc.grid_n);

  Emission e;
  e.echo = common_echo("family", rc) + " t=" + fmt(t) +
           " grid=" + std::to_string(rc.grid_n);
  e.config = common_config(rc);
  e.config["t"] = t;
  e.config["grid"] = rc.grid_n;
  e.columns.resize(5);
  e.columns[0] = {"z", samples.grid, {}, false};
  e.columns[1] = {"v", samples.v, {}, false};
  e.columns[2] = {"v_z", samples.v_z, {}, false};
  e.columns[3] = {"v_zz", samples.v_zz, {}, false};
  e.columns[4] = {"eta",
                  std::vector<double>(samples.grid.size(), samples.eta),
                  {},
                  false};
  emit(rc, "family", e);
  return 0;
}

int cmd_scan(const RunConfig& rc, bool symmetric) {
  validate(rc);
  const SlabConfig cfg = slab_config(rc);
  const QuadratureSpec quad = quad_spec(rc);

  std::vector<double> nodes = uniform_nodes(rc.t_min, rc.t_max, rc.steps);
  if (symmetric) {
    const std::size_t base = nodes.size();
    for (std::size_t i = 0; i < base; ++i)
      if (nodes[i] != 1.0) nodes.push_back(1.0 / nodes[i]);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  }

  std::vector<std::array<double, 7>> rows(nodes.size());
  std::vector<std::string> notes(nodes.size());
  detail::parallel_for(nodes.size(), [&](std::size_t i) {
    const double t = nodes[i];
    const GeometricScalars g = geometric_scalars(t, cfg, quad);
    const double nan = std::nan("");
    double v1 = nan, v2 = nan, x1 = nan;
    bool feasible = true;
    try {
      v1 = enclosed_volume_slope(t, cfg, quad).value;
    } catch (const StepError&) {
      feasible = false;
    }
    try {
      v2 = enclosed_volume_curvature(t, cfg, quad).value;
    } catch (const StepError&) {
      feasible = false;
    }
    try {
      x1 = shape_invariant_slope(t, cfg, quad).value;
    } catch (const StepError&) {
      feasible = false;
    }
    if (!feasible)
      notes[i] = "no derivative step fits between t=" + fmt(t) +
                 " and the floor; slope cells left as nan";
    rows[i] = {t, g.eta, g.volume, v1, v2, g.xi, x1};
  });

  Emission e;
  e.echo = common_echo("scan", rc) + " t_min=" + fmt(rc.t_min) +
           " t_max=" + fmt(rc.t_max) + " steps=" + std::to_string(rc.steps) +
           " symmetric=" + (symmetric ? "1" : "0");
  e.config = common_config(rc);
  e.config["t_min"] = rc.t_min;
  e.config["t_max"] = rc.t_max;
  e.config["steps"] = rc.steps;
  e.config["symmetric"] = symmetric;
  for (const std::string& note : notes)
    if (!note.empty()) e.notes.push_back(note);
  const char* names[7] = {"t",      "eta",
                          "volume", "volume_slope",
                          "volume_curvature", "shape_invariant",
                          "shape_invariant_slope"};
  e.columns.resize(7);
  for (std::size_t c = 0; c < 7; ++c) {
    e.columns[c].name = names[c];
    e.columns[c].nums.resize(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      e.columns[c].nums[r] = rows[r][c];
  }
  emit(rc, "scan", e);
  return 0;
}

int cmd_spectrum(const RunConfig& rc, double t, int modes) {
  validate(rc);
  if (modes < 1) throw std::invalid_argument("--modes must be at least 1");
  const SlabConfig cfg = slab_config(rc);
  const QuadratureSpec quad = quad_spec(rc);
  FamilyParam param;
  param.t = t;
  const ProfileSamples samples = profile_samples(param, cfg, quad, rc.grid_n);
  const SpectrumResult spectrum =
      eigen_spectrum(assemble_operator(samples, cfg), modes);

  Emission e;
  e.echo = common_echo("spectrum", rc) + " t=" + fmt(t) +
           " grid=" + std::to_string(rc.grid_n) +
           " modes=" + std::to_string(modes);
  e.config = common_config(rc);
  e.config["t"] = t;
  e.config["grid"] = rc.grid_n;
  e.config["modes"] = modes;
  e.columns.resize(2);
  e.columns[0].name = "index";
  e.columns[0].integral = true;
  e.columns[1].name = "lambda";
  for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
    e.columns[0].nums.push_back(static_cast<double>(i + 1));
    e.columns[1].nums.push_back(spectrum.eigenvalues[i]);
  }
  emit(rc, "spectrum", e);
  return 0;
}

int cmd_classify(const RunConfig& rc) {
  validate(rc);
  const SlabConfig cfg = slab_config(rc);
  const QuadratureSpec quad = quad_spec(rc);
  const std::vector<double> nodes = uniform_nodes(rc.t_min, rc.t_max, rc.steps);
  const ScanClassification scan = scan_classification(cfg, quad, nodes);

  Emission e;
  e.echo = common_echo("classify", rc) + " t_min=" + fmt(rc.t_min) +
           " t_max=" + fmt(rc.t_max) + " steps=" + std::to_string(rc.steps);
  e.config = common_config(rc);
  e.config["t_min"] = rc.t_min;
  e.config["t_max"] = rc.t_max;
  e.config["steps"] = rc.steps;

  const ScanSummary& summary = scan.summary;
  e.notes.push_back(std::string("hypothesis audit: ") +
                    (summary.hypothesis_ok ? "ok" : "failed"));
  for (const StableInterval& window : summary.stable_intervals)
    e.notes.push_back("stable interval: [" + fmt(window.lo) + ", " +
                      fmt(window.hi) + "]");
  for (const double t0 : summary.critical_points)
    e.notes.push_back("critical point: t0=" + fmt(t0));
  for (const MidpointCheck& mc : summary.midpoints)
    e.notes.push_back("midpoint t=" + fmt(mc.t) + " negative_count=" +
                      std::to_string(mc.negative_count));

  e.columns.resize(6);
  e.columns[0].name = "t";
  e.columns[1].name = "verdict";
  e.columns[2].name = "v_prime";
  e.columns[3].name = "v_prime_error";
  e.columns[4].name = "hypothesis_ok";
  e.columns[4].integral = true;
  e.columns[5].name = "negative_count";
  e.columns[5].integral = true;
  const double pi = std::numbers::pi;
  const double threshold = -1e-4 * pi * pi / (cfg.d * cfg.d);
  for (const StabilityVerdict& v : scan.verdicts) {
    e.columns[0].nums.push_back(v.t0);
    e.columns[1].strs.push_back(verdict_name(v.verdict));
    e.columns[2].nums.push_back(v.v_prime);
    e.columns[3].nums.push_back(v.v_prime_error);
    e.columns[4].nums.push_back(v.hypothesis_ok ? 1.0 : 0.0);
    if (v.evidence.has_value()) {
      int negatives = 0;
      for (const double lambda : v.evidence->eigenvalues)
        if (lambda < threshold) ++negatives;
      e.columns[5].nums.push_back(static_cast<double>(negatives));
    } else {
      e.columns[5].nums.push_back(std::nan(""));
    }
  }

  if (rc.output_format == "json") {
    ordered_json j = to_json("classify", e);
    ordered_json s;
    s["hypothesis_ok"] = summary.hypothesis_ok;
    ordered_json intervals = ordered_json::array();
    for (const StableInterval& window : summary.stable_intervals)
      intervals.push_back({window.lo, window.hi});
    s["stable_intervals"] = intervals;
    s["critical_points"] = summary.critical_points;
    ordered_json mids = ordered_json::array();
    for (const MidpointCheck& mc : summary.midpoints)
      mids.push_back({{"t", mc.t}, {"negative_count", mc.negative_count}});
    s["midpoints"] = mids;
    j["summary"] = s;
    write_text(rc.output_path, j.dump(2) + "\n");
  } else {
    write_text(rc.output_path, to_csv(e));
  }
  return 0;
}

int cmd_conjecture(const RunConfig& rc) {
  validate(rc);
  const SlabConfig cfg = slab_config(rc);
  const QuadratureSpec quad = quad_spec(rc);
  const double hi = std::min(rc.t_max, 1.0 - 1e-3);
  if (!(rc.t_min < hi))
    throw std::invalid_argument(
        "the conjecture scan needs t_min below 1 - 1e-3 (the grid stops "
        "there; the slope vanishes at t=1 by symmetry)");
  const std::vector<double> nodes = uniform_nodes(rc.t_min, hi, rc.steps);
  const ConjectureReport report = conjecture_scan(cfg, quad, nodes);

  Emission e;
  e.echo = common_echo("conjecture", rc) + " t_min=" + fmt(rc.t_min) +
           " t_max=" + fmt(hi) + " steps=" + std::to_string(rc.steps);
  e.config = common_config(rc);
  e.config["t_min"] = rc.t_min;
  e.config["t_max"] = hi;
  e.config["steps"] = rc.steps;
  if (report.no_counterexample) {
    e.notes.push_back("no counterexample found");
  } else {
    for (const double t : report.violations)
      e.notes.push_back("violation at t=" + fmt(t));
  }
  e.columns.resize(3);
  e.columns[0].name = "t";
  e.columns[1].name = "shape_invariant_slope";
  e.columns[2].name = "error";
  for (const ConjectureNode& node : report.nodes) {
    e.columns[0].nums.push_back(node.t);
    e.columns[1].nums.push_back(node.xi_slope);
    e.columns[2].nums.push_back(node.error);
  }

  if (rc.output_format == "json") {
    ordered_json j = to_json("conjecture", e);
    j["no_counterexample"] = report.no_counterexample;
    j["violations"] = report.violations;
    write_text(rc.output_path, j.dump(2) + "\n");
  } else {
    write_text(rc.output_path, to_csv(e));
  }
  return 0;
}

int cmd_figures(const RunConfig& rc) {
  validate(rc);
  const SlabConfig cfg = slab_config(rc);
  const QuadratureSpec quad = quad_spec(rc);
  const double hi = std::min(rc.t_max, 1.0 - 1e-3);
  if (!(rc.t_min < hi))
    throw std::invalid_argument(
        "the figure grid needs t_min below 1 - 1e-3 (its upper cap)");
  const std::vector<double> nodes = uniform_nodes(rc.t_min, hi, rc.steps);
  const FigureData fig = figure_data(cfg, quad, nodes);

  auto fill = [](const DataTable& table) {
    Columns columns(table.columns.size());
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      columns[c].name = table.columns[c];
      columns[c].nums.resize(table.rows.size());
      for (std::size_t r = 0; r < table.rows.size(); ++r)
        columns[c].nums[r] = table.rows[r][c];
    }
    return columns;
  };

  const std::string range = " t_min=" + fmt(rc.t_min) + " t_max=" + fmt(hi) +
                            " steps=" + std::to_string(rc.steps);
  Emission curves;
  curves.echo = common_echo("figures (curves)", rc) + range;
  curves.config = common_config(rc);
  curves.config["t_min"] = rc.t_min;
  curves.config["t_max"] = hi;
  curves.config["steps"] = rc.steps;
  curves.columns = fill(fig.curves);
  // the last column of the area table is a 0/1 flag
  Emission areas;
  areas.echo = common_echo("figures (areas)", rc) + range;
  areas.config = curves.config;
  areas.columns = fill(fig.areas);
  areas.columns.back().integral = true;

  if (rc.output_format == "json") {
    ordered_json j;
    j["command"] = "figures";
    j["config"] = curves.config;
    j["curves"] = table_json(curves.columns);
    j["areas"] = table_json(areas.columns);
    const std::string path =
        rc.output_path.empty() ? std::string() : rc.output_path + ".json";
    write_text(path, j.dump(2) + "\n");
    return 0;
  }
  if (rc.output_path.empty()) {
    write_text("", to_csv(curves));
    write_text("", to_csv(areas));
  } else {
    write_text(rc.output_path + "_curves.csv", to_csv(curves));
    write_text(rc.output_path + "_areas.csv", to_csv(areas));
  }
  return 0;
}

}  // namespace

void validate(const RunConfig& rc) {
  if (rc.n < 2 || rc.n > 64)
    throw std::invalid_argument("--n must lie in [2, 64]");
  if (!(rc.d > 0.0)) throw std::invalid_argument("--d must be positive");
  if (!(rc.t_min > 0.0) || !(rc.t_min < rc.t_max) || !(rc.t_max <= 1.0))
    throw std::invalid_argument(
        "the scan range must satisfy 0 < t_min < t_max <= 1");
  if (rc.steps < 10) throw std::invalid_argument("--steps must be at least 10");
  if (rc.grid_n < 16) throw std::invalid_argument("--grid must be at least 16");
}

// ===== DRIVER =====

int run_cli(const std::vector<std::string>& args) {
  RunConfig rc;
  double t_value = 1.0;
  int modes = 6;
  bool symmetric = false;
  bool seedless = false;  // accepted for interface stability; every code
                          // path is deterministic with or without it

  CLI::App app{
      "unduloid: constant-mean-curvature profiles in a slab -- family "
      "sampling, geometric functionals, stability spectra, and reports"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub, bool with_range, bool with_grid) {
    sub->add_option("--n", rc.n, "ambient-minus-one dimension (2..64)")
        ->required();
    sub->add_option("--d", rc.d, "slab width")->capture_default_str();
    sub->add_option("--t-floor", rc.t_floor,
                    "smallest admissible neck parameter")
        ->capture_default_str();
    sub->add_option("--method", rc.method, "quadrature rule")
        ->check(CLI::IsMember({"tanh-sinh", "gauss"}))
        ->capture_default_str();
    sub->add_option("--rel-tol", rc.rel_tol, "quadrature relative tolerance")
        ->capture_default_str();
    sub->add_option("--abs-tol", rc.abs_tol, "quadrature absolute tolerance")
        ->capture_default_str();
    sub->add_option("--max-level", rc.max_level,
                    "quadrature refinement ceiling")
        ->capture_default_str();
    sub->add_option("--format", rc.output_format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    sub->add_option("--out", rc.output_path,
                    "output path (stdout when omitted; `figures` treats it "
                    "as a filename prefix)");
    sub->add_flag("--seedless", seedless,
                  "deterministic mode (always on; kept for interface "
                  "stability)");
    if (with_range) {
      sub->add_option("--t-min", rc.t_min, "range lower end")
          ->capture_default_str();
      sub->add_option("--t-max", rc.t_max, "range upper end")
          ->capture_default_str();
      sub->add_option("--steps", rc.steps, "range subdivisions (>= 10)")
          ->capture_default_str();
    }
    if (with_grid)
      sub->add_option("--grid", rc.grid_n, "profile / spectral resolution")
          ->capture_default_str();
  };

  CLI::App* family = app.add_subcommand(
      "family", "sample one profile: z, v, v_z, v_zz, eta");
  add_common(family, false, true);
  family->add_option("--t", t_value, "neck parameter")->required();

  CLI::App* scan = app.add_subcommand(
      "scan", "functional table over a t-range: eta, V, V', V'', xi, xi'");
  add_common(scan, true, false);
  scan->add_flag("--symmetric", symmetric,
                 "append the reciprocal 1/t of every node (reflection check)");

  CLI::App* spectrum = app.add_subcommand(
      "spectrum", "lowest eigenvalues of the constrained stability operator");
  add_common(spectrum, false, true);
  spectrum->add_option("--t", t_value, "neck parameter")->required();
  spectrum->add_option("--modes", modes, "number of eigenvalues (>= 1)")
      ->capture_default_str();

  CLI::App* classify = app.add_subcommand(
      "classify", "stability verdicts over a t-range with an audit summary");
  add_common(classify, true, false);

  CLI::App* conjecture = app.add_subcommand(
      "conjecture", "monotonicity scan of the shape invariant");
  add_common(conjecture, true, false);

  CLI::App* figures = app.add_subcommand(
      "figures", "plot-ready curve and area tables");
  add_common(figures, true, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (app.got_subcommand(family)) return cmd_family(rc, t_value);
    if (app.got_subcommand(scan)) return cmd_scan(rc, symmetric);
    if (app.got_subcommand(spectrum)) return cmd_spectrum(rc, t_value, modes);
    if (app.got_subcommand(classify)) return cmd_classify(rc);
    if (app.got_subcommand(conjecture)) return cmd_conjecture(rc);
    if (app.got_subcommand(figures)) return cmd_figures(rc);
    return 2;
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help and friends: print and succeed
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericsError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace unduloid
