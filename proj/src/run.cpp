#include "vrmass/run.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "vrmass/coercivity.hpp"
#include "vrmass/errors.hpp"
#include "vrmass/experiments.hpp"
#include "vrmass/mass.hpp"
#include "vrmass/vstatic.hpp"

namespace vrmass::cli {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

constexpr std::pair<Command, std::string_view> kCommands[] = {
    {Command::Mass, "mass"},         {Command::Curvature, "curvature"},
    {Command::VStatic, "vstatic"},   {Command::Critical, "critical"},
    {Command::Coercivity, "coercivity"}, {Command::Compare, "compare"},
    {Command::Project, "project"}};

// ---- config -----------------------------------------------------------------

template <class T>
void read(const YAML::Node& node, const char* key, const std::string& path, T& out) {
  const YAML::Node v = node[key];
  if (!v) return;
  try {
    out = v.as<T>();
  } catch (const YAML::Exception&) {
    throw ValidationError(path + "." + key + ": wrong type");
  }
}

template <class T>
void read(const YAML::Node& node, const char* key, const std::string& path, std::optional<T>& out) {
  T value{};
  if (!node[key]) return;
  read(node, key, path, value);
  out = value;
}

void expect_map(const YAML::Node& node, const std::string& path) {
  if (node && !node.IsMap()) throw ValidationError(path + ": expected a mapping");
}

double sphere_area(int n) {
  // Area of the unit (n-1)-sphere: 2 π^{n/2} / Γ(n/2).
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

// ---- output -----------------------------------------------------------------

std::string number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Json json_number(double x) { return std::isfinite(x) ? Json(x) : Json(number(x)); }

Json json_array(const std::vector<double>& xs) {
  Json out = Json::array();
  for (double x : xs) out.push_back(json_number(x));
  return out;
}

class Table {
 public:
  Table(std::string name, std::vector<std::string> header)
      : name_(std::move(name)), header_(std::move(header)) {}
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }
  const std::string& name() const { return name_; }

  std::string csv() const {
    std::ostringstream os;
    auto line = [&os](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
      os << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return os.str();
  }

 private:
  std::string name_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Critical: return "critical";
    case Verdict::NonCritical: return "noncritical";
    case Verdict::Rejected: return "rejected";
  }
  return "";
}

std::string_view branch_name(Branch b) {
  switch (b) {
    case Branch::LinearGrowth: return "linear_growth";
    case Branch::AsymptoticallyConstant: return "asymptotically_constant";
    case Branch::Ambiguous: return "ambiguous";
  }
  return "";
}

// ---- metric construction ----------------------------------------------------

std::vector<std::array<double, 3>> read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("metric.file: cannot open " + path);
  std::string line;
  std::getline(in, line);
  std::vector<std::array<double, 3>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 3> row{};
    std::istringstream ls(line);
    std::string cell;
    for (double& x : row) {
      if (!std::getline(ls, cell, ',')) throw ValidationError("metric.file: expected columns r,q,w");
      try {
        x = std::stod(cell);
      } catch (const std::exception&) {
        throw ValidationError("metric.file: bad number '" + cell + "'");
      }
    }
    rows.push_back(row);
  }
  if (rows.size() < 4) throw ValidationError("metric.file: need at least 4 samples");
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i][0] > rows[i - 1][0])) throw ValidationError("metric.file: radii must increase");
  return rows;
}

RadialMetric build_metric(const RunConfig& cfg) {
  const double vol = cfg.cross_section_volume.value_or(sphere_area(cfg.n));
  const auto man = RadialManifold::make(cfg.n, cfg.k, vol, cfg.inner_radius);
  RadialMetric g;
  if (cfg.metric_kind == "reference") {
    g = reference_metric(man);
  } else if (cfg.metric_kind == "schwarzschild_ads") {
    g = schwarzschild_ads(man, cfg.kottler_mass, cfg.with_boundary, cfg.boundary_offset).metric;
  } else if (cfg.metric_kind == "reference_plus_profiles") {
    g = reference_metric(man);
    SymmetricPerturbation h{profiles::zero(), profiles::zero()};
    for (const auto& b : cfg.profiles) {
      if (b.component == "rr")
        h.h_rr = h.h_rr + profiles::bump(b.centre, b.half_width, b.amplitude * g.q.value(b.centre));
      else
        h.h_tan = h.h_tan + profiles::bump(b.centre, b.half_width, b.amplitude * g.w.value(b.centre));
    }
    g = perturbed(g, h, 1.0);
  } else {
    const auto rows = read_samples(cfg.sample_file);
    std::vector<double> r, q, w;
    for (const auto& row : rows) {
      r.push_back(row[0]);
      q.push_back(row[1]);
      w.push_back(row[2]);
    }
    if (r.front() > man.domain_start())
      throw ValidationError("metric.file: samples must start at or below the inner radius");
    // Beyond the last sample the metric continues as the reference.
    g = reference_metric(man);
    g.q = profiles::spliced(profiles::sampled_log_spline(r, q), g.q, r.back());
    g.w = profiles::spliced(profiles::sampled_log_spline(r, w), g.w, r.back());
  }
  if (cfg.tau) g.tau = *cfg.tau;
  return g;
}

double max_scalar_excess(const RadialMetric& g, double r_max) {
  double worst = 0.0;
  for (double r : residual_grid(g, r_max, 20).nodes) worst = std::max(worst, std::abs(scalar_excess(g, r)));
  return worst;
}

Json mass_json(const MassReport& m) {
  std::vector<double> radii, surface, volume, combined;
  for (std::size_t i = 0; i < m.combined_samples.size(); ++i) {
    radii.push_back(m.combined_samples[i].first);
    surface.push_back(m.surface_samples[i].second);
    volume.push_back(m.volume_samples[i].second);
    combined.push_back(m.combined_samples[i].second);
  }
  return Json{{"mass", json_number(m.mass)},
              {"error_estimate", json_number(m.error_estimate)},
              {"scalar_integrability", json_number(m.scalar_integrability)},
              {"integrability_ok", m.integrability_ok},
              {"reference_core_volume", json_number(m.reference_core_volume)},
              {"correction_exponent", json_number(m.extrapolation.correction_exponent)},
              {"cutoffs", json_array(radii)},
              {"surface_samples", json_array(surface)},
              {"volume_samples", json_array(volume)},
              {"combined_samples", json_array(combined)}};
}

// ---- commands ---------------------------------------------------------------

struct Context {
  const RunConfig& cfg;
  const RunOptions& opts;
  Json& results;
  std::vector<Table>& tables;
  std::string& verdict;
};

MassOptions mass_options(const RunConfig& cfg) {
  return {cfg.mass_r_start, cfg.mass_cutoffs, cfg.quadrature_tol};
}

ExperimentOptions experiment_options(const RunConfig& cfg, int jobs) {
  ExperimentOptions eo;
  eo.step = cfg.step;
  eo.tol = cfg.tol.value_or(1e-4);
  eo.jobs = jobs;
  eo.projection.outer_radius = cfg.outer_radius;
  eo.projection.per_decade = cfg.per_decade;
  eo.mass = mass_options(cfg);
  return eo;
}

void run_mass(Context& ctx) {
  const auto g = build_metric(ctx.cfg);
  const auto rep = mass_vr(g, mass_options(ctx.cfg));
  ctx.results["mass"] = mass_json(rep);
  Table t("mass_samples", {"R", "surface", "volume", "combined"});
  for (std::size_t i = 0; i < rep.combined_samples.size(); ++i)
    t.row({number(rep.combined_samples[i].first), number(rep.surface_samples[i].second),
           number(rep.volume_samples[i].second), number(rep.combined_samples[i].second)});
  ctx.tables.push_back(std::move(t));
  if (!rep.integrability_ok) throw ConvergenceError("scalar curvature excess is not integrable");
  ctx.verdict = "ok";
}

void run_curvature(Context& ctx) {
  const auto g = build_metric(ctx.cfg);
  const int n = g.n();
  Table t("curvature", {"r", "scal", "scal_excess", "ric_rr", "ric_tan", "einstein_deficit",
                        "mean_curvature", "frame_deviation"});
  double worst = 0.0, deficit = 0.0;
  for (double r : residual_grid(g, ctx.cfg.r_max, ctx.cfg.points_per_decade).nodes) {
    const auto c = curvature_fields(g, r);
    const double excess = c.scal + n * (n - 1.0);
    worst = std::max(worst, std::abs(excess));
    deficit = std::max(deficit, c.einstein_deficit);
    t.row({number(r), number(c.scal), number(excess), number(c.ric_rr), number(c.ric_tan),
           number(c.einstein_deficit), number(mean_curvature_data(g, r).H),
           number(frame_deviation(g, r))});
  }
  ctx.tables.push_back(std::move(t));
  ctx.results["max_scalar_excess"] = json_number(worst);
  ctx.results["max_einstein_deficit"] = json_number(deficit);
  const double tol = ctx.cfg.tol.value_or(1e-10);
  ctx.verdict = worst <= tol ? "csc" : "not_csc";
}

void run_vstatic(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto g = build_metric(cfg);
  const int n = g.n();
  const std::string potential = cfg.potential.empty() ? "one" : cfg.potential;
  StaticData sd;
  if (potential == "one") {
    sd = {profiles::constant(1.0), cfg.lambda};
  } else if (potential == "kottler") {
    const double m = cfg.metric_kind == "schwarzschild_ads" ? cfg.kottler_mass : 0.0;
    sd = {profiles::kottler_potential(n, cfg.k, m), cfg.lambda};
  } else if (potential == "bounded") {
    sd = bounded_static_potential(g, cfg.lambda);
  } else {
    const auto ts = solve_trace_equation(g, cfg.trace_boundary_value, cfg.lambda / (n - 1.0));
    sd = {ts.f, cfg.lambda};
    ctx.results["trace_ode_residual"] = json_number(ts.ode_residual);
  }
  const auto grid = residual_grid(g, cfg.r_max, cfg.points_per_decade);
  const auto rep = vstatic_residual(g, sd, grid, 0.0);
  Table t("vstatic", {"r", "f", "frame_residual"});
  for (std::size_t i = 0; i < rep.radii.size(); ++i)
    t.row({number(rep.radii[i]), number(sd.f.value(rep.radii[i])), number(rep.frame_residuals[i])});
  ctx.tables.push_back(std::move(t));
  ctx.results["potential"] = potential;
  ctx.results["lambda"] = json_number(sd.lambda);
  ctx.results["sup_frame_residual"] = json_number(rep.sup_frame_residual);
  const double lo = std::max(10.0, grid.r_min);
  if (cfg.r_max > 4.0 * lo) {
    const auto cl = classify_asymptotics(sd.f, sd.lambda, n, LogGrid::make(lo, cfg.r_max, cfg.points_per_decade));
    ctx.results["classification"] = Json{{"branch", branch_name(cl.branch)},
                                         {"limit_value", json_number(cl.limit_value)},
                                         {"growth_slope", json_number(cl.growth_slope)},
                                         {"fitted_rate", json_number(cl.fitted_rate)},
                                         {"limit_matches_lambda", cl.limit_matches_lambda}};
  }
  ctx.verdict = rep.sup_frame_residual <= cfg.tol.value_or(1e-8) ? "vstatic" : "not_vstatic";
}

// Base metrics that are not CSC are projected before any curve is formed.
RadialMetric csc_base(const RunConfig& cfg, const ExperimentOptions& eo, Json& results) {
  auto g = build_metric(cfg);
  if (max_scalar_excess(g, cfg.r_max) > 1e-10) {
    const auto y = yamabe_project(g, eo.projection);
    results["base_projection_iterations"] = y.newton_iterations;
    g = y.metric;
  }
  return g;
}

void run_critical(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto eo = experiment_options(cfg, ctx.opts.jobs);
  const auto g = csc_base(cfg, eo, ctx.results);
  const int n = g.n();
  const FamilyOptions fo{cfg.count, cfg.seed, 0.0, 0.0, cfg.amplitude};
  const bool boundary = g.manifold.has_boundary();
  const std::string potential = cfg.potential.empty() ? (boundary ? "bounded" : "one") : cfg.potential;
  StaticData sd{profiles::constant(1.0), n - 1.0};
  if (potential == "bounded") sd = bounded_static_potential(g, n - 1.0);
  const auto family = boundary ? bartnik_preserving_family(g, fo, eo) : bump_family(g, fo);
  const auto rep = boundary ? test_critical_with_boundary(g, family, sd, eo)
                            : test_critical_no_boundary(g, family, sd, eo);
  Table t("critical", {"label", "verdict", "raw", "predicted", "norm", "constraint_drift",
                       "mean_curvature_rate", "induced_metric_rate", "diagnostic"});
  for (const auto& m : rep.members)
    t.row({m.label, std::string(verdict_name(m.verdict)), number(m.raw), number(m.predicted),
           number(m.norm), number(m.constraint_drift), number(m.mean_curvature_rate),
           number(m.induced_metric_rate), quoted(m.diagnostic)});
  ctx.tables.push_back(std::move(t));
  double worst = 0.0;
  for (const auto& m : rep.members)
    if (m.verdict != Verdict::Rejected) worst = std::max(worst, std::abs(m.raw));
  ctx.results["potential"] = potential;
  ctx.results["tol"] = json_number(rep.tol);
  ctx.results["max_abs_derivative"] = json_number(worst);
  ctx.results["all_critical"] = rep.all_critical();
  ctx.results["any_noncritical"] = rep.any_noncritical();
  ctx.verdict = rep.all_critical() ? "critical" : (rep.any_noncritical() ? "noncritical" : "inconclusive");
}

void run_coercivity(Context& ctx) {
  const auto& cfg = ctx.cfg;
  Table t("coercivity", {"n", "a_plus", "a_minus", "max_p", "max_c2", "roots_excluded",
                         "interval_maps", "negative"});
  bool all = true;
  for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
    const auto rep = coercivity::verify_negativity(n, cfg.delta, cfg.samples);
    all = all && rep.negative;
    t.row({std::to_string(n), number(rep.roots.a_plus), number(rep.roots.a_minus), number(rep.max_p),
           number(rep.max_c2), rep.roots_excluded ? "true" : "false",
           rep.interval_maps ? "true" : "false", rep.negative ? "true" : "false"});
  }
  ctx.tables.push_back(std::move(t));
  ctx.results["all_negative"] = all;
  ctx.verdict = all ? "negative" : "not_negative";
}

void run_compare(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto eo = experiment_options(cfg, ctx.opts.jobs);
  const auto gamma = build_metric(cfg);
  if (!gamma.manifold.has_boundary())
    throw ValidationError("metric: compare needs an inner boundary (metric.with_boundary)");
  const FamilyOptions fo{cfg.count, cfg.seed, 0.0, 0.0, cfg.amplitude};
  const auto competitors = matched_competitors(gamma, fo, eo);
  const double tol = cfg.tol.value_or(1e-4);
  const auto table = mass_comparison(gamma, competitors, tol, cfg.boundary_tol, eo);
  Table t("comparison", {"label", "excluded", "mass", "mass_error", "area_mismatch",
                         "mean_curvature_mismatch", "below_reference", "diagnostic"});
  int below = 0;
  for (const auto& r : table.rows) {
    below += r.below_reference ? 1 : 0;
    t.row({r.label, r.excluded ? "true" : "false", number(r.mass), number(r.mass_error),
           number(r.area_mismatch), number(r.mean_curvature_mismatch),
           r.below_reference ? "true" : "false", quoted(r.diagnostic)});
  }
  ctx.tables.push_back(std::move(t));
  ctx.results["reference_mass"] = json_number(table.reference_mass);
  ctx.results["tol"] = json_number(tol);
  ctx.results["below_reference"] = below;
  ctx.verdict = below == 0 ? "no_competitor_below" : "competitor_below";
}

void run_project(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto g = build_metric(cfg);
  const YamabeOptions yo{cfg.outer_radius, cfg.per_decade, 1e-12, 40};
  const auto y = yamabe_project(g, yo);
  ctx.results["newton_iterations"] = y.newton_iterations;
  ctx.results["matching_residual"] = json_number(y.matching_residual);
  ctx.results["mean_curvature_drift"] = json_number(y.mean_curvature_drift);
  ctx.results["max_scalar_excess"] = json_number(max_scalar_excess(y.metric, cfg.r_max));
  Table t("factor", {"r", "u", "du"});
  for (double r : residual_grid(y.metric, cfg.r_max, cfg.points_per_decade).nodes) {
    const Jet u = y.factor(r);
    t.row({number(r), number(u.v), number(u.d1)});
  }
  ctx.tables.push_back(std::move(t));
  ctx.results["projected_mass"] = mass_json(mass_vr(y.metric, mass_options(cfg)));
  ctx.verdict = "ok";
}

Json config_echo(const RunConfig& c) {
  Json profiles = Json::array();
  for (const auto& b : c.profiles)
    profiles.push_back({{"component", b.component}, {"centre", b.centre},
                        {"half_width", b.half_width}, {"amplitude", b.amplitude}});
  auto opt = [](const std::optional<double>& x) { return x ? json_number(*x) : Json(nullptr); };
  return Json{
      {"manifold", {{"n", c.n}, {"k", c.k}, {"cross_section_volume", opt(c.cross_section_volume)},
                    {"inner_radius", opt(c.inner_radius)}}},
      {"metric", {{"kind", c.metric_kind}, {"mass", c.kottler_mass}, {"with_boundary", c.with_boundary},
                  {"boundary_offset", c.boundary_offset}, {"tau", opt(c.tau)}, {"profiles", profiles},
                  {"file", c.sample_file}}},
      {"grid", {{"r_max", c.r_max}, {"points_per_decade", c.points_per_decade},
                {"tol", c.quadrature_tol}, {"seed", c.seed}, {"mass_cutoffs", c.mass_cutoffs},
                {"mass_r_start", c.mass_r_start}}},
      {"command", {{"name", command_name(c.command)}, {"tol", opt(c.tol)}, {"potential", c.potential},
                   {"lambda", c.lambda}, {"boundary_value", opt(c.trace_boundary_value)},
                   {"count", c.count}, {"step", c.step}, {"amplitude", c.amplitude},
                   {"boundary_tol", c.boundary_tol}, {"n_min", c.n_min}, {"n_max", c.n_max},
                   {"delta", c.delta}, {"samples", c.samples}, {"outer_radius", c.outer_radius},
                   {"per_decade", c.per_decade}}}};
}

void write_file(const fs::path& path, const std::string& text, std::vector<std::string>& written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  written.push_back(path.string());
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
  for (const auto& [c, s] : kCommands)
    if (s == name) return c;
  return std::nullopt;
}

std::string_view command_name(Command c) {
  for (const auto& [cmd, s] : kCommands)
    if (cmd == c) return s;
  return "";
}

RunConfig parse_config(const std::string& yaml_text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  if (!root.IsMap()) throw ValidationError("config: expected a mapping at top level");
  RunConfig c;
  const auto man = root["manifold"], met = root["metric"], grid = root["grid"], cmd = root["command"];
  expect_map(man, "manifold");
  expect_map(met, "metric");
  expect_map(grid, "grid");
  expect_map(cmd, "command");
  if (man) {
    read(man, "n", "manifold", c.n);
    read(man, "k", "manifold", c.k);
    read(man, "cross_section_volume", "manifold", c.cross_section_volume);
    read(man, "inner_radius", "manifold", c.inner_radius);
  }
  if (met) {
    read(met, "kind", "metric", c.metric_kind);
    read(met, "mass", "metric", c.kottler_mass);
    read(met, "with_boundary", "metric", c.with_boundary);
    read(met, "boundary_offset", "metric", c.boundary_offset);
    read(met, "tau", "metric", c.tau);
    read(met, "file", "metric", c.sample_file);
    if (!c.sample_file.empty() && fs::path(c.sample_file).is_relative())
      c.sample_file = (fs::path(base_dir) / c.sample_file).string();
    if (const auto ps = met["profiles"]) {
      if (!ps.IsSequence()) throw ValidationError("metric.profiles: expected a list");
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const std::string path = "metric.profiles[" + std::to_string(i) + "]";
        expect_map(ps[i], path);
        BumpSpec b;
        read(ps[i], "component", path, b.component);
        read(ps[i], "centre", path, b.centre);
        read(ps[i], "half_width", path, b.half_width);
        read(ps[i], "amplitude", path, b.amplitude);
        c.profiles.push_back(b);
      }
    }
  }
  if (grid) {
    read(grid, "r_max", "grid", c.r_max);
    read(grid, "points_per_decade", "grid", c.points_per_decade);
    read(grid, "tol", "grid", c.quadrature_tol);
    read(grid, "seed", "grid", c.seed);
    read(grid, "mass_cutoffs", "grid", c.mass_cutoffs);
    read(grid, "mass_r_start", "grid", c.mass_r_start);
  }
  if (cmd) {
    std::string name = "mass";
    read(cmd, "name", "command", name);
    const auto parsed = parse_command(name);
    if (!parsed) throw ValidationError("command.name: unknown command '" + name + "'");
    c.command = *parsed;
    c.command_named = static_cast<bool>(cmd["name"]);
    read(cmd, "tol", "command", c.tol);
    read(cmd, "potential", "command", c.potential);
    read(cmd, "lambda", "command", c.lambda);
    read(cmd, "boundary_value", "command", c.trace_boundary_value);
    read(cmd, "count", "command", c.count);
    read(cmd, "step", "command", c.step);
    read(cmd, "amplitude", "command", c.amplitude);
    read(cmd, "boundary_tol", "command", c.boundary_tol);
    read(cmd, "n_min", "command", c.n_min);
    read(cmd, "n_max", "command", c.n_max);
    read(cmd, "delta", "command", c.delta);
    read(cmd, "samples", "command", c.samples);
    read(cmd, "outer_radius", "command", c.outer_radius);
    read(cmd, "per_decade", "command", c.per_decade);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("--config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), fs::path(path).parent_path().string());
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& msg) { throw ValidationError(msg); };
  if (c.n < 3) fail("manifold.n: dimension must be >= 3, got " + std::to_string(c.n));
  if (c.k < -1 || c.k > 1) fail("manifold.k: must be one of -1, 0, 1, got " + std::to_string(c.k));
  if (c.k != 1 && !c.cross_section_volume)
    fail("manifold.cross_section_volume: required when k != 1");
  if (c.cross_section_volume && !(*c.cross_section_volume > 0.0))
    fail("manifold.cross_section_volume: must be positive");
  if (c.tau && !(*c.tau > 0.5 * (c.n - 1) && *c.tau < c.n))
    fail("metric.tau: must lie in ((n-1)/2, n)");
  static const char* kinds[] = {"reference", "schwarzschild_ads", "reference_plus_profiles", "sampled"};
  if (std::find(std::begin(kinds), std::end(kinds), c.metric_kind) == std::end(kinds))
    fail("metric.kind: unknown kind '" + c.metric_kind + "'");
  if (c.metric_kind == "schwarzschild_ads" && !(c.kottler_mass >= 0.0)) fail("metric.mass: must be >= 0");
  if (c.with_boundary && c.metric_kind != "schwarzschild_ads")
    fail("metric.with_boundary: only meaningful for schwarzschild_ads; use manifold.inner_radius");
  if (!(c.boundary_offset > 0.0)) fail("metric.boundary_offset: must be positive");
  for (std::size_t i = 0; i < c.profiles.size(); ++i) {
    const auto& b = c.profiles[i];
    const std::string path = "metric.profiles[" + std::to_string(i) + "]";
    if (b.component != "rr" && b.component != "tan") fail(path + ".component: must be rr or tan");
    if (!(b.half_width > 0.0)) fail(path + ".half_width: must be positive");
    const double start = c.inner_radius.value_or(c.k == -1 ? 1.0 : 0.0);
    if (!(b.centre - b.half_width > start)) fail(path + ": support must lie inside the domain");
  }
  if (c.metric_kind == "sampled") {
    if (c.sample_file.empty()) fail("metric.file: required for sampled metrics");
    if (!c.inner_radius) fail("manifold.inner_radius: required for sampled metrics");
  }
  if (!(c.r_max > 1.0)) fail("grid.r_max: must exceed 1");
  if (c.points_per_decade < 2) fail("grid.points_per_decade: must be >= 2");
  if (!(c.quadrature_tol > 0.0)) fail("grid.tol: must be positive");
  if (c.mass_cutoffs < 3) fail("grid.mass_cutoffs: must be >= 3");
  if (c.mass_r_start < 0.0) fail("grid.mass_r_start: must be >= 0");
  if (c.tol && !(*c.tol > 0.0)) fail("command.tol: must be positive");
  static const char* potentials[] = {"", "one", "kottler", "bounded", "trace"};
  if (std::find(std::begin(potentials), std::end(potentials), c.potential) == std::end(potentials))
    fail("command.potential: must be one, kottler, bounded or trace");
  if (c.count < 1) fail("command.count: must be >= 1");
  if (!(c.step > 0.0)) fail("command.step: must be positive");
  if (!(c.amplitude > 0.0)) fail("command.amplitude: must be positive");
  if (c.n_min < 3 || c.n_max < c.n_min) fail("command.n_min: need 3 <= n_min <= n_max");
  if (!(c.delta < 1.0)) fail("command.delta: must be < 1");
  if (c.samples < 2) fail("command.samples: must be >= 2");
  if (!(c.outer_radius > 8.0)) fail("command.outer_radius: must exceed 8");
  if (c.per_decade < 10) fail("command.per_decade: must be >= 10");
}

RunOutcome run(RunConfig cfg, const RunOptions& opts) {
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.tol) cfg.tol = *opts.tol;
  RunOutcome out;
  Json report;
  report["version"] = kVersion;
  report["command"] = command_name(cfg.command);
  report["inputs"] = config_echo(cfg);
  report["seed"] = cfg.seed;
  Json results = Json::object();
  std::vector<Table> tables;
  std::string verdict;
  std::string diagnostic;

  try {
    validate(cfg);
    Context ctx{cfg, opts, results, tables, verdict};
    switch (cfg.command) {
      case Command::Mass: run_mass(ctx); break;
      case Command::Curvature: run_curvature(ctx); break;
      case Command::VStatic: run_vstatic(ctx); break;
      case Command::Critical: run_critical(ctx); break;
      case Command::Coercivity: run_coercivity(ctx); break;
      case Command::Compare: run_compare(ctx); break;
      case Command::Project: run_project(ctx); break;
    }
  } catch (const ValidationError& e) {
    out.exit_code = 1;
    diagnostic = e.what();
  } catch (const std::exception& e) {
    out.exit_code = 2;
    diagnostic = e.what();
  }

  report["status"] = out.exit_code == 0 ? "ok" : (out.exit_code == 1 ? "validation_error" : "solver_error");
  if (!diagnostic.empty()) report["diagnostic"] = diagnostic;
  report["verdict"] = verdict;
  report["results"] = results;
  Json table_names = Json::array();
  for (const auto& t : tables) table_names.push_back(t.name() + ".csv");
  report["tables"] = table_names;
  out.report = report.dump(2) + "\n";

  if (!opts.out_dir.empty()) {
    try {
      fs::create_directories(opts.out_dir);
      write_file(fs::path(opts.out_dir) / "run.json", out.report, out.written);
      for (const auto& t : tables) write_file(fs::path(opts.out_dir) / (t.name() + ".csv"), t.csv(), out.written);
    } catch (const std::exception& e) {
      if (out.exit_code == 0) out.exit_code = 2;
      out.report += std::string("write failed: ") + e.what() + "\n";
    }
  }
  return out;
}

}  // namespace vrmass::cli
