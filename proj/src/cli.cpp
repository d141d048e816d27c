#include "fblab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fblab/blowup.hpp"
#include "fblab/fbgeom.hpp"
#include "fblab/kernels.hpp"
#include "fblab/oracle.hpp"

namespace fs = std::filesystem;

namespace fblab {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_num(const std::string& s, const std::string& key) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw std::invalid_argument("config: bad number for " + key + ": " + s);
  return v;
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<double> suite_radii(const Grid& g) {
  const double ext = g.dim == 1 ? g.h * (g.nx - 1)
                                : g.h * (std::min(g.nx, g.ny) - 1);
  std::vector<double> radii;
  for (double r : {4.0 * g.h, 8.0 * g.h, 16.0 * g.h})
    if (r <= 0.25 * ext) radii.push_back(r);
  if (radii.empty()) radii.push_back(4.0 * g.h);
  return radii;
}

// Ball of radius r around (cx,cy) stays strictly in the masked domain.
bool ball_clear(const Grid& g, double cx, double cy, double r) {
  if (cx - r < g.ox || cx + r > g.x(g.nx - 1)) return false;
  if (g.dim == 2 && (cy - r < g.oy || cy + r > g.y(g.ny - 1))) return false;
  const int i0 = std::max(0, (int)std::floor((cx - r - g.ox) / g.h));
  const int i1 = std::min(g.nx - 1, (int)std::ceil((cx + r - g.ox) / g.h));
  const int j0 = g.dim == 2 ? std::max(0, (int)std::floor((cy - r - g.oy) / g.h)) : 0;
  const int j1 = g.dim == 2 ? std::min(g.ny - 1, (int)std::ceil((cy + r - g.oy) / g.h)) : 0;
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i) {
      const double dx = g.x(i) - cx;
      const double dy = g.dim == 2 ? g.y(j) - cy : 0.0;
      if (dx * dx + dy * dy <= r * r && g.mask[g.node_index(i, j)] == NodeClass::Exterior)
        return false;
    }
  return true;
}

void print_rows(const std::vector<PropertyRow>& rows) {
  for (const PropertyRow& r : rows) {
    const char* tag = !r.applicable ? "[ N/A]" : (r.pass ? "[PASS]" : "[FAIL]");
    std::printf("%s %-16s value=%-12s threshold=%s\n", tag, r.name.c_str(),
                fmt6(r.value).c_str(), fmt6(r.threshold).c_str());
  }
}

void write_suite_csv(const std::string& path, const std::vector<PropertyRow>& rows) {
  std::ofstream f(path);
  f << "name,value,threshold,pass,applicable\n";
  for (const PropertyRow& r : rows)
    f << r.name << ',' << format_g17(r.value) << ',' << format_g17(r.threshold) << ','
      << (r.pass ? 1 : 0) << ',' << (r.applicable ? 1 : 0) << '\n';
}

}  // namespace

std::string ConfigMap::get(const std::string& key, const std::string& fallback) const {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

double ConfigMap::get_num(const std::string& key, double fallback) const {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : to_num(it->second, key);
}

int ConfigMap::get_int(const std::string& key, int fallback) const {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  const double v = to_num(it->second, key);
  if (v != std::floor(v)) throw std::invalid_argument("config: " + key + " must be an integer");
  return (int)v;
}

bool ConfigMap::get_flag(const std::string& key, bool fallback) const {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: " + key + " must be a boolean, got " + v);
}

std::vector<double> ConfigMap::get_list(const std::string& key) const {
  auto it = kv.find(key);
  std::vector<double> out;
  if (it == kv.end()) return out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_num(item, key));
  }
  return out;
}

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap c;
  c.raw = text;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    c.kv[section.empty() ? key : section + "." + key] = trim(t.substr(eq + 1));
  }
  return c;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

namespace {

PhiSpec phi_from_config(const ConfigMap& cfg) {
  const std::string fam = cfg.get("phi.family", "linear");
  const double lambda1 = cfg.get_num("phi.lambda1", 0.0);
  const double lambda2 = cfg.get_num("phi.lambda2", 1.0);
  if (fam == "linear")
    return PhiSpec::linear(cfg.get_num("phi.coeff", 1.0), lambda2, lambda1);
  if (fam == "power")
    return PhiSpec::power(cfg.get_num("phi.coeff", 1.0), cfg.get_num("phi.p", 0.5),
                          lambda2);
  if (fam == "sum-of-powers")
    return PhiSpec::sum_of_powers(cfg.get_num("phi.alpha", 0.0),
                                  cfg.get_num("phi.beta", 0.0), lambda1, lambda2);
  if (fam == "nonexistence") return PhiSpec::nonexistence();
  if (fam == "saddle") return PhiSpec::saddle();
  if (fam == "tabulated") {
    std::vector<std::pair<double, double>> knots;
    std::stringstream ss(cfg.get("phi.knots"));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      const size_t colon = item.find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("config: phi.knots entries are r:value");
      knots.emplace_back(to_num(trim(item.substr(0, colon)), "phi.knots"),
                         to_num(trim(item.substr(colon + 1)), "phi.knots"));
    }
    return PhiSpec::tabulated(std::move(knots), lambda2, lambda1);
  }
  throw std::invalid_argument("config: unknown phi.family " + fam);
}

Field datum_from_config(const ConfigMap& cfg, const Grid& g) {
  const std::string fam = cfg.get("datum.family", "linear");
  if (fam == "linear") {
    const double a = cfg.get_num("datum.a", 1.0);
    const double b = cfg.get_num("datum.b", 0.0);
    const double c = cfg.get_num("datum.c", 0.0);
    return sample_field(g, [=](double x, double y) { return a * x + b * y + c; });
  }
  if (fam == "one-plane") {
    const double slope = cfg.get_num("datum.slope", 1.0);
    const double x0 = cfg.get_num("datum.x0", 0.5);
    const double amp = cfg.get_num("datum.amp", 0.0);
    const double oy = g.oy, span = g.dim == 2 ? g.h * (g.ny - 1) : 1.0;
    return sample_field(g, [=](double x, double y) {
      const double mod =
          amp == 0.0 ? 1.0 : 1.0 + amp * std::sin(std::numbers::pi * (y - oy) / span);
      return slope * std::max(x - x0, 0.0) * mod;
    });
  }
  if (fam == "saddle")
    return sample_field(g, [](double x, double y) { return x * y; });
  throw std::invalid_argument("config: unknown datum.family " + fam);
}

}  // namespace

ScenarioConfig build_scenario(const ConfigMap& cfg, const Overrides& ov) {
  ScenarioConfig sc;
  sc.cfg = cfg;

  const std::string datum_file = cfg.get("datum.file");
  if (!datum_file.empty()) {
    if (!fs::exists(datum_file))
      throw std::invalid_argument("scenario: datum file not found: " + datum_file);
    sc.datum = read_field(datum_file);
    sc.grid = sc.datum.grid;
  } else {
    int res = cfg.get_int("domain.resolution", 129);
    if (ov.resolution) res = *ov.resolution;
    const std::string shape = cfg.get("domain.shape", "interval");
    if (shape == "interval") {
      sc.grid = make_interval(res, cfg.get_num("domain.xmin", 0.0),
                              cfg.get_num("domain.xmax", 1.0));
    } else if (shape == "rectangle") {
      const double ax = cfg.get_num("domain.xmin", 0.0);
      const double bx = cfg.get_num("domain.xmax", 1.0);
      const double ay = cfg.get_num("domain.ymin", 0.0);
      const double by = cfg.get_num("domain.ymax", 1.0);
      const double h = (bx - ax) / (res - 1);
      const int resy = (int)std::lround((by - ay) / h) + 1;
      sc.grid = make_rectangle(res, resy, ax, ay, bx, by);
    } else if (shape == "disk") {
      sc.grid = make_disk(res, cfg.get_num("domain.center_x", 0.0),
                          cfg.get_num("domain.center_y", 0.0),
                          cfg.get_num("domain.radius", 1.0));
    } else {
      throw std::invalid_argument("config: unknown domain.shape " + shape);
    }
    sc.datum = datum_from_config(cfg, sc.grid);
  }
  const int min_axis = sc.grid.dim == 1 ? sc.grid.nx : std::min(sc.grid.nx, sc.grid.ny);
  if (min_axis < 16)
    throw std::invalid_argument("scenario: resolution must be at least 16 per axis");

  const std::string q_file = cfg.get("q.file");
  if (!q_file.empty()) {
    if (!fs::exists(q_file))
      throw std::invalid_argument("scenario: q file not found: " + q_file);
    const Field qf = read_field(q_file);
    sc.q = QField::per_node(
        sc.grid, [&](double x, double y) { return interpolate(qf, x, y); });
  } else {
    sc.q = QField::uniform(cfg.get_num("q.constant", 1.0));
  }

  sc.phi = phi_from_config(cfg);

  SolverConfig& s = sc.solver;
  s.eps_schedule = cfg.get_list("solver.eps_schedule");
  s.max_outer = cfg.get_int("solver.max_outer", s.max_outer);
  s.max_inner = cfg.get_int("solver.max_inner", s.max_inner);
  s.grad_tol = cfg.get_num("solver.grad_tol", s.grad_tol);
  s.energy_tol = cfg.get_num("solver.energy_tol", s.energy_tol);
  s.fp_damping = cfg.get_num("solver.fp_damping", s.fp_damping);
  s.fp_tol = cfg.get_num("solver.fp_tol", s.fp_tol);
  s.restarts = cfg.get_int("solver.restarts", s.restarts);
  s.sharp_stage = cfg.get_flag("solver.sharp_stage", s.sharp_stage);
  s.pattern_stage = cfg.get_flag("solver.pattern_stage", s.pattern_stage);
  s.sor_tol = cfg.get_num("solver.sor_tol", s.sor_tol);
  s.sor_max_sweeps = cfg.get_int("solver.sor_max_sweeps", s.sor_max_sweeps);
  s.sor_omega = cfg.get_num("solver.sor_omega", s.sor_omega);

  sc.seed = (unsigned)cfg.get_int("output.seed", 12345);
  if (ov.seed) sc.seed = *ov.seed;
  s.seed = sc.seed;

  sc.out_dir = ov.out ? *ov.out : cfg.get("output.dir", "out");

  const std::string fp = cfg.get("solver.fixed_point", "auto");
  if (fp == "on")
    sc.run_fixed_point = true;
  else if (fp == "off")
    sc.run_fixed_point = false;
  else if (fp == "auto")
    sc.run_fixed_point = sc.phi.family == PhiFamily::Power && sc.phi.p < 1.0;
  else
    throw std::invalid_argument("config: solver.fixed_point must be auto/on/off");
  return sc;
}

void write_manifest(const std::string& path, const std::string& command,
                    const ScenarioConfig& sc) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write manifest: " + path);
  f << "fblab-manifest v1\n";
  f << "version = 0.1.0\n";
  f << "compiler = " << __VERSION__ << "\n";
  f << "command = " << command << "\n";
  f << "seed = " << sc.seed << "\n";
  f << "threads = " << current_threads() << "\n";
  if (sc.phi.family == PhiFamily::Saddle) {
    f << "saddle-knots =";
    for (const auto& [r, v] : saddle_knots())
      f << ' ' << format_g17(r) << ':' << format_g17(v);
    f << '\n';
  }
  f << "--- config ---\n" << sc.cfg.raw;
  if (!sc.cfg.raw.empty() && sc.cfg.raw.back() != '\n') f << '\n';
}

std::vector<PropertyRow> property_suite_on_field(const Field& u, const Problem& prob) {
  std::vector<PropertyRow> rows;
  const Grid& g = u.grid;
  const PhiSpec phi = prob.phi0();
  FreeBoundary fb = extract_free_boundary(u);
  const std::vector<double> radii = suite_radii(g);
  const bool has_fb = !fb.empty();

  {
    const SubharmonicityOut s = subharmonicity_defect(u, 200, radii);
    const double thr = 5.0 * g.h;
    rows.push_back({"subharmonicity", s.max_defect, thr, s.max_defect <= thr, true});
  }
  {
    const double nd = has_fb ? nondegeneracy_scan(u, fb, radii) : 0.0;
    rows.push_back({"nondegeneracy", nd, 0.01, nd >= 0.01, has_fb});
  }
  {
    const CleanBallOut cb = clean_ball_scan(u, fb, radii);
    rows.push_back({"clean-ball", cb.min_c1, 0.05, cb.min_c1 >= 0.05, has_fb});
  }
  {
    const GrowthOut gr = growth_bounds_random(u, fb, 400);
    const double ratio = (gr.probes_used > 0 && gr.c_inf > 0.0)
                             ? gr.c_sup / gr.c_inf
                             : std::numeric_limits<double>::infinity();
    rows.push_back({"growth", ratio, 50.0, ratio <= 50.0, has_fb});
  }
  {
    const MonotonicityReport mono =
        check_monotonicity(phi, lambda_omega(g, prob.q), 2048);
    bool applicable = mono.monotone && has_fb;
    double med = 0.0;
    bool pass = false;
    if (applicable) {
      const BernoulliStats st = bernoulli_residuals(u, fb, phi, prob.q);
      applicable = st.count > 0;
      med = st.median;
      pass = med <= 0.10;
    }
    rows.push_back({"bernoulli", med, 0.10, pass, applicable});
  }
  {
    const PhaseSeparationOut ps = phase_separation_check(u);
    rows.push_back({"phase-separation", (double)ps.flagged, 0.0, ps.pass, true});
  }
  {
    // Laplacian-of-u+ mass in a ball centered on the free boundary.
    const double r = radii.size() > 1 ? radii[1] : radii[0];
    bool found = false;
    double bx = 0.0, by = 0.0;
    const size_t stride = std::max<size_t>(1, fb.points.size() / 64);
    for (size_t k = 0; k < fb.points.size(); k += stride)
      if (ball_clear(g, fb.points[k].x, fb.points[k].y, 2.0 * r + 2.0 * g.h)) {
        bx = fb.points[k].x;
        by = fb.points[k].y;
        found = true;
        break;
      }
    double bulk = 0.0;
    const double lower = 0.05 * std::pow(r, g.dim - 1);
    bool pass = false;
    if (found) {
      const DeltaUplusOut d = delta_uplus_measure(u, bx, by, r);
      bulk = d.bulk;
      pass = bulk >= lower && bulk <= 1.25 * d.grad_bound + 1e-12;
    }
    rows.push_back({"delta-uplus", bulk, lower, pass, found});
  }
  {
    const double cx = g.ox + 0.5 * g.h * (g.nx - 1);
    const double cy = g.dim == 2 ? g.oy + 0.5 * g.h * (g.ny - 1) : 0.0;
    const double rbig = g.h * (g.nx + g.ny);  // covers the whole domain
    const double len = perimeter_estimate(fb, cx, cy, rbig);
    rows.push_back({"perimeter", len, 20.0, len <= 20.0, true});
  }
  return rows;
}

ReportBundle run_scenario(const ScenarioConfig& sc, const std::string& command) {
  fs::create_directories(sc.out_dir);
  ReportBundle b;
  b.dir = sc.out_dir;
  const Problem prob = sc.problem();
  b.direct = minimize_direct(prob, sc.solver);
  if (sc.run_fixed_point) {
    b.fixed_point = minimize_fixed_point(prob, sc.solver);
    b.ran_fixed_point = true;
  }
  const Field& u = b.direct.field;
  write_field(sc.out_dir + "/u.dump", u);
  write_history_csv(sc.out_dir + "/history.csv", b.direct.history);

  auto flag = [&](const char* name, bool dflt) {
    return sc.cfg.get_flag(std::string("analyses.") + name, dflt);
  };
  const PhiSpec phi = prob.phi0();
  b.fb = extract_free_boundary(u);
  if (flag("bernoulli", true) && !b.fb.empty())
    bernoulli_residuals(u, b.fb, phi, sc.q);
  if (flag("free_boundary", true))
    write_free_boundary_csv(sc.out_dir + "/fb.csv", b.fb);
  if (flag("density", true)) {
    DensityReport rep;
    const std::vector<double> radii = suite_radii(sc.grid);
    if (!b.fb.empty()) {
      nondegeneracy_scan(u, b.fb, radii, &rep);
      DensityReport rep2;
      clean_ball_scan(u, b.fb, radii, &rep2);
      rep.max_clean_c1 = rep2.max_clean_c1;
      rep.min_clean_c1 = rep2.min_clean_c1;
      rep.min_volume_fraction = rep2.min_volume_fraction;
    }
    write_density_csv(sc.out_dir + "/density.csv", rep);
  }
  if (flag("suite", false)) {
    b.checks = property_suite_on_field(u, prob);
    write_suite_csv(sc.out_dir + "/suite.csv", b.checks);
  }
  if (flag("minimality", false)) {
    const int n = sc.cfg.get_int("analyses.perturbations", 100);
    const MinimalityReport m = verify_minimality(u, prob, n, 0.25, sc.seed);
    const double thr = -1e-6 * std::abs(b.direct.breakdown.total);
    b.checks.push_back({"minimality", m.min_gap, thr, m.min_gap >= thr, true});
  }

  std::ofstream sf(sc.out_dir + "/summary.txt");
  const EnergyBreakdown& br = b.direct.breakdown;
  sf << "converged = " << (b.direct.converged ? "true" : "false") << '\n'
     << "energy = " << format_g17(br.total) << '\n'
     << "dirichlet = " << format_g17(br.dirichlet) << '\n'
     << "m2 = " << format_g17(br.m2) << '\n'
     << "m1 = " << format_g17(br.m1) << '\n'
     << "volume_term = " << format_g17(br.volume_term) << '\n'
     << "runner_up_gap = " << format_g17(b.direct.runner_up_gap) << '\n'
     << "restarts_disagree = " << (b.direct.restarts_disagree ? "true" : "false")
     << '\n'
     << "kink_events = " << b.direct.kink_events << '\n';
  if (!b.direct.notes.empty()) sf << "notes = " << b.direct.notes << '\n';
  if (b.ran_fixed_point) {
    sf << "fixed_point_converged = " << (b.fixed_point.converged ? "true" : "false")
       << '\n'
       << "fixed_point_energy = " << format_g17(b.fixed_point.breakdown.total) << '\n';
    if (!b.fixed_point.lambda_trace.empty())
      sf << "fixed_point_lambda = "
         << format_g17(b.fixed_point.lambda_trace.back()) << '\n';
  }
  sf.close();
  write_manifest(sc.out_dir + "/manifest.txt", command, sc);

  bool checks_ok = true;
  for (const PropertyRow& r : b.checks)
    if (r.applicable && !r.pass) checks_ok = false;
  b.exit_code = !b.direct.converged ? 2 : (checks_ok ? 0 : 1);

  std::printf("energy=%s m2=%s converged=%s out=%s\n", fmt6(br.total).c_str(),
              fmt6(br.m2).c_str(), b.direct.converged ? "true" : "false",
              sc.out_dir.c_str());
  return b;
}

int run_property_suite(const ScenarioConfig& sc) {
  fs::create_directories(sc.out_dir);
  const Problem prob = sc.problem();
  const MinimizeResult r = minimize_direct(prob, sc.solver);
  std::vector<PropertyRow> rows = property_suite_on_field(r.field, prob);
  print_rows(rows);
  write_suite_csv(sc.out_dir + "/suite.csv", rows);
  bool ok = r.converged;
  for (const PropertyRow& row : rows)
    if (row.applicable && !row.pass) ok = false;
  return ok ? 0 : 1;
}

int run_analyze(const ScenarioConfig& sc, const std::string& field_path) {
  if (!fs::exists(field_path))
    throw std::invalid_argument("analyze: field dump not found: " + field_path);
  fs::create_directories(sc.out_dir);
  const Field u = read_field(field_path);
  Problem prob = sc.problem();
  prob.grid = u.grid;  // diagnostics run on the dump's own grid
  prob.datum = u;
  std::vector<PropertyRow> rows = property_suite_on_field(u, prob);
  print_rows(rows);
  write_suite_csv(sc.out_dir + "/suite.csv", rows);
  FreeBoundary fb = extract_free_boundary(u);
  if (!fb.empty()) bernoulli_residuals(u, fb, prob.phi0(), prob.q);
  write_free_boundary_csv(sc.out_dir + "/fb.csv", fb);
  DensityReport rep;
  const std::vector<double> radii = suite_radii(u.grid);
  if (!fb.empty()) {
    nondegeneracy_scan(u, fb, radii, &rep);
    DensityReport rep2;
    clean_ball_scan(u, fb, radii, &rep2);
    rep.max_clean_c1 = rep2.max_clean_c1;
    rep.min_clean_c1 = rep2.min_clean_c1;
    rep.min_volume_fraction = rep2.min_volume_fraction;
  }
  write_density_csv(sc.out_dir + "/density.csv", rep);
  for (const PropertyRow& row : rows)
    if (row.applicable && !row.pass) return 1;
  return 0;
}

std::vector<ReproRow> repro_nonexistence(const std::vector<int>& resolutions,
                                         const std::string& out_dir) {
  std::vector<ReproRow> rows;
  const PhiSpec phi = PhiSpec::nonexistence();
  for (int res : resolutions) {
    if (res < 8)
      throw std::invalid_argument("repro_nonexistence: resolutions must be >= 8");
    const Grid g = make_interval(res + 1, 0.0, 1.0);
    const Field datum = sample_field(g, [](double x, double) { return x; });
    const Problem prob{g, datum, QField::uniform(1.0), phi};
    SolverConfig cfg;
    const MinimizeResult r = minimize_direct(prob, cfg);
    ReproRow row;
    row.h = g.h;
    row.j_h = r.breakdown.total;
    row.analytic = 1.0 / (1.0 - g.h) + (3.0 + 2.0 * g.h) / 8.0;
    row.zero_measure = lambda_omega(g, prob.q) - r.breakdown.m2;
    rows.push_back(row);
    std::printf("h=%-10s J_h=%-12s analytic=%-12s zero_measure=%s\n",
                fmt6(row.h).c_str(), fmt6(row.j_h).c_str(), fmt6(row.analytic).c_str(),
                fmt6(row.zero_measure).c_str());
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream f(out_dir + "/nonexistence.csv");
    f << "h,J_h,analytic,zero_measure\n";
    for (const ReproRow& r : rows)
      f << format_g17(r.h) << ',' << format_g17(r.j_h) << ',' << format_g17(r.analytic)
        << ',' << format_g17(r.zero_measure) << '\n';
  }
  return rows;
}

SaddleRepro repro_saddle(int resolution, int n_perturbations,
                         const std::string& out_dir) {
  const Grid g = make_disk(resolution, 0.0, 0.0, 1.0);
  const Field ubar = sample_field(g, [](double x, double y) { return x * y; });
  const Problem prob{g, ubar, QField::uniform(1.0), PhiSpec::saddle()};
  SaddleRepro out;
  out.j_expected = 0.5 * std::numbers::pi + 1.0;
  out.j_value = total_energy(ubar, prob.q, prob.phi0(), 0.0).total;

  // Boundary mass of the positive part, pulled back to the unit circle by
  // 2-homogeneity of the datum.
  const double rc = 1.0 - 2.0 * g.h;
  const int nth = 4096;
  double s = 0.0;
  for (int t = 0; t < nth; ++t) {
    const double th = 2.0 * std::numbers::pi * t / nth;
    s += std::max(interpolate(ubar, rc * std::cos(th), rc * std::sin(th)), 0.0);
  }
  out.c1 = s * (2.0 * std::numbers::pi * rc / nth) / (rc * rc * rc);

  const MinimalityReport rep = verify_minimality(ubar, prob, n_perturbations, 0.25, 777u);
  out.min_gap = rep.min_gap;

  const FreeBoundary fb = extract_free_boundary(ubar);
  for (double r : {0.15, 0.25, 0.4}) {
    const auto f = flatness_measure(fb, 0.0, 0.0, r);
    if (f) out.flatness.emplace_back(r, *f);
  }

  bool flat_ok = !out.flatness.empty();
  for (const auto& [r, f] : out.flatness) flat_ok = flat_ok && f >= 0.5;
  out.pass = std::abs(out.j_value - out.j_expected) <= 0.02 * out.j_expected &&
             out.min_gap >= -1e-6 * out.j_value && flat_ok &&
             std::abs(out.c1 - 1.0) <= 0.02;

  std::printf("J=%s expected=%s c1=%s min_gap=%s %s\n", fmt6(out.j_value).c_str(),
              fmt6(out.j_expected).c_str(), fmt6(out.c1).c_str(),
              fmt6(out.min_gap).c_str(), out.pass ? "[PASS]" : "[FAIL]");
  for (const auto& [r, f] : out.flatness)
    std::printf("flatness r=%s value=%s\n", fmt6(r).c_str(), fmt6(f).c_str());

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_field(out_dir + "/ubar.dump", ubar);
    write_free_boundary_csv(out_dir + "/fb.csv", fb);
    std::vector<MonitorRow> mrows;
    for (const auto& [r, f] : out.flatness) mrows.push_back({r, f, "flatness"});
    write_monitor_csv(out_dir + "/flatness.csv", mrows);
    std::ofstream f(out_dir + "/summary.txt");
    f << "J = " << format_g17(out.j_value) << '\n'
      << "J_expected = " << format_g17(out.j_expected) << '\n'
      << "c1 = " << format_g17(out.c1) << '\n'
      << "min_gap = " << format_g17(out.min_gap) << '\n'
      << "pass = " << (out.pass ? "true" : "false") << '\n';
  }
  return out;
}

int run_sweep(const ScenarioConfig& sc) {
  fs::create_directories(sc.out_dir);
  const std::string fam = sc.cfg.get("sweep.family", "linear");
  // Tuple grid: param1 x param2, semantics per family.
  std::vector<double> p1, p2;
  if (fam == "linear") {
    p1 = sc.cfg.get_list("sweep.lambda");
    p2 = {0.0};
  } else if (fam == "power") {
    p1 = sc.cfg.get_list("sweep.coeff");
    p2 = sc.cfg.get_list("sweep.p");
    if (p2.empty()) p2 = {0.5};
  } else if (fam == "sum-of-powers") {
    p1 = sc.cfg.get_list("sweep.alpha");
    p2 = sc.cfg.get_list("sweep.beta");
    if (p2.empty()) p2 = {0.0};
  } else {
    throw std::invalid_argument("sweep: unknown family " + fam);
  }

  std::ofstream f(sc.out_dir + "/sweep.csv");
  f << "family,param1,param2,J,m2,lambda_star,bernoulli_median\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double a : p1)
    for (double b2 : p2) {
      double J = nan, m2 = nan, lstar = nan, med = nan;
      try {
        PhiSpec phi;
        if (fam == "linear")
          phi = PhiSpec::linear(a, sc.phi.lambda2, sc.phi.lambda1);
        else if (fam == "power")
          phi = PhiSpec::power(a, b2, sc.phi.lambda2);
        else
          phi = PhiSpec::sum_of_powers(a, b2, sc.phi.lambda1, sc.phi.lambda2);
        const Problem prob{sc.grid, sc.datum, sc.q, phi};
        const MinimizeResult r = minimize_direct(prob, sc.solver);
        J = r.breakdown.total;
        m2 = r.breakdown.m2;
        lstar = prob.phi0().dphi0(m2).value();
        FreeBoundary fb = extract_free_boundary(r.field);
        if (!fb.empty()) {
          const BernoulliStats st = bernoulli_residuals(r.field, fb, prob.phi0(), sc.q);
          if (st.count > 0) med = st.median;
        }
      } catch (const std::exception& e) {
        std::fprintf(stderr, "sweep row (%s, %s) failed: %s\n", fmt6(a).c_str(),
                     fmt6(b2).c_str(), e.what());
      }
      f << fam << ',' << format_g17(a) << ',' << format_g17(b2) << ','
        << format_g17(J) << ',' << format_g17(m2) << ',' << format_g17(lstar) << ','
        << format_g17(med) << '\n';
    }
  std::printf("sweep written to %s/sweep.csv\n", sc.out_dir.c_str());
  return 0;
}

int run_blowup(const ScenarioConfig& sc) {
  fs::create_directories(sc.out_dir);
  const Problem prob = sc.problem();
  const MinimizeResult r = minimize_direct(prob, sc.solver);
  const Field& u = r.field;
  const Grid& g = u.grid;
  const FreeBoundary fb = extract_free_boundary(u);
  if (fb.empty()) {
    std::fprintf(stderr, "blowup: the minimizer has no free boundary\n");
    return 1;
  }

  double x0 = sc.cfg.get_num("blowup.x0", std::numeric_limits<double>::quiet_NaN());
  double y0 = sc.cfg.get_num("blowup.y0", 0.0);
  if (!std::isfinite(x0)) {
    // Pick the free boundary point with the most room around it.
    double best = -1.0;
    for (const FBPoint& p : fb.points) {
      double c = std::min(p.x - g.ox, g.x(g.nx - 1) - p.x);
      if (g.dim == 2) {
        c = std::min(c, std::min(p.y - g.oy, g.y(g.ny - 1) - p.y));
        if (g.shape == DomainShape::Disk)
          c = g.radius - std::hypot(p.x - g.cx, p.y - g.cy);
      }
      if (c > best) {
        best = c;
        x0 = p.x;
        y0 = p.y;
      }
    }
  }
  double clear = std::min(x0 - g.ox, g.x(g.nx - 1) - x0);
  if (g.dim == 2) {
    clear = std::min(clear, std::min(y0 - g.oy, g.y(g.ny - 1) - y0));
    if (g.shape == DomainShape::Disk) clear = g.radius - std::hypot(x0 - g.cx, y0 - g.cy);
  }
  double rho0 = sc.cfg.get_num("blowup.rho0", 0.0);
  if (rho0 <= 0.0) rho0 = std::min(0.25, 0.5 * clear);
  if (rho0 > clear - g.h) {
    rho0 = clear - g.h;
    std::printf("note: rho0 clamped to %s by the clearance at (%s, %s)\n",
                fmt6(rho0).c_str(), fmt6(x0).c_str(), fmt6(y0).c_str());
  }
  if (rho0 < 8.0 * g.h) {
    std::fprintf(stderr, "blowup: rho0 below the 8h resolution floor\n");
    return 1;
  }
  int K = sc.cfg.get_int("blowup.levels", -1);
  const int kmax = (int)std::floor(std::log2(rho0 / (8.0 * g.h)));
  if (K < 0 || K > kmax) K = kmax;

  const Grid target = default_blowup_grid(g.dim);
  const BlowupSequence seq = blowup_sequence(u, x0, y0, rho0, K, target);
  write_blowup_csv(sc.out_dir + "/blowup.csv", seq);
  write_field(sc.out_dir + "/blowup_finest.dump", seq.fields.back());

  const AcLimitOut ac = ac_limit_compare(seq, prob.phi0(), sc.q, r.breakdown.m2,
                                         sc.solver);
  std::printf("blowup at (%s, %s) rho0=%s levels=%d\n", fmt6(x0).c_str(),
              fmt6(y0).c_str(), fmt6(rho0).c_str(), K);
  std::printf("lambda0=[%s, %s]%s sup_gap=%s slope_gap=%s\n",
              fmt6(ac.lambda0_lo).c_str(), fmt6(ac.lambda0_hi).c_str(),
              ac.kink ? " (kink)" : "", fmt6(ac.sup_gap).c_str(),
              fmt6(ac.slope_gap).c_str());

  if (g.dim == 2) {
    std::vector<MonitorRow> wrows, arows;
    for (double rr = 4.0 * g.h; rr <= rho0 * (1.0 + 1e-12); rr *= std::sqrt(2.0)) {
      if (!ball_clear(g, x0, y0, rr + 2.0 * g.h)) break;
      wrows.push_back({rr, weiss_energy(u, x0, y0, rr, ac.lambda0(), WeissMode::Standard),
                       "standard"});
      wrows.push_back(
          {rr, weiss_energy(u, x0, y0, rr, ac.lambda0(), WeissMode::Paper), "paper"});
      arows.push_back({rr, acf_functional(u, x0, y0, rr, AcfMode::NMinus2), "n-2"});
      arows.push_back({rr, acf_functional(u, x0, y0, rr, AcfMode::Paper), "paper"});
    }
    write_monitor_csv(sc.out_dir + "/weiss.csv", wrows);
    write_monitor_csv(sc.out_dir + "/acf.csv", arows);
  }
  write_manifest(sc.out_dir + "/manifest.txt", "blowup", sc);
  return 0;
}

int run_oracle_check(const std::string& out_dir) {
  fs::create_directories(out_dir);
  SolverConfig cfg;
  int fails = 0;
  auto report = [&](const char* name, const OracleResult& oracle, double direct) {
    const double diff = std::abs(oracle.energy - direct);
    const bool ok = diff <= 1e-6;
    if (!ok) ++fails;
    std::printf("%s oracle=%s direct=%s diff=%s %s\n", name,
                fmt6(oracle.energy).c_str(), fmt6(direct).c_str(), fmt6(diff).c_str(),
                ok ? "[PASS]" : "[FAIL]");
  };

  {
    const Grid g = make_interval(9, 0.0, 1.0);
    const Field datum = sample_field(g, [](double x, double) { return x; });
    const Problem prob{g, datum, QField::uniform(1.0), PhiSpec::linear(4.0)};
    const OracleResult o = oracle_minimize_1d(prob);
    const MinimizeResult r = minimize_direct(prob, cfg);
    report("ac-1d", o, r.breakdown.total);
    write_oracle_csv(out_dir + "/oracle_ac1d.csv", o.rows);
  }
  {
    const Grid g = make_interval(5, 0.0, 1.0);
    const Field datum = sample_field(g, [](double x, double) { return x; });
    const Problem prob{g, datum, QField::uniform(1.0), PhiSpec::nonexistence()};
    const OracleResult o = oracle_minimize_1d(prob);
    const MinimizeResult r = minimize_direct(prob, cfg);
    report("nonexistence-1d", o, r.breakdown.total);
    write_oracle_csv(out_dir + "/oracle_nonexistence.csv", o.rows);
  }
  {
    const Grid g = make_rectangle(5, 5, 0.0, 0.0, 1.0, 1.0);
    const Field datum = sample_field(g, [](double x, double) { return x; });
    const Problem prob{g, datum, QField::uniform(1.0), PhiSpec::linear(2.0)};
    const OracleResult o = oracle_minimize_2d_tiny(prob);
    const MinimizeResult r = minimize_direct(prob, cfg);
    report("tiny-2d", o, r.breakdown.total);
    write_oracle_csv(out_dir + "/oracle_tiny2d.csv", o.rows);
  }
  return fails == 0 ? 0 : 1;
}

}  // namespace fblab
