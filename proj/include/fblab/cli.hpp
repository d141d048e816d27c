#pragma once
// Scenario configuration, the report bundle writer, reproduction runs for
// the degenerating 1D family and the saddle disk, the property-check matrix,
// and parameter sweeps. The binary in main.cpp is a thin shell over these.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fblab/io.hpp"
#include "fblab/problem.hpp"
#include "fblab/solve.hpp"

namespace fblab {

// Flat "key = value" text with [section] headers; keys are stored as
// "section.key"; '#' starts a comment; lists are comma-separated.
struct ConfigMap {
  std::map<std::string, std::string> kv;
  std::string raw;  // verbatim text, echoed into manifests

  bool has(const std::string& key) const { return kv.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback = "") const;
  double get_num(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_flag(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key) const;
};

ConfigMap parse_config_text(const std::string& text);
ConfigMap parse_config_file(const std::string& path);

struct Overrides {
  std::optional<std::string> out;
  std::optional<unsigned> seed;
  std::optional<int> resolution;
};

struct ScenarioConfig {
  ConfigMap cfg;
  Grid grid;
  Field datum;
  QField q;
  PhiSpec phi;
  SolverConfig solver;
  std::string out_dir = "out";
  unsigned seed = 12345;
  bool run_fixed_point = false;

  Problem problem() const { return Problem{grid, datum, q, phi}; }
};

// Builds and validates a scenario: resolution >= 16 per axis, referenced
// files must exist, datum/phi families known.
ScenarioConfig build_scenario(const ConfigMap& cfg, const Overrides& ov = {});

struct PropertyRow {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  bool applicable = true;
};

struct ReportBundle {
  std::string dir;
  MinimizeResult direct;
  bool ran_fixed_point = false;
  MinimizeResult fixed_point;
  FreeBoundary fb;
  std::vector<PropertyRow> checks;
  int exit_code = 0;
};

// Solve (direct, plus the lambda fixed point when enabled), run the enabled
// analyses, write the bundle under out_dir. Non-convergence still writes the
// bundle and reports a nonzero exit code.
ReportBundle run_scenario(const ScenarioConfig& sc, const std::string& command);

// The eight-check matrix: subharmonicity, nondegeneracy, clean ball, growth,
// Bernoulli, phase separation, Laplacian-of-u+ bounds, perimeter. Bernoulli
// is downgraded to not-applicable when Phi0 fails the monotonicity probe.
std::vector<PropertyRow> property_suite_on_field(const Field& u, const Problem& prob);

// Solve the scenario, run the matrix, print it; exit code 0 iff every
// applicable check passed and the solver converged.
int run_property_suite(const ScenarioConfig& sc);

struct ReproRow {
  double h = 0.0;
  double j_h = 0.0;
  double analytic = 0.0;      // 1/(1-h) + (3+2h)/8
  double zero_measure = 0.0;  // length of {u <= 0}
};
// resolutions are 1/h values (>= 8); runs the degenerating 1D family at each.
std::vector<ReproRow> repro_nonexistence(const std::vector<int>& resolutions,
                                         const std::string& out_dir = "");

struct SaddleRepro {
  double j_value = 0.0;
  double j_expected = 0.0;  // pi/2 + 1
  double c1 = 0.0;          // boundary integral of the positive part
  double min_gap = 0.0;     // worst perturbation energy gap
  std::vector<std::pair<double, double>> flatness;  // (r, value) at the origin
  bool pass = false;
};
SaddleRepro repro_saddle(int resolution, int n_perturbations,
                         const std::string& out_dir = "");

// One row per parameter tuple; failures recorded as nan rows, sweep continues.
int run_sweep(const ScenarioConfig& sc);

// Blow-up at a free boundary point (config [blowup]): sequence metrics, the
// linearized-limit comparison, Weiss and ACF traces in both modes.
int run_blowup(const ScenarioConfig& sc);

// Built-in tiny problems, oracle vs direct solver; writes pattern CSVs.
int run_oracle_check(const std::string& out_dir);

// Diagnostics on an existing field dump: the property matrix plus the
// free-boundary and density CSVs.
int run_analyze(const ScenarioConfig& sc, const std::string& field_path);

void write_manifest(const std::string& path, const std::string& command,
                    const ScenarioConfig& sc);

}  // namespace fblab
