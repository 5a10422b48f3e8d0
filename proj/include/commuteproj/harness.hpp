// Experiment drivers behind the CLI: commuting and projection checks,
// h-convergence studies, local/global equivalence ratios (with the p-robust
// sweep), the single-tetrahedron constrained/unconstrained equivalence, and
// the mixed-method consistency check. All runs are deterministic for a
// fixed configuration.
#ifndef COMMUTEPROJ_HARNESS_HPP
#define COMMUTEPROJ_HARNESS_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "commuteproj/fields.hpp"
#include "commuteproj/globalbest.hpp"
#include "commuteproj/hcurl_proj.hpp"

namespace cpj {

struct ExperimentConfig {
  std::string mesh_spec = "cube-kuhn:refined=1";
  int degree = 1;
  Variant variant = Variant::Canonical;
  std::string field_id = "trig";
  int refine = 3;  // number of refinement levels for multi-level experiments
  int quad_degree = -1;
  double tol_feas = 1e-9;
  std::uint64_t seed = 20260808;
  std::string out_csv;
  int p_sweep_begin = -1, p_sweep_end = -1;
  bool no_assert = false;
  int num_fields = 20;  // random conforming fields in the projection check

  PipelineConfig pipeline(int p) const;
};

/// Long-format CSV: one row per (level or sweep index, aggregate metric).
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  void write(std::ostream& out) const;
  void save(const std::string& path) const;
};

std::string format_double(double x);  // round-trip exact (max_digits10)

struct CommuteReport {
  double residual = 0.0;  // ||curl P(v) - Pdiv(curl v)|| / ||Pdiv(curl v)||
  double denom = 0.0;
  bool pass = false;
  std::vector<CheckRecord> checks;
  CsvTable csv;
};
CommuteReport run_commute(const ExperimentConfig& cfg);

struct ProjectReport {
  double max_hcurl_error = 0.0;  // relative, over random conforming fields
  double max_hdiv_error = 0.0;
  bool pass = false;
  CsvTable csv;
};
ProjectReport run_project(const ExperimentConfig& cfg);

struct ConvergenceLevel {
  int level = 0;
  int elements = 0;
  double h = 0.0;
  double error = 0.0;  // sqrt of the weighted global minimum
};
struct ConvergenceReport {
  std::vector<ConvergenceLevel> levels;
  double rate = 0.0;
  bool exact = false;      // error ~ 0 on all levels
  bool monotone = true;
  double expected_rate = 0.0;
  bool pass = false;
  CsvTable csv;
};
ConvergenceReport run_convergence(const ExperimentConfig& cfg);

struct EquivalenceLevel {
  int level = 0;
  int elements = 0;
  int sweep_p = -1;
  EquivReport report;
  int nonconvex_patches = 0;
};
struct EquivalenceRunReport {
  std::vector<EquivalenceLevel> levels;
  bool ratios_ok = true;      // each ratio >= 1 - 1e-9
  double max_ratio_drift = 1.0;  // across consecutive levels
  bool hypotheses_ok = true;  // Gamma_D empty and convex patches (p-sweep)
  std::string hypotheses_note;
  bool pass = false;
  CsvTable csv;
};
EquivalenceRunReport run_equivalence(const ExperimentConfig& cfg);

struct SingleTetRow {
  int p = 0;
  double constrained = 0.0;
  double unconstrained = 0.0;
  double oscillation = 0.0;
  double ratio = 0.0;
};
struct SingleTetReport {
  std::vector<SingleTetRow> rows;
  bool ordered = true;  // constrained >= unconstrained on every row
  double max_growth = 1.0;
  bool pass = false;
  CsvTable csv;
};
SingleTetReport run_single_tet(const ExperimentConfig& cfg);

struct MixedReport {
  double rel_difference = 0.0;
  double div_residual = 0.0;
  bool pass = false;
  CsvTable csv;
};
MixedReport run_mixed(const ExperimentConfig& cfg);

/// Least-squares slope of log(error) against log(h).
double estimate_rate(const std::vector<double>& errors,
                     const std::vector<double>& mesh_sizes);

/// Geometric convexity test of a vertex-patch subdomain.
bool patch_is_convex(const TetMesh& mesh, const VertexPatch& patch,
                     double tol = 1e-10);

}  // namespace cpj

#endif
