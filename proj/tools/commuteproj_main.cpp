// Command-line driver for the verification experiments.
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "commuteproj/harness.hpp"

namespace {

cpj::ExperimentConfig parse_common(const CLI::App& app,
                                     const std::string& mesh,
                                     const std::string& variant,
                                     const std::string& p_sweep,
                                     const cpj::ExperimentConfig& base) {
  (void)app;
  cpj::ExperimentConfig cfg = base;
  cfg.mesh_spec = mesh;
  cfg.variant = variant == "alternative" ? cpj::Variant::Alternative
                                         : cpj::Variant::Canonical;
  if (!p_sweep.empty()) {
    const auto pos = p_sweep.find("..");
    if (pos == std::string::npos)
      throw CLI::ValidationError("--p-sweep", "expected the form a..b");
    cfg.p_sweep_begin = std::stoi(p_sweep.substr(0, pos));
    cfg.p_sweep_end = std::stoi(p_sweep.substr(pos + 2));
  }
  return cfg;
}

void maybe_save(const cpj::CsvTable& csv, const std::string& out) {
  if (!out.empty()) csv.save(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"commuteproj: verification harness for stable local commuting "
               "projectors onto Nedelec / Raviart-Thomas spaces"};
  app.fallthrough();
  app.set_config("--config", "", "plain-text `key = value` file, keys as flags");

  std::string mesh = "cube-kuhn:refined=1";
  std::string variant = "canonical";
  std::string field = "trig";
  std::string out;
  std::string p_sweep;
  cpj::ExperimentConfig base;

  app.add_option("--mesh", mesh, "mesh file or generator (reftet, cube-kuhn, "
                                 "cube-kuhn:refined=k[:bc=D|N])");
  app.add_option("--degree", base.degree, "polynomial degree p");
  app.add_option("--variant", variant, "canonical | alternative")
      ->check(CLI::IsMember({"canonical", "alternative"}));
  app.add_option("--field", field, "field id (trig, trigN, grad, gradtrig, "
                                   "poly:<d>, zero)");
  app.add_option("--refine", base.refine, "number of refinement levels");
  app.add_option("--quad-degree", base.quad_degree,
                 "quadrature degree for analytic data (-1 = default)");
  app.add_option("--tol-feas", base.tol_feas, "feasibility tolerance");
  app.add_option("--seed", base.seed, "random seed");
  app.add_option("--out", out, "CSV output path");
  app.add_option("--p-sweep", p_sweep, "degree sweep a..b");
  app.add_flag("--no-assert", base.no_assert,
               "disable pipeline invariant assertions");
  app.add_option("--num-fields", base.num_fields,
                 "random conforming fields per projection check");

  auto* c_commute = app.add_subcommand("check-commute",
                                       "commuting identity of the projectors");
  auto* c_project = app.add_subcommand("check-project",
                                       "projection property on random "
                                       "conforming fields");
  auto* c_conv = app.add_subcommand("convergence", "h-convergence study");
  auto* c_equiv = app.add_subcommand("equivalence",
                                     "local-best vs global-best ratios");
  auto* c_single = app.add_subcommand("single-tet",
                                      "constrained/unconstrained equivalence "
                                      "on one tetrahedron");
  auto* c_mixed = app.add_subcommand("mixed",
                                     "divergence-free projection vs the "
                                     "three-field mixed system");
  app.require_subcommand(0, 1);

  CLI11_PARSE(app, argc, argv);

  try {
    cpj::ExperimentConfig cfg = parse_common(app, mesh, variant, p_sweep, base);
    cfg.field_id = field;
    cfg.out_csv = out;

    if (c_commute->parsed()) {
      const auto rep = cpj::run_commute(cfg);
      std::printf("commute residual (relative): %.3e  [%s]\n", rep.residual,
                  rep.pass ? "PASS" : "FAIL");
      maybe_save(rep.csv, out);
      return rep.pass ? 0 : 1;
    }
    if (c_project->parsed()) {
      const auto rep = cpj::run_project(cfg);
      std::printf("max projection error: hcurl %.3e  hdiv %.3e  [%s]\n",
                  rep.max_hcurl_error, rep.max_hdiv_error,
                  rep.pass ? "PASS" : "FAIL");
      maybe_save(rep.csv, out);
      return rep.pass ? 0 : 1;
    }
    if (c_conv->parsed()) {
      const auto rep = cpj::run_convergence(cfg);
      for (const auto& l : rep.levels)
        std::printf("level %d  elements %6d  h %.4f  error %.6e\n", l.level,
                    l.elements, l.h, l.error);
      if (rep.exact)
        std::printf("error identically ~0 (field in the discrete space): "
                    "rate undefined, reported exact  [PASS]\n");
      else
        std::printf("observed rate %.3f (expected %.1f +/- 0.2)%s  [%s]\n",
                    rep.rate, rep.expected_rate,
                    rep.monotone ? "" : "  WARNING: non-monotone errors",
                    rep.pass ? "PASS" : "FAIL");
      maybe_save(rep.csv, out);
      return rep.pass ? 0 : 1;
    }
    if (c_equiv->parsed()) {
      const auto rep = cpj::run_equivalence(cfg);
      for (const auto& l : rep.levels) {
        std::printf("level %d%s: ratio_constrained %.6f  ratio_unconstrained "
                    "%.6f",
                    l.level,
                    l.sweep_p >= 0 ? (" p=" + std::to_string(l.sweep_p)).c_str()
                                   : "",
                    l.report.ratio_constrained, l.report.ratio_unconstrained);
        if (l.report.degree >= 1)
          std::printf("  ratio_probust %.6f", l.report.ratio_probust);
        std::printf("  nonconvex_patches %d\n", l.nonconvex_patches);
      }
      if (!rep.hypotheses_ok)
        std::printf("WARNING: p-robust hypotheses not met: %s\n",
                    rep.hypotheses_note.c_str());
      std::printf("ratio drift across levels: %.3f  [%s]\n",
                  rep.max_ratio_drift, rep.pass ? "PASS" : "FAIL");
      maybe_save(rep.csv, out);
      return rep.pass ? 0 : 1;
    }
    if (c_single->parsed()) {
      cfg.mesh_spec = app.count("--mesh") ? mesh : "reftet";
      const auto rep = cpj::run_single_tet(cfg);
      for (const auto& r : rep.rows)
        std::printf("p %d  constrained %.6e  unconstrained %.6e  oscillation "
                    "%.6e  ratio %.4f\n",
                    r.p, r.constrained, r.unconstrained, r.oscillation,
                    r.ratio);
      std::printf("ratio growth across sweep: %.3f  ordered: %s  [%s]\n",
                  rep.max_growth, rep.ordered ? "yes" : "no",
                  rep.pass ? "PASS" : "FAIL");
      maybe_save(rep.csv, out);
      return rep.pass ? 0 : 1;
    }
    if (c_mixed->parsed()) {
      const auto rep = cpj::run_mixed(cfg);
      std::printf("constrained projection vs three-field system: %.3e  "
                  "(div residual %.3e)  [%s]\n",
                  rep.rel_difference, rep.div_residual,
                  rep.pass ? "PASS" : "FAIL");
      maybe_save(rep.csv, out);
      return rep.pass ? 0 : 1;
    }
    std::cout << app.help() << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
