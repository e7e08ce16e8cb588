// lab: batch front end for the torus spacetime laboratory.
//   lab run <config.json|builtin> [--parallel] [--out DIR]
//   lab plot <report.json> --kind K [--out file.csv]
//   lab presets

#include "lab/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for periodic Lorentzian metrics on tori"};
  app.require_subcommand(1);

  std::string config;
  bool parallel = false;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "run a scenario config (file path or builtin name)");
  run->add_option("config", config, "scenario JSON file or builtin scenario name")->required();
  run->add_flag("--parallel", parallel,
                "run independent tasks concurrently (LAB_THREADS caps workers)");
  run->add_option("--out", out_dir, "override the scenario output directory");

  std::string report, kind, out_csv = "plot.csv";
  auto* plot = app.add_subcommand("plot", "emit CSV plot data from a task report");
  plot->add_option("report", report, "task report JSON")->required();
  plot->add_option("--kind", kind, "cone_section | reach_slice | lipschitz_hist | plateau")
      ->required();
  plot->add_option("--out", out_csv, "output CSV path");

  auto* presets = app.add_subcommand("presets", "list metric presets and builtin scenarios");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    lab::RunOptions opt;
    opt.parallel = parallel;
    opt.output_dir_override = out_dir;
    return lab::run_scenario_file(config, opt);
  }
  if (plot->parsed()) {
    return lab::emit_plot_data(report, kind, out_csv);
  }
  if (presets->parsed()) {
    std::cout << "presets:\n"
              << "  flat               flat Lorentzian torus; params: dim (2|3), scale\n"
              << "  conformal_flat     f^2 * flat with f = base + amp sin(2 pi t) sin(2 pi x);\n"
              << "                     params: base, amp, gr_amp (conformal auxiliary metric)\n"
              << "  product_circle     -dt^2 + rho(x)^2 dx^2, rho = rho_mean + rho_amp sin(2 pi x)\n"
              << "  e1_counterexample  3-torus with one-way slabs (not vicious); params: width, depth\n"
              << "builtin scenarios:\n";
    for (const auto& [name, _] : lab::builtin_scenarios()) std::cout << "  " << name << "\n";
  }
  return 0;
}
