// ksurf_cli <command> [--config FILE] [--refinement N] [--k K] [--tol T]
//           [--out DIR] [--seed S] [--threads N] [--dump-matrix]
//
// Commands: oracle, solve-lens, solve-plateau, validate. Flags override the
// config file. Exit codes: 0 success, 1 validation failure, 2 solver failure,
// 3 precondition violation, 4 I/O or config error.
#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "ksurf/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"k-surface solvers and validation"};
  app.require_subcommand(1);
  std::string config_path;
  ksurf::ConfigOverrides ov;
  int refinement = 0, threads = 1;
  double k = 0.0, tol = 0.0;
  std::string out;
  std::uint64_t seed = 0;
  bool dump = false;

  std::vector<CLI::App*> subs;
  for (const char* name : {"oracle", "solve-lens", "solve-plateau", "validate"}) {
    CLI::App* s = app.add_subcommand(name);
    s->add_option("--config", config_path, "key = value config file");
    s->add_option("--refinement", refinement, "mesh refinement level, 0..6");
    s->add_option("--k", k, "target curvature");
    s->add_option("--tol", tol, "Newton residual tolerance");
    s->add_option("--out", out, "output directory");
    s->add_option("--seed", seed, "seed for randomized sampling");
    s->add_option("--threads", threads, "worker threads (recorded; solves run sequentially)");
    s->add_flag("--dump-matrix", dump, "write the assembled operator in matrix-market format");
    subs.push_back(s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 4;
  }

  CLI::App* sub = app.get_subcommands().front();
  auto given = [&](const char* flag) { return sub->count(flag) > 0; };
  if (given("--refinement")) ov.refinement = refinement;
  if (given("--k")) ov.k = k;
  if (given("--tol")) ov.tol = tol;
  if (given("--out")) ov.out = out;
  if (given("--seed")) ov.seed = seed;
  if (given("--threads")) ov.threads = threads;
  if (given("--dump-matrix")) ov.dump_matrix = dump;

  ksurf::RunConfig cfg;
  cfg.command = *ksurf::parse_command(sub->get_name());
  try {
    if (!config_path.empty()) cfg = ksurf::load_config_file(config_path, cfg);
  } catch (const ksurf::KsurfError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 4;
  }
  cfg = ksurf::apply_overrides(cfg, ov);

  ksurf::CommandOutcome o = ksurf::run_command(cfg);
  std::cout << o.summary;
  if (o.exit_code != 0 && o.report.contains("error")) {
    const auto& err = o.report["error"];
    std::fprintf(stderr, "error %s: %s\n", err.value("code", std::string()).c_str(),
                 err.value("message", std::string()).c_str());
    if (err.contains("citation") && !err["citation"].get<std::string>().empty())
      std::fprintf(stderr, "citation: %s\n", err["citation"].get<std::string>().c_str());
  }
  return o.exit_code;
}
