#include <CLI11.hpp>

#include <iostream>

#include "renewalab/experiment.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  int workers = 0;
  std::int64_t seed = -1;
  std::string model, suite, tau, set_center, set_halfwidths;
  std::int64_t paths = -1;
  int dim = 0;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("-c,--config", args.config_path, "experiment config file");
  sub->add_option("--out", args.out_dir, "output directory for CSV artifacts");
  sub->add_option("--workers", args.workers, "worker thread count (default: logical cores)");
  sub->add_option("--seed", args.seed, "RNG seed override");
  sub->add_option("--model", args.model, "catalog model name");
  sub->add_option("--suite", args.suite, "suite name for check experiments");
  sub->add_option("--tau", args.tau, "comma-separated tau ladder");
  sub->add_option("--paths", args.paths, "Monte Carlo path budget");
  sub->add_option("--d", args.dim, "dimension for check experiments");
}

int run_kind(const std::string& kind, const CommonArgs& args) {
  renewalab::Config cfg;
  if (!args.config_path.empty()) cfg = renewalab::Config::parse_file(args.config_path);
  cfg.set("experiment", kind);
  if (!args.model.empty()) cfg.set("model", args.model);
  if (!args.suite.empty()) cfg.set("suite", args.suite);
  if (!args.tau.empty()) cfg.set("tau", args.tau);
  if (args.paths >= 0) cfg.set("paths", std::to_string(args.paths));
  if (args.dim > 0) cfg.set("d", std::to_string(args.dim));

  renewalab::RunSettings rs;
  rs.out_dir = args.out_dir;
  rs.workers = args.workers;
  if (args.seed >= 0) rs.seed = std::uint64_t(args.seed);

  return renewalab::run_experiment(cfg, rs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"renewalab: renewal-theorem numerics for Markov random walks"};
  app.require_subcommand(1);

  const std::vector<std::string> kinds = {"model-info", "spectral-report", "renewal-run",
                                          "oscillatory-check", "dyadic-check"};
  std::map<std::string, CommonArgs> args_by_kind;
  for (const auto& kind : kinds) {
    auto* sub = app.add_subcommand(kind);
    add_common(sub, args_by_kind[kind]);
  }
  auto* catalog = app.add_subcommand("catalog", "list built-in models and test functions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? renewalab::exit_error : renewalab::exit_ok;
  }

  try {
    if (catalog->parsed()) {
      std::cout << renewalab::list_catalog();
      return renewalab::exit_ok;
    }
    for (const auto& kind : kinds)
      if (app.get_subcommand(kind)->parsed()) return run_kind(kind, args_by_kind[kind]);
    return renewalab::exit_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return renewalab::exit_error;
  }
}
