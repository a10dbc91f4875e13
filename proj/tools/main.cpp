#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using rangesel::cli::RunConfig;
  RunConfig cfg;
  CLI::App app{"Range selection and range median queries"};
  app.require_subcommand(1);

  auto common = [&cfg](CLI::App* sub) {
    sub->add_option("--structure", cfg.structure, "cascade | compact | dynamic | oracle");
    sub->add_option("--seed", cfg.seed, "Seed for all randomness");
    sub->add_option("--input", cfg.input, "Input file ('-' = stdin)");
    sub->add_option("--output", cfg.output, "Output file ('-' = stdout)");
  };
  auto tree_opts = [&cfg](CLI::App* sub) {
    sub->add_option("--mode", cfg.mode, "lazy | eager");
    sub->add_option("--strategy", cfg.strategy, "Pivot selection: randomized | mom");
  };

  auto* query = app.add_subcommand("query", "Answer range queries read from a static array or an op-stream");
  common(query);
  tree_opts(query);

  auto* bench = app.add_subcommand("bench", "Run seeded random workloads and print counters as CSV");
  common(bench);
  tree_opts(bench);
  bench->add_option("--grid", cfg.grid, "Grid, e.g. n=2^14,2^16,k=64,256");
  bench->add_option("--reps", cfg.reps, "Repetitions per grid point");
  bench->add_option("--gnuplot", cfg.gnuplot, "Gnuplot data file (default: <output>.dat)");

  auto* filter = app.add_subcommand("filter", "Median-filter a binary PGM image");
  common(filter);
  filter->add_option("--radius", cfg.radius, "Window radius r; windows are (2r+1)x(2r+1)");
  filter->add_option("--threads", cfg.threads, "Worker threads over tiles");

  auto* gen = app.add_subcommand("gen", "Write a seeded random dataset, op-stream or image");
  gen->add_option("--kind", cfg.kind, "static | ops | pgm");
  gen->add_option("--seed", cfg.seed, "Seed");
  gen->add_option("--output", cfg.output, "Output file ('-' = stdout)");
  gen->add_option("--n", cfg.n, "Array length (static) or size cap (ops)");
  gen->add_option("--k", cfg.k, "Number of queries (static) or operations (ops)");
  gen->add_flag("--ranks", cfg.ranks, "Emit an explicit rank with every query");
  gen->add_option("--width", cfg.width, "Image width");
  gen->add_option("--height", cfg.height, "Image height");
  gen->add_option("--maxval", cfg.maxval, "Image maxval");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return rangesel::cli::kUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  return rangesel::cli::run(command, cfg, std::cin, std::cout, std::cerr);
}
