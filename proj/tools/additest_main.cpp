#include <CLI11.hpp>

#include "additest/clirun.hpp"

namespace {

void add_common_options(CLI::App* cmd, additest::RunConfig& config) {
  cmd->add_option("--alpha", config.alpha, "Test level")->check(CLI::Range(1e-9, 1.0));
  cmd->add_option("--k", config.k, "Subsample size per tree");
  cmd->add_option("--n-tilde", config.n_tilde, "Number of fixed-point groups");
  cmd->add_option("--n-mc", config.n_mc, "Monte Carlo subsamples per group");
  cmd->add_option("--min-node-size", config.min_node_size, "Tree leaf size floor");
  cmd->add_option("--max-depth", config.max_depth, "Tree depth cap (0 = unlimited)");
  cmd->add_option("--seed", config.seed, "Master random seed");
  cmd->add_option("--threads", config.threads, "Worker threads (0 = all cores)");
  cmd->add_option("--out", config.out_path, "Report file (default: stdout)");
}

void add_grid_options(CLI::App* cmd, additest::RunConfig& config) {
  cmd->add_option("--input", config.input_path, "CSV file with a header row")
      ->required();
  cmd->add_option("--response", config.response,
                  "Response column (default: last column)");
  cmd->add_option("--groups", config.groups,
                  "Feature groups, ';' between groups, ',' within (names or "
                  "0-based indices)")
      ->required();
  cmd->add_option("--levels", config.levels,
                  "Explicit grid levels per group; ',' between levels, ':' "
                  "joins values of multi-feature groups");
  cmd->add_option("--quantiles", config.quantiles,
                  "Quantile probabilities per group; levels pair the same "
                  "quantile of every member feature");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hypothesis tests for feature significance and additivity on "
               "subsampled tree ensembles"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key-value config file; flags override it");

  additest::RunConfig config;

  CLI::App* test = app.add_subcommand(
      "test", "Run a significance/total/partial additivity test on CSV data");
  add_grid_options(test, config);
  test->add_option("--kind", config.kind, "significance|total|partial")
      ->check(CLI::IsMember({"significance", "total", "partial"}));
  test->add_flag("--project", config.project,
                 "Use the random-projection test (for large grids)");
  test->add_option("--r", config.r, "Projected dimension");
  test->add_option("--M", config.num_projections, "Number of projections");
  add_common_options(test, config);

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte Carlo power / alpha-level campaign on synthetic data");
  simulate->add_option("--model", config.model, "Registry model id")->required();
  simulate->add_option("--beta", config.beta,
                       "Interaction strength (linear-interaction model)");
  simulate->add_option("--n", config.n_train, "Training set size");
  simulate->add_option("--reps", config.replications, "Replications");
  simulate->add_option("--noise-sd", config.noise_sd, "Noise standard deviation");
  simulate->add_option("--kind", config.kind,
                       "Override the model's default test kind")
      ->check(CLI::IsMember({"significance", "total", "partial"}));
  simulate->add_option("--levels", config.levels,
                       "Grid levels; one ','-list shared by all axes or "
                       "';'-separated lists per axis");
  simulate->add_flag("--project", config.project, "Projected test");
  simulate->add_option("--r", config.r, "Projected dimension");
  simulate->add_option("--M", config.num_projections, "Number of projections");
  add_common_options(simulate, config);

  CLI::App* preview = app.add_subcommand(
      "grid-preview", "Print the resolved test grid without running a test");
  add_grid_options(preview, config);
  preview->add_option("--out", config.out_path, "Output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  if (test->parsed()) config.command = "test";
  if (simulate->parsed()) config.command = "simulate";
  if (preview->parsed()) config.command = "grid-preview";
  if (config.kind.empty() && config.command == "test") config.kind = "total";

  return additest::dispatch(config);
}
