#include "additest/clirun.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "additest/csv.hpp"
#include "additest/json_io.hpp"
#include "additest/parallel.hpp"

namespace additest {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(trim(s), &used);
    if (used == trim(s).size() && std::isfinite(v)) return v;
  } catch (...) {
  }
  throw ConfigError(what + ": '" + s + "' is not a number");
}

std::vector<double> parse_double_list(const std::string& s,
                                      const std::string& what) {
  std::vector<double> out;
  for (const std::string& tok : split(s, ',')) out.push_back(parse_double(tok, what));
  return out;
}

std::size_t resolve_feature(const std::string& token,
                            const std::vector<std::string>& feature_names) {
  const std::string t = trim(token);
  for (std::size_t i = 0; i < feature_names.size(); ++i) {
    if (feature_names[i] == t) return i;
  }
  try {
    std::size_t used = 0;
    const unsigned long idx = std::stoul(t, &used);
    if (used == t.size() && idx < feature_names.size()) return idx;
  } catch (...) {
  }
  throw ConfigError("unknown feature column '" + t + "'");
}

std::vector<std::vector<std::size_t>> parse_groups(
    const std::string& spec, const std::vector<std::string>& feature_names) {
  if (trim(spec).empty()) {
    throw ConfigError("--groups is required (e.g. \"md,ad,sph;elev,ab\")");
  }
  std::vector<std::vector<std::size_t>> groups;
  for (const std::string& gspec : split(spec, ';')) {
    std::vector<std::size_t> members;
    for (const std::string& tok : split(gspec, ',')) {
      members.push_back(resolve_feature(tok, feature_names));
    }
    groups.push_back(std::move(members));
  }
  return groups;
}

}  // namespace

TestGrid build_grid_from_config(const RunConfig& config, const Dataset& data,
                                const std::vector<std::string>& feature_names) {
  const auto member_indices = parse_groups(config.groups, feature_names);
  const bool have_levels = !trim(config.levels).empty();
  const bool have_quantiles = !trim(config.quantiles).empty();
  if (have_levels == have_quantiles) {
    throw ConfigError("specify exactly one of --levels or --quantiles");
  }

  const std::vector<std::string> per_group =
      split(have_levels ? config.levels : config.quantiles, ';');
  if (per_group.size() != member_indices.size()) {
    throw ConfigError("--" + std::string(have_levels ? "levels" : "quantiles") +
                      " must have one ';'-separated entry per group");
  }

  std::vector<FeatureGroup> groups;
  for (std::size_t g = 0; g < member_indices.size(); ++g) {
    FeatureGroup fg;
    fg.features = member_indices[g];
    if (have_levels) {
      for (const std::string& level_tok : split(per_group[g], ',')) {
        std::vector<double> level;
        for (const std::string& v : split(level_tok, ':')) {
          level.push_back(parse_double(v, "--levels"));
        }
        if (level.size() != fg.features.size()) {
          throw ConfigError("--levels: level '" + level_tok + "' has " +
                            std::to_string(level.size()) + " values; group " +
                            std::to_string(g + 1) + " has " +
                            std::to_string(fg.features.size()) + " features");
        }
        fg.levels.push_back(std::move(level));
      }
    } else {
      const std::vector<double> probs =
          parse_double_list(per_group[g], "--quantiles");
      // Level j pairs the j-th quantile of every member feature.
      std::vector<std::vector<double>> member_quantiles;
      for (std::size_t f : fg.features) {
        member_quantiles.push_back(quantile_levels(data, f, probs));
      }
      for (std::size_t j = 0; j < probs.size(); ++j) {
        std::vector<double> level;
        for (const auto& q : member_quantiles) level.push_back(q[j]);
        fg.levels.push_back(std::move(level));
      }
    }
    groups.push_back(std::move(fg));
  }
  return make_grid(std::move(groups));
}

namespace {

nlohmann::json echo_config(const RunConfig& c) {
  nlohmann::json j{{"command", c.command},
                   {"kind", c.kind},
                   {"alpha", c.alpha},
                   {"k", c.k},
                   {"n_tilde", c.n_tilde},
                   {"n_mc", c.n_mc},
                   {"min_node_size", c.min_node_size},
                   {"max_depth", c.max_depth},
                   {"seed", c.seed},
                   {"threads", c.threads}};
  if (!c.input_path.empty()) j["input"] = c.input_path;
  if (!c.response.empty()) j["response"] = c.response;
  if (!c.groups.empty()) j["groups"] = c.groups;
  if (!c.levels.empty()) j["levels"] = c.levels;
  if (!c.quantiles.empty()) j["quantiles"] = c.quantiles;
  if (c.project) {
    j["project"] = true;
    j["r"] = c.r;
    j["M"] = c.num_projections;
  }
  if (c.command == "simulate") {
    j["model"] = c.model;
    j["beta"] = c.beta;
    j["n"] = c.n_train;
    j["replications"] = c.replications;
    j["noise_sd"] = c.noise_sd;
  }
  return j;
}

void write_output(const std::string& out_path, std::ostream& fallback,
                  const std::string& text) {
  if (out_path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw std::runtime_error("cannot write '" + out_path + "'");
  f << text;
}

std::vector<std::vector<double>> default_axis_levels(std::size_t dim,
                                                     bool projected) {
  std::vector<double> levels;
  if (!projected) {
    levels = (dim == 2) ? std::vector<double>{0.2, 0.4, 0.6, 0.8}
                        : std::vector<double>{0.3, 0.5, 0.7};
  } else if (dim == 2) {
    for (int i = 1; i <= 10; ++i) levels.push_back(i / 11.0);
  } else {
    for (int i = 1; i <= 5; ++i) levels.push_back(i / 6.0);
  }
  return std::vector<std::vector<double>>(dim, levels);
}

int run_test_command(const RunConfig& config, std::ostream& out,
                     std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const DatasetWithNames input = ingest_csv(config.input_path, config.response);
  const TestGrid grid = build_grid_from_config(config, input.data,
                                               input.feature_names);

  nlohmann::json warnings = nlohmann::json::array();
  for (const std::string& w : boundary_level_warnings(grid, input.data)) {
    warnings.push_back(w);
    err << "warning: " << w << "\n";
  }
  if (static_cast<double>(config.k) >
      1.5 * std::sqrt(static_cast<double>(input.data.n))) {
    const std::string w =
        "subsample size k = " + std::to_string(config.k) +
        " is large relative to sqrt(n); the chi-square approximation may "
        "degrade";
    warnings.push_back(w);
    err << "warning: " << w << "\n";
  }

  const TestKind kind =
      test_kind_from_string(config.kind.empty() ? "total" : config.kind);
  TreeConfig tree;
  tree.min_node_size = config.min_node_size;
  tree.max_depth = config.max_depth;
  InternalConfig cfg;
  cfg.k = config.k;
  cfg.n_tilde = config.n_tilde;
  cfg.n_mc = config.n_mc;
  cfg.rng = RngStream(config.seed, 0);

  nlohmann::json report;
  if (config.project) {
    ProjectionConfig proj;
    proj.r = config.r;
    proj.num_projections = config.num_projections;
    proj.rng = RngStream(config.seed, 1);
    if (proj.r < 5 || proj.r > 15) {
      err << "warning: projected dimension r = " << proj.r
          << " is outside the recommended 5..15 band\n";
    }
    report = run_projection_test(input.data, grid, kind, tree, cfg, proj,
                                 config.alpha, config.threads);
  } else {
    report = end_to_end_test(input.data, grid, kind, tree, cfg, config.alpha,
                             config.threads);
  }

  nlohmann::json envelope{
      {"command", "test"},
      {"version", kVersion},
      {"seed", config.seed},
      {"rows", input.data.n},
      {"features", input.feature_names},
      {"response", input.response_name},
      {"grid_points", grid.num_points()},
      {"config", echo_config(config)},
      {"warnings", warnings},
      {"report", report},
  };
  envelope["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  write_output(config.out_path, out, envelope.dump(2) + "\n");
  return 0;
}

int run_grid_preview(const RunConfig& config, std::ostream& out,
                     std::ostream& err) {
  const DatasetWithNames input = ingest_csv(config.input_path, config.response);
  const TestGrid grid = build_grid_from_config(config, input.data,
                                               input.feature_names);
  for (const std::string& w : boundary_level_warnings(grid, input.data)) {
    err << "warning: " << w << "\n";
  }
  std::ostringstream text;
  text << "index";
  for (const std::string& name : input.feature_names) text << '\t' << name;
  text << '\n';
  for (std::size_t p = 0; p < grid.num_points(); ++p) {
    text << p;
    for (double v : grid.point(p)) text << '\t' << v;
    text << '\n';
  }
  write_output(config.out_path, out, text.str());
  return 0;
}

int run_simulate(const RunConfig& config, std::ostream& out, std::ostream&) {
  const auto start = std::chrono::steady_clock::now();
  if (config.model.empty()) {
    throw ConfigError("simulate: --model is required");
  }
  const SimModel& model = registry_lookup(config.model);

  SimSpec spec;
  spec.function_id = config.model;
  spec.beta = config.beta;
  spec.n = config.n_train;
  spec.k = config.k;
  spec.n_tilde = config.n_tilde;
  spec.n_mc = config.n_mc;
  spec.kind = config.kind.empty() ? model.kind
                                  : test_kind_from_string(config.kind);
  spec.replications = config.replications;
  spec.noise_sd = config.noise_sd;
  spec.alpha = config.alpha;
  spec.seed = config.seed;
  spec.tree.min_node_size = config.min_node_size;
  spec.tree.max_depth = config.max_depth;
  if (config.project) {
    spec.proj_r = config.r;
    spec.proj_m = config.num_projections;
  }
  if (!trim(config.levels).empty()) {
    spec.axis_levels.clear();
    const auto per_axis = split(config.levels, ';');
    if (per_axis.size() == 1 && model.dim > 1) {
      // One list applies to every axis.
      const auto levels = parse_double_list(per_axis[0], "--levels");
      spec.axis_levels.assign(model.dim, levels);
    } else {
      for (const std::string& axis : per_axis) {
        spec.axis_levels.push_back(parse_double_list(axis, "--levels"));
      }
    }
  } else {
    spec.axis_levels = default_axis_levels(model.dim, config.project);
  }

  const SimResult result = run_campaign(spec, config.threads);

  std::ostringstream lines;
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    nlohmann::json row = result.records[i];
    row["replication"] = i;
    lines << row.dump() << "\n";
  }
  nlohmann::json summary{{"summary", result},
                         {"command", "simulate"},
                         {"version", kVersion},
                         {"seed", config.seed},
                         {"config", echo_config(config)}};
  summary["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  lines << summary.dump() << "\n";
  write_output(config.out_path, out, lines.str());
  return 0;
}

}  // namespace

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.command == "test") return run_test_command(config, out, err);
    if (config.command == "grid-preview") return run_grid_preview(config, out, err);
    if (config.command == "simulate") return run_simulate(config, out, err);
    throw ConfigError("unknown command '" + config.command +
                      "' (expected test|simulate|grid-preview)");
  } catch (const std::exception& e) {
    nlohmann::json error{{"error", {{"message", e.what()}}}};
    err << error.dump() << "\n";
    return 1;
  }
}

int dispatch(const RunConfig& config) {
  return dispatch(config, std::cout, std::cerr);
}

}  // namespace additest
