// Command-line front end: reproduces the preset experiment tables, Pickands
// constant estimates, and runs custom models.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "excursion/error.hpp"
#include "excursion/experiment.hpp"

namespace {

using excursion::ConfigPairs;

// Flags shared by every subcommand; set values override the config pairs.
struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::optional<std::size_t> m;
  std::optional<double> eps;
  std::optional<std::string> out;
  std::optional<unsigned> workers;
  std::optional<std::string> format;
  std::optional<std::string> levels;
  bool no_timing = false;

  void attach(CLI::App* app) {
    app->add_option("--seed", seed, "Base seed of the replicate streams");
    app->add_option("--n", n, "Replicates per level");
    app->add_option("--m", m, "Design points per replicate");
    app->add_option("--eps", eps, "Target relative bias; picks m from the regularity when --m is absent");
    app->add_option("--out", out, "Write the table to this path as well as stdout");
    app->add_option("--workers", workers, "Worker threads (default: EXCURSION_WORKERS or all cores)");
    app->add_option("--format", format, "csv or gnuplot")->check(CLI::IsMember({"csv", "gnuplot"}));
    app->add_option("--levels", levels, "Comma-separated levels b");
    app->add_flag("--no-timing", no_timing, "Leave wall_time_ms blank so reruns are byte-identical");
  }

  void apply(ConfigPairs& pairs) const {
    if (seed) pairs["seed"] = std::to_string(*seed);
    if (n) pairs["n"] = std::to_string(*n);
    if (m) pairs["m"] = std::to_string(*m);
    if (eps) {
      std::ostringstream s;
      s.precision(17);
      s << *eps;
      pairs["eps"] = s.str();
      if (!m) pairs.erase("m");
    }
    if (out) pairs["out"] = *out;
    if (workers) pairs["workers"] = std::to_string(*workers);
    if (format) pairs["format"] = *format;
    if (levels) pairs["levels"] = *levels;
    if (no_timing) pairs["timing"] = "false";
  }
};

template <typename WriteFn>
void emit(const excursion::ExperimentConfig& config, WriteFn&& write) {
  std::ostringstream buffer;
  write(buffer);
  std::cout << buffer.str();
  if (!config.output.empty()) {
    std::ofstream file(config.output, std::ios::binary);
    if (!file) throw excursion::ConfigurationError("cannot write output file '" + config.output + "'");
    file << buffer.str();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rare-event estimation for Gaussian random field excursions"};
  app.require_subcommand(1);

  CommonFlags table_flags, pickands_flags, estimate_flags;

  std::string table_source;
  auto* table = app.add_subcommand("table", "Run a preset (table1..table4) or a key = value config file");
  table->add_option("source", table_source, "Preset name or config path")->required();
  table_flags.attach(table);

  std::optional<double> alpha;
  std::optional<std::string> pickands_config;
  auto* pickands = app.add_subcommand("pickands", "Estimate the Pickands constant for exp(-|t|^alpha) on [0, 1]");
  pickands->add_option("--alpha", alpha, "Index alpha in (0, 2]");
  pickands->add_option("--config", pickands_config, "Config file layered over the pickands preset");
  pickands_flags.attach(pickands);

  std::map<std::string, std::string> custom;
  std::optional<std::string> estimate_config;
  auto* estimate = app.add_subcommand("estimate", "Estimate tail probabilities for a custom model");
  estimate->add_option("--config", estimate_config, "Config file used as the base");
  const std::pair<const char*, const char*> model_keys[] = {
      {"kernel", "sqexp, exp, powexp or cosine"},
      {"length", "Kernel length scale"},
      {"power", "Exponent of the powexp kernel, in (0, 2]"},
      {"mean_intercept", "Constant term of the affine mean"},
      {"mean_slope", "Comma-separated slope of the affine mean"},
      {"lower", "Comma-separated lower corner of the domain"},
      {"upper", "Comma-separated upper corner of the domain"},
      {"nu", "Degrees of freedom of the design density (>= 3)"},
      {"scale", "Scale of the design density"},
      {"xi", "Constant integrand value"},
      {"oracle", "none, cosine or excursion_measure"},
      {"tau_method", "rejection or grid"},
      {"lambda", "Constant in the design size rule used with --eps"},
  };
  for (const auto& [key, help] : model_keys) {
    estimate->add_option_function<std::string>(
        std::string("--") + key, [&custom, key = key](const std::string& v) { custom[key] = v; }, help);
  }
  estimate->add_flag_function(
      "--integrand", [&custom](std::int64_t) { custom["integrand"] = "true"; },
      "Also estimate the excursion integral and the conditional expectation");
  estimate_flags.attach(estimate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (table->parsed()) {
      ConfigPairs pairs = excursion::is_preset(table_source) ? excursion::preset_pairs(table_source)
                                                             : excursion::load_config_file(table_source);
      table_flags.apply(pairs);
      const auto config = excursion::build_config(pairs);
      const auto rows = excursion::run_table(config);
      emit(config, [&](std::ostream& out) { excursion::write_table(out, rows, config); });
    } else if (pickands->parsed()) {
      ConfigPairs pairs = excursion::preset_pairs("pickands");
      if (pickands_config) {
        for (const auto& [k, v] : excursion::load_config_file(*pickands_config)) pairs[k] = v;
      }
      if (alpha) {
        std::ostringstream s;
        s.precision(17);
        s << *alpha;
        pairs["alpha"] = s.str();
      }
      pickands_flags.apply(pairs);
      const auto config = excursion::build_config(pairs);
      const auto rows = excursion::run_pickands(config);
      emit(config, [&](std::ostream& out) { excursion::write_pickands(out, rows, config); });
    } else if (estimate->parsed()) {
      ConfigPairs pairs = estimate_config ? excursion::load_config_file(*estimate_config) : ConfigPairs{};
      for (const auto& [k, v] : custom) pairs[k] = v;
      estimate_flags.apply(pairs);
      const auto config = excursion::build_config(pairs);
      const auto rows = excursion::run_table(config);
      emit(config, [&](std::ostream& out) { excursion::write_table(out, rows, config); });
    }
  } catch (const excursion::ConfigurationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const excursion::ReplicateFailureError& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return 3;
  } catch (const excursion::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
