#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "excursion/estimator.hpp"
#include "excursion/field.hpp"
#include "excursion/measure.hpp"

namespace excursion {

inline constexpr const char* kTableSchema = "excursion-table/1";
inline constexpr const char* kPickandsSchema = "excursion-pickands/1";

enum class OracleKind { None, Cosine, ExcursionMeasure };

/// A fully resolved experiment. Built from flat key/value pairs: a preset or
/// config file first, command-line overrides on top.
struct ExperimentConfig {
  std::string experiment = "custom";
  KernelSpec kernel;
  MeanSpec mean;
  std::vector<double> lower{0.0};
  std::vector<double> upper{1.0};
  std::vector<double> levels{3.0, 4.0, 5.0, 6.0, 7.0, 8.0};
  std::size_t n = 1000;
  std::optional<std::size_t> m;
  std::optional<double> eps;
  double lambda = 1.0;
  std::uint64_t seed = 1;
  std::optional<double> dof;
  std::optional<double> scale;
  bool integrand = false;
  double xi = 1.0;
  OracleKind oracle = OracleKind::None;
  TauMethod tau_method = TauMethod::Rejection;
  std::string output;
  unsigned workers = 0;
  std::string format = "csv";
  bool timing = true;

  FieldModel model() const;
  DesignDensity design_density() const;
  std::size_t design_size(const FieldModel& model) const;

  /// Stable hash of every setting that affects the numbers (not output
  /// path, format, timing or worker count), as 16 hex digits.
  std::string digest() const;
};

using ConfigPairs = std::map<std::string, std::string>;

/// Preset names: table1 .. table4 and pickands.
bool is_preset(const std::string& name);
ConfigPairs preset_pairs(const std::string& name);

/// Parses `key = value` lines; `#` starts a comment.
ConfigPairs parse_config_text(const std::string& text);
ConfigPairs load_config_file(const std::string& path);

/// Throws ConfigurationError naming the first unknown or invalid key.
ExperimentConfig build_config(const ConfigPairs& pairs);

struct TableRow {
  Target target = Target::TailProbability;
  double level = 0.0;
  std::optional<double> truth;
  EstimateReport report;
};

std::vector<TableRow> run_table(const ExperimentConfig& config);
void write_table(std::ostream& out, const std::vector<TableRow>& rows, const ExperimentConfig& config);

struct PickandsRow {
  double alpha = 0.0;
  double level = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  EstimateReport tail;
};

/// Pickands constant estimates for exp(-|t|^alpha) on [0, 1], one row per
/// level. Uses kernel.power as alpha.
std::vector<PickandsRow> run_pickands(const ExperimentConfig& config);
void write_pickands(std::ostream& out, const std::vector<PickandsRow>& rows, const ExperimentConfig& config);

}  // namespace excursion
