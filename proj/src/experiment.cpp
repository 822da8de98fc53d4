#include "excursion/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <set>
#include <sstream>

#include "excursion/error.hpp"
#include "excursion/oracles.hpp"

namespace excursion {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigurationError("invalid number for '" + key + "': " + value);
  }
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigurationError("invalid non-negative integer for '" + key + "': " + value);
  }
  try {
    return std::stoull(value);
  } catch (const std::exception&) {
    throw ConfigurationError("integer out of range for '" + key + "': " + value);
  }
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw ConfigurationError("empty list for '" + key + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigurationError("invalid boolean for '" + key + "': " + value);
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

std::string format_level(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    out += buf;
  }
  return out;
}

std::string oracle_name(OracleKind kind) {
  switch (kind) {
    case OracleKind::None: return "none";
    case OracleKind::Cosine: return "cosine";
    case OracleKind::ExcursionMeasure: return "excursion_measure";
  }
  return "none";
}

}  // namespace

FieldModel ExperimentConfig::model() const {
  return make_field(BoxDomain(lower, upper), kernel, mean);
}

DesignDensity ExperimentConfig::design_density() const {
  const std::size_t d = lower.size();
  const DesignDensity fallback = default_design_density(d);
  return DesignDensity(d, dof.value_or(fallback.dof()), scale.value_or(fallback.scale()));
}

std::size_t ExperimentConfig::design_size(const FieldModel& model) const {
  if (m) return *m;
  if (eps) return choose_m(*eps, model, lambda);
  return model.dim() == 1 ? 20 : 40;
}

std::string ExperimentConfig::digest() const {
  std::map<std::string, std::string> canon;
  canon["experiment"] = experiment;
  canon["kernel"] = kernel_name(kernel.kind);
  canon["length"] = join({kernel.length});
  canon["power"] = join({kernel.power});
  canon["mean_intercept"] = join({mean.intercept});
  canon["mean_slope"] = join(mean.slope);
  canon["lower"] = join(lower);
  canon["upper"] = join(upper);
  canon["levels"] = join(levels);
  canon["n"] = std::to_string(n);
  canon["m"] = m ? std::to_string(*m) : "";
  canon["eps"] = eps ? join({*eps}) : "";
  canon["lambda"] = join({lambda});
  canon["seed"] = std::to_string(seed);
  canon["nu"] = dof ? join({*dof}) : "";
  canon["scale"] = scale ? join({*scale}) : "";
  canon["integrand"] = integrand ? "true" : "false";
  canon["xi"] = join({xi});
  canon["oracle"] = oracle_name(oracle);
  canon["tau_method"] = tau_method == TauMethod::Rejection ? "rejection" : "grid";
  // FNV-1a, 64 bit.
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& [k, v] : canon) {
    for (char c : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool is_preset(const std::string& name) {
  return name == "table1" || name == "table2" || name == "table3" || name == "table4" || name == "pickands";
}

ConfigPairs preset_pairs(const std::string& name) {
  ConfigPairs p;
  p["experiment"] = name;
  p["levels"] = "3,4,5,6,7,8";
  p["n"] = "1000";
  p["seed"] = "1";
  if (name == "table1") {
    p["kernel"] = "cosine";
    p["lower"] = "0";
    p["upper"] = "0.75";
    p["m"] = "20";
    p["nu"] = "3";
    p["scale"] = "1";
    p["oracle"] = "cosine";
  } else if (name == "table2" || name == "table3" || name == "table4") {
    p["kernel"] = name == "table4" ? "exp" : "sqexp";
    p["length"] = name == "table4" ? "4" : "1";
    p["lower"] = "0,0";
    p["upper"] = "1,1";
    p["m"] = "40";
    p["nu"] = "4";
    p["scale"] = name == "table4" ? "2" : "0.8";
    if (name != "table2") p["mean_slope"] = "0.1,0.1";
    p["integrand"] = "true";
    p["xi"] = "1";
    p["oracle"] = "excursion_measure";
  } else if (name == "pickands") {
    p["alpha"] = "2";
    p["lower"] = "0";
    p["upper"] = "1";
    p["levels"] = "6,7,8";
    p["n"] = "100000";
    p["m"] = "20";
    p["nu"] = "3";
    p["scale"] = "1";
  } else {
    throw ConfigurationError("unknown preset '" + name + "'");
  }
  return p;
}

ConfigPairs parse_config_text(const std::string& text) {
  ConfigPairs out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigurationError("config line " + std::to_string(lineno) + " is not 'key = value'");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

ConfigPairs load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  ConfigPairs pairs = parse_config_text(ss.str());
  // A config may start from a preset and override parts of it.
  if (const auto it = pairs.find("preset"); it != pairs.end()) {
    ConfigPairs base = preset_pairs(it->second);
    pairs.erase(it);
    for (auto& [k, v] : pairs) base[k] = v;
    return base;
  }
  return pairs;
}

ExperimentConfig build_config(const ConfigPairs& pairs) {
  ExperimentConfig c;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"experiment", [&](auto&, auto& v) { c.experiment = v; }},
      {"kernel", [&](auto&, auto& v) { c.kernel.kind = parse_kernel_kind(v); }},
      {"length", [&](auto& k, auto& v) { c.kernel.length = parse_double(k, v); }},
      {"power", [&](auto& k, auto& v) { c.kernel.power = parse_double(k, v); }},
      {"alpha",
       [&](auto& k, auto& v) {
         c.kernel.kind = KernelKind::PowerExponential;
         c.kernel.power = parse_double(k, v);
       }},
      {"mean_intercept", [&](auto& k, auto& v) { c.mean.intercept = parse_double(k, v); }},
      {"mean_slope", [&](auto& k, auto& v) { c.mean.slope = parse_list(k, v); }},
      {"lower", [&](auto& k, auto& v) { c.lower = parse_list(k, v); }},
      {"upper", [&](auto& k, auto& v) { c.upper = parse_list(k, v); }},
      {"levels", [&](auto& k, auto& v) { c.levels = parse_list(k, v); }},
      {"n", [&](auto& k, auto& v) { c.n = parse_unsigned(k, v); }},
      {"m", [&](auto& k, auto& v) { c.m = parse_unsigned(k, v); }},
      {"eps", [&](auto& k, auto& v) { c.eps = parse_double(k, v); }},
      {"lambda", [&](auto& k, auto& v) { c.lambda = parse_double(k, v); }},
      {"seed", [&](auto& k, auto& v) { c.seed = parse_unsigned(k, v); }},
      {"nu", [&](auto& k, auto& v) { c.dof = parse_double(k, v); }},
      {"scale", [&](auto& k, auto& v) { c.scale = parse_double(k, v); }},
      {"integrand", [&](auto& k, auto& v) { c.integrand = parse_bool(k, v); }},
      {"xi", [&](auto& k, auto& v) { c.xi = parse_double(k, v); }},
      {"oracle",
       [&](auto& k, auto& v) {
         if (v == "none") c.oracle = OracleKind::None;
         else if (v == "cosine") c.oracle = OracleKind::Cosine;
         else if (v == "excursion_measure") c.oracle = OracleKind::ExcursionMeasure;
         else throw ConfigurationError("invalid value for '" + k + "': " + v);
       }},
      {"tau_method",
       [&](auto& k, auto& v) {
         if (v == "rejection") c.tau_method = TauMethod::Rejection;
         else if (v == "grid") c.tau_method = TauMethod::GridInversion;
         else throw ConfigurationError("invalid value for '" + k + "': " + v);
       }},
      {"out", [&](auto&, auto& v) { c.output = v; }},
      {"workers", [&](auto& k, auto& v) { c.workers = static_cast<unsigned>(parse_unsigned(k, v)); }},
      {"format",
       [&](auto& k, auto& v) {
         if (v != "csv" && v != "gnuplot") throw ConfigurationError("invalid value for '" + k + "': " + v);
         c.format = v;
       }},
      {"timing", [&](auto& k, auto& v) { c.timing = parse_bool(k, v); }},
  };
  // "alpha" must win over "kernel" when both are present, so apply it last.
  for (const auto& [key, value] : pairs) {
    if (key == "alpha") continue;
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigurationError("unknown config key '" + key + "'");
    it->second(key, value);
  }
  if (const auto it = pairs.find("alpha"); it != pairs.end()) setters.at("alpha")("alpha", it->second);

  if (c.lower.size() != c.upper.size()) throw ConfigurationError("invalid value for 'upper': dimension mismatch");
  if (c.n < 2) throw ConfigurationError("invalid value for 'n': need at least 2 replicates");
  if (c.m && *c.m == 0) throw ConfigurationError("invalid value for 'm': must be positive");
  if (c.eps && !(*c.eps > 0.0 && *c.eps <= 1.0)) throw ConfigurationError("invalid value for 'eps': need (0, 1]");
  if (!(c.lambda > 0.0)) throw ConfigurationError("invalid value for 'lambda': must be positive");
  if (!(c.kernel.length > 0.0)) throw ConfigurationError("invalid value for 'length': must be positive");
  if (c.kernel.kind == KernelKind::PowerExponential && !(c.kernel.power > 0.0 && c.kernel.power <= 2.0)) {
    throw ConfigurationError("invalid value for 'alpha': need 0 < alpha <= 2");
  }
  if (c.dof && !(*c.dof >= 3.0)) throw ConfigurationError("invalid value for 'nu': need nu >= 3");
  if (c.scale && !(*c.scale > 0.0)) throw ConfigurationError("invalid value for 'scale': must be positive");
  if (c.integrand && !(c.xi > 0.0)) throw ConfigurationError("invalid value for 'xi': must be positive");
  for (double b : c.levels) {
    if (!(b > 1.0)) throw ConfigurationError("invalid value for 'levels': every level must exceed 1");
  }
  if (!c.mean.slope.empty() && c.mean.slope.size() != c.lower.size()) {
    throw ConfigurationError("invalid value for 'mean_slope': dimension mismatch");
  }
  if (c.oracle == OracleKind::Cosine && c.kernel.kind != KernelKind::Cosine) {
    throw ConfigurationError("invalid value for 'oracle': the cosine oracle needs the cosine kernel");
  }
  // Surface model errors (bad domain, cosine in d > 1) at configuration time.
  (void)c.model();
  (void)c.design_density();
  return c;
}

std::vector<TableRow> run_table(const ExperimentConfig& config) {
  const FieldModel model = config.model();
  const DesignDensity density = config.design_density();
  const std::size_t m = config.design_size(model);
  const std::string digest = config.digest();
  std::optional<IntegrandSpec> integrand;
  if (config.integrand) integrand = IntegrandSpec::constant(config.xi);

  std::vector<TableRow> rows;
  for (double b : config.levels) {
    const LevelSetup setup(model, b, m, density, config.tau_method);
    RunOptions options;
    options.n = config.n;
    options.seed = config.seed;
    options.workers = config.workers;
    LevelEstimate est = estimate_level(setup, options, integrand ? &*integrand : nullptr);

    TableRow tail{Target::TailProbability, b, std::nullopt, est.tail};
    if (config.oracle == OracleKind::Cosine) tail.truth = cosine_truth(b);
    tail.report.config_digest = digest;
    rows.push_back(tail);
    if (est.integral) {
      TableRow integral{Target::ExcursionIntegral, b, std::nullopt, *est.integral};
      if (config.oracle == OracleKind::ExcursionMeasure) {
        integral.truth = config.xi * expected_excursion_measure(model, b);
      }
      integral.report.config_digest = digest;
      rows.push_back(integral);
    }
    if (est.conditional) {
      TableRow cond{Target::ConditionalExpectation, b, std::nullopt, *est.conditional};
      cond.report.config_digest = digest;
      rows.push_back(cond);
    }
  }
  return rows;
}

namespace {

void write_rows(std::ostream& out, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows, const std::string& format) {
  const bool gnuplot = format == "gnuplot";
  const char* sep = gnuplot ? " " : ",";
  if (gnuplot) out << "# ";
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? sep : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      const std::string& cell = row[i];
      out << (i ? sep : "") << (gnuplot && cell.empty() ? "NaN" : cell);
    }
    out << '\n';
  }
}

std::string timing_cell(const ExperimentConfig& config, double ms) {
  if (!config.timing) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", ms);
  return buf;
}

}  // namespace

void write_table(std::ostream& out, const std::vector<TableRow>& rows, const ExperimentConfig& config) {
  const std::vector<std::string> header = {"target", "b",          "true_value",         "est",
                                           "std_err", "n",         "m",                  "seed",
                                           "wall_time_ms", "errored_replicates", "config_digest", "schema"};
  std::vector<std::vector<std::string>> cells;
  for (const TableRow& r : rows) {
    cells.push_back({target_name(r.target), format_level(r.level), r.truth ? format_number(*r.truth) : "",
                     format_number(r.report.estimate), format_number(r.report.std_error), std::to_string(r.report.n),
                     std::to_string(r.report.m), std::to_string(r.report.seed),
                     timing_cell(config, r.report.wall_time_ms), std::to_string(r.report.errored),
                     r.report.config_digest, kTableSchema});
  }
  write_rows(out, header, cells, config.format);
}

std::vector<PickandsRow> run_pickands(const ExperimentConfig& config) {
  if (config.kernel.kind != KernelKind::PowerExponential || config.lower.size() != 1) {
    throw ConfigurationError("Pickands runs need the one-dimensional kernel exp(-|t|^alpha)");
  }
  ExperimentConfig stationary = config;
  stationary.kernel.length = 1.0;
  stationary.mean = {};
  stationary.lower = {0.0};
  stationary.upper = {1.0};
  const FieldModel model = stationary.model();
  const DesignDensity density = stationary.design_density();
  const std::size_t m = stationary.design_size(model);
  const std::string digest = config.digest();
  const double alpha = config.kernel.power;

  std::vector<PickandsRow> rows;
  for (double b : config.levels) {
    const LevelSetup setup(model, b, m, density, config.tau_method);
    RunOptions options;
    options.n = config.n;
    options.seed = config.seed;
    options.workers = config.workers;
    PickandsRow row;
    row.alpha = alpha;
    row.level = b;
    row.tail = estimate_level(setup, options).tail;
    row.tail.config_digest = digest;
    row.estimate = pickands_estimate(alpha, b, row.tail.estimate);
    row.std_error = pickands_estimate(alpha, b, row.tail.std_error);
    rows.push_back(row);
  }
  return rows;
}

void write_pickands(std::ostream& out, const std::vector<PickandsRow>& rows, const ExperimentConfig& config) {
  const std::vector<std::string> header = {"alpha", "b",    "H_hat",        "std_err",
                                           "w_hat", "w_std_err", "n",       "m",
                                           "seed",  "wall_time_ms", "errored_replicates", "config_digest", "schema"};
  std::vector<std::vector<std::string>> cells;
  for (const PickandsRow& r : rows) {
    cells.push_back({format_level(r.alpha), format_level(r.level), format_number(r.estimate),
                     format_number(r.std_error), format_number(r.tail.estimate), format_number(r.tail.std_error),
                     std::to_string(r.tail.n), std::to_string(r.tail.m), std::to_string(r.tail.seed),
                     timing_cell(config, r.tail.wall_time_ms), std::to_string(r.tail.errored),
                     r.tail.config_digest, kPickandsSchema});
  }
  write_rows(out, header, cells, config.format);
}

}  // namespace excursion
