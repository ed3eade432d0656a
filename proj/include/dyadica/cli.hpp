#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dyadica {

inline constexpr const char* kVersion = "0.1.0";

enum class Suite { haar_verify, represent, weights, norms, decompose, commutator, bloom, all };

const char* to_string(Suite suite);
/// Throws ConfigurationError naming "suite".
Suite suite_from_string(const std::string& name);
std::vector<Suite> concrete_suites();

struct ExponentSpec {
  double p = 4.0 / 3.0;
  double lambda = 0.5;
  friend bool operator==(const ExponentSpec&, const ExponentSpec&) = default;
};

/// |x - center|^alpha on the torus.
struct WeightSpec {
  double alpha = 0.0;
  double center = 0.5;
  friend bool operator==(const WeightSpec&, const WeightSpec&) = default;
};

struct QuadrupleSpec {
  double mu1 = 0.0;
  double sigma1 = 0.0;
  double mu2 = 0.0;
  double sigma2 = 0.0;
  friend bool operator==(const QuadrupleSpec&, const QuadrupleSpec&) = default;
};

struct EnsembleSizes {
  std::size_t samples = 20;        // random inputs for the exact-identity suites
  std::size_t systems = 16;        // random dyadic systems for haar-verify
  std::size_t norm_samples = 40;
  std::size_t bloom_samples = 50;
  friend bool operator==(const EnsembleSizes&, const EnsembleSizes&) = default;
};

enum class OutputFormat { json, csv, both };

struct ExperimentConfig {
  Suite suite = Suite::haar_verify;
  std::uint64_t seed = 0;
  std::vector<int> levels{6};
  std::vector<int> stability_levels{3, 4, 5};
  std::vector<int> domination_levels{6, 8, 10};
  std::vector<double> lambdas{0.5};
  std::vector<ExponentSpec> exponents{{}};
  std::vector<WeightSpec> weights{{-0.2, 0.5}, {0.0, 0.5}, {0.2, 0.5}};
  std::vector<QuadrupleSpec> quadruples{{0.0, 0.0, 0.0, 0.0}, {0.15, -0.1, 0.1, 0.2}, {-0.2, 0.2, 0.2, -0.15}};
  int r = 3;
  /// Filled from the first lambda when the document leaves it out.
  double gamma = 0.25;
  EnsembleSizes ensembles;
  double max_characteristic = 10.0;
  /// false: the represent suite draws inputs with a mean and subtracts it.
  bool mean_zero = true;
  std::string output_dir = "dyadica-out";
  OutputFormat format = OutputFormat::both;
  bool strict = false;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses and validates a JSON config. Parse errors carry line and column;
/// validation errors name the offending field (e.g. "exponents[0]").
/// Throws ConfigurationError.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);
/// Re-checks a config built in code.
void validate_config(const ExperimentConfig& config);
/// Every field written out; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

enum class CheckKind { hard, stability, info };

const char* to_string(CheckKind kind);

struct CheckRecord {
  std::string name;
  std::string anchor;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = true;
  CheckKind kind = CheckKind::hard;

  friend bool operator==(const CheckRecord& a, const CheckRecord& b);
};

struct SampleRecord {
  std::string series;
  std::string anchor;
  int level = 0;
  std::size_t sample = 0;
  double value = 0.0;
};

struct Report {
  std::uint64_t seed = 0;
  std::vector<int> levels;
  std::string version = kVersion;
  std::vector<CheckRecord> checks;
  std::vector<SampleRecord> samples;
};

std::string report_json(const Report& report);
/// Inverse of report_json for the meta block and the checks.
Report parse_report_json(const std::string& text);
/// Header "check,anchor,value,threshold,pass", one row per record.
std::string report_csv(const std::vector<CheckRecord>& checks);
/// Header "series,anchor,level,sample,value".
std::string samples_csv(const std::vector<SampleRecord>& samples);

/// Writes report_json or report_csv to path. Throws Error when the file cannot
/// be written.
void emit_report(const Report& report, OutputFormat format, const std::filesystem::path& path);

/// Runs the configured suite (every suite for "all") and returns the records
/// ordered by name. Module errors become failing "<suite>.error" records.
Report run_checks(const ExperimentConfig& config);

/// 0 when every hard check passes (and, under strict, every stability
/// check); 1 otherwise.
int exit_status(const Report& report, bool strict);

/// run_checks, then report.json / report.csv / samples.csv under
/// config.output_dir. Returns exit_status.
int run_suite(const ExperimentConfig& config);

}  // namespace dyadica
