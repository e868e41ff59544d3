#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace isk::cli {

/// Flat key=value experiment configuration. Values are kept as canonical
/// strings; typed accessors validate on read and report the offending key.
struct ExperimentConfig {
  std::string subcommand;
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return values.count(key) > 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::vector<std::int64_t> get_int_list(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;
};

// Line-oriented "key = value" file with [section] headers per subcommand.
// Keys before any section (or under [global]) apply to every subcommand;
// section keys override them. Unknown sections are ignored.
ExperimentConfig parse_config_file(std::istream& in, const std::string& subcommand);

// Sorted "key = value" lines; independent of input ordering.
std::string canonicalize(const ExperimentConfig& config);

// FNV-1a over the canonical form.
std::uint64_t config_hash(const ExperimentConfig& config);

struct ResultRecord {
  std::string run_id;
  std::uint64_t config_hash = 0;
  std::string quantity;
  double value = 0.0;
  double error = 0.0;
  std::string units = "nats";
  std::string timestamp;  // logged to stderr only; emitted files are
                          // deterministic in (config, seed)
};

struct RunOutput {
  int exit_code = 0;
  std::vector<ResultRecord> records;
  std::string summary_path;
};

// Executes the configured subcommand and writes summary.json, detail.csv and
// the plot files into the output directory. Exit codes: 0 success,
// 1 validation error, 2 numerical non-convergence.
RunOutput run(const ExperimentConfig& config);

// Plot emitters (whitespace-separated columns, "#" header naming the columns
// and carrying the config hash).
void emit_fq_curve(std::ostream& out, std::uint64_t hash,
                   const std::vector<std::vector<double>>& rows);
void emit_t_derivative(std::ostream& out, std::uint64_t hash,
                       const std::vector<std::vector<double>>& rows);
void emit_histogram(std::ostream& out, std::uint64_t hash,
                    const std::vector<double>& edges,
                    const std::vector<std::int64_t>& counts);
void emit_qq(std::ostream& out, std::uint64_t hash,
             const std::vector<std::pair<double, double>>& points);
void emit_variance_table(std::ostream& out, std::uint64_t hash,
                         const std::vector<std::int64_t>& volumes,
                         const std::vector<double>& variances);

}  // namespace isk::cli
