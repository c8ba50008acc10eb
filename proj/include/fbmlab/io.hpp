#pragma once

// Run plumbing for the command-line experiments: key=value configuration
// with typo-loud parsing, full-precision CSV output, FNV-1a file checksums,
// and append-only JSON-lines run manifests.  All randomness everywhere flows
// from the master seed; wall time appears only as manifest metadata.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "fbmlab/fluid.hpp"

namespace fbmlab {

inline constexpr const char* kToolVersion = "fbmlab 1.0.0";

// Every knob shared by the experiments; each experiment checks its own
// preconditions on top before any compute.
struct ExperimentConfig {
  double hurst = 0.35;
  int modes = 8;    // spectral truncation per axis
  int grid = 1024;  // path knots per unit time
  double dt = 1e-3;
  double t_final = 1.0;
  std::uint64_t seed = 18345;
  int samples = 10000;  // Monte Carlo ensemble size
  double c0 = 1.0;
  double C1 = 0.5;
  FluidParams fluid;
  std::string out = "runs";

  // shared bounds only; throws std::invalid_argument naming every offending
  // field
  void validate() const;
};

// key=value file -> config.  '#' starts a comment, blank lines are skipped,
// an empty file yields the defaults.  Unknown keys and malformed numbers are
// errors naming the line; the parsed config is validated before returning.
ExperimentConfig load_config(const std::string& path);

// One "key=value" override with the same key names the config file uses
// (command-line flags funnel through here); errors name the key.
void apply_override(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value);

// The documented key table: name, default, meaning.  Shared by --help and
// the readme.
std::string config_key_table();

// Full echo of a config as the manifest's parameter block, keyed exactly
// like the config file, doubles at full precision.
std::map<std::string, std::string> config_echo(const ExperimentConfig& cfg);

struct OutputRecord {
  std::string name;  // path relative to the run directory
  std::uint64_t checksum = 0;
  std::uint64_t bytes = 0;
};

struct RunManifest {
  std::string experiment;
  std::uint64_t master_seed = 0;
  std::map<std::string, std::string> parameters;
  std::string tool_version;
  std::string started;   // UTC, metadata only: never feeds any computation
  std::string finished;
  std::vector<OutputRecord> outputs;
  std::string status;  // "pass", "flagged" (finding, still a success), "fail"
  std::vector<std::string> notes;
};

// Serializes the manifest as one JSON line appended to dir/manifest.jsonl;
// existing records are never rewritten.
void append_manifest(const std::filesystem::path& dir, const RunManifest& m);

// FNV-1a over the file bytes.
std::uint64_t file_checksum(const std::filesystem::path& path);

// CSV with a header row; every cell is printed with %.17g so rereads are
// bit-exact.
class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::string& header);
  void row(const std::vector<double>& cells);
  void close();
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

// ISO-8601 UTC wall time for manifest metadata.
std::string utc_now_iso();

}  // namespace fbmlab
