#include "fbmlab/io.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "fbmlab/common.hpp"

namespace fbmlab {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument(where + ": " + what);
}

double parse_double(const std::string& where, const std::string& key,
                    const std::string& value) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty())
    fail(where, "key '" + key + "': malformed number '" + value + "'");
  return x;
}

long long parse_int(const std::string& where, const std::string& key,
                    const std::string& value) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty())
    fail(where, "key '" + key + "': malformed number '" + value + "'");
  return x;
}

std::uint64_t parse_uint64(const std::string& where, const std::string& key,
                           const std::string& value) {
  std::size_t used = 0;
  unsigned long long x = 0;
  try {
    x = std::stoull(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty() || value[0] == '-')
    fail(where, "key '" + key + "': malformed number '" + value + "'");
  return x;
}

// single dispatch point shared by the file parser and the flag overrides
void apply_keyed(ExperimentConfig& cfg, const std::string& key,
                 const std::string& value, const std::string& where) {
  if (key == "hurst")
    cfg.hurst = parse_double(where, key, value);
  else if (key == "modes")
    cfg.modes = static_cast<int>(parse_int(where, key, value));
  else if (key == "grid")
    cfg.grid = static_cast<int>(parse_int(where, key, value));
  else if (key == "dt")
    cfg.dt = parse_double(where, key, value);
  else if (key == "t-final")
    cfg.t_final = parse_double(where, key, value);
  else if (key == "seed")
    cfg.seed = parse_uint64(where, key, value);
  else if (key == "samples")
    cfg.samples = static_cast<int>(parse_int(where, key, value));
  else if (key == "c0")
    cfg.c0 = parse_double(where, key, value);
  else if (key == "C1")
    cfg.C1 = parse_double(where, key, value);
  else if (key == "mu0")
    cfg.fluid.mu0 = parse_double(where, key, value);
  else if (key == "mu1")
    cfg.fluid.mu1 = parse_double(where, key, value);
  else if (key == "eps")
    cfg.fluid.eps = parse_double(where, key, value);
  else if (key == "alpha")
    cfg.fluid.alpha = parse_double(where, key, value);
  else if (key == "out") {
    if (value.empty()) fail(where, "key 'out': empty path");
    cfg.out = value;
  } else
    fail(where, "unknown key '" + key +
                    "' (known keys: hurst, modes, grid, dt, t-final, seed, "
                    "samples, c0, C1, mu0, mu1, eps, alpha, out)");
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_hex(std::uint64_t x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  std::vector<std::string> bad;
  if (!(hurst > 0.0 && hurst < 1.0)) bad.push_back("hurst must lie in (0, 1)");
  if (modes < 1) bad.push_back("modes must be >= 1");
  if (grid < 2) bad.push_back("grid must be >= 2 knots per unit time");
  if (!(dt > 0.0)) bad.push_back("dt must be positive");
  if (!(t_final > 0.0)) bad.push_back("t-final must be positive");
  if (samples < 2) bad.push_back("samples must be >= 2");
  if (!(c0 > 0.0)) bad.push_back("c0 must be positive");
  if (!(C1 > 0.0)) bad.push_back("C1 must be positive");
  if (!(fluid.mu0 > 0.0)) bad.push_back("mu0 must be positive");
  if (!(fluid.mu1 > 0.0)) bad.push_back("mu1 must be positive");
  if (!(fluid.eps > 0.0)) bad.push_back("eps must be positive");
  if (!(fluid.alpha > 0.0 && fluid.alpha <= 1.0))
    bad.push_back("alpha must lie in (0, 1]");
  if (out.empty()) bad.push_back("out must be a nonempty path");
  if (bad.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& b : bad) msg += " " + b + ";";
  msg.pop_back();
  throw std::invalid_argument(msg);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config file not found: " + path);
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail("line " + std::to_string(lineno),
           "expected key=value, got '" + line + "'");
    apply_keyed(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)),
                "line " + std::to_string(lineno));
  }
  cfg.validate();
  return cfg;
}

void apply_override(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value) {
  apply_keyed(cfg, key, value, "flag --" + key);
}

std::string config_key_table() {
  return
      "  hurst    0.35    Hurst index of the driving noise\n"
      "  modes    8       spectral truncation per axis (modes^2 noise modes)\n"
      "  grid     1024    noise path knots per unit time\n"
      "  dt       0.001   solver time step\n"
      "  t-final  1.0     forward solve horizon\n"
      "  seed     18345   master seed; every stream derives from it\n"
      "  samples  10000   Monte Carlo ensemble size\n"
      "  c0       1.0     quartic spectral-sum constant\n"
      "  C1       0.5     convection smallness constant\n"
      "  mu0      2.0     viscosity scale\n"
      "  mu1      1.0     bipolar coefficient\n"
      "  eps      2.0     shear regularization\n"
      "  alpha    0.5     shear exponent in (0, 1]\n"
      "  out      runs    output directory root\n";
}

std::map<std::string, std::string> config_echo(const ExperimentConfig& cfg) {
  return {{"hurst", fmt(cfg.hurst)},
          {"modes", std::to_string(cfg.modes)},
          {"grid", std::to_string(cfg.grid)},
          {"dt", fmt(cfg.dt)},
          {"t-final", fmt(cfg.t_final)},
          {"seed", std::to_string(cfg.seed)},
          {"samples", std::to_string(cfg.samples)},
          {"c0", fmt(cfg.c0)},
          {"C1", fmt(cfg.C1)},
          {"mu0", fmt(cfg.fluid.mu0)},
          {"mu1", fmt(cfg.fluid.mu1)},
          {"eps", fmt(cfg.fluid.eps)},
          {"alpha", fmt(cfg.fluid.alpha)},
          {"out", cfg.out}};
}

void append_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  std::filesystem::create_directories(dir);
  nlohmann::json j;
  j["experiment"] = m.experiment;
  j["master_seed"] = m.master_seed;
  j["parameters"] = m.parameters;
  j["tool_version"] = m.tool_version;
  j["started"] = m.started;
  j["finished"] = m.finished;
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& o : m.outputs)
    outs.push_back({{"name", o.name},
                    {"checksum", fmt_hex(o.checksum)},
                    {"bytes", o.bytes}});
  j["outputs"] = outs;
  j["status"] = m.status;
  j["notes"] = m.notes;
  std::ofstream out(dir / "manifest.jsonl", std::ios::app);
  if (!out)
    throw std::runtime_error("cannot open manifest for append under " +
                             dir.string());
  out << j.dump() << '\n';
}

std::uint64_t file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read back " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  return fnv1a64(bytes.data(), bytes.size());
}

CsvFile::CsvFile(const std::filesystem::path& path, const std::string& header)
    : path_(path) {
  std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::trunc);
  if (!out_) throw std::runtime_error("cannot open " + path.string());
  out_ << header << '\n';
}

void CsvFile::row(const std::vector<double>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << fmt(cells[i]);
  }
  out_ << '\n';
}

void CsvFile::close() {
  if (out_.is_open()) out_.close();
}

std::string utc_now_iso() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace fbmlab
