// Command-line front end: one process runs one named experiment from a
// config file plus flag overrides, writes CSVs and a manifest record, and
// exits 0 on success (including flagged findings), 1 on usage or validation
// errors, 2 on numerical-check failures or infrastructure faults.

#include <chrono>
#include <exception>
#include <map>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"

#include "fbmlab/experiments.hpp"
#include "fbmlab/io.hpp"

int main(int argc, char** argv) {
  std::string name_list;
  for (const auto& n : fbmlab::experiment_names())
    name_list += (name_list.empty() ? "" : ", ") + n;

  CLI::App app{
      "fbmlab: spectral experiments for a stochastic bipolar fluid driven "
      "by fractional noise"};
  app.footer("configuration keys (file and flags share names and defaults):\n" +
             fbmlab::config_key_table());

  std::string experiment;
  app.add_option("experiment", experiment, "one of: " + name_list)
      ->required();
  std::string config_path;
  app.add_option("--config", config_path,
                 "key=value configuration file; flags override its values");

  const std::vector<std::string> keys = {
      "hurst", "modes", "grid", "dt",  "t-final", "seed", "samples",
      "c0",    "C1",    "mu0",  "mu1", "eps",     "alpha", "out"};
  std::map<std::string, std::string> flag_values;
  for (const auto& k : keys)
    app.add_option("--" + k, flag_values[k], "override config key " + k);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // help exits clean, usage errors exit 1
  }

  try {
    fbmlab::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = fbmlab::load_config(config_path);
    for (const auto& k : keys)
      if (app.count("--" + k) > 0) fbmlab::apply_override(cfg, k, flag_values[k]);
    cfg.validate();

    spdlog::info("{} starting (seed {}, out {})", experiment, cfg.seed,
                 cfg.out);
    const auto t0 = std::chrono::steady_clock::now();
    const fbmlab::RunManifest m = fbmlab::run_experiment(experiment, cfg);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    for (const auto& note : m.notes) spdlog::info("  {}", note);
    spdlog::info("{}: status {} with {} output file(s) in {:.1f}s",
                 m.experiment, m.status, m.outputs.size(), elapsed);
    return m.status == "fail" ? 2 : 0;
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
}
