#pragma once

// The named experiments behind the command-line tool.  Each one validates
// its own preconditions, runs entirely from the master seed, writes CSV
// outputs plus one manifest record under <out>/<name>/, and reports a
// status: "pass", "flagged" (a reproducible finding about the model
// constants, still a successful run), or "fail" (a numerical check did not
// hold).

#include <string>
#include <vector>

#include "fbmlab/io.hpp"

namespace fbmlab {

// the valid experiment names, in documentation order
const std::vector<std::string>& experiment_names();

// Dispatch by name.  Unknown names and precondition violations throw
// std::invalid_argument; infrastructure faults (unwritable output, solver
// blow-up) surface as std::runtime_error.  On return the manifest has been
// appended under <out>/<name>/.
RunManifest run_experiment(const std::string& name,
                           const ExperimentConfig& cfg);

}  // namespace fbmlab
