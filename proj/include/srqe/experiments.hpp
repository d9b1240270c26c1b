#pragma once

// Config-driven experiment runner shared by the C API and the CLI.
//
// A run takes a JSON config
//   {
//     "experiment": "spectrum" | "weyl" | "heat" | "qe" | "flow"
//                 | "spiral" | "nf" | "ergodic",
//     "model":      { ... ContactModel fields ... },        (optional)
//     "parameters": { ... experiment-specific keys ... },
//     "output_dir": "path",
//     "seed":       0
//   }
// (unknown keys anywhere are rejected), writes the experiment artifacts
// plus a manifest.json with CRC-32 checksums, and reports exit status
// 0 (ok), 2 (invalid config) or 3 (numeric failure).

#include <string>

namespace srqe::run {

struct RunResult {
  int exit_code = 0;
  std::string manifest_json;  // on failure: machine-readable error JSON
};

RunResult run_experiment(const std::string& config_json,
                         const std::string& output_dir_override = "");

const char* version();

}  // namespace srqe::run
