#pragma once

// Declarative scenario runner: loads a JSON scenario (actors, a time-ordered
// script, attacks, assertions), drives the event loop deterministically, and
// emits a report with verdicts, assertion results, and content hashes.

#include <optional>
#include <string>

#include "tileof/wire.hpp"

namespace tileof::scenario {

// Malformed scenario documents; the CLI maps this to exit code 2.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::optional<std::uint64_t> seed_override;
};

struct RunResult {
  wire::Json report;
  std::string report_hash;
  bool assertions_passed = false;
  wire::Json snapshot;
  std::string event_log_jsonl;
};

wire::Json load_scenario_file(const std::string& path);

RunResult run_scenario(const wire::Json& scenario, const RunOptions& options = {});

}  // namespace tileof::scenario
