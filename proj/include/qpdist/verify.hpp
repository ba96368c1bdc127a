// Copyright 2026 The qpdist developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpdist/process_metrics.hpp"

namespace qpdist::verify {

/// One randomized property-suite instance outcome.
struct InstanceOutcome {
  bool pass = true;
  double violation = 0.0;  // positive amount by which the worst check broke
  std::string message;     // failure description with the offending values
  // Offending channels, serialized on dump: (label, channel JSON string).
  std::vector<std::pair<std::string, std::string>> artifacts;
};

struct SuiteOptions {
  std::vector<int> dims{2};
  int sweep = 5;  // instances per family per dim
  std::uint64_t seed = 1;
  std::string dump_dir;  // empty: no counterexample files
};

struct FamilyResult {
  std::string family;
  int instances = 0;
  int failures = 0;
  double worst_violation = 0.0;
  double seconds = 0.0;
  std::vector<std::string> messages;
  std::vector<std::string> dump_paths;
  bool passed() const { return failures == 0; }
};

/// All family names, in execution order.
const std::vector<std::string>& family_names();

/// Runs one family over options.dims x options.sweep instances.
FamilyResult run_family(const std::string& family, const SuiteOptions& options);

/// Runs every family.
std::vector<FamilyResult> run_all(const SuiteOptions& options);

/// Runs a single instance of a family; the entry point replays use.
InstanceOutcome run_instance(const std::string& family, int dim,
                             std::uint64_t instance_seed);

/// Re-runs the instance recorded in a counterexample dump and reports
/// whether the replay reproduced the recorded outcome (same pass/fail and
/// message).
struct ReplayResult {
  InstanceOutcome outcome;
  bool matches_dump = false;
  std::string family;
  int dim = 0;
};

ReplayResult replay_dump(const std::string& path);

/// Writes a counterexample dump; returns the path.
std::string write_dump(const std::string& dir, const std::string& family,
                       int dim, std::uint64_t instance_seed,
                       const InstanceOutcome& outcome);

/// The deterministic per-instance seed used by the sweep drivers.
std::uint64_t instance_seed(std::uint64_t root_seed, const std::string& family,
                            int dim, int index);

}  // namespace qpdist::verify
