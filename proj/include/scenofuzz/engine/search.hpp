// Copyright 2026 The Scenofuzz Authors
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

#ifndef SCENOFUZZ__ENGINE__SEARCH_HPP_
#define SCENOFUZZ__ENGINE__SEARCH_HPP_

#include "scenofuzz/common/json.hpp"
#include "scenofuzz/engine/algorithms.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

namespace scenofuzz::engine
{

struct Budget
{
  double run_hour{2.0};
  std::optional<std::size_t> max_evaluations;
};

/// Budget clock in hours. With an evaluation cap the clock advances by
/// run_hour / max_evaluations per evaluation, which keeps time-based phases
/// reproducible; otherwise it is wall-clock time.
double budget_clock_hours(const Budget & budget, std::size_t evaluations, double wall_seconds);

/// Result of one objective call.
struct Evaluation
{
  EvalResult result;
  Json payload = Json::object();  ///< extra fields merged into the log entry
};

/// Evaluates `genes` as log entry `index` with its derived `seed`.
using Objective = std::function<Evaluation(const Genes & genes, std::size_t index, std::uint64_t seed)>;

struct LogEntry
{
  std::size_t index{0};
  std::size_t batch{0};
  std::uint64_t seed{0};
  Genes genes;
  EvalResult result;
  Json payload = Json::object();
};

Json log_entry_to_json(const LogEntry & entry);
LogEntry log_entry_from_json(const Json & doc);

struct SearchOptions
{
  std::uint64_t seed{0};
  Budget budget{};
  std::size_t workers{1};
  /// Checked before every evaluation; in-flight evaluations finish.
  const std::atomic<bool> * stop{nullptr};
  /// Stops after the batch in which some fitness falls below this value.
  std::optional<double> target_fitness;
  /// Directory holding evaluations.jsonl and campaign.state.json. Without
  /// it the search runs purely in memory.
  std::optional<std::filesystem::path> state_dir;
  bool resume{false};
  /// Called after each entry reaches the log.
  std::function<void(const LogEntry &)> on_logged;
};

struct SearchOutcome
{
  std::vector<LogEntry> log;
  bool interrupted{false};     ///< stop flag or wall budget cut a batch short
  bool target_reached{false};
  bool resumed{false};
  double wall_seconds{0.0};    ///< including time spent before a resume
};

inline constexpr const char * kLogFileName = "evaluations.jsonl";
inline constexpr const char * kStateFileName = "campaign.state.json";

/// Drives `algorithm` against `objective` until the budget, the stop flag or
/// the target ends the run. The log is append-only and ordered by index;
/// batches are evaluated by up to `workers` threads and logged in order.
SearchOutcome run_search(SearchAlgorithm & algorithm, const Objective & objective, const SearchOptions & options);

/// Parses a log file, ignoring an unterminated trailing line.
std::vector<LogEntry> read_log(const std::filesystem::path & path);

}  // namespace scenofuzz::engine

#endif  // SCENOFUZZ__ENGINE__SEARCH_HPP_
