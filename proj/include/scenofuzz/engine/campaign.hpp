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

#ifndef SCENOFUZZ__ENGINE__CAMPAIGN_HPP_
#define SCENOFUZZ__ENGINE__CAMPAIGN_HPP_

#include "scenofuzz/engine/algorithms.hpp"
#include "scenofuzz/engine/feedback.hpp"
#include "scenofuzz/engine/search.hpp"
#include "scenofuzz/runner/runner.hpp"

#include <atomic>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace scenofuzz::engine
{

/// Everything needed to turn a gene vector into a simulated scenario.
struct ScenarioProblemSpec
{
  scenario::ScenarioConfig base;
  maps::LaneMap map;
  scenario::MutationSpace space;
  runner::OracleConfig oracles;
  runner::RunOptions run;
  runner::SessionFactory agent;
  bool save_traffic_recording{true};
  /// Recordings go here when set; an existing file is never overwritten.
  std::optional<std::filesystem::path> recordings_dir;
};

/// Scenario id of log entry `index`.
std::string scenario_id_for(std::size_t index);

class ScenarioProblem
{
public:
  explicit ScenarioProblem(ScenarioProblemSpec spec);

  SearchProblem search_problem() const;
  const scenario::ParameterVector & layout() const { return layout_; }
  Genes base_genes() const { return layout_.values; }

  /// Concrete scenario for `genes`. NPCs whose start box overlaps an earlier
  /// actor are dropped; any other invalidity raises ScenarioError.
  scenario::ScenarioConfig decode(const Genes & genes, const std::string & scenario_id) const;

  /// Simulates the decoded scenario and derives its feedback.
  Feedback run(const scenario::ScenarioConfig & config, std::uint64_t seed, runner::ScenarioRecording * out = nullptr) const;

  /// Objective adapter: decode, run, persist the recording, report.
  Evaluation evaluate(const Genes & genes, std::size_t index, std::uint64_t seed) const;

  const ScenarioProblemSpec & spec() const { return spec_; }

private:
  ScenarioProblemSpec spec_;
  scenario::ParameterVector layout_;
};

struct CampaignSettings
{
  std::string run_id;
  std::filesystem::path output_root{"results"};
  AlgorithmParams algorithm;
  std::uint64_t seed{0};
  std::size_t workers{1};
  std::optional<std::size_t> max_evaluations;
  bool resume{false};
  const std::atomic<bool> * stop{nullptr};
  std::function<void(const LogEntry &)> on_logged;
};

struct CampaignReport
{
  std::string algorithm;
  std::uint64_t seed{0};
  std::size_t evaluations{0};
  std::vector<std::string> violation_ids;
  std::vector<double> fitness_series;
  std::map<std::string, std::size_t> outcomes;
  bool complete{true};  ///< false when stopped before the budget ran out
  double wall_clock_seconds{0.0};

  std::size_t violations() const { return violation_ids.size(); }
};

Json report_to_json(const CampaignReport & report);
CampaignReport report_from_json(const Json & doc);

/// Builds the report for `log`.
CampaignReport summarize_log(const std::vector<LogEntry> & log, const std::string & algorithm, std::uint64_t seed);

struct CampaignResult
{
  CampaignReport report;
  std::filesystem::path run_dir;
  bool interrupted{false};
  bool resumed{false};
};

/// Runs one campaign in <output_root>/<run_id>: evaluations.jsonl,
/// campaign.state.json, recordings/ and report.json.
CampaignResult run_campaign(const CampaignSettings & settings, const ScenarioProblem & problem);

}  // namespace scenofuzz::engine

#endif  // SCENOFUZZ__ENGINE__CAMPAIGN_HPP_
