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

#include "scenofuzz/engine/campaign.hpp"

#include <algorithm>
#include <cstdio>

namespace scenofuzz::engine
{

std::string scenario_id_for(std::size_t index)
{
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "eval_%06zu", index);
  return buffer;
}

ScenarioProblem::ScenarioProblem(ScenarioProblemSpec spec)
: spec_(std::move(spec)), layout_(scenario::flatten(spec_.base, spec_.space, spec_.map))
{
  if (!spec_.agent) {
    throw std::invalid_argument("scenario problem needs an agent session factory");
  }
}

SearchProblem ScenarioProblem::search_problem() const
{
  SearchProblem problem;
  problem.bounds = layout_.bounds;
  for (const auto & ref : layout_.layout) {
    switch (ref.field) {
      case scenario::GeneField::SegmentSpeed:
        problem.groups.push_back(GeneGroup::Speed);
        break;
      case scenario::GeneField::WaypointOffset:
        problem.groups.push_back(GeneGroup::Offset);
        break;
      case scenario::GeneField::SpawnDelay:
        problem.groups.push_back(GeneGroup::Delay);
        break;
    }
  }
  return problem;
}

scenario::ScenarioConfig ScenarioProblem::decode(const Genes & genes, const std::string & scenario_id) const
{
  scenario::ParameterVector vec = layout_;
  if (genes.size() != vec.values.size()) {
    throw scenario::ScenarioError(
      "gene vector has " + std::to_string(genes.size()) + " values, layout expects " + std::to_string(vec.size()));
  }
  vec.values = genes;
  scenario::ScenarioConfig config = scenario::unflatten(vec, spec_.base, spec_.map).config;
  config.scenario_id = scenario_id;

  while (true) {
    const auto violations = scenario::validate(config, spec_.map);
    if (violations.empty()) {
      return config;
    }
    const auto is_npc = [&](const std::string & id) {
      return std::any_of(config.npc_vehicles.begin(), config.npc_vehicles.end(), [&](const auto & n) {
        return n.actor_id == id;
      });
    };
    std::string drop;
    for (const auto & v : violations) {
      if (v.code != scenario::ViolationCode::InitialOverlap || v.subjects.size() != 2) {
        throw scenario::ScenarioError("decoded scenario is invalid: " + v.message);
      }
      if (drop.empty()) {
        drop = is_npc(v.subjects[1]) ? v.subjects[1] : (is_npc(v.subjects[0]) ? v.subjects[0] : "");
        if (drop.empty()) {
          throw scenario::ScenarioError("decoded scenario is invalid: " + v.message);
        }
      }
    }
    config.npc_vehicles.erase(std::remove_if(
      config.npc_vehicles.begin(), config.npc_vehicles.end(), [&](const auto & n) { return n.actor_id == drop; }),
      config.npc_vehicles.end());
  }
}

Feedback ScenarioProblem::run(
  const scenario::ScenarioConfig & config, std::uint64_t seed, runner::ScenarioRecording * out) const
{
  runner::ScenarioRecording rec =
    runner::run_scenario(config, spec_.map, spec_.agent, spec_.oracles, seed, spec_.run);
  Feedback fb = make_feedback(rec, spec_.map, spec_.run.params, spec_.oracles.collision_threshold);
  if (spec_.recordings_dir) {
    const auto path = runner::recording_path(*spec_.recordings_dir, rec.scenario_id);
    if (!std::filesystem::exists(path)) {
      runner::write_recording(spec_.save_traffic_recording ? rec : runner::summarize(rec), *spec_.recordings_dir);
    }
  }
  if (out != nullptr) {
    *out = std::move(rec);
  }
  return fb;
}

Evaluation ScenarioProblem::evaluate(const Genes & genes, std::size_t index, std::uint64_t seed) const
{
  const scenario::ScenarioConfig config = decode(genes, scenario_id_for(index));
  const Feedback fb = run(config, seed);
  Evaluation eval;
  eval.result.fitness = fb.fitness;
  eval.result.quality = fb.quality_score;
  eval.result.behavior = fb.behavior_vector;
  eval.result.violation = fb.verdict.outcome == runner::Outcome::CollisionViolation;
  eval.payload = {
    {"scenario_id", config.scenario_id},
    {"config", scenario::to_json(config)},
    {"outcome", runner::to_string(fb.verdict.outcome)},
    {"time_of_decision", fb.verdict.time_of_decision},
  };
  return eval;
}

Json report_to_json(const CampaignReport & report)
{
  Json outcomes = Json::object();
  for (const auto & [name, count] : report.outcomes) {
    outcomes[name] = count;
  }
  return {
    {"algorithm", report.algorithm},
    {"seed", report.seed},
    {"evaluations", report.evaluations},
    {"violation_count", report.violations()},
    {"violation_ids", report.violation_ids},
    {"fitness_series", report.fitness_series},
    {"outcomes", outcomes},
    {"complete", report.complete},
    {"wall_clock_seconds", report.wall_clock_seconds},
  };
}

CampaignReport report_from_json(const Json & doc)
{
  const JsonReader r(doc, "");
  r.expect_keys(
    {"algorithm", "seed", "evaluations", "violation_count", "violation_ids", "fitness_series", "outcomes",
     "complete", "wall_clock_seconds"});
  CampaignReport report;
  report.algorithm = r.at("algorithm").string();
  report.seed = r.at("seed").unsigned_integer();
  report.evaluations = r.at("evaluations").unsigned_integer();
  report.violation_ids = doc.at("violation_ids").get<std::vector<std::string>>();
  report.fitness_series = doc.at("fitness_series").get<std::vector<double>>();
  for (const auto & [name, count] : doc.at("outcomes").items()) {
    report.outcomes[name] = count.get<std::size_t>();
  }
  report.complete = r.at("complete").boolean();
  report.wall_clock_seconds = r.at("wall_clock_seconds").number();
  if (r.at("violation_count").unsigned_integer() != report.violation_ids.size()) {
    r.at("violation_count").fail("does not match violation_ids");
  }
  return report;
}

CampaignReport summarize_log(const std::vector<LogEntry> & log, const std::string & algorithm, std::uint64_t seed)
{
  CampaignReport report;
  report.algorithm = algorithm;
  report.seed = seed;
  report.evaluations = log.size();
  for (const auto & entry : log) {
    report.fitness_series.push_back(entry.result.fitness);
    const std::string id =
      entry.payload.contains("scenario_id") ? entry.payload.at("scenario_id").get<std::string>() : scenario_id_for(entry.index);
    if (entry.result.violation) {
      report.violation_ids.push_back(id);
    }
    if (entry.payload.contains("outcome")) {
      ++report.outcomes[entry.payload.at("outcome").get<std::string>()];
    }
  }
  return report;
}

CampaignResult run_campaign(const CampaignSettings & settings, const ScenarioProblem & problem)
{
  if (settings.run_id.empty()) {
    throw std::invalid_argument("campaign needs a run id");
  }
  CampaignResult result;
  result.run_dir = settings.output_root / settings.run_id;
  std::filesystem::create_directories(result.run_dir / "recordings");

  ScenarioProblemSpec spec = problem.spec();
  spec.recordings_dir = result.run_dir / "recordings";
  const ScenarioProblem local(std::move(spec));

  auto algorithm = make_algorithm(settings.algorithm, local.search_problem());
  SearchOptions options;
  options.seed = settings.seed;
  options.budget = {settings.algorithm.run_hour, settings.max_evaluations};
  options.workers = settings.workers;
  options.stop = settings.stop;
  options.state_dir = result.run_dir;
  options.resume = settings.resume;
  options.on_logged = settings.on_logged;

  const SearchOutcome outcome = run_search(
    *algorithm, [&local](const Genes & g, std::size_t i, std::uint64_t s) { return local.evaluate(g, i, s); },
    options);

  result.report = summarize_log(outcome.log, settings.algorithm.name, settings.seed);
  result.report.complete = !outcome.interrupted;
  result.report.wall_clock_seconds = outcome.wall_seconds;
  result.interrupted = outcome.interrupted;
  result.resumed = outcome.resumed;
  write_text_file_atomic(result.run_dir / "report.json", canonical_dump(report_to_json(result.report)) + "\n");
  return result;
}

}  // namespace scenofuzz::engine
