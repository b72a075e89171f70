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

#include "support.hpp"

#include "scenofuzz/config/app.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>
#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

namespace scenofuzz::config
{
namespace
{

namespace fs = std::filesystem;

const fs::path kConfigs = testing::source_dir() / "configs";

std::string read_config(const std::string & name) { return read_text_file(kConfigs / (name + ".yaml")); }

struct CliResult
{
  int exit_code{-1};
  std::string output;
};

CliResult run_cli(const std::string & args)
{
  const std::string cmd = std::string(SCENOFUZZ_CLI_PATH) + " " + args + " 2>&1";
  CliResult r;
  FILE * pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    return r;
  }
  char buffer[4096];
  std::size_t n = 0;
  while ((n = std::fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
    r.output.append(buffer, n);
  }
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string config_error_path(const std::string & yaml)
{
  try {
    parse_config(yaml);
  } catch (const ConfigError & e) {
    return e.path();
  }
  return "<no error>";
}

std::string replace(std::string text, const std::string & from, const std::string & to)
{
  const auto at = text.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  if (at != std::string::npos) {
    text.replace(at, from.size(), to);
  }
  return text;
}

// Parsing

TEST(ParseConfig, SampleFileRecoversEveryListedValue)
{
  std::vector<std::string> warnings;
  const auto cfg = load_config(kConfigs / "avfuzzer.yaml", &warnings);
  EXPECT_TRUE(cfg.system.debug);
  EXPECT_TRUE(cfg.system.resume);
  EXPECT_EQ(cfg.scenario.map_name, "borregas_ave");
  EXPECT_EQ(cfg.scenario.start_lane_id, "lane_31");
  EXPECT_EQ(cfg.scenario.end_lane_id, "lane_15");
  EXPECT_EQ(cfg.scenario_runner.name, "ApolloSim");
  EXPECT_TRUE(cfg.scenario_runner.save_traffic_recording);
  const auto & ap = cfg.testing_engine.algorithm;
  EXPECT_EQ(ap.name, "avfuzzer");
  EXPECT_EQ(ap.run_hour, 2.0);
  EXPECT_EQ(ap.local_run_hour, 0.5);
  EXPECT_EQ(ap.population_size, 4u);
  EXPECT_EQ(ap.pm, 0.6);
  EXPECT_EQ(ap.pc, 0.6);
  EXPECT_EQ(cfg.testing_engine.oracle.collision_threshold, 0.01);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("container_name"), std::string::npos);
}

TEST(ParseConfig, EveryShippedConfigLoads)
{
  for (const auto & entry : fs::directory_iterator(kConfigs)) {
    if (entry.path().extension() == ".yaml") {
      EXPECT_NO_THROW(load_config(entry.path())) << entry.path();
    }
  }
}

TEST(ParseConfig, EmptyOracleSectionUsesDefaults)
{
  const auto base = read_config("random");
  const auto cfg = parse_config(replace(base, "  oracle:\n    collision:\n      threshold: 0.01\n", "  oracle: {}\n"));
  EXPECT_EQ(cfg.testing_engine.oracle, runner::OracleConfig{});
  EXPECT_EQ(cfg.testing_engine.oracle.collision_threshold, 0.01);
}

TEST(ParseConfig, ErrorsNameTheOffendingPath)
{
  const auto base = read_config("avfuzzer");
  EXPECT_EQ(config_error_path(replace(base, "pm: 0.6", "pm: 1.5")), "testing_engine.algorithm.parameters.pm");
  EXPECT_EQ(config_error_path(replace(base, "pc: 0.6", "pc: -0.1")), "testing_engine.algorithm.parameters.pc");
  EXPECT_EQ(config_error_path(replace(base, "pm: 0.6", "pmm: 0.6")), "testing_engine.algorithm.parameters.pmm");
  EXPECT_EQ(config_error_path(replace(base, "debug: true", "debgu: true")), "system.debgu");
  EXPECT_EQ(config_error_path(replace(base, "name: avfuzzer", "name: genetic")), "testing_engine.algorithm.name");
  EXPECT_EQ(config_error_path(replace(base, "name: ApolloSim", "name: Carla")), "scenario_runner.name");
  EXPECT_EQ(
    config_error_path(replace(base, "population_size: 4", "population_size: four")),
    "testing_engine.algorithm.parameters.population_size");
  EXPECT_EQ(
    config_error_path(replace(base, "population_size: 4", "population_size: 1")),
    "testing_engine.algorithm.parameters.population_size");
  EXPECT_EQ(config_error_path(replace(base, "resume: true", "resume: maybe")), "system.resume");
  EXPECT_EQ(config_error_path(replace(base, "  end_lane_id: lane_15\n", "")), "scenario.end_lane_id");
  EXPECT_EQ(
    config_error_path(replace(base, "threshold: 0.01", "threshold: 0")), "testing_engine.oracle.collision.threshold");
  EXPECT_EQ(config_error_path("system: [1, 2"), "");
  EXPECT_EQ(config_error_path("- 1\n- 2\n"), "");
  EXPECT_THROW(parse_config(replace(base, "pm: 0.6", "pm: 1.5")), ConfigError);
}

TestConfig everything_set()
{
  auto cfg = parse_config(read_config("avfuzzer"));
  cfg.system.output_root = "out/dir";
  cfg.system.map_dir = "maps";
  cfg.system.seed = 77;
  cfg.scenario.start_station = 1.25;
  cfg.scenario.end_station = 33.0 / 7.0;
  cfg.scenario.template_path = "data/scenarios/junction.json";
  cfg.scenario.duration_limit = 25.5;
  cfg.scenario.mutation_space.segment_speeds = false;
  cfg.scenario.mutation_space.offset_bounds = {-1.0 / 3.0, 0.7};
  cfg.scenario_runner.name = "LocalSim";
  cfg.scenario_runner.save_traffic_recording = false;
  cfg.scenario_runner.worker_pool = 3;
  cfg.scenario_runner.dt = 0.05;
  cfg.scenario_runner.agent.cruise_speed = 6.5;
  cfg.scenario_runner.agent.fault_ignore_junction_traffic = true;
  cfg.scenario_runner.agent.transport = Transport::Tcp;
  cfg.testing_engine.algorithm.name = "samota";
  cfg.testing_engine.algorithm.surrogate_pool = 12;
  cfg.testing_engine.algorithm.archive_threshold = 0.1 + 0.2;
  cfg.testing_engine.algorithm.extras = {{"surrogate_generations", 7.0}};
  cfg.testing_engine.oracle.stuck_duration = 12.0;
  return cfg;
}

TEST(ParseConfig, EmitThenParseRoundTrips)
{
  std::vector<TestConfig> configs{everything_set()};
  for (const auto & entry : fs::directory_iterator(kConfigs)) {
    configs.push_back(load_config(entry.path()));
  }
  for (const auto & cfg : configs) {
    const auto text = emit_config(cfg);
    const auto again = parse_config(text);
    EXPECT_EQ(again, cfg) << text;
    EXPECT_EQ(emit_config(again), text);
  }
}

/// Reads the defaults table: dotted key -> default cell.
std::map<std::string, std::string> documented_defaults()
{
  std::map<std::string, std::string> out;
  std::istringstream doc(read_text_file(testing::source_dir() / "docs" / "config.md"));
  const std::regex row(R"(^\| `([a-z_.]+)` \| [^|]+ \| `([^`]+)` \|)");
  std::string line;
  std::smatch m;
  while (std::getline(doc, line)) {
    if (std::regex_search(line, m, row)) {
      out[m[1]] = m[2];
    }
  }
  return out;
}

YAML::Node lookup(const YAML::Node & root, const std::string & dotted)
{
  YAML::Node node = YAML::Clone(root);
  std::istringstream parts(dotted);
  std::string part;
  while (std::getline(parts, part, '.')) {
    if (!node.IsMap() || !node[part]) {
      return YAML::Node(YAML::NodeType::Undefined);
    }
    node.reset(node[part]);
  }
  return node;
}

TEST(ParseConfig, DocumentedDefaultsMatchTheParser)
{
  const auto documented = documented_defaults();
  ASSERT_GE(documented.size(), 40u);
  const std::string minimal =
    "scenario:\n  map_name: m\n  start_lane_id: a\n  end_lane_id: b\n"
    "testing_engine:\n  algorithm:\n    name: random\n";
  const YAML::Node emitted = YAML::Load(emit_config(parse_config(minimal)));
  const YAML::Node given = YAML::Load(minimal);
  for (const auto & [key, value] : documented) {
    const YAML::Node actual = lookup(emitted, key);
    if (value == "(required)") {
      EXPECT_TRUE(lookup(given, key).IsDefined()) << key;
      std::string without = minimal;
      const std::string leaf = key.substr(key.rfind('.') + 1);
      const auto leaf_at = without.find(" " + leaf + ":");
      ASSERT_NE(leaf_at, std::string::npos) << key;
      const auto at = without.rfind('\n', leaf_at) + 1;
      without.erase(at, without.find('\n', at) - at + 1);
      EXPECT_EQ(config_error_path(without), key);
    } else if (value == "(unset)") {
      EXPECT_FALSE(actual.IsDefined()) << key;
    } else if (value.front() == '[') {
      const YAML::Node expected = YAML::Load(value);
      ASSERT_TRUE(actual.IsSequence()) << key;
      EXPECT_EQ(actual[0].as<double>(), expected[0].as<double>()) << key;
      EXPECT_EQ(actual[1].as<double>(), expected[1].as<double>()) << key;
    } else if (value == "true" || value == "false") {
      EXPECT_EQ(actual.as<bool>(), value == "true") << key;
    } else if (std::isdigit(static_cast<unsigned char>(value.front()))) {
      EXPECT_EQ(actual.as<double>(), std::stod(value)) << key;
    } else {
      EXPECT_EQ(actual.as<std::string>(), value) << key;
    }
  }
  // Every emitted leaf is documented.
  std::function<void(const YAML::Node &, const std::string &)> walk = [&](const YAML::Node & n, const std::string & p) {
    if (n.IsMap()) {
      for (const auto & item : n) {
        walk(item.second, p.empty() ? item.first.as<std::string>() : p + "." + item.first.as<std::string>());
      }
    } else {
      EXPECT_TRUE(documented.count(p)) << p << " is not documented";
    }
  };
  walk(emitted, "");
}

// Workspace and environment

TEST(Workspace, ResolvesTheSampleMapAlias)
{
  const auto ws = prepare_workspace(load_config(kConfigs / "avfuzzer.yaml"), kConfigs);
  EXPECT_EQ(ws.map.name(), "borregas_ave_lite");
  EXPECT_TRUE(ws.map.contains("lane_31"));
  EXPECT_EQ(ws.base.ego.start_lane, "lane_31");
  EXPECT_EQ(ws.base.ego.end_lane, "lane_15");
  EXPECT_FALSE(ws.base.npc_vehicles.empty());
  EXPECT_FALSE(ws.warnings.empty());
}

TEST(Workspace, UnknownLaneIsAConfigError)
{
  auto cfg = load_config(kConfigs / "random.yaml");
  cfg.scenario.end_lane_id = "lane_999";
  try {
    prepare_workspace(cfg, kConfigs);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError & e) {
    EXPECT_EQ(e.path(), "scenario.end_lane_id");
  }
}

class ScopedEnv
{
public:
  ScopedEnv(const char * name, const std::string & value) : name_(name) { ::setenv(name, value.c_str(), 1); }
  ~ScopedEnv() { ::unsetenv(name_); }
  ScopedEnv(const ScopedEnv &) = delete;
  ScopedEnv & operator=(const ScopedEnv &) = delete;

private:
  const char * name_;
};

TEST(Workspace, OutputRootEnvironmentOverride)
{
  testing::TempDir dir("env_root");
  const ScopedEnv env(kOutputRootEnv, dir.path().string());
  const auto ws = prepare_workspace(load_config(kConfigs / "random.yaml"), kConfigs);
  RunRequest req;
  req.max_evaluations = 2;
  req.workers = 1;
  req.run_id = "envrun";
  const auto result = run_test(ws, req);
  EXPECT_EQ(result.run_dir, dir.path() / "envrun");
  EXPECT_TRUE(fs::exists(dir.path() / "envrun" / "report.json"));
}

TEST(Workspace, BridgeAddressEnvironmentSelectsAnExternalAgent)
{
  auto cfg = load_config(kConfigs / "random.yaml");
  const auto local = prepare_workspace(cfg, kConfigs);
  std::atomic<int> sessions{0};
  const auto agent = make_agent_config(local.base, local.map, cfg.scenario_runner.agent);
  const auto server = bridge::serve("tcp://127.0.0.1:0", [&sessions, agent]() {
    ++sessions;
    return bridge::ego_agent_factory(agent)();
  });
  const ScopedEnv env(bridge::kBridgeAddrEnv, server->endpoint());
  const auto remote = prepare_workspace(cfg, kConfigs);
  EXPECT_EQ(remote.agent.endpoint, server->endpoint());
  const auto via_tcp = runner::run_scenario(remote.base, remote.map, remote.agent.factory, {}, 5);
  const auto in_proc = runner::run_scenario(local.base, local.map, local.agent.factory, {}, 5);
  EXPECT_EQ(sessions.load(), 1);
  auto tcp_doc = runner::recording_to_json(via_tcp);
  auto inproc_doc = runner::recording_to_json(in_proc);
  tcp_doc.erase("wall_clock");
  inproc_doc.erase("wall_clock");
  EXPECT_EQ(canonical_dump(tcp_doc), canonical_dump(inproc_doc));
}

// Command line

TEST(Cli, MissingConfigExitsTwoAndNamesThePath)
{
  const auto r = run_cli("-cn missing --config-dir " + kConfigs.string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find((kConfigs / "missing.yaml").string()), std::string::npos) << r.output;
}

TEST(Cli, BadFlagsAndBadConfigsExitTwo)
{
  EXPECT_EQ(run_cli("--no-such-flag").exit_code, 2);
  EXPECT_EQ(run_cli("-cn random --config-dir " + kConfigs.string() + " --workers nope").exit_code, 2);
  testing::TempDir dir("bad_cfg");
  write_text_file_atomic(dir.path() / "bad.yaml", replace(read_config("avfuzzer"), "pm: 0.6", "pm: 1.5"));
  const auto r = run_cli("-cn bad --config-dir " + dir.path().string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("testing_engine.algorithm.parameters.pm"), std::string::npos) << r.output;
}

TEST(Cli, BudgetedRunWritesTheReportAndSummary)
{
  testing::TempDir dir("cli_run");
  const auto r = run_cli(
    "-cn avfuzzer --config-dir " + kConfigs.string() + " --max-evals 10 --seed 1 --workers 1 --run-id a --output-root " +
    dir.path().string() + " --no-resume --export-svg eval_000003");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const auto report = engine::report_from_json(parse_json(read_text_file(dir.path() / "a" / "report.json")));
  EXPECT_EQ(report.evaluations, 10u);
  EXPECT_EQ(report.algorithm, "avfuzzer");
  EXPECT_EQ(report.seed, 1u);
  EXPECT_TRUE(report.complete);
  const std::regex summary(R"(evaluations=10 violations=\d+ wall_clock=\d+\.\d{3}s report=\S+report\.json)");
  EXPECT_TRUE(std::regex_search(r.output, summary)) << r.output;
  EXPECT_TRUE(fs::exists(dir.path() / "a" / "svg" / "eval_000003.svg"));
  EXPECT_TRUE(fs::exists(runner::recording_path(dir.path() / "a" / "recordings", "eval_000009")));
  EXPECT_NE(r.output.find("[eval 9]"), std::string::npos) << "debug: true prints per-evaluation lines";
}

TEST(Cli, IdenticalRunsGiveIdenticalReports)
{
  testing::TempDir dir("cli_det");
  for (const char * id : {"one", "two"}) {
    const auto r = run_cli(
      "-cn behavexplor --config-dir " + kConfigs.string() + " --max-evals 12 --seed 4 --workers 1 --run-id " + id +
      " --output-root " + dir.path().string());
    ASSERT_EQ(r.exit_code, 0) << r.output;
  }
  auto one = parse_json(read_text_file(dir.path() / "one" / "report.json"));
  auto two = parse_json(read_text_file(dir.path() / "two" / "report.json"));
  one.erase("wall_clock_seconds");
  two.erase("wall_clock_seconds");
  EXPECT_EQ(canonical_dump(one), canonical_dump(two));
  EXPECT_EQ(
    read_text_file(dir.path() / "one" / engine::kLogFileName), read_text_file(dir.path() / "two" / engine::kLogFileName));
}

TEST(Cli, ResumeKeepsCompletedRecordings)
{
  testing::TempDir dir("cli_resume");
  const auto ws = prepare_workspace(load_config(kConfigs / "random.yaml"), kConfigs);
  std::atomic<bool> stop{false};
  RunRequest req;
  req.max_evaluations = 12;
  req.workers = 1;
  req.seed = 2;
  req.run_id = "r";
  req.output_root = dir.path();
  req.stop = &stop;
  req.on_logged = [&stop](const engine::LogEntry & e) {
    if (e.index == 4) stop = true;
  };
  const auto first = run_test(ws, req);
  EXPECT_FALSE(first.report.complete);
  std::map<fs::path, std::pair<std::string, fs::file_time_type>> before;
  for (const auto & entry : fs::directory_iterator(first.run_dir / "recordings")) {
    before[entry.path()] = {read_text_file(entry.path()), fs::last_write_time(entry.path())};
  }
  ASSERT_EQ(before.size(), 5u);
  req.stop = nullptr;
  req.on_logged = nullptr;
  req.resume = true;
  const auto second = run_test(ws, req);
  EXPECT_TRUE(second.resumed);
  EXPECT_TRUE(second.report.complete);
  EXPECT_EQ(second.report.evaluations, 12u);
  for (const auto & [path, snapshot] : before) {
    EXPECT_EQ(read_text_file(path), snapshot.first);
    EXPECT_EQ(fs::last_write_time(path), snapshot.second);
  }
}

// SVG export

runner::ScenarioRecording fixture_recording(bool blind, std::size_t keep_frames = 0)
{
  const auto map = testing::fixture_map("straight_road");
  auto config = testing::straight_scenario();
  scenario::NpcSpec parked;
  parked.actor_id = "parked";
  parked.waypoints = {{40.0, 0.0, 0.0}, {60.0, 0.0, 0.0}};
  parked.target_speeds = {0.0};
  config.npc_vehicles.push_back(parked);
  auto rec = runner::run_scenario(config, map, testing::reference_agent(config, map, blind), {}, 1);
  if (keep_frames > 0) {
    rec.frames.resize(keep_frames);
  }
  return rec;
}

std::size_t count(const std::string & text, const std::string & needle)
{
  std::size_t n = 0;
  for (auto at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1)) {
    ++n;
  }
  return n;
}

TEST(Svg, OneFrameHasOneBoxPerActor)
{
  const auto rec = fixture_recording(false, 1);
  const auto svg = export_svg(rec, testing::fixture_map("straight_road"));
  EXPECT_EQ(count(svg, "class=\"box\""), rec.frames[0].actors.size());
  EXPECT_EQ(count(svg, "data-actor=\"ego\""), 1u);
  EXPECT_EQ(count(svg, "data-actor=\"parked\""), 1u);
  EXPECT_EQ(count(svg, "class=\"collision\""), 0u);
}

TEST(Svg, CollisionMarkerSitsAtTheDecidingEgoPosition)
{
  const auto rec = fixture_recording(true);
  ASSERT_EQ(rec.verdict.outcome, runner::Outcome::CollisionViolation);
  const auto svg = export_svg(rec, testing::fixture_map("straight_road"));
  ASSERT_EQ(count(svg, "class=\"collision\""), 1u);
  // Recover the drawing offset from the first ego box, then check the marker.
  const auto & last = rec.frames.back();
  EXPECT_NEAR(last.sim_time, rec.verdict.time_of_decision, 1e-9);
  const std::regex circle(R"re(class="collision" cx="([-0-9.]+)" cy="([-0-9.]+)")re");
  std::smatch m;
  ASSERT_TRUE(std::regex_search(svg, m, circle));
  const std::regex lane(R"re(data-lane="lane_1" points="([-0-9.]+),([-0-9.]+))re");
  std::smatch l;
  ASSERT_TRUE(std::regex_search(svg, l, lane));
  const auto map = testing::fixture_map("straight_road");
  const auto lane_start = map.lane("lane_1").centerline.points().front();
  const double ox = std::stod(l[1]) - lane_start.x;
  const double oy = std::stod(l[2]) + lane_start.y;
  const auto ego = last.actors.front().pose;
  EXPECT_NEAR(std::stod(m[1]) - ox, ego.x, 2e-3);
  EXPECT_NEAR(oy - std::stod(m[2]), ego.y, 2e-3);
}

TEST(Svg, OutputIsDeterministicAndPinned)
{
  const auto rec = fixture_recording(true);
  const auto map = testing::fixture_map("straight_road");
  const auto svg = export_svg(rec, map);
  EXPECT_EQ(svg, export_svg(runner::recording_from_json(runner::recording_to_json(rec)), map));
  constexpr const char * kGolden = "5ab931f82334a8e6c9ca7cdcc667f9b1f59995f037e74953f9f494d5785bd352";
  EXPECT_EQ(sha256_hex(svg), kGolden);
}

TEST(Svg, SubcommandWritesTheFile)
{
  testing::TempDir dir("svg_cli");
  const auto rec_path = runner::write_recording(fixture_recording(true), dir.path());
  const auto out = dir.path() / "plan.svg";
  const auto r = run_cli(
    "export-svg " + rec_path.string() + " -o " + out.string() + " --map-dir " +
    (testing::source_dir() / "data" / "maps").string());
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(read_text_file(out), export_svg(runner::read_recording(rec_path), testing::fixture_map("straight_road")));
  EXPECT_EQ(run_cli("export-svg " + (dir.path() / "nope.json").string()).exit_code, 3);
}

}  // namespace
}  // namespace scenofuzz::config
