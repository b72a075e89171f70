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

#include "scenofuzz/config/app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitInterrupted = 130;

std::atomic<bool> g_stop{false};

extern "C" void on_sigint(int) { g_stop.store(true); }

void print_warnings(const std::vector<std::string> & warnings)
{
  for (const auto & w : warnings) {
    std::cerr << "warning: " << w << "\n";
  }
}

struct RunArgs
{
  std::string config_name;
  std::string config_dir{"./configs"};
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> max_evals;
  std::optional<std::string> export_svg;
  std::optional<std::string> run_id;
  std::optional<std::string> output_root;
  bool resume{false};
  bool no_resume{false};
};

int export_recording_svg(
  const std::filesystem::path & recording, const std::filesystem::path & out, const std::vector<std::filesystem::path> & map_dirs)
{
  const auto rec = scenofuzz::runner::read_recording(recording);
  const auto map = scenofuzz::config::resolve_map(rec.config_snapshot.map_name, map_dirs);
  std::filesystem::create_directories(out.parent_path().empty() ? std::filesystem::path(".") : out.parent_path());
  scenofuzz::write_text_file_atomic(out, scenofuzz::config::export_svg(rec, map));
  std::cout << "wrote " << out.string() << "\n";
  return kExitOk;
}

scenofuzz::config::Workspace load_workspace(const RunArgs & args, std::vector<std::string> & warnings)
{
  const std::filesystem::path dir(args.config_dir);
  const auto path = scenofuzz::config::config_path(dir, args.config_name);
  if (!std::filesystem::exists(path)) {
    throw scenofuzz::config::ConfigError("", "config file not found: " + std::filesystem::absolute(path).string());
  }
  const auto cfg = scenofuzz::config::load_config(path, &warnings);
  auto ws = scenofuzz::config::prepare_workspace(cfg, dir);
  warnings.insert(warnings.end(), ws.warnings.begin(), ws.warnings.end());
  return ws;
}

int run(const RunArgs & args)
{
  std::vector<std::string> warnings;
  scenofuzz::config::Workspace ws;
  try {
    ws = load_workspace(args, warnings);
  } catch (const scenofuzz::config::ConfigError & e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception & e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  print_warnings(warnings);

  scenofuzz::config::RunRequest request;
  request.seed = args.seed;
  request.workers = args.workers;
  request.max_evaluations = args.max_evals;
  request.run_id = args.run_id;
  if (args.output_root) {
    request.output_root = *args.output_root;
  }
  if (args.resume) {
    request.resume = true;
  } else if (args.no_resume) {
    request.resume = false;
  }
  request.stop = &g_stop;
  if (ws.config.system.debug) {
    request.on_logged = [](const scenofuzz::engine::LogEntry & entry) {
      std::cerr << "[eval " << entry.index << "] "
                << (entry.payload.contains("outcome") ? entry.payload.at("outcome").get<std::string>() : "")
                << " fitness=" << entry.result.fitness << "\n";
    };
  }

  std::signal(SIGINT, on_sigint);
  scenofuzz::engine::CampaignResult result;
  try {
    result = scenofuzz::config::run_test(ws, request);
  } catch (const scenofuzz::config::ConfigError & e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception & e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }

  const auto & report = result.report;
  char wall[32];
  std::snprintf(wall, sizeof(wall), "%.3f", report.wall_clock_seconds);
  std::cout << "evaluations=" << report.evaluations << " violations=" << report.violations() << " wall_clock=" << wall
            << "s report=" << (result.run_dir / "report.json").string() << "\n";

  if (args.export_svg) {
    const auto recording = scenofuzz::runner::recording_path(result.run_dir / "recordings", *args.export_svg);
    if (!std::filesystem::exists(recording)) {
      std::cerr << "runtime error: no recording " << recording.string() << "\n";
      return kExitRuntime;
    }
    try {
      const auto out = result.run_dir / "svg" / (*args.export_svg + ".svg");
      std::filesystem::create_directories(out.parent_path());
      scenofuzz::write_text_file_atomic(out, scenofuzz::config::export_svg(scenofuzz::runner::read_recording(recording), ws.map));
      std::cout << "wrote " << out.string() << "\n";
    } catch (const std::exception & e) {
      std::cerr << "runtime error: " << e.what() << "\n";
      return kExitRuntime;
    }
  }
  return result.interrupted ? kExitInterrupted : kExitOk;
}

int serve_agent(const RunArgs & args, const std::string & endpoint)
{
  std::vector<std::string> warnings;
  scenofuzz::config::Workspace ws;
  try {
    ws = load_workspace(args, warnings);
  } catch (const std::exception & e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  print_warnings(warnings);
  std::unique_ptr<scenofuzz::bridge::ServerHandle> server;
  try {
    const auto agent = scenofuzz::config::make_agent_config(ws.base, ws.map, ws.config.scenario_runner.agent);
    server = scenofuzz::bridge::serve(endpoint, scenofuzz::bridge::ego_agent_factory(agent));
  } catch (const std::exception & e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  std::cout << "serving reference agent at " << server->endpoint() << std::endl;
  std::signal(SIGINT, on_sigint);
  std::signal(SIGTERM, on_sigint);
  while (!g_stop.load()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  return kExitInterrupted;
}

}  // namespace

int main(int argc, char ** argv)
{
  // "-cn" is a two-letter short flag, which CLI11 does not model directly.
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    args.push_back(a == "-cn" ? "--config-name" : a);
  }
  std::reverse(args.begin(), args.end());

  CLI::App app{"Search-based scenario testing for automated driving agents"};
  app.require_subcommand(0, 1);
  RunArgs run_args;
  app.add_option("--config-name", run_args.config_name, "Config name (<config-dir>/<name>.yaml); alias -cn");
  app.add_option("--config-dir", run_args.config_dir, "Directory holding config files")->capture_default_str();
  app.add_option("--seed", run_args.seed, "Campaign seed");
  app.add_option("--workers", run_args.workers, "Parallel scenario workers")->check(CLI::PositiveNumber);
  app.add_option("--max-evals", run_args.max_evals, "Evaluation budget override");
  app.add_option("--export-svg", run_args.export_svg, "Scenario id to render as SVG after the run");
  app.add_option("--run-id", run_args.run_id, "Results directory name (default: UTC time and seed)");
  app.add_option("--output-root", run_args.output_root, "Results root (overrides config and environment)");
  app.add_flag("--resume", run_args.resume, "Resume the named or most recent run");
  app.add_flag("--no-resume", run_args.no_resume, "Start a fresh run even if the config asks to resume");

  auto * svg_cmd = app.add_subcommand("export-svg", "Render a recording file as SVG");
  std::string recording_file;
  std::string svg_out;
  std::string svg_map_dir{"data/maps"};
  svg_cmd->add_option("recording", recording_file, "Recording file (*.record.json)")->required();
  svg_cmd->add_option("-o,--output", svg_out, "Output SVG path (default: recording path with .svg)");
  svg_cmd->add_option("--map-dir", svg_map_dir, "Directory holding lane maps")->capture_default_str();

  auto * serve_cmd = app.add_subcommand("serve-agent", "Serve the reference agent over the bridge protocol");
  std::string endpoint{"tcp://127.0.0.1:7878"};
  serve_cmd->add_option("--endpoint", endpoint, "inproc://<id> or tcp://<host>:<port>")->capture_default_str();

  try {
    app.parse(args);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (svg_cmd->parsed()) {
      std::filesystem::path out = svg_out;
      if (out.empty()) {
        out = recording_file;
        out.replace_extension();
        out.replace_extension(".svg");
      }
      return export_recording_svg(recording_file, out, {svg_map_dir});
    }
  } catch (const std::exception & e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }

  if (run_args.config_name.empty()) {
    std::cerr << "config error: --config-name/-cn is required\n";
    return kExitConfig;
  }
  if (serve_cmd->parsed()) {
    return serve_agent(run_args, endpoint);
  }
  return run(run_args);
}
