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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

namespace py = pybind11;
using scenofuzz::Json;

namespace
{

std::string load_map_json(const std::string & path)
{
  return scenofuzz::canonical_dump(scenofuzz::maps::load_map(path).to_json());
}

std::vector<std::string> validate_scenario(const std::string & scenario_json, const std::string & map_path)
{
  const auto map = scenofuzz::maps::load_map(map_path);
  const auto config = scenofuzz::scenario::from_json(scenofuzz::parse_json(scenario_json));
  std::vector<std::string> out;
  for (const auto & v : scenofuzz::scenario::validate(config, map)) {
    out.push_back(std::string(scenofuzz::scenario::to_string(v.code)) + ": " + v.message);
  }
  return out;
}

std::string run_scenario(
  const std::string & scenario_json, const std::string & map_path, std::uint64_t seed, double cruise_speed,
  bool fault_ignore_obstacles, bool fault_ignore_junction_traffic, const std::string & transport)
{
  const auto map = scenofuzz::maps::load_map(map_path);
  const auto config = scenofuzz::scenario::from_json(scenofuzz::parse_json(scenario_json));
  scenofuzz::config::AgentSection section;
  section.cruise_speed = cruise_speed;
  section.fault_ignore_obstacles = fault_ignore_obstacles;
  section.fault_ignore_junction_traffic = fault_ignore_junction_traffic;
  if (transport == "tcp") {
    section.transport = scenofuzz::config::Transport::Tcp;
  } else if (transport != "inproc") {
    throw std::invalid_argument("transport must be 'inproc' or 'tcp'");
  }
  const auto agent = scenofuzz::config::make_agent_config(config, map, section);
  const auto binding = scenofuzz::config::make_agent_binding(agent, section.transport);
  scenofuzz::runner::ScenarioRecording rec;
  {
    py::gil_scoped_release release;
    rec = scenofuzz::runner::run_scenario(config, map, binding.factory, {}, seed);
  }
  return scenofuzz::canonical_dump(scenofuzz::runner::recording_to_json(rec));
}

std::string parse_config_json(const std::string & yaml_text)
{
  std::vector<std::string> warnings;
  const auto cfg = scenofuzz::config::parse_config(yaml_text, &warnings);
  return scenofuzz::config::emit_config(cfg);
}

py::dict run_test(
  const std::string & config_dir, const std::string & config_name, std::optional<std::uint64_t> seed,
  std::optional<std::size_t> max_evaluations, std::optional<std::size_t> workers, std::optional<std::string> run_id,
  std::optional<std::string> output_root, std::optional<bool> resume)
{
  std::vector<std::string> warnings;
  const auto cfg = scenofuzz::config::load_config(scenofuzz::config::config_path(config_dir, config_name), &warnings);
  const auto ws = scenofuzz::config::prepare_workspace(cfg, config_dir);
  scenofuzz::config::RunRequest request;
  request.seed = seed;
  request.max_evaluations = max_evaluations;
  request.workers = workers;
  request.run_id = run_id;
  if (output_root) {
    request.output_root = *output_root;
  }
  request.resume = resume;
  scenofuzz::engine::CampaignResult result;
  {
    py::gil_scoped_release release;
    result = scenofuzz::config::run_test(ws, request);
  }
  py::dict out;
  out["report"] = scenofuzz::canonical_dump(scenofuzz::engine::report_to_json(result.report));
  out["run_dir"] = result.run_dir.string();
  out["resumed"] = result.resumed;
  return out;
}

std::string export_svg(const std::string & recording_path, const std::string & map_path)
{
  return scenofuzz::config::export_svg(
    scenofuzz::runner::read_recording(recording_path), scenofuzz::maps::load_map(map_path));
}

py::bytes encode_message(const std::string & body_json)
{
  const auto msg = scenofuzz::bridge::decode_body(
    std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t *>(body_json.data()), body_json.size()));
  const auto frame = scenofuzz::bridge::encode(msg);
  return py::bytes(reinterpret_cast<const char *>(frame.data()), frame.size());
}

py::tuple decode_message(const py::bytes & data)
{
  const std::string raw = data;
  const auto decoded = scenofuzz::bridge::decode(
    std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t *>(raw.data()), raw.size()));
  const auto frame = scenofuzz::bridge::encode(decoded.message);
  const std::string body(frame.begin() + scenofuzz::bridge::kFrameHeaderSize, frame.end());
  return py::make_tuple(body, decoded.consumed);
}

}  // namespace

PYBIND11_MODULE(_scenofuzz, m)
{
  m.doc() = "Native core of scenofuzz";

  py::register_exception<scenofuzz::config::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<scenofuzz::bridge::FrameError>(m, "FrameError", PyExc_ValueError);
  py::register_exception<scenofuzz::bridge::BridgeError>(m, "BridgeError", PyExc_RuntimeError);

  m.def("algorithm_names", &scenofuzz::engine::algorithm_names);
  m.def("load_map_json", &load_map_json, py::arg("path"));
  m.def("validate_scenario", &validate_scenario, py::arg("scenario_json"), py::arg("map_path"));
  m.def(
    "run_scenario", &run_scenario, py::arg("scenario_json"), py::arg("map_path"), py::arg("seed") = 0,
    py::arg("cruise_speed") = 8.0, py::arg("fault_ignore_obstacles") = false,
    py::arg("fault_ignore_junction_traffic") = false, py::arg("transport") = "inproc");
  m.def("normalize_config", &parse_config_json, py::arg("yaml_text"));
  m.def(
    "run_test", &run_test, py::arg("config_dir"), py::arg("config_name"), py::arg("seed") = py::none(),
    py::arg("max_evaluations") = py::none(), py::arg("workers") = py::none(), py::arg("run_id") = py::none(),
    py::arg("output_root") = py::none(), py::arg("resume") = py::none());
  m.def("export_svg", &export_svg, py::arg("recording_path"), py::arg("map_path"));
  m.def("encode_message", &encode_message, py::arg("body_json"));
  m.def("decode_message", &decode_message, py::arg("data"));
  m.def("canonical_json", [](const std::string & text) { return scenofuzz::canonical_dump(scenofuzz::parse_json(text)); });
}
