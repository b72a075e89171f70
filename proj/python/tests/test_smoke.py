# Copyright 2026 The Scenofuzz Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Smoke tests for the Python bindings."""

import pathlib

import pytest

import scenofuzz

ROOT = pathlib.Path(__file__).resolve().parents[2]
MAPS = ROOT / "data" / "maps"
CONFIGS = ROOT / "configs"
JUNCTION = ROOT / "data" / "scenarios" / "junction.json"
BORREGAS = MAPS / "borregas_ave_lite.json"


def test_algorithm_names():
    assert scenofuzz.algorithm_names() == ["random", "avfuzzer", "behavexplor", "samota", "drivefuzz"]


def test_load_map():
    doc = scenofuzz.load_map(BORREGAS)
    lane_ids = {lane["id"] for lane in doc["lanes"]}
    assert {"lane_31", "lane_15"} <= lane_ids


def test_validate_fixture_and_broken_scenario():
    scenario = JUNCTION.read_text()
    assert scenofuzz.validate_scenario(scenario, BORREGAS) == []
    broken = scenario.replace('"end_lane":"lane_15"', '"end_lane":"lane_999"')
    problems = scenofuzz.validate_scenario(broken, BORREGAS)
    assert problems and any("lane_999" in p for p in problems)


def test_run_scenario_transports_agree():
    scenario = JUNCTION.read_text()
    inproc = scenofuzz.run_scenario(scenario, BORREGAS, seed=3)
    tcp = scenofuzz.run_scenario(scenario, BORREGAS, seed=3, transport="tcp")
    inproc.pop("wall_clock")
    tcp.pop("wall_clock")
    assert inproc == tcp
    assert inproc["verdict"]["outcome"] in {"CollisionViolation", "DestinationReached", "Timeout", "Stuck"}
    assert inproc["frames"][-1]["sim_time"] == inproc["verdict"]["time_of_decision"]


def test_fault_injected_agent_collides():
    rec = scenofuzz.run_scenario(JUNCTION.read_text(), BORREGAS, seed=1, fault_ignore_obstacles=True)
    assert rec["verdict"]["outcome"] == "CollisionViolation"


def test_message_round_trip():
    msg = {"type": "control", "sim_time": 0.5, "throttle": 0.25, "brake": 0.0, "steering": -0.125}
    frame = scenofuzz.encode_message(msg)
    assert int.from_bytes(frame[:4], "big") == len(frame) - 4
    decoded, consumed = scenofuzz.decode_message(frame + b"extra")
    assert decoded == msg
    assert consumed == len(frame)
    with pytest.raises(scenofuzz.FrameError):
        scenofuzz.decode_message(frame[:-1])


def test_config_errors_carry_the_path():
    text = (CONFIGS / "avfuzzer.yaml").read_text().replace("pm: 0.6", "pm: 1.5")
    with pytest.raises(scenofuzz.ConfigError, match=r"testing_engine\.algorithm\.parameters\.pm"):
        scenofuzz.normalize_config(text)
    normalized = scenofuzz.normalize_config((CONFIGS / "avfuzzer.yaml").read_text())
    assert scenofuzz.normalize_config(normalized) == normalized


def test_run_test_and_svg(tmp_path):
    report, run_dir = scenofuzz.run_test(CONFIGS, "random", seed=2, max_evaluations=6, workers=1, run_id="py",
                                         output_root=tmp_path, resume=False)
    assert report["evaluations"] == 6
    assert report["complete"] is True
    assert pathlib.Path(run_dir) == tmp_path / "py"
    recording = tmp_path / "py" / "recordings" / "eval_000000.record.json"
    svg = scenofuzz.export_svg(str(recording), str(BORREGAS))
    assert svg.startswith("<svg") and svg.count('class="box"') > 0


def test_missing_config_is_a_config_error(tmp_path):
    with pytest.raises(scenofuzz.ConfigError, match="config file not found"):
        scenofuzz.run_test(tmp_path, "missing")


def test_documents_match_published_schemas(tmp_path):
    jsonschema = pytest.importorskip("jsonschema")
    referencing = pytest.importorskip("referencing")
    import json

    schema_dir = ROOT / "docs" / "schema"
    scenario_schema = json.loads((schema_dir / "scenario.schema.json").read_text())
    recording_schema = json.loads((schema_dir / "recording.schema.json").read_text())
    registry = referencing.Registry().with_resource(
        scenario_schema["$id"], referencing.Resource.from_contents(scenario_schema))
    jsonschema.Draft202012Validator(scenario_schema).validate(json.loads(JUNCTION.read_text()))
    validator = jsonschema.Draft202012Validator(recording_schema, registry=registry)
    for flags in ({}, {"fault_ignore_obstacles": True}):
        rec = scenofuzz.run_scenario(JUNCTION.read_text(), BORREGAS, seed=4, **flags)
        validator.validate(rec)
    bad = dict(rec, verdict=dict(rec["verdict"], outcome="Exploded"))
    with pytest.raises(jsonschema.ValidationError):
        validator.validate(bad)
