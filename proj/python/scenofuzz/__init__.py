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
"""Search-based scenario testing for automated driving agents."""

import json

from . import _scenofuzz
from ._scenofuzz import BridgeError, ConfigError, FrameError, algorithm_names, export_svg, normalize_config

__all__ = [
    "BridgeError",
    "ConfigError",
    "FrameError",
    "algorithm_names",
    "decode_message",
    "encode_message",
    "export_svg",
    "load_map",
    "normalize_config",
    "run_scenario",
    "run_test",
    "validate_scenario",
]


def _dump(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def load_map(path):
    """Loads a lane map and returns its canonical JSON document."""
    return json.loads(_scenofuzz.load_map_json(str(path)))


def validate_scenario(scenario, map_path):
    """Returns a list of "CODE: message" strings; empty when valid."""
    return _scenofuzz.validate_scenario(_dump(scenario), str(map_path))


def run_scenario(scenario, map_path, seed=0, cruise_speed=8.0, fault_ignore_obstacles=False,
                 fault_ignore_junction_traffic=False, transport="inproc"):
    """Runs one scenario against the reference agent and returns the recording."""
    return json.loads(
        _scenofuzz.run_scenario(_dump(scenario), str(map_path), seed, cruise_speed, fault_ignore_obstacles,
                                fault_ignore_junction_traffic, transport))


def run_test(config_dir, config_name, seed=None, max_evaluations=None, workers=None, run_id=None,
             output_root=None, resume=None):
    """Runs a campaign from a YAML config; returns (report, run_dir)."""
    out = _scenofuzz.run_test(str(config_dir), config_name, seed, max_evaluations, workers, run_id,
                              None if output_root is None else str(output_root), resume)
    return json.loads(out["report"]), out["run_dir"]


def encode_message(message):
    """Frames a perception or control message as length-prefixed bytes."""
    return _scenofuzz.encode_message(_dump(message))


def decode_message(data):
    """Decodes the first frame of `data`; returns (message, bytes consumed)."""
    body, consumed = _scenofuzz.decode_message(bytes(data))
    return json.loads(body), consumed
