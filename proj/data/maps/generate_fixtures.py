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
"""Regenerates the fixture lane maps in this directory."""

import json
import math
import pathlib

HERE = pathlib.Path(__file__).resolve().parent
WIDTH = 3.5
OFFSET = 2.5  # lane centre distance from the road axis
BOX = 12.0  # junction half-size
REACH = 50.0  # approach and exit lane length
LEFT_RADIUS = BOX + OFFSET
RIGHT_RADIUS = BOX - OFFSET
ARC_SEGMENTS = 16


def r6(v):
    v = round(v, 6)
    return 0.0 if v == 0 else v


def line(a, b):
    return [[r6(a[0]), r6(a[1])], [r6(b[0]), r6(b[1])]]


def arc(start, heading, radius, left, segments=ARC_SEGMENTS):
    side = 1.0 if left else -1.0
    nx, ny = -math.sin(heading) * side, math.cos(heading) * side
    cx, cy = start[0] + radius * nx, start[1] + radius * ny
    a0 = math.atan2(start[1] - cy, start[0] - cx)
    pts = []
    for k in range(segments + 1):
        a = a0 + side * (math.pi / 2) * k / segments
        pts.append([r6(cx + radius * math.cos(a)), r6(cy + radius * math.sin(a))])
    return pts


def lane(lane_id, points, width=WIDTH):
    return {"id": lane_id, "width": width, "centerline": points, "successors": [], "predecessors": []}


def link(lanes, a, b):
    lanes[a]["successors"].append(b)
    lanes[b]["predecessors"].append(a)


def write(name, lanes):
    doc = {"name": name, "lanes": [lanes[k] for k in sorted(lanes)]}
    for entry in doc["lanes"]:
        entry["successors"].sort()
        entry["predecessors"].sort()
    (HERE / f"{name}.json").write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def borregas_ave_lite():
    # Approach (entry) lanes end at the junction box, exits start at it.
    approaches = {
        # id: (start, end, heading)
        "lane_31": ((OFFSET, -BOX - REACH), (OFFSET, -BOX), math.pi / 2),
        "lane_41": ((-OFFSET, BOX + REACH), (-OFFSET, BOX), -math.pi / 2),
        "lane_11": ((-BOX - REACH, -OFFSET), (-BOX, -OFFSET), 0.0),
        "lane_21": ((BOX + REACH, OFFSET), (BOX, OFFSET), math.pi),
    }
    exits = {
        "lane_32": ((OFFSET, BOX), (OFFSET, BOX + REACH)),
        "lane_42": ((-OFFSET, -BOX), (-OFFSET, -BOX - REACH)),
        "lane_12": ((BOX, -OFFSET), (BOX + REACH, -OFFSET)),
        "lane_15": ((-BOX, OFFSET), (-BOX - REACH, OFFSET)),
    }
    # approach: (straight, left, right) connector ids and their exits
    turns = {
        "lane_31": (("lane_33", "lane_32"), ("lane_35", "lane_15"), ("lane_37", "lane_12")),
        "lane_41": (("lane_43", "lane_42"), ("lane_44", "lane_12"), ("lane_46", "lane_15")),
        "lane_11": (("lane_13", "lane_12"), ("lane_14", "lane_32"), ("lane_16", "lane_42")),
        "lane_21": (("lane_23", "lane_15"), ("lane_24", "lane_42"), ("lane_26", "lane_32")),
    }
    lanes = {}
    for lid, (a, b, _) in approaches.items():
        lanes[lid] = lane(lid, line(a, b))
    for lid, (a, b) in exits.items():
        lanes[lid] = lane(lid, line(a, b))
    for src, ((s_id, s_exit), (l_id, l_exit), (r_id, r_exit)) in turns.items():
        end = approaches[src][1]
        heading = approaches[src][2]
        lanes[s_id] = lane(s_id, line(end, exits[s_exit][0]))
        lanes[l_id] = lane(l_id, arc(end, heading, LEFT_RADIUS, True))
        lanes[r_id] = lane(r_id, arc(end, heading, RIGHT_RADIUS, False))
        for cid, exit_id in ((s_id, s_exit), (l_id, l_exit), (r_id, r_exit)):
            got = lanes[cid]["centerline"][-1]
            want = exits[exit_id][0]
            assert abs(got[0] - want[0]) < 1e-6 and abs(got[1] - want[1]) < 1e-6, (cid, got, want)
            link(lanes, src, cid)
            link(lanes, cid, exit_id)
    write("borregas_ave_lite", lanes)


def straight_road():
    lanes = {"lane_1": lane("lane_1", line((0.0, 0.0), (200.0, 0.0)))}
    write("straight_road", lanes)


def chain3():
    lanes = {
        "a": lane("a", line((0.0, 0.0), (10.0, 0.0))),
        "b": lane("b", line((10.0, 0.0), (20.0, 0.0))),
        "c": lane("c", line((20.0, 0.0), (30.0, 0.0))),
    }
    link(lanes, "a", "b")
    link(lanes, "b", "c")
    write("chain3", lanes)


def diamond():
    # s -> {north, south} -> t; the southern branch is longer.
    lanes = {
        "s": lane("s", line((0.0, 0.0), (10.0, 0.0))),
        "north": lane("north", [[10.0, 0.0], [20.0, 5.0], [30.0, 0.0]]),
        "south": lane("south", [[10.0, 0.0], [20.0, -8.0], [30.0, 0.0]]),
        "t": lane("t", line((30.0, 0.0), (40.0, 0.0))),
    }
    for a, b in (("s", "north"), ("s", "south"), ("north", "t"), ("south", "t")):
        link(lanes, a, b)
    write("diamond", lanes)


def diamond_tie():
    # Mirror-image branches of identical length.
    lanes = {
        "A": lane("A", line((0.0, 0.0), (10.0, 0.0))),
        "B1": lane("B1", [[10.0, 0.0], [20.0, 5.0], [30.0, 0.0]]),
        "B2": lane("B2", [[10.0, 0.0], [20.0, -5.0], [30.0, 0.0]]),
        "C": lane("C", line((30.0, 0.0), (40.0, 0.0))),
    }
    for a, b in (("A", "B1"), ("A", "B2"), ("B1", "C"), ("B2", "C")):
        link(lanes, a, b)
    write("diamond_tie", lanes)


def quarter_circle():
    lanes = {"arc": lane("arc", arc((0.0, 0.0), 0.0, 20.0, True, segments=200))}
    write("quarter_circle", lanes)


if __name__ == "__main__":
    borregas_ave_lite()
    straight_road()
    chain3()
    diamond()
    diamond_tie()
    quarter_circle()
