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

#include "scenofuzz/engine/feedback.hpp"

#include "scenofuzz/sim/collision.hpp"

#include <algorithm>
#include <cmath>

namespace scenofuzz::engine
{
namespace
{

const sim::ActorState * find_ego(const runner::Frame & frame)
{
  for (const auto & actor : frame.actors) {
    if (actor.kind == sim::ActorKind::Ego) {
      return &actor;
    }
  }
  return nullptr;
}

void add_histogram(std::vector<double> & out, const std::vector<double> & values, double low, double high, double zero)
{
  std::vector<double> bins(kHistogramBins, 0.0);
  if (values.empty()) {
    bins[histogram_bin(zero, low, high)] = 1.0;
  } else {
    for (double v : values) {
      bins[histogram_bin(v, low, high)] += 1.0;
    }
    for (double & b : bins) {
      b /= static_cast<double>(values.size());
    }
  }
  out.insert(out.end(), bins.begin(), bins.end());
}

}  // namespace

std::size_t histogram_bin(double value, double low, double high)
{
  const double width = (high - low) / static_cast<double>(kHistogramBins);
  const double k = std::floor((value - low) / width);
  if (!(k > 0.0)) {
    return 0;
  }
  return std::min(static_cast<std::size_t>(k), kHistogramBins - 1);
}

std::vector<double> extract_behavior(const runner::ScenarioRecording & rec)
{
  std::vector<double> speeds;
  std::vector<double> accels;
  std::vector<double> rates;
  const sim::ActorState * previous = nullptr;
  double previous_time = 0.0;
  for (const auto & frame : rec.frames) {
    const sim::ActorState * ego = find_ego(frame);
    if (ego == nullptr) {
      continue;
    }
    speeds.push_back(ego->speed);
    accels.push_back(ego->acceleration);
    if (previous != nullptr && frame.sim_time > previous_time) {
      const double dh = maps::normalize_angle(ego->pose.heading - previous->pose.heading);
      rates.push_back(dh / (frame.sim_time - previous_time));
    }
    previous = ego;
    previous_time = frame.sim_time;
  }
  std::vector<double> out;
  out.reserve(kBehaviorLength);
  add_histogram(out, speeds, 0.0, kSpeedHistogramMax, 0.0);
  add_histogram(out, accels, -kAccelHistogramLimit, kAccelHistogramLimit, 0.0);
  add_histogram(out, rates, -kHeadingRateLimit, kHeadingRateLimit, 0.0);
  return out;
}

double trace_fitness(const runner::ScenarioRecording & rec)
{
  double best = kNoObstacleFitness;
  for (const auto & frame : rec.frames) {
    const sim::ActorState * ego = find_ego(frame);
    if (ego == nullptr) {
      continue;
    }
    for (const auto & other : frame.actors) {
      if (&other != ego) {
        best = std::min(best, sim::obb_distance(*ego, other));
      }
    }
  }
  return best;
}

QualityComponents quality_components(
  const runner::ScenarioRecording & rec, const maps::LaneMap & map, const sim::VehicleParams & params,
  double collision_threshold)
{
  QualityComponents q;
  const double fitness = trace_fitness(rec);
  q.closeness = 1.0 - std::clamp((fitness - collision_threshold) / kClosenessRange, 0.0, 1.0);

  double max_accel = 0.0;
  double max_rate_ratio = 0.0;
  std::size_t off_lane = 0;
  std::size_t counted = 0;
  const sim::ActorState * previous = nullptr;
  double previous_time = 0.0;
  for (const auto & frame : rec.frames) {
    const sim::ActorState * ego = find_ego(frame);
    if (ego == nullptr) {
      continue;
    }
    max_accel = std::max(max_accel, std::abs(ego->acceleration));
    if (previous != nullptr && frame.sim_time > previous_time) {
      const double rate =
        std::abs(maps::normalize_angle(ego->pose.heading - previous->pose.heading)) / (frame.sim_time - previous_time);
      const double limit = std::max(previous->speed, 0.5) * std::tan(sim::kMaxSteering) / params.wheelbase;
      max_rate_ratio = std::max(max_rate_ratio, rate / limit);
    }
    if (!map.lanes().empty()) {
      const auto proj = maps::project(map, ego->pose.position());
      if (std::abs(proj.lateral_offset) > 0.5 * map.lane(proj.lane_id).width) {
        ++off_lane;
      }
    }
    ++counted;
    previous = ego;
    previous_time = frame.sim_time;
  }
  q.acceleration = std::clamp(max_accel / params.a_max, 0.0, 1.0);
  q.heading_rate = std::clamp(max_rate_ratio, 0.0, 1.0);
  q.route_deviation = counted == 0 ? 0.0 : static_cast<double>(off_lane) / static_cast<double>(counted);
  return q;
}

Feedback make_feedback(
  const runner::ScenarioRecording & rec, const maps::LaneMap & map, const sim::VehicleParams & params,
  double collision_threshold)
{
  Feedback fb;
  fb.fitness = trace_fitness(rec);
  fb.behavior_vector = extract_behavior(rec);
  fb.quality_score = quality_components(rec, map, params, collision_threshold).score();
  fb.verdict = rec.verdict;
  return fb;
}

}  // namespace scenofuzz::engine
