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

#ifndef SCENOFUZZ__ENGINE__FEEDBACK_HPP_
#define SCENOFUZZ__ENGINE__FEEDBACK_HPP_

#include "scenofuzz/maps/lane_map.hpp"
#include "scenofuzz/runner/runner.hpp"

#include <vector>

namespace scenofuzz::engine
{

/// Fitness reported when the ego never shares the road with anyone.
inline constexpr double kNoObstacleFitness = 1e9;

inline constexpr std::size_t kHistogramBins = 8;
inline constexpr std::size_t kBehaviorLength = 3 * kHistogramBins;
inline constexpr double kSpeedHistogramMax = 30.0;     // m/s
inline constexpr double kAccelHistogramLimit = 6.0;    // m/s^2, symmetric
inline constexpr double kHeadingRateLimit = 1.0;       // rad/s, symmetric
inline constexpr double kClosenessRange = 10.0;        // m

struct Feedback
{
  double fitness{kNoObstacleFitness};
  std::vector<double> behavior_vector;
  double quality_score{0.0};
  runner::Verdict verdict;
};

/// Histogram bin of `value` over [low, high) split into kHistogramBins;
/// values outside are clamped into the edge bins.
std::size_t histogram_bin(double value, double low, double high);

/// Three L1-normalized histograms: ego speed, longitudinal acceleration and
/// heading rate. An empty series puts all of its mass in the zero bin.
std::vector<double> extract_behavior(const runner::ScenarioRecording & rec);

/// Minimum ego-to-other OBB distance over all frames.
double trace_fitness(const runner::ScenarioRecording & rec);

struct QualityComponents
{
  double closeness{0.0};
  double acceleration{0.0};
  double heading_rate{0.0};
  double route_deviation{0.0};

  double score() const { return (closeness + acceleration + heading_rate + route_deviation) / 4.0; }
};

QualityComponents quality_components(
  const runner::ScenarioRecording & rec, const maps::LaneMap & map, const sim::VehicleParams & params,
  double collision_threshold);

Feedback make_feedback(
  const runner::ScenarioRecording & rec, const maps::LaneMap & map, const sim::VehicleParams & params,
  double collision_threshold);

}  // namespace scenofuzz::engine

#endif  // SCENOFUZZ__ENGINE__FEEDBACK_HPP_
