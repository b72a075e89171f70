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

#ifndef SCENOFUZZ__ENGINE__OPERATORS_HPP_
#define SCENOFUZZ__ENGINE__OPERATORS_HPP_

#include "scenofuzz/common/rng.hpp"
#include "scenofuzz/scenario/scenario.hpp"

#include <utility>
#include <vector>

namespace scenofuzz::engine
{

using Genes = std::vector<double>;
using Bounds = std::vector<scenario::GeneBounds>;

Genes uniform_sample(const Bounds & bounds, Rng & rng);

Genes clamp_genes(Genes genes, const Bounds & bounds);

/// Index of the fitter (lower) of two uniformly drawn entries; ties keep the
/// first draw.
std::size_t tournament_select(const std::vector<double> & fitness, Rng & rng);

struct CrossoverResult
{
  Genes first;
  Genes second;
  bool crossed{false};
};

/// With probability pc swaps the tails after a uniformly drawn cut point in
/// [1, n-1]. Vectors shorter than two genes never cross.
CrossoverResult one_point_crossover(const Genes & a, const Genes & b, double pc, Rng & rng);

struct MutationResult
{
  Genes genes;
  std::size_t mutated{0};
};

/// Each gene independently, with probability pm, receives Gaussian noise of
/// sigma = sigma_fraction * (high - low) and is clamped back into bounds.
MutationResult gaussian_mutation(const Genes & genes, const Bounds & bounds, double pm, double sigma_fraction, Rng & rng);

double euclidean(const Genes & a, const Genes & b);

/// Length of the bounding box diagonal.
double space_diagonal(const Bounds & bounds);

/// Inverse-distance-weighted interpolation: exact at data sites and a convex
/// combination of the observed values everywhere else.
class IdwSurrogate
{
public:
  explicit IdwSurrogate(double power = 2.0) : power_(power) {}

  void fit(std::vector<Genes> points, std::vector<double> values);
  double predict(const Genes & x) const;

  std::size_t size() const { return points_.size(); }

private:
  double power_;
  std::vector<Genes> points_;
  std::vector<double> values_;
};

}  // namespace scenofuzz::engine

#endif  // SCENOFUZZ__ENGINE__OPERATORS_HPP_
