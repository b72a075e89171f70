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

#include "scenofuzz/engine/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scenofuzz::engine
{

Genes uniform_sample(const Bounds & bounds, Rng & rng)
{
  Genes genes;
  genes.reserve(bounds.size());
  for (const auto & b : bounds) {
    genes.push_back(rng.uniform(b.low, b.high));
  }
  return genes;
}

Genes clamp_genes(Genes genes, const Bounds & bounds)
{
  for (std::size_t i = 0; i < genes.size(); ++i) {
    genes[i] = std::clamp(genes[i], bounds[i].low, bounds[i].high);
  }
  return genes;
}

std::size_t tournament_select(const std::vector<double> & fitness, Rng & rng)
{
  if (fitness.empty()) {
    throw std::invalid_argument("tournament over an empty population");
  }
  const std::size_t a = rng.index(fitness.size());
  const std::size_t b = rng.index(fitness.size());
  return fitness[b] < fitness[a] ? b : a;
}

CrossoverResult one_point_crossover(const Genes & a, const Genes & b, double pc, Rng & rng)
{
  CrossoverResult out{a, b, false};
  if (!rng.bernoulli(pc) || a.size() < 2 || a.size() != b.size()) {
    return out;
  }
  const std::size_t cut = 1 + rng.index(a.size() - 1);
  for (std::size_t i = cut; i < a.size(); ++i) {
    std::swap(out.first[i], out.second[i]);
  }
  out.crossed = true;
  return out;
}

MutationResult gaussian_mutation(const Genes & genes, const Bounds & bounds, double pm, double sigma_fraction, Rng & rng)
{
  MutationResult out{genes, 0};
  for (std::size_t i = 0; i < genes.size(); ++i) {
    if (!rng.bernoulli(pm)) {
      continue;
    }
    const double sigma = sigma_fraction * (bounds[i].high - bounds[i].low);
    out.genes[i] = std::clamp(genes[i] + sigma * rng.normal(), bounds[i].low, bounds[i].high);
    ++out.mutated;
  }
  return out;
}

double euclidean(const Genes & a, const Genes & b)
{
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double space_diagonal(const Bounds & bounds)
{
  double sum = 0.0;
  for (const auto & b : bounds) {
    sum += (b.high - b.low) * (b.high - b.low);
  }
  return std::sqrt(sum);
}

void IdwSurrogate::fit(std::vector<Genes> points, std::vector<double> values)
{
  if (points.size() != values.size() || points.empty()) {
    throw std::invalid_argument("surrogate needs one value per point and at least one point");
  }
  points_ = std::move(points);
  values_ = std::move(values);
}

double IdwSurrogate::predict(const Genes & x) const
{
  if (points_.empty()) {
    throw std::logic_error("surrogate has not been fitted");
  }
  double weight_sum = 0.0;
  double value_sum = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double d = euclidean(points_[i], x);
    if (d == 0.0) {
      return values_[i];
    }
    const double w = std::pow(d, -power_);
    if (!std::isfinite(w)) {
      return values_[i];
    }
    weight_sum += w;
    value_sum += w * values_[i];
  }
  const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  return std::clamp(value_sum / weight_sum, *lo, *hi);
}

}  // namespace scenofuzz::engine
