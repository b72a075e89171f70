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

#include "scenofuzz/engine/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace scenofuzz::engine
{
namespace
{

constexpr double kImprovementEpsilon = 1e-12;
constexpr double kNoveltyCap = 1e9;

std::vector<Genes> random_batch(const Bounds & bounds, std::size_t n, Rng & rng)
{
  std::vector<Genes> batch;
  batch.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    batch.push_back(uniform_sample(bounds, rng));
  }
  return batch;
}

Json genes_list_to_json(const std::vector<Genes> & list)
{
  Json out = Json::array();
  for (const auto & g : list) {
    out.push_back(g);
  }
  return out;
}

std::vector<Genes> genes_list_from_json(const Json & doc)
{
  std::vector<Genes> out;
  for (const auto & g : doc) {
    out.push_back(g.get<Genes>());
  }
  return out;
}

std::size_t argmin(const std::vector<double> & values)
{
  return static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
}

}  // namespace

double AlgorithmParams::extra(const std::string & key, double fallback) const
{
  const auto it = extras.find(key);
  return it == extras.end() ? fallback : it->second;
}

const std::vector<std::string> & algorithm_names()
{
  static const std::vector<std::string> names{"random", "avfuzzer", "behavexplor", "samota", "drivefuzz"};
  return names;
}

void check_params(const AlgorithmParams & params)
{
  const auto & names = algorithm_names();
  if (std::find(names.begin(), names.end(), params.name) == names.end()) {
    throw std::invalid_argument("name: unknown algorithm '" + params.name + "'");
  }
  if (!(params.run_hour > 0.0)) {
    throw std::invalid_argument("run_hour: must be positive");
  }
  if (!(params.pm >= 0.0 && params.pm <= 1.0)) {
    throw std::invalid_argument("pm: must lie in [0, 1]");
  }
  if (!(params.pc >= 0.0 && params.pc <= 1.0)) {
    throw std::invalid_argument("pc: must lie in [0, 1]");
  }
  if (!(params.local_run_hour >= 0.0)) {
    throw std::invalid_argument("local_run_hour: must be non-negative");
  }
  if (params.population_size < 1 || (params.name != "random" && params.population_size < 2)) {
    throw std::invalid_argument("population_size: must be at least 2");
  }
  if (params.name == "behavexplor" && !(params.archive_threshold > 0.0)) {
    throw std::invalid_argument("archive_threshold: must be positive");
  }
  if (params.name == "samota" && params.surrogate_pool < 10) {
    throw std::invalid_argument("surrogate_pool: must be at least 10");
  }
}

std::unique_ptr<SearchAlgorithm> make_algorithm(const AlgorithmParams & params, const SearchProblem & problem)
{
  check_params(params);
  if (params.name == "random") {
    return std::make_unique<RandomSearch>(params, problem);
  }
  if (params.name == "avfuzzer") {
    return std::make_unique<AvFuzzer>(params, problem);
  }
  if (params.name == "behavexplor") {
    return std::make_unique<BehavExplor>(params, problem);
  }
  if (params.name == "samota") {
    return std::make_unique<Samota>(params, problem);
  }
  return std::make_unique<DriveFuzz>(params, problem);
}

// Random

RandomSearch::RandomSearch(AlgorithmParams params, SearchProblem problem)
: params_(std::move(params)), problem_(std::move(problem))
{
}

std::vector<Genes> RandomSearch::propose(Rng & rng, double)
{
  return random_batch(problem_.bounds, params_.population_size, rng);
}

// AVFuzzer

AvFuzzer::AvFuzzer(AlgorithmParams params, SearchProblem problem)
: params_(std::move(params)), problem_(std::move(problem))
{
}

std::vector<Genes> AvFuzzer::propose(Rng & rng, double elapsed_hours)
{
  const std::size_t n = params_.population_size;
  if (population_.empty()) {
    return random_batch(problem_.bounds, n, rng);
  }
  if (!local_ && stagnation_ >= kStagnationGenerations) {
    local_ = true;
    local_until_ = elapsed_hours + params_.local_run_hour;
    stagnation_ = 0;
    ++local_entries_;
  }
  if (local_ && elapsed_hours >= local_until_) {
    local_ = false;
  }

  std::vector<Genes> children;
  children.reserve(n - 1);
  if (local_) {
    while (children.size() < n - 1) {
      children.push_back(gaussian_mutation(best_, problem_.bounds, params_.pm, kLocalSigma, rng).genes);
    }
    return children;
  }
  while (children.size() < n - 1) {
    const Genes & a = population_[tournament_select(fitness_, rng)];
    const Genes & b = population_[tournament_select(fitness_, rng)];
    auto crossed = one_point_crossover(a, b, params_.pc, rng);
    children.push_back(gaussian_mutation(crossed.first, problem_.bounds, params_.pm, kGlobalSigma, rng).genes);
    if (children.size() < n - 1) {
      children.push_back(gaussian_mutation(crossed.second, problem_.bounds, params_.pm, kGlobalSigma, rng).genes);
    }
  }
  return children;
}

void AvFuzzer::ingest(const std::vector<Genes> & batch, const std::vector<EvalResult> & results)
{
  std::vector<Genes> next;
  std::vector<double> next_fitness;
  if (!population_.empty()) {
    const std::size_t elite = argmin(fitness_);
    next.push_back(population_[elite]);
    next_fitness.push_back(fitness_[elite]);
  }
  for (std::size_t i = 0; i < results.size(); ++i) {
    next.push_back(batch[i]);
    next_fitness.push_back(results[i].fitness);
  }
  if (next.empty()) {
    return;
  }
  population_ = std::move(next);
  fitness_ = std::move(next_fitness);
  ++generation_;

  const std::size_t best = argmin(fitness_);
  if (!have_best_ || fitness_[best] < best_fitness_ - kImprovementEpsilon) {
    best_ = population_[best];
    best_fitness_ = fitness_[best];
    have_best_ = true;
    stagnation_ = 0;
  } else {
    ++stagnation_;
  }
}

Json AvFuzzer::save_state() const
{
  return {
    {"population", genes_list_to_json(population_)},
    {"fitness", fitness_},
    {"best", best_},
    {"best_fitness", best_fitness_},
    {"have_best", have_best_},
    {"stagnation", stagnation_},
    {"generation", generation_},
    {"local", local_},
    {"local_until", local_until_},
    {"local_entries", local_entries_},
  };
}

void AvFuzzer::load_state(const Json & state)
{
  population_ = genes_list_from_json(state.at("population"));
  fitness_ = state.at("fitness").get<std::vector<double>>();
  best_ = state.at("best").get<Genes>();
  best_fitness_ = state.at("best_fitness").get<double>();
  have_best_ = state.at("have_best").get<bool>();
  stagnation_ = state.at("stagnation").get<std::size_t>();
  generation_ = state.at("generation").get<std::size_t>();
  local_ = state.at("local").get<bool>();
  local_until_ = state.at("local_until").get<double>();
  local_entries_ = state.at("local_entries").get<std::size_t>();
}

// BehAVExplor

BehavExplor::BehavExplor(AlgorithmParams params, SearchProblem problem)
: params_(std::move(params)), problem_(std::move(problem))
{
}

double BehavExplor::novelty(const std::vector<double> & behavior) const
{
  double best = std::numeric_limits<double>::infinity();
  for (const auto & entry : archive_) {
    best = std::min(best, euclidean(entry, behavior));
  }
  return best;
}

std::vector<Genes> BehavExplor::propose(Rng & rng, double)
{
  const std::size_t n = params_.population_size;
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < seeds_.size(); ++i) {
    if (seeds_[i].retries < kMaxRetries) {
      eligible.push_back(i);
    }
  }
  if (eligible.empty()) {
    return random_batch(problem_.bounds, n, rng);
  }

  // Rank-sum of novelty (descending) and fitness (ascending).
  std::vector<std::size_t> by_novelty = eligible;
  std::stable_sort(by_novelty.begin(), by_novelty.end(), [this](std::size_t a, std::size_t b) {
    return seeds_[a].novelty > seeds_[b].novelty;
  });
  std::vector<std::size_t> by_fitness = eligible;
  std::stable_sort(by_fitness.begin(), by_fitness.end(), [this](std::size_t a, std::size_t b) {
    return seeds_[a].fitness < seeds_[b].fitness;
  });
  std::size_t chosen = eligible.front();
  std::size_t chosen_rank = std::numeric_limits<std::size_t>::max();
  for (std::size_t idx : eligible) {
    const auto rn = std::find(by_novelty.begin(), by_novelty.end(), idx) - by_novelty.begin();
    const auto rf = std::find(by_fitness.begin(), by_fitness.end(), idx) - by_fitness.begin();
    const auto rank = static_cast<std::size_t>(rn + rf);
    if (rank < chosen_rank) {
      chosen_rank = rank;
      chosen = idx;
    }
  }
  Seed & seed = seeds_[chosen];
  ++seed.retries;

  std::vector<Genes> children;
  children.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    children.push_back(gaussian_mutation(seed.genes, problem_.bounds, params_.pm, kSigma, rng).genes);
  }
  return children;
}

void BehavExplor::ingest(const std::vector<Genes> & batch, const std::vector<EvalResult> & results)
{
  for (std::size_t i = 0; i < results.size(); ++i) {
    const double nov = novelty(results[i].behavior);
    if (nov > params_.archive_threshold) {
      archive_.push_back(results[i].behavior);
      seeds_.push_back({batch[i], results[i].fitness, std::min(nov, kNoveltyCap), 0});
    }
  }
}

Json BehavExplor::save_state() const
{
  Json seeds = Json::array();
  for (const auto & s : seeds_) {
    seeds.push_back({{"genes", s.genes}, {"fitness", s.fitness}, {"novelty", s.novelty}, {"retries", s.retries}});
  }
  return {{"archive", genes_list_to_json(archive_)}, {"seeds", seeds}};
}

void BehavExplor::load_state(const Json & state)
{
  archive_ = genes_list_from_json(state.at("archive"));
  seeds_.clear();
  for (const auto & s : state.at("seeds")) {
    seeds_.push_back(
      {s.at("genes").get<Genes>(), s.at("fitness").get<double>(), s.at("novelty").get<double>(),
       s.at("retries").get<std::size_t>()});
  }
}

// SAMOTA

Samota::Samota(AlgorithmParams params, SearchProblem problem)
: params_(std::move(params)), problem_(std::move(problem))
{
}

std::vector<Genes> Samota::propose(Rng & rng, double)
{
  if (points_.size() < params_.surrogate_pool) {
    return random_batch(problem_.bounds, params_.surrogate_pool - points_.size(), rng);
  }
  const bool degenerate =
    std::all_of(points_.begin(), points_.end(), [this](const Genes & p) { return p == points_.front(); });
  if (!degenerate) {
    auto proposals = optimize_surrogate(rng);
    if (!proposals.empty()) {
      return proposals;
    }
  }
  ++fallbacks_;
  return random_batch(problem_.bounds, params_.population_size, rng);
}

std::vector<Genes> Samota::optimize_surrogate(Rng & rng) const
{
  const Bounds & bounds = problem_.bounds;
  if (bounds.empty()) {
    return {};
  }
  IdwSurrogate surrogate;
  surrogate.fit(points_, values_);

  const std::size_t pop = static_cast<std::size_t>(params_.extra("surrogate_population", 32));
  const std::size_t generations = static_cast<std::size_t>(params_.extra("surrogate_generations", 25));
  const double gene_rate = std::max(1.0 / static_cast<double>(bounds.size()), 0.25);

  // Seed the GA with the best observed points plus fresh random samples.
  std::vector<std::size_t> order(points_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) { return values_[a] < values_[b]; });
  std::vector<Genes> population;
  for (std::size_t i = 0; i < order.size() && population.size() < pop / 2; ++i) {
    population.push_back(gaussian_mutation(points_[order[i]], bounds, 1.0, 0.10, rng).genes);
  }
  while (population.size() < pop) {
    population.push_back(uniform_sample(bounds, rng));
  }

  std::vector<Genes> seen;
  std::vector<double> seen_value;
  auto score = [&](const std::vector<Genes> & group) {
    std::vector<double> values;
    values.reserve(group.size());
    for (const auto & g : group) {
      values.push_back(surrogate.predict(g));
      seen.push_back(g);
      seen_value.push_back(values.back());
    }
    return values;
  };
  std::vector<double> fitness = score(population);
  for (std::size_t gen = 0; gen < generations; ++gen) {
    std::vector<Genes> next{population[argmin(fitness)]};
    while (next.size() < pop) {
      const Genes & a = population[tournament_select(fitness, rng)];
      const Genes & b = population[tournament_select(fitness, rng)];
      auto crossed = one_point_crossover(a, b, 0.9, rng);
      next.push_back(gaussian_mutation(crossed.first, bounds, gene_rate, 0.05, rng).genes);
      if (next.size() < pop) {
        next.push_back(gaussian_mutation(crossed.second, bounds, gene_rate, 0.05, rng).genes);
      }
    }
    population = std::move(next);
    fitness = score(population);
  }

  // Greedy pick of the lowest predictions, kept apart from each other and
  // from everything already simulated.
  const double spacing = kSpacingFraction * space_diagonal(bounds);
  std::vector<std::size_t> ranked(seen.size());
  std::iota(ranked.begin(), ranked.end(), 0);
  std::stable_sort(
    ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) { return seen_value[a] < seen_value[b]; });
  std::vector<Genes> picked;
  for (std::size_t idx : ranked) {
    const Genes & g = seen[idx];
    const auto near = [&](const Genes & other) { return euclidean(g, other) < spacing; };
    if (std::any_of(points_.begin(), points_.end(), near) || std::any_of(picked.begin(), picked.end(), near)) {
      continue;
    }
    picked.push_back(g);
    if (picked.size() == kProposals) {
      break;
    }
  }
  return picked;
}

void Samota::ingest(const std::vector<Genes> & batch, const std::vector<EvalResult> & results)
{
  for (std::size_t i = 0; i < results.size(); ++i) {
    points_.push_back(batch[i]);
    values_.push_back(results[i].fitness);
  }
}

Json Samota::save_state() const
{
  return {{"points", genes_list_to_json(points_)}, {"values", values_}, {"fallbacks", fallbacks_}};
}

void Samota::load_state(const Json & state)
{
  points_ = genes_list_from_json(state.at("points"));
  values_ = state.at("values").get<std::vector<double>>();
  fallbacks_ = state.at("fallbacks").get<std::size_t>();
}

// DriveFuzz

DriveFuzz::DriveFuzz(AlgorithmParams params, SearchProblem problem)
: params_(std::move(params)), problem_(std::move(problem))
{
}

std::vector<Genes> DriveFuzz::propose(Rng & rng, double)
{
  const std::size_t n = params_.population_size;
  if (!have_parent_) {
    return random_batch(problem_.bounds, n, rng);
  }
  // Rotation order: speeds, offsets, delays; groups without genes are skipped.
  std::vector<std::size_t> members;
  for (std::size_t attempt = 0; attempt < 3 && members.empty(); ++attempt) {
    const auto group = static_cast<GeneGroup>((stage_ + attempt) % 3);
    for (std::size_t i = 0; i < problem_.groups.size(); ++i) {
      if (problem_.groups[i] == group) {
        members.push_back(i);
      }
    }
  }
  if (members.empty()) {
    members.resize(problem_.bounds.size());
    std::iota(members.begin(), members.end(), 0);
  }

  std::vector<Genes> children;
  children.reserve(n);
  for (std::size_t c = 0; c < n; ++c) {
    Genes child = parent_;
    bool changed = false;
    for (std::size_t i : members) {
      if (rng.bernoulli(params_.pm)) {
        const auto & b = problem_.bounds[i];
        child[i] = std::clamp(child[i] + kSigma * (b.high - b.low) * rng.normal(), b.low, b.high);
        changed = true;
      }
    }
    if (!changed && !members.empty()) {
      const std::size_t i = members[rng.index(members.size())];
      const auto & b = problem_.bounds[i];
      child[i] = std::clamp(child[i] + kSigma * (b.high - b.low) * rng.normal(), b.low, b.high);
    }
    children.push_back(std::move(child));
  }
  return children;
}

void DriveFuzz::ingest(const std::vector<Genes> & batch, const std::vector<EvalResult> & results)
{
  if (results.empty()) {
    return;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].quality > results[best].quality) {
      best = i;
    }
  }
  if (!have_parent_) {
    parent_ = batch[best];
    parent_quality_ = results[best].quality;
    have_parent_ = true;
    stage_ = 0;
    stale_ = 0;
    return;
  }
  if (results[best].quality > parent_quality_) {
    parent_ = batch[best];
    parent_quality_ = results[best].quality;
    stale_ = 0;
  } else if (++stale_ >= kMaxStaleRounds) {
    have_parent_ = false;
  }
  stage_ = (stage_ + 1) % 3;
}

Json DriveFuzz::save_state() const
{
  return {
    {"parent", parent_}, {"parent_quality", parent_quality_}, {"have_parent", have_parent_},
    {"stage", stage_},   {"stale", stale_},
  };
}

void DriveFuzz::load_state(const Json & state)
{
  parent_ = state.at("parent").get<Genes>();
  parent_quality_ = state.at("parent_quality").get<double>();
  have_parent_ = state.at("have_parent").get<bool>();
  stage_ = state.at("stage").get<std::size_t>();
  stale_ = state.at("stale").get<std::size_t>();
}

}  // namespace scenofuzz::engine
