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

#ifndef SCENOFUZZ__ENGINE__ALGORITHMS_HPP_
#define SCENOFUZZ__ENGINE__ALGORITHMS_HPP_

#include "scenofuzz/common/json.hpp"
#include "scenofuzz/common/rng.hpp"
#include "scenofuzz/engine/operators.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace scenofuzz::engine
{

struct AlgorithmParams
{
  std::string name{"random"};
  double run_hour{2.0};
  std::size_t population_size{4};
  double pm{0.6};
  double pc{0.6};
  double local_run_hour{0.5};
  double archive_threshold{0.2};
  std::size_t surrogate_pool{10};
  std::map<std::string, double> extras;

  double extra(const std::string & key, double fallback) const;

  friend bool operator==(const AlgorithmParams &, const AlgorithmParams &) = default;
};

/// Names accepted by make_algorithm.
const std::vector<std::string> & algorithm_names();

/// Throws std::invalid_argument naming the offending field.
void check_params(const AlgorithmParams & params);

/// What an algorithm learns about one evaluated vector.
struct EvalResult
{
  double fitness{0.0};
  double quality{0.0};
  std::vector<double> behavior;
  bool violation{false};
};

/// Gene groups rotated through by quality-guided fuzzing.
enum class GeneGroup { Speed = 0, Offset = 1, Delay = 2 };

struct SearchProblem
{
  Bounds bounds;
  std::vector<GeneGroup> groups;  ///< one per gene; may be empty
};

/// Batch state machine. The driver alternates propose() and ingest(); all
/// randomness flows through the Rng passed to propose().
class SearchAlgorithm
{
public:
  virtual ~SearchAlgorithm() = default;

  virtual std::string name() const = 0;

  /// `elapsed_hours` is the campaign's budget clock.
  virtual std::vector<Genes> propose(Rng & rng, double elapsed_hours) = 0;

  /// Results for a prefix of the last proposed batch, in order.
  virtual void ingest(const std::vector<Genes> & batch, const std::vector<EvalResult> & results) = 0;

  virtual Json save_state() const = 0;
  virtual void load_state(const Json & state) = 0;
};

std::unique_ptr<SearchAlgorithm> make_algorithm(const AlgorithmParams & params, const SearchProblem & problem);

// Concrete algorithms, exposed for inspection in tests.

class RandomSearch : public SearchAlgorithm
{
public:
  RandomSearch(AlgorithmParams params, SearchProblem problem);
  std::string name() const override { return "random"; }
  std::vector<Genes> propose(Rng & rng, double elapsed_hours) override;
  void ingest(const std::vector<Genes> &, const std::vector<EvalResult> &) override {}
  Json save_state() const override { return Json::object(); }
  void load_state(const Json &) override {}

private:
  AlgorithmParams params_;
  SearchProblem problem_;
};

/// Genetic global search with a stagnation-triggered local phase.
class AvFuzzer : public SearchAlgorithm
{
public:
  static constexpr std::size_t kStagnationGenerations = 5;
  static constexpr double kGlobalSigma = 0.10;
  static constexpr double kLocalSigma = 0.025;

  AvFuzzer(AlgorithmParams params, SearchProblem problem);
  std::string name() const override { return "avfuzzer"; }
  std::vector<Genes> propose(Rng & rng, double elapsed_hours) override;
  void ingest(const std::vector<Genes> & batch, const std::vector<EvalResult> & results) override;
  Json save_state() const override;
  void load_state(const Json & state) override;

  const std::vector<Genes> & population() const { return population_; }
  const std::vector<double> & population_fitness() const { return fitness_; }
  bool in_local_phase() const { return local_; }
  std::size_t generation() const { return generation_; }
  std::size_t local_entries() const { return local_entries_; }

private:
  AlgorithmParams params_;
  SearchProblem problem_;
  std::vector<Genes> population_;
  std::vector<double> fitness_;
  Genes best_;
  double best_fitness_{0.0};
  bool have_best_{false};
  std::size_t stagnation_{0};
  std::size_t generation_{0};
  bool local_{false};
  double local_until_{0.0};
  std::size_t local_entries_{0};
};

/// Novelty-driven fuzzing over ego behavior vectors.
class BehavExplor : public SearchAlgorithm
{
public:
  static constexpr std::size_t kMaxRetries = 5;
  static constexpr double kSigma = 0.10;

  struct Seed
  {
    Genes genes;
    double fitness{0.0};
    double novelty{0.0};
    std::size_t retries{0};
  };

  BehavExplor(AlgorithmParams params, SearchProblem problem);
  std::string name() const override { return "behavexplor"; }
  std::vector<Genes> propose(Rng & rng, double elapsed_hours) override;
  void ingest(const std::vector<Genes> & batch, const std::vector<EvalResult> & results) override;
  Json save_state() const override;
  void load_state(const Json & state) override;

  /// Distance to the nearest archived behavior, +inf when the archive is empty.
  double novelty(const std::vector<double> & behavior) const;
  const std::vector<std::vector<double>> & archive() const { return archive_; }
  const std::vector<Seed> & seeds() const { return seeds_; }

private:
  AlgorithmParams params_;
  SearchProblem problem_;
  std::vector<std::vector<double>> archive_;
  std::vector<Seed> seeds_;
};

/// Surrogate-assisted search: IDW interpolation optimized by a small GA.
class Samota : public SearchAlgorithm
{
public:
  static constexpr std::size_t kProposals = 4;
  static constexpr double kSpacingFraction = 0.05;

  Samota(AlgorithmParams params, SearchProblem problem);
  std::string name() const override { return "samota"; }
  std::vector<Genes> propose(Rng & rng, double elapsed_hours) override;
  void ingest(const std::vector<Genes> & batch, const std::vector<EvalResult> & results) override;
  Json save_state() const override;
  void load_state(const Json & state) override;

  const std::vector<Genes> & dataset_points() const { return points_; }
  const std::vector<double> & dataset_values() const { return values_; }
  std::size_t fallback_batches() const { return fallbacks_; }

private:
  std::vector<Genes> optimize_surrogate(Rng & rng) const;

  AlgorithmParams params_;
  SearchProblem problem_;
  std::vector<Genes> points_;
  std::vector<double> values_;
  std::size_t fallbacks_{0};
};

/// Quality-guided fuzzing with per-seed rotation over gene groups.
class DriveFuzz : public SearchAlgorithm
{
public:
  static constexpr double kSigma = 0.15;
  static constexpr std::size_t kMaxStaleRounds = 6;

  DriveFuzz(AlgorithmParams params, SearchProblem problem);
  std::string name() const override { return "drivefuzz"; }
  std::vector<Genes> propose(Rng & rng, double elapsed_hours) override;
  void ingest(const std::vector<Genes> & batch, const std::vector<EvalResult> & results) override;
  Json save_state() const override;
  void load_state(const Json & state) override;

  bool has_parent() const { return have_parent_; }
  const Genes & parent() const { return parent_; }
  double parent_quality() const { return parent_quality_; }
  std::size_t stage() const { return stage_; }

private:
  AlgorithmParams params_;
  SearchProblem problem_;
  Genes parent_;
  double parent_quality_{0.0};
  bool have_parent_{false};
  std::size_t stage_{0};
  std::size_t stale_{0};
};

}  // namespace scenofuzz::engine

#endif  // SCENOFUZZ__ENGINE__ALGORITHMS_HPP_
