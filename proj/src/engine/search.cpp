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

#include "scenofuzz/engine/search.hpp"

#include <chrono>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

namespace scenofuzz::engine
{
namespace
{

const std::set<std::string> kCoreKeys{"index", "batch", "seed", "genes", "fitness", "quality", "behavior", "violation"};

using Clock = std::chrono::steady_clock;

struct Checkpoint
{
  std::size_t batch_index{0};
  std::size_t batch_start{0};
  std::vector<Genes> pending;
  std::string rng_state;
  Json algorithm_state;
  double elapsed_seconds{0.0};
};

Json checkpoint_to_json(const Checkpoint & cp, const SearchAlgorithm & algorithm, std::uint64_t seed)
{
  Json pending = Json::array();
  for (const auto & g : cp.pending) {
    pending.push_back(g);
  }
  return {
    {"version", 1},
    {"algorithm", algorithm.name()},
    {"seed", seed},
    {"batch_index", cp.batch_index},
    {"batch_start", cp.batch_start},
    {"pending", pending},
    {"rng", cp.rng_state},
    {"algorithm_state", cp.algorithm_state},
    {"elapsed_seconds", cp.elapsed_seconds},
  };
}

Checkpoint checkpoint_from_json(const Json & doc, const SearchAlgorithm & algorithm, std::uint64_t seed)
{
  const JsonReader r(doc, "");
  r.expect_keys(
    {"version", "algorithm", "seed", "batch_index", "batch_start", "pending", "rng", "algorithm_state",
     "elapsed_seconds"});
  if (r.at("version").integer() != 1) {
    r.at("version").fail("unsupported checkpoint version");
  }
  if (r.at("algorithm").string() != algorithm.name()) {
    r.at("algorithm").fail("checkpoint belongs to algorithm '" + r.at("algorithm").string() + "'");
  }
  if (r.at("seed").unsigned_integer() != seed) {
    r.at("seed").fail("checkpoint was written with a different seed");
  }
  Checkpoint cp;
  cp.batch_index = r.at("batch_index").unsigned_integer();
  cp.batch_start = r.at("batch_start").unsigned_integer();
  for (const auto & g : doc.at("pending")) {
    cp.pending.push_back(g.get<Genes>());
  }
  cp.rng_state = r.at("rng").string();
  cp.algorithm_state = doc.at("algorithm_state");
  cp.elapsed_seconds = r.at("elapsed_seconds").number();
  return cp;
}

/// Drops an unterminated trailing line left behind by a killed writer.
void truncate_partial_line(const std::filesystem::path & path)
{
  if (!std::filesystem::exists(path)) {
    return;
  }
  const std::string text = read_text_file(path);
  const auto last_newline = text.rfind('\n');
  const std::size_t keep = last_newline == std::string::npos ? 0 : last_newline + 1;
  if (keep != text.size()) {
    std::filesystem::resize_file(path, keep);
  }
}

}  // namespace

double budget_clock_hours(const Budget & budget, std::size_t evaluations, double wall_seconds)
{
  if (budget.max_evaluations) {
    if (*budget.max_evaluations == 0) {
      return budget.run_hour;
    }
    return budget.run_hour * static_cast<double>(evaluations) / static_cast<double>(*budget.max_evaluations);
  }
  return wall_seconds / 3600.0;
}

Json log_entry_to_json(const LogEntry & entry)
{
  Json doc = entry.payload.is_object() ? entry.payload : Json::object();
  doc["index"] = entry.index;
  doc["batch"] = entry.batch;
  doc["seed"] = entry.seed;
  doc["genes"] = entry.genes;
  doc["fitness"] = entry.result.fitness;
  doc["quality"] = entry.result.quality;
  doc["behavior"] = entry.result.behavior;
  doc["violation"] = entry.result.violation;
  return doc;
}

LogEntry log_entry_from_json(const Json & doc)
{
  const JsonReader r(doc, "");
  LogEntry entry;
  entry.index = r.at("index").unsigned_integer();
  entry.batch = r.at("batch").unsigned_integer();
  entry.seed = r.at("seed").unsigned_integer();
  entry.genes = doc.at("genes").get<Genes>();
  entry.result.fitness = r.at("fitness").number();
  entry.result.quality = r.at("quality").number();
  entry.result.behavior = doc.at("behavior").get<std::vector<double>>();
  entry.result.violation = r.at("violation").boolean();
  for (const auto & [key, value] : doc.items()) {
    if (kCoreKeys.count(key) == 0) {
      entry.payload[key] = value;
    }
  }
  return entry;
}

std::vector<LogEntry> read_log(const std::filesystem::path & path)
{
  std::vector<LogEntry> entries;
  if (!std::filesystem::exists(path)) {
    return entries;
  }
  const std::string text = read_text_file(path);
  std::size_t start = 0;
  while (true) {
    const auto end = text.find('\n', start);
    if (end == std::string::npos) {
      break;
    }
    if (end > start) {
      entries.push_back(log_entry_from_json(parse_json(std::string_view(text).substr(start, end - start))));
    }
    start = end + 1;
  }
  return entries;
}

SearchOutcome run_search(SearchAlgorithm & algorithm, const Objective & objective, const SearchOptions & options)
{
  const auto started = Clock::now();
  SearchOutcome outcome;
  Rng rng(options.seed);
  Checkpoint cp;

  std::optional<std::filesystem::path> log_path;
  std::optional<std::filesystem::path> state_path;
  if (options.state_dir) {
    std::filesystem::create_directories(*options.state_dir);
    log_path = *options.state_dir / kLogFileName;
    state_path = *options.state_dir / kStateFileName;
  }

  // Entries of the pending batch that were logged before an interruption.
  std::vector<LogEntry> carried;
  if (options.resume && state_path && std::filesystem::exists(*state_path)) {
    cp = checkpoint_from_json(parse_json(read_text_file(*state_path)), algorithm, options.seed);
    rng.load_state(cp.rng_state);
    algorithm.load_state(cp.algorithm_state);
    truncate_partial_line(*log_path);
    outcome.log = read_log(*log_path);
    if (outcome.log.size() < cp.batch_start || outcome.log.size() > cp.batch_start + cp.pending.size()) {
      throw std::runtime_error("evaluation log does not match the campaign checkpoint");
    }
    for (std::size_t i = 0; i < outcome.log.size(); ++i) {
      if (outcome.log[i].index != i) {
        throw std::runtime_error("evaluation log is out of order at line " + std::to_string(i + 1));
      }
    }
    carried.assign(outcome.log.begin() + static_cast<std::ptrdiff_t>(cp.batch_start), outcome.log.end());
    outcome.resumed = true;
  } else if (log_path) {
    std::ofstream(*log_path, std::ios::trunc);
  }

  const double prior_seconds = cp.elapsed_seconds;
  const auto wall = [&] {
    return prior_seconds + std::chrono::duration<double>(Clock::now() - started).count();
  };
  const auto evaluations = [&] { return outcome.log.size(); };
  const auto wall_exhausted = [&] {
    return !options.budget.max_evaluations && wall() >= options.budget.run_hour * 3600.0;
  };
  const auto stopped = [&] { return options.stop != nullptr && options.stop->load(); };
  const auto save_checkpoint = [&] {
    if (state_path) {
      cp.elapsed_seconds = wall();
      write_text_file_atomic(*state_path, canonical_dump(checkpoint_to_json(cp, algorithm, options.seed)) + "\n");
    }
  };

  std::ofstream log_stream;
  if (log_path) {
    log_stream.open(*log_path, std::ios::app | std::ios::binary);
  }
  const auto append = [&](LogEntry entry) {
    if (log_stream.is_open()) {
      log_stream << canonical_dump(log_entry_to_json(entry)) << '\n';
      log_stream.flush();
    }
    outcome.log.push_back(std::move(entry));
    if (options.on_logged) {
      options.on_logged(outcome.log.back());
    }
  };

  while (true) {
    if (cp.pending.empty()) {
      if (options.budget.max_evaluations && evaluations() >= *options.budget.max_evaluations) {
        break;
      }
      if (wall_exhausted() || stopped()) {
        outcome.interrupted = stopped();
        break;
      }
      auto batch = algorithm.propose(rng, budget_clock_hours(options.budget, evaluations(), wall()));
      if (options.budget.max_evaluations) {
        const std::size_t remaining = *options.budget.max_evaluations - evaluations();
        if (batch.size() > remaining) {
          batch.resize(remaining);
        }
      }
      if (batch.empty()) {
        break;
      }
      cp.pending = std::move(batch);
      cp.batch_start = evaluations();
      cp.rng_state = rng.save_state();
      cp.algorithm_state = algorithm.save_state();
      carried.clear();
      save_checkpoint();
    }

    const std::size_t first = carried.size();
    const std::size_t total = cp.pending.size();
    const auto make_entry = [&](std::size_t k, Evaluation eval) {
      LogEntry entry;
      entry.index = cp.batch_start + k;
      entry.batch = cp.batch_index;
      entry.seed = mix_seed(options.seed, entry.index);
      entry.genes = cp.pending[k];
      entry.result = std::move(eval.result);
      entry.payload = std::move(eval.payload);
      return entry;
    };

    std::size_t done = first;
    if (options.workers <= 1) {
      for (std::size_t k = first; k < total; ++k) {
        if (stopped() || wall_exhausted()) {
          break;
        }
        const std::size_t index = cp.batch_start + k;
        append(make_entry(k, objective(cp.pending[k], index, mix_seed(options.seed, index))));
        ++done;
      }
    } else {
      std::vector<std::optional<Evaluation>> slots(total);
      std::vector<std::exception_ptr> errors(total);
      std::atomic<std::size_t> next{first};
      const auto work = [&] {
        while (true) {
          const std::size_t k = next.fetch_add(1);
          if (k >= total || stopped() || wall_exhausted()) {
            return;
          }
          const std::size_t index = cp.batch_start + k;
          try {
            slots[k] = objective(cp.pending[k], index, mix_seed(options.seed, index));
          } catch (...) {
            errors[k] = std::current_exception();
          }
        }
      };
      std::vector<std::thread> pool;
      const std::size_t n_threads = std::min(options.workers, total - first);
      for (std::size_t t = 0; t < n_threads; ++t) {
        pool.emplace_back(work);
      }
      for (auto & thread : pool) {
        thread.join();
      }
      for (std::size_t k = first; k < total; ++k) {
        if (errors[k]) {
          std::rethrow_exception(errors[k]);
        }
        if (!slots[k]) {
          break;
        }
        append(make_entry(k, std::move(*slots[k])));
        ++done;
      }
    }

    if (done < total) {
      outcome.interrupted = stopped();
      save_checkpoint();
      break;
    }

    std::vector<EvalResult> results;
    results.reserve(total);
    for (std::size_t k = 0; k < total; ++k) {
      results.push_back(outcome.log[cp.batch_start + k].result);
    }
    algorithm.ingest(cp.pending, results);
    ++cp.batch_index;
    cp.pending.clear();
    carried.clear();
    cp.batch_start = evaluations();
    cp.rng_state = rng.save_state();
    cp.algorithm_state = algorithm.save_state();
    save_checkpoint();

    if (options.target_fitness) {
      for (const auto & r : results) {
        if (r.fitness < *options.target_fitness) {
          outcome.target_reached = true;
        }
      }
      if (outcome.target_reached) {
        break;
      }
    }
  }

  outcome.wall_seconds = wall();
  return outcome;
}

}  // namespace scenofuzz::engine
