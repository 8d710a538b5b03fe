/*
 * Copyright 2026 The pathreward Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "pathreward/agent_runtime.hpp"
#include "pathreward/core_model.hpp"
#include "pathreward/json_io.hpp"
#include "pathreward/log.hpp"
#include "pathreward/prompts.hpp"
#include "pathreward/reward_engine.hpp"
#include "pathreward/trajectory_codec.hpp"

namespace pathreward {

struct CandidateSet {
  std::string sample_id;
  std::vector<Trajectory> candidates;
  std::vector<bool> correct_mask;
  /// Episodes started, including ones lost to transport failures.
  int attempted = 0;
  int failed = 0;

  std::vector<Trajectory> correct() const {
    std::vector<Trajectory> out;
    for (std::size_t i = 0; i < candidates.size(); ++i)
      if (correct_mask[i]) out.push_back(candidates[i]);
    return out;
  }
};

struct CandidateOptions {
  int k = 4;
  /// Stop sampling once this many correct candidates exist; 0 never stops early.
  int enough_correct = 3;
};

/// Samples up to K episodes from a strong policy and marks each by exact
/// match. Episodes cut short by a transport error are dropped.
inline CandidateSet generate_candidates(const QASample& sample, const CandidateOptions& opts,
                                        const std::function<std::unique_ptr<PolicyBackend>()>& make_policy,
                                        Retriever& retriever, const AgentConfig& cfg) {
  if (opts.k < 1) throw ConfigError("candidate count K must be at least 1");
  CandidateSet set;
  set.sample_id = sample.id;
  int n_correct = 0;
  for (int i = 0; i < opts.k; ++i) {
    if (opts.enough_correct > 0 && n_correct >= opts.enough_correct) break;
    ++set.attempted;
    auto policy = make_policy();
    auto trace = run_episode(sample, *policy, retriever, cfg);
    if (trace.error) {
      log::warn("sample " + sample.id + ": candidate " + std::to_string(i) + " lost: " + *trace.error);
      ++set.failed;
      continue;
    }
    bool ok = exact_match(trace.trajectory.answer().value_or(""), sample.golden_answers);
    n_correct += ok;
    set.candidates.push_back(std::move(trace.trajectory));
    set.correct_mask.push_back(ok);
  }
  return set;
}

inline std::string normalize_query(std::string_view q) { return text::normalize_answer(q); }

inline std::string render_ref_planner(const std::vector<std::string>& steps) {
  std::string out = "To solve this, first search for:";
  for (std::size_t i = 0; i < steps.size(); ++i) out += "\n" + std::to_string(i + 1) + ". " + steps[i];
  return out;
}

struct VoteOptions {
  /// A query is kept when it appears in more than this fraction of candidates.
  double majority = 0.5;
};

/// Majority vote over the query lists of correct trajectories. Queries are
/// compared after normalization; each candidate counts a query once, at its
/// first position. Survivors are ordered by mean position, then text.
inline ReferenceBundle vote_distill(const std::vector<Trajectory>& correct, const VoteOptions& opts = {}) {
  if (correct.empty()) throw EmptyVote();
  struct Tally {
    int count = 0;
    double position_sum = 0;
  };
  std::map<std::string, Tally> tally;
  for (const auto& t : correct) {
    std::set<std::string> seen;
    int pos = 0;
    for (const auto& q : t.queries()) {
      ++pos;
      auto key = normalize_query(q);
      if (key.empty() || !seen.insert(key).second) continue;
      tally[key].count += 1;
      tally[key].position_sum += pos;
    }
  }
  double n = static_cast<double>(correct.size());
  std::vector<std::pair<double, std::string>> kept;
  for (const auto& [key, t] : tally)
    if (static_cast<double>(t.count) > opts.majority * n) kept.emplace_back(t.position_sum / t.count, key);
  if (kept.empty()) throw EmptyVote();
  std::sort(kept.begin(), kept.end());
  ReferenceBundle out;
  out.sample_id = correct.front().sample_id;
  for (auto& [pos, key] : kept) out.ref_path.push_back(key);
  out.ref_planner = render_ref_planner(out.ref_path);
  out.provenance = Provenance::kVoted;
  return out;
}

/// The query list of the shortest correct trajectory, for when the vote
/// comes back empty. Ties go to the lexically smallest list.
inline ReferenceBundle shortest_path_reference(const std::vector<Trajectory>& correct) {
  if (correct.empty()) throw EmptyVote();
  std::optional<std::vector<std::string>> best;
  for (const auto& t : correct) {
    std::vector<std::string> qs;
    for (const auto& q : t.queries()) {
      auto key = normalize_query(q);
      if (!key.empty() && std::find(qs.begin(), qs.end(), key) == qs.end()) qs.push_back(key);
    }
    if (!best || qs.size() < best->size() || (qs.size() == best->size() && qs < *best)) best = std::move(qs);
  }
  ReferenceBundle out{correct.front().sample_id, render_ref_planner(*best), *best, Provenance::kSinglePass};
  return out;
}

/// Vote, falling back to the shortest correct path.
inline ReferenceBundle distill_reference(const std::vector<Trajectory>& correct, const VoteOptions& opts = {}) {
  try {
    return vote_distill(correct, opts);
  } catch (const EmptyVote&) {
    log::info("sample " + correct.front().sample_id + ": empty vote, using shortest correct path");
    return shortest_path_reference(correct);
  }
}

/// Body of the first <tag>...</tag> block.
inline std::optional<std::string> tag_block(std::string_view s, std::string_view tag) {
  std::string open = "<" + std::string(tag) + ">";
  std::string close = "</" + std::string(tag) + ">";
  auto a = s.find(open);
  if (a == std::string_view::npos) return std::nullopt;
  auto b = s.find(close, a + open.size());
  if (b == std::string_view::npos) return std::nullopt;
  return text::trim(s.substr(a + open.size(), b - a - open.size()));
}

struct TemplateOutput {
  std::optional<std::string> planner;
  std::optional<std::vector<std::string>> path;
};

inline TemplateOutput parse_template_output(std::string_view raw) {
  TemplateOutput out;
  out.planner = tag_block(raw, "optimized_planner");
  if (auto block = tag_block(raw, "correct_reasoning_path")) {
    auto steps = extract_plan_steps(*block);
    if (steps.empty())
      for (const auto& line : text::split_lines(*block))
        if (!text::trim_view(line).empty()) steps.push_back(text::trim(line));
    out.path = steps;
  }
  return out;
}

/// Two prompted calls: draft a planner, then have the generator write the
/// query path that planner calls for.
inline ReferenceBundle generate_reference_single_pass(const QASample& sample, PolicyBackend& generator,
                                                      const Sampling& sampling = {}) {
  auto golden = text::join(sample.golden_answers, "; ");
  auto first = parse_template_output(generator.generate(
      prompts::fill(prompts::kReferencePlanner, {{"question", sample.question}, {"golden_answers", golden}}), {},
      sampling));
  if (!first.planner) throw TemplateParseError("planner call returned no <optimized_planner> block");
  auto second = parse_template_output(generator.generate(
      prompts::fill(prompts::kReferenceReasoning,
                    {{"question", sample.question}, {"golden_answers", golden}, {"planner", *first.planner}}),
      {}, sampling));
  auto path = second.path ? second.path : first.path;
  if (!path) throw TemplateParseError("reasoning call returned no <correct_reasoning_path> block");
  return {sample.id, *first.planner, *path, Provenance::kSinglePass};
}

/// Pluggable replacement for the rule vote: given the correct candidates,
/// produce the bundle some other way (e.g. an LLM call).
using VoteFn = std::function<ReferenceBundle(const QASample&, const std::vector<Trajectory>&)>;

/// A VoteFn that asks a generator to distill the candidates with the
/// planner template, the candidates' query lists appended.
inline VoteFn llm_vote(PolicyBackend& generator) {
  return [&generator](const QASample& sample, const std::vector<Trajectory>& correct) {
    std::string prompt = prompts::fill(prompts::kReferencePlanner, {{"question", sample.question},
                                                                    {"golden_answers", text::join(sample.golden_answers, "; ")}});
    prompt += "\n\nSearch queries used by correct solutions:";
    for (std::size_t i = 0; i < correct.size(); ++i)
      prompt += "\nSolution " + std::to_string(i + 1) + ": " + text::join(correct[i].queries(), " | ");
    auto out = parse_template_output(generator.generate(prompt, {}, {}));
    if (!out.planner || !out.path) throw TemplateParseError("vote output lacks the planner or path block");
    return ReferenceBundle{sample.id, *out.planner, *out.path, Provenance::kVoted};
  };
}

struct ReferenceBuildOptions {
  CandidateOptions candidates;
  VoteOptions vote;
  AgentConfig agent;
};

/// Builds one sample's bundle: candidates, vote, and the single-pass
/// fallback when nothing was answered correctly. Returns nullopt when every
/// rung fails; a bundle is never made from incorrect trajectories.
inline std::optional<ReferenceBundle> build_reference(const QASample& sample, const ReferenceBuildOptions& opts,
                                                      const std::function<std::unique_ptr<PolicyBackend>()>& make_policy,
                                                      Retriever& retriever, const VoteFn& vote = {}) {
  auto set = generate_candidates(sample, opts.candidates, make_policy, retriever, opts.agent);
  auto correct = set.correct();
  if (!correct.empty()) {
    if (vote) return vote(sample, correct);
    return distill_reference(correct, opts.vote);
  }
  try {
    auto generator = make_policy();
    return generate_reference_single_pass(sample, *generator, opts.agent.sampling);
  } catch (const std::exception& e) {
    log::warn("sample " + sample.id + ": no reference: " + e.what());
    return std::nullopt;
  }
}

inline std::map<std::string, ReferenceBundle> load_cache(const std::string& path) {
  std::map<std::string, ReferenceBundle> out;
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    auto b = reference_from_json(j, path, line);
    if (out.count(b.sample_id)) throw DuplicateId(b.sample_id);
    out.emplace(b.sample_id, std::move(b));
  });
  return out;
}

struct CacheBuildReport {
  std::size_t written = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
};

/// Appends a bundle for every sample not yet in the cache file. Samples are
/// built concurrently but lines land in dataset order, each flushed as soon
/// as everything before it is done.
inline CacheBuildReport build_cache(const std::vector<QASample>& dataset, const std::string& path,
                                    const std::function<std::optional<ReferenceBundle>(const QASample&)>& build,
                                    int parallelism = 1) {
  std::set<std::string> ids;
  for (const auto& s : dataset)
    if (!ids.insert(s.id).second) throw DuplicateId(s.id);
  std::map<std::string, ReferenceBundle> existing;
  if (std::filesystem::exists(path)) existing = load_cache(path);

  CacheBuildReport report;
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (existing.count(dataset[i].id)) ++report.skipped;
    else todo.push_back(i);
  }
  JsonlWriter writer(path, true);
  std::vector<std::optional<std::optional<ReferenceBundle>>> results(todo.size());
  std::size_t flushed = 0;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      std::optional<ReferenceBundle> b;
      try {
        b = build(dataset[todo[i]]);
      } catch (const std::exception& e) {
        log::warn("sample " + dataset[todo[i]].id + ": " + e.what());
      }
      std::lock_guard lock(mu);
      results[i] = std::move(b);
      for (; flushed < results.size() && results[flushed]; ++flushed) {
        if (auto& bundle = *results[flushed]) {
          writer.write(to_json(*bundle));
          ++report.written;
        } else {
          ++report.failed;
        }
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(std::max(parallelism, 1)), todo.size());
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
  }
  return report;
}

}  // namespace pathreward
