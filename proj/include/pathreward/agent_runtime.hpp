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
#include <array>
#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "pathreward/core_model.hpp"
#include "pathreward/http.hpp"
#include "pathreward/json_io.hpp"
#include "pathreward/log.hpp"
#include "pathreward/prompts.hpp"
#include "pathreward/trajectory_codec.hpp"

namespace pathreward {

inline constexpr std::string_view kToolCallClose = "</tool_call>";
inline constexpr std::string_view kAnswerClose = "</answer>";

using Sampling = std::map<std::string, std::string>;

/// A text generator continuing a transcript up to (and including) the first
/// stop tag it emits, or up to its length cap.
class PolicyBackend {
 public:
  virtual ~PolicyBackend() = default;
  virtual std::string generate(const std::string& transcript, const std::vector<std::string>& stop_tags,
                               const Sampling& sampling) = 0;
};

struct RetrievedDoc {
  std::string doc_id;
  std::string body;
  double score = 0;
  bool operator==(const RetrievedDoc&) const = default;
};

class Retriever {
 public:
  virtual ~Retriever() = default;
  /// At most k results, scores non-increasing, ties by doc_id ascending.
  virtual std::vector<RetrievedDoc> retrieve(const std::string& query, int k) = 0;
};

inline bool ranked_before(const RetrievedDoc& a, const RetrievedDoc& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.doc_id < b.doc_id;
}

struct EpisodeTrace {
  Trajectory trajectory;
  int turns_used = 0;
  bool budget_exhausted = false;
  bool forced_answer = false;
  std::chrono::milliseconds wall_time{0};
  /// Transport failure that cut the episode short, if any.
  std::optional<std::string> error;
};

namespace runtime_detail {

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

/// Reasoning steps recovered from free text preceding a terminal tag. Any
/// other tagged content in that stretch is a format violation; it stays in
/// the raw transcript but never becomes an action.
inline std::vector<TrajectoryStep> reasoning_steps(std::string_view text) {
  auto parsed = parse_trajectory_lenient(text, "");
  std::vector<TrajectoryStep> out;
  for (auto& s : parsed.trajectory.steps)
    if (s.kind == StepKind::kReasoning && !text::trim_view(s.body).empty()) out.push_back(std::move(s));
  if (out.empty() && parsed.trajectory.steps.empty() && !text::trim_view(text).empty())
    out.push_back(TrajectoryStep::reasoning(text::trim(text)));
  return out;
}

inline std::string cap_doc(const std::string& body, int max_chars) {
  if (max_chars <= 0 || static_cast<int>(body.size()) <= max_chars) return body;
  return body.substr(0, static_cast<std::size_t>(max_chars));
}

}  // namespace runtime_detail

/// Interleaved generate / retrieve loop with an action budget and a forced
/// final answer. The trajectory's steps are assembled as the episode runs,
/// so they hold at most `budget` queries, each followed by its retrieval;
/// `raw_text` keeps exactly what the policy wrote for format scoring.
inline EpisodeTrace run_episode(const QASample& sample, PolicyBackend& policy, Retriever& retriever,
                                const AgentConfig& cfg) {
  using namespace runtime_detail;
  auto started = std::chrono::steady_clock::now();
  EpisodeTrace trace;
  auto& traj = trace.trajectory;
  traj.sample_id = sample.id;
  const std::string prompt = prompts::fill(prompts::kInference, {{"question", sample.question}}) + "\n\n";
  std::string y = "<reasoning>";
  // Text generated since the last completed action; parsed once its segment closes.
  std::string pending = y;
  bool answered = false;
  bool malformed = false;
  auto add = [&](std::vector<TrajectoryStep> steps) {
    for (auto& s : steps) traj.steps.push_back(std::move(s));
  };
  auto finish = [&] {
    traj.raw_text = y;
    trace.wall_time =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    return trace;
  };
  auto generate = [&](const std::vector<std::string>& stops) -> std::optional<std::string> {
    try {
      auto seg = policy.generate(prompt + y, stops, cfg.sampling);
      if (static_cast<int>(seg.size()) > cfg.max_response_length)
        seg.resize(static_cast<std::size_t>(cfg.max_response_length));
      return seg;
    } catch (const BackendUnavailable& e) {
      trace.error = e.what();
      return std::nullopt;
    }
  };

  while (trace.turns_used < cfg.budget) {
    auto seg = generate({std::string(kToolCallClose), std::string(kAnswerClose)});
    if (!seg) {
      add(reasoning_steps(pending));
      return finish();
    }
    y += *seg;
    pending += *seg;
    if (ends_with(*seg, kAnswerClose)) {
      auto open = pending.rfind("<answer>");
      if (open != std::string::npos) {
        add(reasoning_steps(std::string_view(pending).substr(0, open)));
        auto body_start = open + std::string_view("<answer>").size();
        traj.steps.push_back(
            TrajectoryStep::answer(text::trim(pending.substr(body_start, pending.size() - kAnswerClose.size() - body_start))));
        answered = true;
        break;
      }
    }
    if (ends_with(*seg, kToolCallClose)) {
      auto open = pending.rfind("<tool_call>");
      if (open != std::string::npos) {
        auto body_start = open + std::string_view("<tool_call>").size();
        auto query = text::trim(pending.substr(body_start, pending.size() - kToolCallClose.size() - body_start));
        if (!query.empty()) {
          if (seg->find("<tool_call>") != seg->rfind("<tool_call>"))
            log::warn("sample " + sample.id + ": several tool calls in one segment, using the last");
          add(reasoning_steps(std::string_view(pending).substr(0, open)));
          traj.steps.push_back(TrajectoryStep::tool_call(query));
          std::vector<std::string> docs;
          try {
            for (auto& d : retriever.retrieve(query, cfg.top_k)) docs.push_back(cap_doc(d.body, cfg.max_doc_chars));
          } catch (const BackendUnavailable& e) {
            trace.error = e.what();
            traj.steps.push_back(TrajectoryStep::tool_response({}));
            ++trace.turns_used;
            return finish();
          }
          y += "\n<tool_response>" + render_documents(docs) + "</tool_response>\n";
          traj.steps.push_back(TrajectoryStep::tool_response(std::move(docs)));
          pending.clear();
          ++trace.turns_used;
          continue;
        }
      }
    }
    // No usable stop tag: keep what was written as truncated reasoning.
    malformed = true;
    break;
  }

  if (!answered) {
    add(reasoning_steps(pending));
    trace.budget_exhausted = !malformed && trace.turns_used >= cfg.budget;
    trace.forced_answer = true;
    y += "<answer>";
    auto seg = generate({std::string(kAnswerClose)});
    if (!seg) return finish();
    y += *seg;
    std::string body;
    if (ends_with(*seg, kAnswerClose)) body = text::trim(seg->substr(0, seg->size() - kAnswerClose.size()));
    else y += "</answer>";
    traj.steps.push_back(TrajectoryStep::answer(body));
  }
  return finish();
}

/// Runs one episode per sample with up to `parallelism` episodes in flight.
/// `make_policy` is called once per episode so stateful policies stay
/// episode-local.
inline std::vector<EpisodeTrace> run_episodes(const std::vector<QASample>& samples,
                                              const std::function<std::unique_ptr<PolicyBackend>(std::size_t)>& make_policy,
                                              Retriever& retriever, const AgentConfig& cfg, int parallelism = 1) {
  std::vector<EpisodeTrace> out(samples.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < samples.size(); i = next++) {
      auto policy = make_policy(i);
      out[i] = run_episode(samples[i], *policy, retriever, cfg);
    }
  };
  std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(std::max(parallelism, 1)), samples.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
  }
  return out;
}

/// Replays canned segments in order; once they run out the last one repeats.
class ScriptedPolicy : public PolicyBackend {
 public:
  explicit ScriptedPolicy(std::vector<std::string> segments) : segments_(std::move(segments)) {}
  std::string generate(const std::string&, const std::vector<std::string>&, const Sampling&) override {
    std::lock_guard lock(mu_);
    ++calls_;
    if (segments_.empty()) return "";
    return segments_[std::min(next_++, segments_.size() - 1)];
  }
  std::size_t calls() const { return calls_; }

 private:
  std::vector<std::string> segments_;
  std::size_t next_ = 0;
  std::size_t calls_ = 0;
  std::mutex mu_;
};

struct CorpusDoc {
  std::string doc_id;
  std::string body;
};

inline std::vector<CorpusDoc> load_corpus(const std::string& path) {
  std::vector<CorpusDoc> out;
  std::set<std::string> seen;
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    CorpusDoc d{json_detail::require_string(j, "doc_id", path, line), json_detail::require_string(j, "body", path, line)};
    if (!seen.insert(d.doc_id).second) throw InputError(path, line, "doc_id", "duplicate id '" + d.doc_id + "'");
    out.push_back(std::move(d));
  });
  return out;
}

/// In-memory token-overlap retriever: score is the fraction of distinct
/// query tokens present in the document.
class LexicalRetriever : public Retriever {
 public:
  explicit LexicalRetriever(std::vector<CorpusDoc> corpus, bool return_zero_scores = false)
      : docs_(std::move(corpus)), return_zero_scores_(return_zero_scores) {
    if (docs_.empty()) throw EmptyCorpus();
    std::sort(docs_.begin(), docs_.end(), [](const auto& a, const auto& b) { return a.doc_id < b.doc_id; });
    std::set<std::string> ids;
    for (std::size_t i = 0; i < docs_.size(); ++i) {
      if (!ids.insert(docs_[i].doc_id).second) throw DuplicateId(docs_[i].doc_id);
      auto toks = text::alnum_tokens(docs_[i].body);
      for (const auto& tok : std::set<std::string>(toks.begin(), toks.end())) postings_[tok].push_back(i);
    }
  }

  std::vector<RetrievedDoc> retrieve(const std::string& query, int k) override {
    auto toks = text::alnum_tokens(query);
    std::set<std::string> q(toks.begin(), toks.end());
    std::vector<int> hits(docs_.size(), 0);
    for (const auto& tok : q)
      if (auto it = postings_.find(tok); it != postings_.end())
        for (auto i : it->second) ++hits[i];
    // Documents are stored in doc_id order, so index order is the tie-break.
    std::vector<std::size_t> cand;
    for (std::size_t i = 0; i < docs_.size(); ++i)
      if (hits[i] > 0 || return_zero_scores_) cand.push_back(i);
    auto keep = std::min<std::size_t>(cand.size(), static_cast<std::size_t>(std::max(k, 0)));
    std::partial_sort(cand.begin(), cand.begin() + static_cast<long>(keep), cand.end(),
                      [&](std::size_t a, std::size_t b) { return hits[a] != hits[b] ? hits[a] > hits[b] : a < b; });
    std::vector<RetrievedDoc> out;
    for (std::size_t j = 0; j < keep; ++j) {
      auto i = cand[j];
      double score = q.empty() ? 0.0 : static_cast<double>(hits[i]) / static_cast<double>(q.size());
      out.push_back({docs_[i].doc_id, docs_[i].body, score});
    }
    return out;
  }

  std::size_t size() const { return docs_.size(); }

 private:
  std::vector<CorpusDoc> docs_;
  std::unordered_map<std::string, std::vector<std::size_t>> postings_;
  bool return_zero_scores_;
};

/// Retrieval service client: POST {query, k} -> {results: [{doc_id, body, score}]}.
class RemoteRetriever : public Retriever {
 public:
  RemoteRetriever(http::Endpoint endpoint, http::RetryPolicy retry = {}) : ep_(std::move(endpoint)), retry_(retry) {}

  std::vector<RetrievedDoc> retrieve(const std::string& query, int k) override {
    json reply;
    try {
      reply = http::with_retries(retry_, "retriever " + ep_.origin(), [&] {
        auto r = http::post_json(ep_, {{"query", query}, {"k", k}}, "", retry_.timeout);
        if (!r.contains("results") || !r["results"].is_array())
          throw BackendUnavailable("retriever reply lacks a results array");
        return r;
      });
    } catch (const BackendUnavailable& e) {
      throw RetrieverUnavailable(e.what());
    }
    std::vector<RetrievedDoc> out;
    try {
      for (const auto& r : reply["results"])
        out.push_back({r.at("doc_id").get<std::string>(), r.at("body").get<std::string>(), r.at("score").get<double>()});
    } catch (const json::exception& e) {
      throw RetrieverUnavailable(std::string("malformed retriever result: ") + e.what());
    }
    if (!std::is_sorted(out.begin(), out.end(), ranked_before)) {
      log::warn("retriever returned unsorted results; re-sorting");
      std::stable_sort(out.begin(), out.end(), ranked_before);
    }
    if (static_cast<int>(out.size()) > k) {
      log::warn("retriever returned " + std::to_string(out.size()) + " results for k=" + std::to_string(k) +
                "; truncating");
      out.resize(static_cast<std::size_t>(std::max(k, 0)));
    }
    return out;
  }

 private:
  http::Endpoint ep_;
  http::RetryPolicy retry_;
};

/// Completion-style policy client. Stop sequences are usually stripped by the
/// server, so the matched tag is put back.
class RemotePolicy : public PolicyBackend {
 public:
  RemotePolicy(http::Endpoint endpoint, std::string model, std::string api_key, http::RetryPolicy retry = {})
      : ep_(std::move(endpoint)), model_(std::move(model)), key_(std::move(api_key)), retry_(retry) {}

  std::string generate(const std::string& transcript, const std::vector<std::string>& stop_tags,
                       const Sampling& sampling) override {
    json body{{"model", model_}, {"prompt", transcript}, {"stop", stop_tags}};
    for (const auto& [k, v] : sampling) {
      auto parsed = json::parse(v, nullptr, false);
      body[k] = parsed.is_discarded() ? json(v) : parsed;
    }
    json reply;
    try {
      reply = http::with_retries(retry_, "policy " + ep_.origin(),
                                 [&] { return http::post_json(ep_, body, key_, retry_.timeout); });
    } catch (const BackendUnavailable& e) {
      throw PolicyUnavailable(e.what());
    }
    std::string text;
    std::string finish;
    json matched;
    try {
      const auto& choice = reply.at("choices").at(0);
      text = choice.contains("text") ? choice.at("text").get<std::string>()
                                     : choice.at("message").at("content").get<std::string>();
      finish = choice.value("finish_reason", "");
      matched = choice.value("stop_reason", json());
    } catch (const json::exception& e) {
      throw PolicyUnavailable(std::string("malformed completion: ") + e.what());
    }
    for (const auto& tag : stop_tags)
      if (runtime_detail::ends_with(text, tag)) return text;
    if (finish == "length") return text;
    if (matched.is_string()) return text + matched.get<std::string>();
    // Infer the tag from whichever block was opened last.
    std::string best;
    std::size_t best_pos = 0;
    for (const auto& tag : stop_tags) {
      std::string open = "<" + tag.substr(2);
      auto pos = text.rfind(open);
      if (pos != std::string::npos && (best.empty() || pos > best_pos)) best = tag, best_pos = pos;
    }
    return text + best;
  }

 private:
  http::Endpoint ep_;
  std::string model_;
  std::string key_;
  http::RetryPolicy retry_;
};

struct TurnBucket {
  std::size_t count = 0;
  double mean_turns = 0;
  /// Fractions with at most one, exactly two, and three or more turns.
  std::array<double, 3> buckets{0, 0, 0};
};

struct TurnStatistics {
  TurnBucket success;
  TurnBucket failure;
};

inline TurnStatistics turn_statistics(const std::vector<EpisodeTrace>& traces, const std::vector<bool>& outcomes) {
  if (traces.size() != outcomes.size()) throw LengthMismatch(traces.size(), outcomes.size());
  if (traces.empty()) throw Error("turn statistics need at least one trace");
  TurnStatistics s;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    auto& b = outcomes[i] ? s.success : s.failure;
    int turns = traces[i].turns_used;
    ++b.count;
    b.mean_turns += turns;
    b.buckets[static_cast<std::size_t>(std::clamp(turns, 1, 3) - 1)] += 1;
  }
  for (auto* b : {&s.success, &s.failure}) {
    if (b->count == 0) continue;
    b->mean_turns /= static_cast<double>(b->count);
    for (auto& f : b->buckets) f /= static_cast<double>(b->count);
  }
  return s;
}

inline json to_json(const TurnBucket& b) {
  return {{"count", b.count}, {"mean_turns", b.mean_turns}, {"buckets", {{"1", b.buckets[0]}, {"2", b.buckets[1]}, {"3+", b.buckets[2]}}}};
}

/// Sidecar metrics record for one episode.
inline json metrics_json(const EpisodeTrace& t) {
  json j{{"sample_id", t.trajectory.sample_id},
         {"turns_used", t.turns_used},
         {"forced_answer", t.forced_answer},
         {"budget_exhausted", t.budget_exhausted},
         {"wall_time_ms", t.wall_time.count()}};
  if (t.error) j["error"] = *t.error;
  return j;
}

}  // namespace pathreward
