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
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <openssl/evp.h>

#include "pathreward/core_model.hpp"
#include "pathreward/http.hpp"
#include "pathreward/json_io.hpp"
#include "pathreward/log.hpp"
#include "pathreward/prompts.hpp"
#include "pathreward/reward_engine.hpp"
#include "pathreward/trajectory_codec.hpp"

namespace pathreward {

struct EvaluatorRequest {
  std::string question;
  std::vector<std::string> golden_answers;
  std::string ref_planner;
  std::vector<std::string> ref_path;
  /// Canonical rendering of the judged trajectory.
  std::string trajectory_text;
};

inline EvaluatorRequest make_request(const Trajectory& t, const QASample& sample, const ReferenceBundle& ref) {
  return {sample.question, sample.golden_answers, ref.ref_planner, ref.ref_path, render_trajectory(t)};
}

inline std::string numbered_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += '\n';
    out += std::to_string(i + 1) + ". " + items[i];
  }
  return out;
}

/// Fills the dual-track evaluation template. Throws MissingField when any of
/// the five inputs is empty.
inline std::string render_eval_prompt(const EvaluatorRequest& req) {
  if (text::trim_view(req.question).empty()) throw MissingField("question");
  if (req.golden_answers.empty()) throw MissingField("golden_answers");
  if (text::trim_view(req.ref_planner).empty()) throw MissingField("ref_planner");
  if (req.ref_path.empty()) throw MissingField("ref_reasoning_path");
  if (text::trim_view(req.trajectory_text).empty()) throw MissingField("trajectory");
  return prompts::fill(prompts::kEvaluation, {{"question", req.question},
                                              {"golden_answers", text::join(req.golden_answers, "; ")},
                                              {"ref_planner", req.ref_planner},
                                              {"ref_reasoning_path", numbered_list(req.ref_path)},
                                              {"trajectory", req.trajectory_text}});
}

namespace verdict_detail {

/// End of the balanced {...} starting at `open`, honouring JSON strings.
inline std::optional<std::size_t> balanced_end(std::string_view s, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return i + 1;
  }
  return std::nullopt;
}

inline std::optional<double> number_field(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    try {
      std::size_t used = 0;
      double v = std::stod(j.get<std::string>(), &used);
      if (used == j.get<std::string>().size()) return v;
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

}  // namespace verdict_detail

inline constexpr std::array<const char*, 6> kVerdictFields{"planner_score",        "model_plan_steps",
                                                           "effective_steps_self", "effective_steps_ref",
                                                           "outcome_accuracy_score", "outcome_reasoning_score"};

/// Extracts a verdict from free-form judge output: the first well-formed
/// JSON object carrying all six fields wins. Scores are snapped to their
/// grids and counts clamped; anything that had to move sets `degraded`.
inline EvaluatorVerdict parse_verdict(std::string_view raw) {
  bool saw_object = false;
  std::string missing;
  for (std::size_t pos = raw.find('{'); pos != std::string_view::npos; pos = raw.find('{', pos + 1)) {
    auto end = verdict_detail::balanced_end(raw, pos);
    if (!end) continue;
    json j;
    try {
      j = json::parse(raw.substr(pos, *end - pos));
    } catch (const json::parse_error&) {
      continue;
    }
    if (!j.is_object()) continue;
    saw_object = true;
    std::map<std::string, double> values;
    for (const char* field : kVerdictFields) {
      if (!j.contains(field)) break;
      auto v = verdict_detail::number_field(j.at(field));
      if (!v) break;
      values[field] = *v;
    }
    if (values.size() != kVerdictFields.size()) {
      for (const char* field : kVerdictFields)
        if (!values.count(field)) {
          missing = field;
          break;
        }
      continue;
    }
    EvaluatorVerdict v;
    bool moved = false;
    auto count = [&](const char* field) {
      double d = values[field];
      long long r = std::llround(d);
      if (static_cast<double>(r) != d || r < 0) moved = true;
      return static_cast<int>(std::clamp<long long>(r, 0, 1 << 20));
    };
    v.planner_score = Decimal::from_double(values["planner_score"]);
    v.outcome_accuracy = Decimal::from_double(values["outcome_accuracy_score"]);
    v.outcome_reasoning = Decimal::from_double(values["outcome_reasoning_score"]);
    v.model_plan_steps = count("model_plan_steps");
    v.effective_steps_self = count("effective_steps_self");
    v.effective_steps_ref = count("effective_steps_ref");
    if (v.effective_steps_self > v.model_plan_steps) moved = true;
    v = clamp_verdict(v);
    if (moved) v.degraded = true;
    return v;
  }
  if (saw_object) throw VerdictParseError("verdict object missing field '" + missing + "'");
  throw VerdictParseError("no JSON object in judge output");
}

inline std::string serialize_verdict(const EvaluatorVerdict& v) { return to_json(v).dump(); }

/// Maximum-cardinality bipartite matching (augmenting paths). `edge(l, r)`
/// says whether left item l may be credited with right item r.
inline std::size_t max_bipartite_matching(std::size_t n_left, std::size_t n_right,
                                          const std::function<bool(std::size_t, std::size_t)>& edge) {
  std::vector<std::vector<std::size_t>> adj(n_left);
  for (std::size_t l = 0; l < n_left; ++l)
    for (std::size_t r = 0; r < n_right; ++r)
      if (edge(l, r)) adj[l].push_back(r);
  std::vector<long> match_right(n_right, -1);
  std::function<bool(std::size_t, std::vector<char>&)> augment = [&](std::size_t l, std::vector<char>& seen) {
    for (std::size_t r : adj[l]) {
      if (seen[r]) continue;
      seen[r] = 1;
      if (match_right[r] < 0 || augment(static_cast<std::size_t>(match_right[r]), seen)) {
        match_right[r] = static_cast<long>(l);
        return true;
      }
    }
    return false;
  };
  std::size_t size = 0;
  for (std::size_t l = 0; l < n_left; ++l) {
    std::vector<char> seen(n_right, 0);
    if (augment(l, seen)) ++size;
  }
  return size;
}

struct OracleOptions {
  /// Minimum token-set Jaccard overlap for a query to count as executing a step.
  double match_threshold = 0.6;
};

namespace oracle_detail {
inline std::vector<std::set<std::string>> token_sets(const std::vector<std::string>& items) {
  std::vector<std::set<std::string>> out;
  out.reserve(items.size());
  for (const auto& s : items) out.push_back(text::token_set(s));
  return out;
}

inline std::size_t matched(const std::vector<std::set<std::string>>& a, const std::vector<std::set<std::string>>& b,
                           double threshold) {
  return max_bipartite_matching(a.size(), b.size(),
                                [&](std::size_t i, std::size_t j) { return text::jaccard(a[i], b[j]) >= threshold; });
}
}  // namespace oracle_detail

/// Deterministic stand-in for the LLM judge. Steps count as covered or
/// executed when a search query overlaps them lexically; each query and each
/// step is credited at most once, independent of order.
inline EvaluatorVerdict oracle_evaluate(const Trajectory& t, const QASample& sample, const ReferenceBundle* ref,
                                        const OracleOptions& opts = {}) {
  using namespace oracle_detail;
  auto queries = token_sets(t.queries());
  auto ref_steps = token_sets(ref ? ref->ref_path : std::vector<std::string>{});
  auto plan = token_sets(extract_plan_steps(t));
  std::size_t ref_len = ref_steps.size();

  EvaluatorVerdict v;
  std::size_t covered = matched(queries, ref_steps, opts.match_threshold);
  v.effective_steps_ref = static_cast<int>(covered);
  v.model_plan_steps = static_cast<int>(plan.size());
  v.effective_steps_self = static_cast<int>(matched(plan, queries, opts.match_threshold));

  if (plan.empty()) {
    v.planner_score = 0_milli;
  } else {
    std::size_t plan_cover = matched(plan, ref_steps, opts.match_threshold);
    if (ref_len > 0 && plan_cover == ref_len) v.planner_score = plan.size() == ref_len ? 1200_milli : 1000_milli;
    else if (plan_cover > 0) v.planner_score = 600_milli;
    else v.planner_score = 200_milli;
  }

  auto answer = t.answer().value_or("");
  if (exact_match(answer, sample.golden_answers)) v.outcome_accuracy = 1000_milli;
  else if (containment_acc(answer, sample.golden_answers)) v.outcome_accuracy = 500_milli;
  else v.outcome_accuracy = 0_milli;

  if (ref_len > 0 && covered == ref_len) v.outcome_reasoning = 1000_milli;
  else if (ref_len > 0 && 2 * covered >= ref_len && covered > 0) v.outcome_reasoning = 800_milli;
  else if (covered > 0) v.outcome_reasoning = 500_milli;
  else v.outcome_reasoning = 0_milli;

  return clamp_verdict(v, t.n_actions(), ref_len);
}

/// Posts the rendered prompt as a chat-completion request and parses the
/// judge's verdict. Never throws: after `retry.attempts` failed tries
/// (transport errors or unparseable verdicts) it returns the all-zero
/// verdict flagged degraded.
inline EvaluatorVerdict remote_evaluate(const EvaluatorRequest& req, const http::Endpoint& endpoint,
                                        const std::string& model, const std::string& api_key,
                                        const http::RetryPolicy& retry) {
  try {
    json body{{"model", model},
              {"messages", json::array({{{"role", "user"}, {"content", render_eval_prompt(req)}}})},
              {"temperature", 0}};
    return http::with_retries(retry, "judge " + endpoint.origin(), [&] {
      auto reply = http::post_json(endpoint, body, api_key, retry.timeout);
      std::string content;
      try {
        content = reply.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const json::exception& e) {
        throw BackendUnavailable(std::string("malformed chat completion: ") + e.what());
      }
      try {
        return parse_verdict(content);
      } catch (const VerdictParseError& e) {
        throw BackendUnavailable(std::string("unusable verdict: ") + e.what());
      }
    });
  } catch (const std::exception& e) {
    log::error(std::string("judge unavailable, using degraded verdict: ") + e.what());
    return EvaluatorVerdict::zero(true);
  }
}

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

/// Something that produces verdicts for trajectories.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual EvaluatorVerdict evaluate(const Trajectory& t, const QASample& sample, const ReferenceBundle* ref) = 0;
  /// Scores a batch; the default runs sequentially.
  virtual std::vector<EvaluatorVerdict> evaluate_batch(const std::vector<const Trajectory*>& ts,
                                                       const std::vector<const QASample*>& samples,
                                                       const std::vector<const ReferenceBundle*>& refs) {
    std::vector<EvaluatorVerdict> out;
    out.reserve(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) out.push_back(evaluate(*ts[i], *samples[i], refs[i]));
    return out;
  }
  virtual bool deterministic() const = 0;
};

class OracleEvaluator : public Evaluator {
 public:
  explicit OracleEvaluator(OracleOptions opts = {}) : opts_(opts) {}
  EvaluatorVerdict evaluate(const Trajectory& t, const QASample& sample, const ReferenceBundle* ref) override {
    return oracle_evaluate(t, sample, ref, opts_);
  }
  bool deterministic() const override { return true; }

 private:
  OracleOptions opts_;
};

/// JSON Lines verdict cache keyed by (sample_id, SHA-256 of the canonical
/// trajectory text). Appends are flushed as they happen.
class VerdictCache {
 public:
  VerdictCache() = default;
  explicit VerdictCache(std::string path) : path_(std::move(path)) {
    std::ifstream probe(path_);
    if (probe) {
      for_each_jsonl(path_, [&](const json& j, std::size_t line) {
        try {
          entries_[{j.at("sample_id").get<std::string>(), j.at("trajectory_hash").get<std::string>()}] =
              parse_verdict(j.at("verdict").dump());
        } catch (const std::exception& e) {
          throw InputError(path_, line, "verdict", e.what());
        }
      });
    }
    writer_.emplace(path_, true);
  }

  static std::string key_hash(const Trajectory& t) { return sha256_hex(render_trajectory(t)); }

  std::optional<EvaluatorVerdict> find(const Trajectory& t) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find({t.sample_id, key_hash(t)});
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void put(const Trajectory& t, const EvaluatorVerdict& v) {
    std::lock_guard lock(mu_);
    auto hash = key_hash(t);
    entries_[{t.sample_id, hash}] = v;
    if (writer_) writer_->write({{"sample_id", t.sample_id}, {"trajectory_hash", hash}, {"verdict", to_json(v)}});
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
  }

 private:
  std::string path_;
  std::map<std::pair<std::string, std::string>, EvaluatorVerdict> entries_;
  std::optional<JsonlWriter> writer_;
  mutable std::mutex mu_;
};

struct RemoteEvaluatorOptions {
  http::Endpoint endpoint;
  std::string model = "judge";
  std::string api_key;
  http::RetryPolicy retry;
  /// Upper bound on concurrent in-flight judge requests.
  int max_in_flight = 8;
};

class RemoteEvaluator : public Evaluator {
 public:
  explicit RemoteEvaluator(RemoteEvaluatorOptions opts, VerdictCache* cache = nullptr)
      : opts_(std::move(opts)), cache_(cache) {}

  EvaluatorVerdict evaluate(const Trajectory& t, const QASample& sample, const ReferenceBundle* ref) override {
    if (cache_)
      if (auto hit = cache_->find(t)) return *hit;
    ReferenceBundle placeholder{sample.id, "(no reference available)", {"(no reference available)"}, Provenance::kVoted};
    auto req = make_request(t, sample, ref ? *ref : placeholder);
    if (req.trajectory_text.empty()) return EvaluatorVerdict::zero(false);
    auto v = remote_evaluate(req, opts_.endpoint, opts_.model, opts_.api_key, opts_.retry);
    v = clamp_verdict(v, t.n_actions(), ref ? ref->ref_path.size() : 0);
    if (cache_ && !v.degraded) cache_->put(t, v);
    return v;
  }

  std::vector<EvaluatorVerdict> evaluate_batch(const std::vector<const Trajectory*>& ts,
                                               const std::vector<const QASample*>& samples,
                                               const std::vector<const ReferenceBundle*>& refs) override {
    std::vector<EvaluatorVerdict> out(ts.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < ts.size(); i = next++) out[i] = evaluate(*ts[i], *samples[i], refs[i]);
    };
    std::size_t n_workers = std::min<std::size_t>(std::max(opts_.max_in_flight, 1), ts.size());
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    pool.clear();
    return out;
  }

  bool deterministic() const override { return false; }

 private:
  RemoteEvaluatorOptions opts_;
  VerdictCache* cache_;
};

struct AgreementReport {
  std::size_t n = 0;
  double plan_agreement = 0;
  double step_agreement = 0;
  double outcome_agreement = 0;
};

/// Per-dimension agreement rates between two aligned verdict lists.
inline AgreementReport measure_agreement(const std::vector<EvaluatorVerdict>& a, const std::vector<EvaluatorVerdict>& b) {
  if (a.size() != b.size() || a.empty()) throw LengthMismatch(a.size(), b.size());
  std::size_t plan = 0, step = 0, outcome = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    plan += a[i].planner_score == b[i].planner_score;
    step += a[i].model_plan_steps == b[i].model_plan_steps && a[i].effective_steps_self == b[i].effective_steps_self &&
            a[i].effective_steps_ref == b[i].effective_steps_ref;
    outcome += a[i].outcome_accuracy == b[i].outcome_accuracy && a[i].outcome_reasoning == b[i].outcome_reasoning;
  }
  double n = static_cast<double>(a.size());
  return {a.size(), static_cast<double>(plan) / n, static_cast<double>(step) / n, static_cast<double>(outcome) / n};
}

inline json to_json(const AgreementReport& r) {
  return {{"n", r.n},
          {"plan_agreement", r.plan_agreement},
          {"step_agreement", r.step_agreement},
          {"outcome_agreement", r.outcome_agreement}};
}

}  // namespace pathreward
