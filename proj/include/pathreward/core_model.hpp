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
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pathreward/decimal.hpp"
#include "pathreward/errors.hpp"
#include "pathreward/text.hpp"

namespace pathreward {

using namespace pathreward::literals;

struct QASample {
  std::string id;
  std::string question;
  std::vector<std::string> golden_answers;
  /// Known-minimal hop queries; only present for sandbox-generated datasets.
  std::vector<std::string> true_path;

  bool operator==(const QASample&) const = default;
};

enum class StepKind { kReasoning, kToolCall, kToolResponse, kAnswer };

inline const char* to_string(StepKind kind) {
  switch (kind) {
    case StepKind::kReasoning: return "reasoning";
    case StepKind::kToolCall: return "tool_call";
    case StepKind::kToolResponse: return "tool_response";
    case StepKind::kAnswer: return "answer";
  }
  return "?";
}

inline std::optional<StepKind> step_kind_from_string(std::string_view s) {
  if (s == "reasoning") return StepKind::kReasoning;
  if (s == "tool_call") return StepKind::kToolCall;
  if (s == "tool_response") return StepKind::kToolResponse;
  if (s == "answer") return StepKind::kAnswer;
  return std::nullopt;
}

/// One tagged segment. Tool responses carry `documents`; every other kind
/// carries `body`.
struct TrajectoryStep {
  StepKind kind = StepKind::kReasoning;
  std::string body;
  std::vector<std::string> documents;

  static TrajectoryStep reasoning(std::string text) { return {StepKind::kReasoning, std::move(text), {}}; }
  static TrajectoryStep tool_call(std::string query) { return {StepKind::kToolCall, std::move(query), {}}; }
  static TrajectoryStep tool_response(std::vector<std::string> docs) {
    return {StepKind::kToolResponse, {}, std::move(docs)};
  }
  static TrajectoryStep answer(std::string text) { return {StepKind::kAnswer, std::move(text), {}}; }

  bool operator==(const TrajectoryStep&) const = default;
};

struct Trajectory {
  std::string sample_id;
  std::vector<TrajectoryStep> steps;
  /// Original tagged transcript as generated; empty when built programmatically.
  std::string raw_text;

  std::size_t n_actions() const {
    return static_cast<std::size_t>(std::count_if(steps.begin(), steps.end(), [](const auto& s) {
      return s.kind == StepKind::kToolCall;
    }));
  }

  std::vector<std::string> queries() const {
    std::vector<std::string> out;
    for (const auto& s : steps)
      if (s.kind == StepKind::kToolCall) out.push_back(s.body);
    return out;
  }

  /// Body of the first Answer step.
  std::optional<std::string> answer() const {
    for (const auto& s : steps)
      if (s.kind == StepKind::kAnswer) return s.body;
    return std::nullopt;
  }

  /// The plan is the first Reasoning step.
  std::optional<std::string> plan() const {
    for (const auto& s : steps)
      if (s.kind == StepKind::kReasoning) return s.body;
    return std::nullopt;
  }

  bool operator==(const Trajectory& o) const { return sample_id == o.sample_id && steps == o.steps; }
};

/// Structural invariants of a trajectory; returns every violation found.
inline std::vector<std::string> check_trajectory(const Trajectory& t, std::optional<int> budget = {},
                                                 std::optional<int> top_k = {}) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    if (s.kind == StepKind::kToolCall) {
      if (text::trim_view(s.body).empty()) out.push_back("step " + std::to_string(i) + ": empty tool_call query");
      bool last = i + 1 == t.steps.size();
      if (!last && t.steps[i + 1].kind != StepKind::kToolResponse)
        out.push_back("step " + std::to_string(i) + ": tool_call not followed by tool_response");
    }
    if (s.kind == StepKind::kAnswer && i + 1 != t.steps.size())
      out.push_back("step " + std::to_string(i) + ": answer is not the final step");
    if (s.kind == StepKind::kToolResponse && top_k && static_cast<int>(s.documents.size()) > *top_k)
      out.push_back("step " + std::to_string(i) + ": more documents than top_k");
  }
  if (budget && static_cast<int>(t.n_actions()) > *budget) out.push_back("action count exceeds budget");
  return out;
}

enum class Provenance { kVoted, kSinglePass, kOracle };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::kVoted: return "voted";
    case Provenance::kSinglePass: return "single_pass";
    case Provenance::kOracle: return "oracle";
  }
  return "?";
}

inline std::optional<Provenance> provenance_from_string(std::string_view s) {
  if (s == "voted") return Provenance::kVoted;
  if (s == "single_pass") return Provenance::kSinglePass;
  if (s == "oracle") return Provenance::kOracle;
  return std::nullopt;
}

struct ReferenceBundle {
  std::string sample_id;
  std::string ref_planner;
  std::vector<std::string> ref_path;
  Provenance provenance = Provenance::kVoted;

  bool operator==(const ReferenceBundle&) const = default;
};

inline std::vector<std::string> check_reference(const ReferenceBundle& r) {
  std::vector<std::string> out;
  if (r.ref_path.empty() && r.provenance != Provenance::kSinglePass)
    out.push_back("ref_path empty for provenance " + std::string(to_string(r.provenance)));
  std::vector<std::string> seen;
  for (const auto& step : r.ref_path) {
    auto norm = text::collapse_whitespace(step);
    if (std::find(seen.begin(), seen.end(), norm) != seen.end())
      out.push_back("duplicate ref_path entry: " + step);
    seen.push_back(std::move(norm));
  }
  return out;
}

// Judge score grids. The planner grid also admits 0, the rating of a
// trajectory that states no plan at all (and of the fallback verdict).
inline constexpr std::array<Decimal, 5> kPlannerGrid{0_milli, 200_milli, 600_milli, 1000_milli, 1200_milli};
inline constexpr std::array<Decimal, 3> kAccuracyGrid{0_milli, 500_milli, 1000_milli};
inline constexpr std::array<Decimal, 4> kReasoningGrid{0_milli, 500_milli, 800_milli, 1000_milli};

/// Nearest grid value; ties go to the lower value. `.second` is true when
/// the input was off-grid.
template <std::size_t N>
std::pair<Decimal, bool> snap_to_grid(Decimal v, const std::array<Decimal, N>& grid) {
  Decimal best = grid[0];
  std::int64_t best_dist = -1;
  for (const auto& g : grid) {
    std::int64_t d = v.milli() > g.milli() ? v.milli() - g.milli() : g.milli() - v.milli();
    if (best_dist < 0 || d < best_dist) {
      best = g;
      best_dist = d;
    }
  }
  return {best, best_dist != 0};
}

template <std::size_t N>
bool on_grid(Decimal v, const std::array<Decimal, N>& grid) {
  return std::find(grid.begin(), grid.end(), v) != grid.end();
}

struct EvaluatorVerdict {
  Decimal planner_score;
  int model_plan_steps = 0;
  int effective_steps_self = 0;
  int effective_steps_ref = 0;
  Decimal outcome_accuracy;
  Decimal outcome_reasoning;
  bool degraded = false;

  static EvaluatorVerdict zero(bool degraded) {
    EvaluatorVerdict v;
    v.degraded = degraded;
    return v;
  }

  bool operator==(const EvaluatorVerdict&) const = default;
};

/// Snaps score fields to their grids (flagging `degraded` when anything
/// moved) and clamps step counts: self ≤ plan, self ≤ n_actions,
/// ref ≤ ref_len, ref ≤ n_actions. Idempotent.
inline EvaluatorVerdict clamp_verdict(EvaluatorVerdict v, std::optional<std::size_t> n_actions = {},
                                      std::optional<std::size_t> ref_len = {}) {
  auto [planner, p_moved] = snap_to_grid(v.planner_score, kPlannerGrid);
  auto [acc, a_moved] = snap_to_grid(v.outcome_accuracy, kAccuracyGrid);
  auto [reason, r_moved] = snap_to_grid(v.outcome_reasoning, kReasoningGrid);
  v.planner_score = planner;
  v.outcome_accuracy = acc;
  v.outcome_reasoning = reason;
  if (p_moved || a_moved || r_moved) v.degraded = true;

  v.model_plan_steps = std::max(v.model_plan_steps, 0);
  v.effective_steps_self = std::clamp(v.effective_steps_self, 0, v.model_plan_steps);
  v.effective_steps_ref = std::max(v.effective_steps_ref, 0);
  if (n_actions) {
    int cap = static_cast<int>(*n_actions);
    v.effective_steps_self = std::min(v.effective_steps_self, cap);
    v.effective_steps_ref = std::min(v.effective_steps_ref, cap);
  }
  if (ref_len) v.effective_steps_ref = std::min(v.effective_steps_ref, static_cast<int>(*ref_len));
  return v;
}

enum class PathFormula { kMainText, kAlgorithm3 };
enum class FormatMode { kSoft, kStrict, kOff };
enum class MatchMode { kExact, kContainment };

inline const char* to_string(PathFormula f) { return f == PathFormula::kMainText ? "main_text" : "algorithm3"; }
inline const char* to_string(FormatMode m) {
  return m == FormatMode::kSoft ? "soft" : m == FormatMode::kStrict ? "strict" : "off";
}
inline const char* to_string(MatchMode m) { return m == MatchMode::kExact ? "exact" : "containment"; }

struct RewardConfig {
  Decimal lambda_f = 100_milli;
  Decimal lambda_p = 300_milli;
  Decimal lambda_a = 600_milli;
  Decimal alpha = 800_milli;
  PathFormula path_formula = PathFormula::kMainText;
  FormatMode format_mode = FormatMode::kSoft;
  MatchMode match_mode = MatchMode::kExact;
  /// When false, an incorrect answer scores 0 outcome (binary outcome ablation).
  bool soft_outcome = true;

  bool operator==(const RewardConfig&) const = default;
};

struct AgentConfig {
  int budget = 4;
  int top_k = 3;
  /// Character cap per generation segment.
  int max_response_length = 4096;
  /// Character cap per retrieved document body; 0 disables the cap.
  int max_doc_chars = 2000;
  /// Backend sampling settings, passed through untouched (temperature, top_p, ...).
  std::map<std::string, std::string> sampling;

  bool operator==(const AgentConfig&) const = default;
};

struct Config {
  RewardConfig reward;
  AgentConfig agent;
  bool operator==(const Config&) const = default;
};

inline Config default_config() { return {}; }

inline std::vector<std::string> validate_config(const RewardConfig& cfg) {
  std::vector<std::string> out;
  auto coef = [&](const char* name, Decimal v) {
    if (v < Decimal{}) out.push_back(std::string(name) + ": negative coefficient");
  };
  coef("lambda_f", cfg.lambda_f);
  coef("lambda_p", cfg.lambda_p);
  coef("lambda_a", cfg.lambda_a);
  if (cfg.alpha < Decimal{} || cfg.alpha > 1000_milli) out.push_back("alpha outside [0,1]");
  return out;
}

inline std::vector<std::string> validate_config(const AgentConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.budget < 1) out.push_back("budget: must be positive");
  if (cfg.top_k < 1) out.push_back("top_k: must be positive");
  if (cfg.max_response_length < 1) out.push_back("max_response_length: must be positive");
  if (cfg.max_doc_chars < 0) out.push_back("max_doc_chars: must be non-negative");
  return out;
}

inline std::vector<std::string> validate_config(const Config& cfg) {
  auto out = validate_config(cfg.reward);
  auto more = validate_config(cfg.agent);
  out.insert(out.end(), more.begin(), more.end());
  return out;
}

namespace detail {

inline int parse_int(const std::string& key, std::string_view v) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError(key + ": expected integer, got '" + std::string(v) + "'");
  return out;
}

inline bool parse_bool(const std::string& key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true/false, got '" + std::string(v) + "'");
}

}  // namespace detail

/// Sets one field by its file key. Throws ConfigError on unknown keys or bad values.
inline void apply_setting(Config& cfg, const std::string& key, std::string_view raw) {
  std::string value = text::trim(raw);
  auto dec = [&](Decimal& field) {
    try {
      field = Decimal::parse(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key + ": " + e.what());
    }
  };
  auto bad = [&](const char* allowed) {
    return ConfigError(key + ": expected one of {" + allowed + "}, got '" + value + "'");
  };
  auto& r = cfg.reward;
  auto& a = cfg.agent;
  if (key == "lambda_f") dec(r.lambda_f);
  else if (key == "lambda_p") dec(r.lambda_p);
  else if (key == "lambda_a") dec(r.lambda_a);
  else if (key == "alpha") dec(r.alpha);
  else if (key == "path_formula") {
    if (value == "main_text") r.path_formula = PathFormula::kMainText;
    else if (value == "algorithm3") r.path_formula = PathFormula::kAlgorithm3;
    else throw bad("main_text, algorithm3");
  } else if (key == "format_mode") {
    if (value == "soft") r.format_mode = FormatMode::kSoft;
    else if (value == "strict") r.format_mode = FormatMode::kStrict;
    else if (value == "off") r.format_mode = FormatMode::kOff;
    else throw bad("soft, strict, off");
  } else if (key == "match_mode") {
    if (value == "exact") r.match_mode = MatchMode::kExact;
    else if (value == "containment") r.match_mode = MatchMode::kContainment;
    else throw bad("exact, containment");
  } else if (key == "soft_outcome") r.soft_outcome = detail::parse_bool(key, value);
  else if (key == "budget") a.budget = detail::parse_int(key, value);
  else if (key == "top_k") a.top_k = detail::parse_int(key, value);
  else if (key == "max_response_length") a.max_response_length = detail::parse_int(key, value);
  else if (key == "max_doc_chars") a.max_doc_chars = detail::parse_int(key, value);
  else if (key.starts_with("sampling.") && key.size() > 9) a.sampling[key.substr(9)] = value;
  else throw ConfigError("unknown config key '" + key + "'");
}

/// Parses "key = value" lines; '#' starts a comment. Later lines win.
inline Config parse_config(std::string_view doc, Config base = default_config()) {
  std::istringstream in{std::string(doc)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto body = text::trim_view(line);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = text::trim(body.substr(0, eq));
    try {
      apply_setting(base, key, body.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

inline std::string serialize_config(const Config& cfg) {
  std::ostringstream out;
  const auto& r = cfg.reward;
  const auto& a = cfg.agent;
  out << "lambda_f = " << r.lambda_f.to_string() << '\n'
      << "lambda_p = " << r.lambda_p.to_string() << '\n'
      << "lambda_a = " << r.lambda_a.to_string() << '\n'
      << "alpha = " << r.alpha.to_string() << '\n'
      << "path_formula = " << to_string(r.path_formula) << '\n'
      << "format_mode = " << to_string(r.format_mode) << '\n'
      << "match_mode = " << to_string(r.match_mode) << '\n'
      << "soft_outcome = " << (r.soft_outcome ? "true" : "false") << '\n'
      << "budget = " << a.budget << '\n'
      << "top_k = " << a.top_k << '\n'
      << "max_response_length = " << a.max_response_length << '\n'
      << "max_doc_chars = " << a.max_doc_chars << '\n';
  for (const auto& [k, v] : a.sampling) out << "sampling." << k << " = " << v << '\n';
  return out.str();
}

}  // namespace pathreward
