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
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "pathreward/core_model.hpp"
#include "pathreward/log.hpp"
#include "pathreward/text.hpp"
#include "pathreward/trajectory_codec.hpp"

namespace pathreward {

struct RewardBreakdown {
  double r_format = 0;
  double s_self = 0;
  double s_ref = 0;
  double r_path = 0;
  double r_outcome = 0;
  double r_total = 0;
  bool invalid = false;
  bool exact_match = false;

  bool operator==(const RewardBreakdown&) const = default;
};

struct FormatReward {
  Decimal value;
  bool invalid = false;
  bool operator==(const FormatReward&) const = default;
};

/// Buffered format reward.
///   soft:   0.1 for a valid transcript with an answer and a search,
///           0.05 for one that at least has an answer and a tool response,
///           otherwise the trajectory is invalid (total reward 0).
///   strict: 0.1 for the first case, invalid otherwise.
///   off:    always 0; a trajectory without an answer is still invalid.
inline FormatReward format_reward(const FormatFlags& f, FormatMode mode) {
  bool full = f.valid_format && f.has_answer && f.has_tool_call;
  switch (mode) {
    case FormatMode::kSoft:
      if (full) return {100_milli, false};
      if (f.has_answer && f.has_tool_response) return {50_milli, false};
      return {0_milli, true};
    case FormatMode::kStrict:
      if (full) return {100_milli, false};
      return {0_milli, true};
    case FormatMode::kOff:
      return {0_milli, !f.has_answer};
  }
  return {0_milli, true};
}

/// Self-consistency track: planner rating × plan completion × (main text
/// only) execution efficiency. Zero when there is no plan or no action.
inline double self_consistency_score(const EvaluatorVerdict& v, std::size_t n_actions, PathFormula formula) {
  if (v.model_plan_steps <= 0) return 0.0;
  double planner = v.planner_score.to_double();
  double executed = static_cast<double>(v.effective_steps_self);
  double completion = executed / static_cast<double>(v.model_plan_steps);
  if (formula == PathFormula::kAlgorithm3) return planner * completion;
  if (n_actions == 0) return 0.0;
  return planner * completion * (executed / static_cast<double>(n_actions));
}

/// Reference-alignment track: reference coverage × (main text only)
/// coverage per action. Zero when the reference is empty or there is no action.
inline double reference_alignment_score(std::size_t n_covered, std::size_t ref_len, std::size_t n_actions,
                                        PathFormula formula) {
  if (ref_len == 0) return 0.0;
  double covered = static_cast<double>(n_covered);
  double coverage = covered / static_cast<double>(ref_len);
  if (formula == PathFormula::kAlgorithm3) return coverage;
  if (n_actions == 0) return 0.0;
  return coverage * (covered / static_cast<double>(n_actions));
}

/// The better of the two tracks, so neither dilutes the other.
inline double path_reward(double s_self, double s_ref) { return std::max(s_self, s_ref); }

/// 1 when correct; otherwise alpha·accuracy + (1 − alpha)·reasoning, or 0
/// when soft scoring is disabled.
inline double outcome_reward(bool is_correct, const EvaluatorVerdict& v, Decimal alpha, bool soft = true) {
  if (is_correct) return 1.0;
  if (!soft) return 0.0;
  double a = alpha.to_double();
  return a * v.outcome_accuracy.to_double() + (1.0 - a) * v.outcome_reasoning.to_double();
}

inline bool exact_match(std::string_view answer, const std::vector<std::string>& golden) {
  auto norm = text::normalize_answer(answer);
  return std::any_of(golden.begin(), golden.end(),
                     [&](const std::string& g) { return text::normalize_answer(g) == norm; });
}

/// True when some normalized golden answer occurs inside the normalized response.
inline bool containment_acc(std::string_view response, const std::vector<std::string>& golden) {
  auto norm = text::normalize_answer(response);
  return std::any_of(golden.begin(), golden.end(), [&](const std::string& g) {
    auto ng = text::normalize_answer(g);
    return !ng.empty() && norm.find(ng) != std::string::npos;
  });
}

inline bool answer_correct(std::string_view answer, const std::vector<std::string>& golden, MatchMode mode) {
  return mode == MatchMode::kExact ? exact_match(answer, golden) : containment_acc(answer, golden);
}

/// Full reward for one trajectory. `ref` may be null when the reference
/// cache has no entry for the sample; the reference track then scores 0.
inline RewardBreakdown total_reward(const Trajectory& t, const QASample& sample, const ReferenceBundle* ref,
                                    const EvaluatorVerdict& verdict, const RewardConfig& cfg) {
  RewardBreakdown b;
  auto fr = format_reward(format_flags(t), cfg.format_mode);
  if (fr.invalid) {
    b.invalid = true;
    return b;
  }
  std::size_t n_actions = t.n_actions();
  std::size_t ref_len = ref ? ref->ref_path.size() : 0;
  auto v = clamp_verdict(verdict, n_actions, ref_len);

  b.r_format = fr.value.to_double();
  b.s_self = self_consistency_score(v, n_actions, cfg.path_formula);
  if (ref) {
    b.s_ref = reference_alignment_score(static_cast<std::size_t>(v.effective_steps_ref), ref_len, n_actions,
                                        cfg.path_formula);
  } else {
    log::warn("no reference for sample '" + sample.id + "'; reference track scores 0");
  }
  b.r_path = path_reward(b.s_self, b.s_ref);

  auto answer = t.answer().value_or("");
  b.exact_match = exact_match(answer, sample.golden_answers);
  bool correct = cfg.match_mode == MatchMode::kExact ? b.exact_match : containment_acc(answer, sample.golden_answers);
  b.r_outcome = outcome_reward(correct, v, cfg.alpha, cfg.soft_outcome);

  b.r_total = cfg.lambda_f.to_double() * b.r_format + cfg.lambda_p.to_double() * b.r_path +
              cfg.lambda_a.to_double() * b.r_outcome;
  return b;
}

/// Group-relative advantages: (r − mean) / (population std + eps). A group
/// whose rewards are all equal maps to exact zeros.
inline std::vector<double> grpo_advantages(std::span<const double> rewards, double eps = 1e-8) {
  std::vector<double> out(rewards.size(), 0.0);
  if (rewards.empty()) return out;
  if (std::all_of(rewards.begin(), rewards.end(), [&](double r) { return r == rewards.front(); })) return out;
  double n = static_cast<double>(rewards.size());
  double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  double sd = std::sqrt(var / n);
  for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) / (sd + eps);
  return out;
}

struct RolloutGroup {
  std::string sample_id;
  std::vector<double> rewards;
  std::vector<double> advantages;
};

inline RolloutGroup make_group(std::string sample_id, std::vector<double> rewards, double eps = 1e-8) {
  RolloutGroup g{std::move(sample_id), std::move(rewards), {}};
  g.advantages = grpo_advantages(g.rewards, eps);
  return g;
}

}  // namespace pathreward
