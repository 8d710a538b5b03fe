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

#include <gtest/gtest.h>

#include <random>

#include "pathreward.hpp"

using namespace pathreward;

TEST(DefaultConfig, RewardWeights) {
  auto cfg = default_config();
  EXPECT_EQ(cfg.reward.lambda_f.milli(), 100);
  EXPECT_EQ(cfg.reward.lambda_p.milli(), 300);
  EXPECT_EQ(cfg.reward.lambda_a.milli(), 600);
  EXPECT_EQ(cfg.reward.alpha.milli(), 800);
}

TEST(DefaultConfig, AgentLimits) {
  auto cfg = default_config();
  EXPECT_EQ(cfg.agent.budget, 4);
  EXPECT_EQ(cfg.agent.top_k, 3);
}

TEST(DefaultConfig, Modes) {
  auto cfg = default_config();
  EXPECT_EQ(cfg.reward.path_formula, PathFormula::kMainText);
  EXPECT_EQ(cfg.reward.format_mode, FormatMode::kSoft);
  EXPECT_EQ(cfg.reward.match_mode, MatchMode::kExact);
  EXPECT_TRUE(cfg.reward.soft_outcome);
}

TEST(ValidateConfig, DefaultsAreClean) { EXPECT_TRUE(validate_config(default_config()).empty()); }

TEST(ValidateConfig, AlphaOutOfRange) {
  RewardConfig r;
  r.alpha = Decimal::parse("1.5");
  auto v = validate_config(r);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], "alpha outside [0,1]");
}

TEST(ValidateConfig, NegativeCoefficient) {
  RewardConfig r;
  r.lambda_p = Decimal::parse("-0.1");
  auto v = validate_config(r);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("negative coefficient"), std::string::npos);
}

TEST(ValidateConfig, ReportsEveryViolation) {
  Config c;
  c.reward.lambda_f = Decimal::parse("-1");
  c.reward.alpha = Decimal::parse("-0.2");
  c.agent.budget = 0;
  c.agent.top_k = 0;
  EXPECT_EQ(validate_config(c).size(), 4u);
}

TEST(Decimal, ParsesAndPrintsExactly) {
  EXPECT_EQ(Decimal::parse("0.1").milli(), 100);
  EXPECT_EQ(Decimal::parse("-0.05").milli(), -50);
  EXPECT_EQ(Decimal::parse("1.2").to_string(), "1.2");
  EXPECT_EQ(Decimal::parse("3").to_string(), "3");
  EXPECT_EQ(Decimal::parse("0.125").to_string(), "0.125");
  EXPECT_THROW(Decimal::parse("0.0001"), std::invalid_argument);
  EXPECT_THROW(Decimal::parse("abc"), std::invalid_argument);
  EXPECT_THROW(Decimal::parse(""), std::invalid_argument);
}

TEST(ConfigFile, ParsesKeysAndComments) {
  auto cfg = parse_config("# weights\nlambda_p = 0.4\nalpha=0.5  # inline\nformat_mode = strict\nbudget = 6\n"
                          "sampling.temperature = 0.6\n");
  EXPECT_EQ(cfg.reward.lambda_p.milli(), 400);
  EXPECT_EQ(cfg.reward.alpha.milli(), 500);
  EXPECT_EQ(cfg.reward.format_mode, FormatMode::kStrict);
  EXPECT_EQ(cfg.agent.budget, 6);
  EXPECT_EQ(cfg.agent.sampling.at("temperature"), "0.6");
}

TEST(ConfigFile, UnknownKeyIsAnError) {
  try {
    parse_config("lambda_p = 0.3\nlearning_rate = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("learning_rate"), std::string::npos);
  }
}

TEST(ConfigFile, BadValues) {
  EXPECT_THROW(parse_config("budget = four"), ConfigError);
  EXPECT_THROW(parse_config("path_formula = eq6"), ConfigError);
  EXPECT_THROW(parse_config("just text"), ConfigError);
  EXPECT_THROW(parse_config("soft_outcome = maybe"), ConfigError);
}

TEST(ConfigFile, RoundTripIsBitExact) {
  std::mt19937_64 rng(5);
  auto dec = [&](int lo, int hi) { return Decimal::from_milli(std::uniform_int_distribution<int>(lo, hi)(rng)); };
  for (int i = 0; i < 2000; ++i) {
    Config c;
    c.reward.lambda_f = dec(0, 2000);
    c.reward.lambda_p = dec(0, 2000);
    c.reward.lambda_a = dec(0, 2000);
    c.reward.alpha = dec(0, 1000);
    c.reward.path_formula = i % 2 ? PathFormula::kMainText : PathFormula::kAlgorithm3;
    c.reward.format_mode = static_cast<FormatMode>(i % 3);
    c.reward.match_mode = i % 5 ? MatchMode::kExact : MatchMode::kContainment;
    c.reward.soft_outcome = i % 7 != 0;
    c.agent.budget = 1 + i % 9;
    c.agent.top_k = 1 + i % 4;
    if (i % 3 == 0) c.agent.sampling["top_p"] = "0.95";
    EXPECT_EQ(parse_config(serialize_config(c)), c);
  }
}

TEST(ClampVerdict, EnforcesCountBounds) {
  EvaluatorVerdict v;
  v.planner_score = 1000_milli;
  v.model_plan_steps = 2;
  v.effective_steps_self = 5;
  v.effective_steps_ref = 4;
  auto c = clamp_verdict(v, 1, 3);
  EXPECT_EQ(c.effective_steps_self, 1);
  EXPECT_EQ(c.effective_steps_ref, 1);
  EXPECT_FALSE(c.degraded);
}

TEST(ClampVerdict, SnapsOffGridScores) {
  EvaluatorVerdict v;
  v.planner_score = Decimal::parse("0.9");
  v.outcome_accuracy = Decimal::parse("0.7");
  v.outcome_reasoning = Decimal::parse("0.65");
  auto c = clamp_verdict(v);
  EXPECT_EQ(c.planner_score.milli(), 1000);
  EXPECT_EQ(c.outcome_accuracy.milli(), 500);
  EXPECT_EQ(c.outcome_reasoning.milli(), 500);
  EXPECT_TRUE(c.degraded);
}

TEST(ClampVerdict, IdempotentOnRandomInput) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> score(-500, 2000), count(-3, 8);
  for (int i = 0; i < 20000; ++i) {
    EvaluatorVerdict v;
    v.planner_score = Decimal::from_milli(score(rng));
    v.outcome_accuracy = Decimal::from_milli(score(rng));
    v.outcome_reasoning = Decimal::from_milli(score(rng));
    v.model_plan_steps = count(rng);
    v.effective_steps_self = count(rng);
    v.effective_steps_ref = count(rng);
    std::optional<std::size_t> n_actions, ref_len;
    if (i % 2) n_actions = static_cast<std::size_t>(i % 5);
    if (i % 3) ref_len = static_cast<std::size_t>(i % 4);
    auto once = clamp_verdict(v, n_actions, ref_len);
    ASSERT_EQ(clamp_verdict(once, n_actions, ref_len), once);
    ASSERT_LE(once.effective_steps_self, once.model_plan_steps);
    ASSERT_GE(once.effective_steps_ref, 0);
  }
}

TEST(CheckTrajectory, FlagsInvariantViolations) {
  Trajectory t;
  t.steps = {TrajectoryStep::tool_call(" "), TrajectoryStep::answer("x"), TrajectoryStep::reasoning("late"),
             TrajectoryStep::tool_call("q"), TrajectoryStep::tool_response({"a", "b"})};
  auto v = check_trajectory(t, 1, 1);
  EXPECT_EQ(v.size(), 5u);
}

TEST(CheckReference, EmptyAndDuplicateSteps) {
  ReferenceBundle r{"q", "p", {}, Provenance::kVoted};
  EXPECT_EQ(check_reference(r).size(), 1u);
  r.provenance = Provenance::kSinglePass;
  EXPECT_TRUE(check_reference(r).empty());
  r.ref_path = {"Founder of  X", "founder of x"};
  EXPECT_EQ(check_reference(r).size(), 1u);
}
