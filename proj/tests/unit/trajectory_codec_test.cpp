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

#include "../support/generators.hpp"
#include "pathreward.hpp"

using namespace pathreward;

namespace {
const char* kFourSteps =
    "<reasoning>plan</reasoning><tool_call>q1</tool_call><tool_response>d1</tool_response><answer>x</answer>";
}

TEST(ParseTrajectory, FourStepExample) {
  auto t = parse_trajectory(kFourSteps, "s");
  ASSERT_EQ(t.steps.size(), 4u);
  EXPECT_EQ(t.n_actions(), 1u);
  EXPECT_EQ(t.steps[0].kind, StepKind::kReasoning);
  EXPECT_EQ(t.steps[1].body, "q1");
  EXPECT_EQ(t.steps[2].documents, std::vector<std::string>{"d1"});
  EXPECT_EQ(t.answer(), "x");
}

TEST(ParseTrajectory, EmptyInput) { EXPECT_TRUE(parse_trajectory("", "s").steps.empty()); }

TEST(ParseTrajectory, UnclosedAnswerReportsItsOffset) {
  try {
    parse_trajectory("<answer>x", "s");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 0u);
  }
  try {
    parse_trajectory("<reasoning>p</reasoning> <answer>x", "s");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 25u);
  }
}

TEST(ParseTrajectory, GrammarViolations) {
  EXPECT_THROW(parse_trajectory("<answer>x</answer><reasoning>r</reasoning>", "s"), ParseError);
  EXPECT_THROW(parse_trajectory("<reasoning>a<reasoning>b</reasoning></reasoning>", "s"), ParseError);
  EXPECT_THROW(parse_trajectory("<reasoning>a<tool_call>b</tool_call></reasoning>", "s"), ParseError);
  EXPECT_THROW(parse_trajectory("stray<answer>x</answer>", "s"), ParseError);
  EXPECT_THROW(parse_trajectory("<tool_call> </tool_call><tool_response></tool_response>", "s"), ParseError);
  EXPECT_THROW(parse_trajectory("<tool_call>q</tool_call><answer>x</answer>", "s"), ParseError);
  EXPECT_THROW(parse_trajectory("<answer>x</answer><answer>y</answer>", "s"), ParseError);
  EXPECT_THROW(parse_trajectory("</answer>", "s"), ParseError);
}

TEST(ParseTrajectory, TrailingCallWithoutResponseIsAllowed) {
  auto t = parse_trajectory("<reasoning>p</reasoning><tool_call>q</tool_call>", "s");
  EXPECT_EQ(t.n_actions(), 1u);
}

TEST(ParseTrajectory, SearchR1Dialect) {
  ParseOptions o{Dialect::kSearchR1};
  auto t = parse_trajectory("<think>p</think><search>q</search><result>d</result><answer>x</answer>", "s", o);
  EXPECT_EQ(t.steps.size(), 4u);
  EXPECT_EQ(t.n_actions(), 1u);
  EXPECT_EQ(render_trajectory(t, Dialect::kSearchR1), "<think>p</think>\n<search>q</search>\n<result>[1] d</result>\n<answer>x</answer>");
}

TEST(RenderTrajectory, Basics) {
  EXPECT_EQ(render_trajectory(Trajectory{}), "");
  Trajectory t;
  t.steps.push_back(TrajectoryStep::answer("x"));
  EXPECT_EQ(render_trajectory(t), "<answer>x</answer>");
}

TEST(RenderTrajectory, FourStepExampleRoundTrips) {
  auto t = parse_trajectory(kFourSteps, "s");
  auto text = render_trajectory(t);
  EXPECT_EQ(text, "<reasoning>plan</reasoning>\n<tool_call>q1</tool_call>\n<tool_response>[1] d1</tool_response>\n"
                  "<answer>x</answer>");
  EXPECT_EQ(parse_trajectory(text, "s"), t);
}

TEST(RenderTrajectory, MultiDocumentResponses) {
  Trajectory t;
  t.steps = {TrajectoryStep::tool_call("q"), TrajectoryStep::tool_response({"first\nline", "second", "third"})};
  auto back = parse_trajectory(render_trajectory(t), "");
  EXPECT_EQ(back.steps[1].documents, t.steps[1].documents);
}

TEST(RoundTripProperty, TenThousandGeneratedTrajectories) {
  gen::Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    auto t = gen::trajectory(rng);
    auto text = render_trajectory(t);
    auto back = parse_trajectory(text, t.sample_id);
    ASSERT_EQ(back, t) << text;
    ASSERT_EQ(render_trajectory(back), text);
    ASSERT_TRUE(format_flags(text).valid_format) << text;
  }
}

TEST(MalformedFuzz, NeverCrashes) {
  gen::Rng rng(2);
  for (int i = 0; i < 10000; ++i) {
    auto text = gen::malformed(rng);
    auto f = format_flags(text);
    bool strict_ok = true;
    try {
      parse_trajectory(text, "s");
    } catch (const ParseError& e) {
      strict_ok = false;
      ASSERT_LE(e.offset(), text.size());
    }
    ASSERT_EQ(f.valid_format, strict_ok);
    auto lenient = parse_trajectory_lenient(text, "s");
    ASSERT_EQ(lenient.error.has_value(), !strict_ok);
    for (const auto& s : lenient.trajectory.steps)
      if (s.kind == StepKind::kToolCall) ASSERT_FALSE(text::trim_view(s.body).empty());
  }
}

TEST(FormatFlags, WellFormed) {
  auto f = format_flags(kFourSteps);
  EXPECT_TRUE(f.valid_format && f.has_answer && f.has_tool_call && f.has_tool_response);
}

TEST(FormatFlags, StrayUnclosedReasoning) {
  auto f = format_flags("<reasoning>plan <tool_response>d</tool_response><answer>x</answer>");
  EXPECT_FALSE(f.valid_format);
  EXPECT_TRUE(f.has_answer);
  EXPECT_FALSE(f.has_tool_call);
  EXPECT_TRUE(f.has_tool_response);
}

TEST(FormatFlags, NoAnswer) { EXPECT_FALSE(format_flags("<reasoning>p</reasoning>").has_answer); }

TEST(FormatFlags, EmptyBodiesDoNotCount) {
  auto f = format_flags("<tool_call> </tool_call><tool_response></tool_response><answer></answer>");
  EXPECT_FALSE(f.has_answer || f.has_tool_call || f.has_tool_response);
}

TEST(FormatFlags, DuplicateAnswersInvalidate) {
  auto f = format_flags("<answer>x</answer><answer>y</answer>");
  EXPECT_FALSE(f.valid_format);
  EXPECT_TRUE(f.has_answer);
  auto t = parse_trajectory_lenient("<answer>x</answer><answer>y</answer>", "s").trajectory;
  EXPECT_EQ(t.answer(), "x");
}

TEST(FormatFlags, TruncatedTranscriptParsesLeniently) {
  auto p = parse_trajectory_lenient("<reasoning>p</reasoning><tool_call>q</tool_call><tool_response>d</tool_response><reasoning>cut", "s");
  EXPECT_TRUE(p.truncated);
  EXPECT_EQ(p.trajectory.steps.size(), 4u);
  EXPECT_FALSE(format_flags(p.trajectory.raw_text).valid_format);
}

TEST(ExtractPlanSteps, NumberedPlan) {
  Trajectory t;
  t.steps.push_back(TrajectoryStep::reasoning("I need to: 1. Find the band… 2. Find the lead singer."));
  EXPECT_EQ(extract_plan_steps(t), (std::vector<std::string>{"Find the band…", "Find the lead singer."}));
}

TEST(ExtractPlanSteps, ProseAndEmpty) {
  Trajectory t;
  EXPECT_TRUE(extract_plan_steps(t).empty());
  t.steps.push_back(TrajectoryStep::reasoning("I will look up the answer and then reply."));
  EXPECT_TRUE(extract_plan_steps(t).empty());
}

TEST(ExtractPlanSteps, LinesAndBullets) {
  EXPECT_EQ(extract_plan_steps("Plan:\n1. alpha\n2. beta\n3. gamma"),
            (std::vector<std::string>{"alpha", "beta", "gamma"}));
  EXPECT_EQ(extract_plan_steps("- alpha\n- beta"), (std::vector<std::string>{"alpha", "beta"}));
  EXPECT_EQ(extract_plan_steps("* one\n* two\n"), (std::vector<std::string>{"one", "two"}));
}

TEST(ExtractPlanSteps, UsesOnlyTheFirstReasoningStep) {
  Trajectory t;
  t.steps = {TrajectoryStep::reasoning("1. a 2. b"), TrajectoryStep::reasoning("1. c 2. d 3. e")};
  EXPECT_EQ(extract_plan_steps(t).size(), 2u);
}

TEST(ExtractPlanSteps, StableUnderTrailingWhitespace) {
  gen::Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    int n = gen::uniform(rng, 1, 5);
    std::string plan = "Plan:";
    std::vector<std::string> expect;
    for (int k = 1; k <= n; ++k) {
      auto step = gen::word(rng) + " " + gen::word(rng);
      expect.push_back(step);
      plan += (gen::coin(rng) ? "\n" : " ") + std::to_string(k) + ". " + step;
    }
    ASSERT_EQ(extract_plan_steps(plan), expect) << plan;
    ASSERT_EQ(extract_plan_steps(plan + std::string(static_cast<std::size_t>(gen::uniform(rng, 1, 4)), ' ') + "\n\t"),
              expect);
  }
}
