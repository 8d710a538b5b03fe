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

// Prompt templates. assets/prompts/*.txt hold the same text; a test keeps
// the two in sync.

#include <map>
#include <string>
#include <string_view>

namespace pathreward::prompts {

inline constexpr std::string_view kInference = R"PROMPT(You are a meticulous Deep Research Agent. Your goal is to provide a comprehensive and accurate answer by conducting multiple rounds of search.

## CRITICAL INSTRUCTIONS

1. Detailed Planning (<reasoning>):
- In the first turn, you MUST break the question down into multiple dependent sub-questions.
- Focus on one sub-question at a time.

2. Step-by-Step Execution (<tool_call>):
- Execute only ONE search query per turn.
- After receiving results, verify: "Is this sufficient? Do I need more details?"

3. No Guessing:
- If results are incomplete, issue another search. Do NOT hallucinate.

4. Final Answer (<answer>):
- Only output <answer> when ALL necessary information is gathered.

## CURRENT TASK

Question: {question}
)PROMPT";

inline constexpr std::string_view kReferencePlanner = R"PROMPT(You are an expert planner and reasoning optimizer.

Current Question: {question}

Correct Answer: {golden_answers}

Your task is to generate:

1. Optimized Reasoning Path: A sequence of search queries that would lead directly to the correct answer in the most efficient way. Format as a numbered list.

2. Optimized Planner: A concise, step-by-step instruction on how a reasoning agent should solve this question correctly and efficiently.

Important:
- Focus on the minimal set of queries needed.
- Avoid redundant or inefficient steps.

Output format:

<correct_reasoning_path>
1. query 1
2. query 2
</correct_reasoning_path>

<optimized_planner>
To solve this, first search for... then...
</optimized_planner>
)PROMPT";

inline constexpr std::string_view kReferenceReasoning = R"PROMPT(You are an expert planner and reasoning optimizer.

Current Question: {question}

Correct Answer: {golden_answers}

Your task is to generate:

1. Optimized Reasoning Path: A sequence of search queries that would lead directly to the correct answer in the most efficient way. Format as a numbered list.

2. Optimized Planner: A concise, step-by-step instruction on how a reasoning agent should solve this question correctly and efficiently.

Important:
- Focus on the minimal set of queries needed.
- Avoid redundant or inefficient steps.

Draft Planner:
{planner}

Follow the draft planner and write out the search queries it calls for.

Output format:

<correct_reasoning_path>
1. query 1
2. query 2
</correct_reasoning_path>

<optimized_planner>
To solve this, first search for... then...
</optimized_planner>
)PROMPT";

inline constexpr std::string_view kEvaluation = R"PROMPT(You are an expert RL researcher evaluating an AI agent's trajectory.

Your task is to conduct a Dual-Track Evaluation:
1. Self-Consistency Track: How well did the agent execute its OWN plan?
2. Reference-Alignment Track: How well did the agent follow the Expert plan?
3. Outcome Evaluation: Assess accuracy and reasoning quality.

Evaluation Inputs:
- Question: {question}
- Correct Answer: {golden_answers}
- Reference Planner: {ref_planner}
- Reference Path: {ref_reasoning_path}
- Model Trajectory: {trajectory}

Scoring Criteria:
- Planner Score: 0.2 (Bad) / 0.6 (Average) / 1.0 (Good) / 1.2 (Excellent)
- Outcome Accuracy: 0.0 (Wrong) / 0.5 (Partial) / 1.0 (Correct)
- Reasoning Quality: 0.0 / 0.5 / 0.8 / 1.0

Output: JSON with planner_score, model_plan_steps, effective_steps_self, effective_steps_ref, outcome_accuracy_score, outcome_reasoning_score.
)PROMPT";

/// Single-pass substitution of "{name}" placeholders. Substituted values are
/// never rescanned; placeholders without a value are left as they are.
inline std::string fill(std::string_view tpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tpl.size());
  std::size_t pos = 0;
  while (pos < tpl.size()) {
    std::size_t open = tpl.find('{', pos);
    if (open == std::string_view::npos) break;
    std::size_t close = tpl.find('}', open + 1);
    if (close == std::string_view::npos) break;
    auto it = values.find(std::string(tpl.substr(open + 1, close - open - 1)));
    if (it == values.end()) {
      out.append(tpl.substr(pos, open + 1 - pos));
      pos = open + 1;
      continue;
    }
    out.append(tpl.substr(pos, open - pos));
    out += it->second;
    pos = close + 1;
  }
  out.append(tpl.substr(pos));
  return out;
}

}  // namespace pathreward::prompts
