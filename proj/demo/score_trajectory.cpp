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

// Scores one hand-written transcript with the deterministic oracle judge and
// prints the reward breakdown.

#include <iostream>

#include "pathreward.hpp"

int main() {
  using namespace pathreward;

  QASample sample{"q1", "Who is the mentor of the founder of Arvel?", {"Ilse Varga"}, {}};
  ReferenceBundle ref{"q1", "1. Find the founder of Arvel. 2. Find the mentor of the result.",
                      {"founder of Arvel", "mentor of Tomas Reyl"}, Provenance::kVoted};

  const char* transcript =
      "<reasoning>I need to: 1. Find the founder of Arvel. 2. Find the mentor of the result.</reasoning>"
      "<tool_call>founder of Arvel</tool_call>"
      "<tool_response>Doc 1: The founder of Arvel is Tomas Reyl.</tool_response>"
      "<reasoning>Now the mentor.</reasoning>"
      "<tool_call>mentor of Tomas Reyl</tool_call>"
      "<tool_response>Doc 1: The mentor of Tomas Reyl is Ilse Varga.</tool_response>"
      "<answer>Ilse Varga</answer>";

  auto t = parse_trajectory(transcript, sample.id);
  auto verdict = oracle_evaluate(t, sample, &ref);
  auto b = total_reward(t, sample, &ref, verdict, default_config().reward);

  std::cout << "verdict  " << serialize_verdict(verdict) << '\n';
  std::cout << "reward   " << to_json(b, sample.id).dump() << '\n';
  return 0;
}
