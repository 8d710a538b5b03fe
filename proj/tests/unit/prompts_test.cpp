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

#include <fstream>
#include <sstream>

#include "pathreward.hpp"

using namespace pathreward;

namespace {

std::string asset(const std::string& name) {
  std::ifstream in(std::string(PATHREWARD_ASSET_DIR) + "/prompts/" + name, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST(Prompts, EmbeddedMatchAssetFiles) {
  EXPECT_EQ(text::trim(prompts::kInference), text::trim(asset("inference.txt")));
  EXPECT_EQ(text::trim(prompts::kReferencePlanner), text::trim(asset("reference_planner.txt")));
  EXPECT_EQ(text::trim(prompts::kReferenceReasoning), text::trim(asset("reference_reasoning.txt")));
  EXPECT_EQ(text::trim(prompts::kEvaluation), text::trim(asset("evaluation.txt")));
}

TEST(Prompts, FillReplacesSlots) {
  auto out = prompts::fill(prompts::kInference, {{"question", "Where is Orlo?"}});
  EXPECT_NE(out.find("Where is Orlo?"), std::string::npos);
  EXPECT_EQ(out.find("{question}"), std::string::npos);
}
