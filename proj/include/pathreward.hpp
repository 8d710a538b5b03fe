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

#include "pathreward/agent_runtime.hpp"
#include "pathreward/cli_io.hpp"
#include "pathreward/core_model.hpp"
#include "pathreward/decimal.hpp"
#include "pathreward/errors.hpp"
#include "pathreward/evaluator_gateway.hpp"
#include "pathreward/json_io.hpp"
#include "pathreward/prompts.hpp"
#include "pathreward/reference_factory.hpp"
#include "pathreward/reward_engine.hpp"
#include "pathreward/sandbox.hpp"
#include "pathreward/trajectory_codec.hpp"
