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

// JSON and JSON Lines encodings of the domain types.

#include <fstream>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "pathreward/core_model.hpp"
#include "pathreward/errors.hpp"
#include "pathreward/reward_engine.hpp"

namespace pathreward {

using json = nlohmann::json;

/// Calls `fn(object, line_number)` for every non-blank line of a JSONL file.
inline void for_each_jsonl(const std::string& path, const std::function<void(const json&, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) throw InputError(path, 0, "<file>", "cannot open for reading");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim_view(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw InputError(path, lineno, "<json>", e.what());
    }
    if (!j.is_object()) throw InputError(path, lineno, "<json>", "expected an object");
    fn(j, lineno);
  }
}

/// Appends one compact JSON object per line and flushes, so partial output
/// survives interruption.
class JsonlWriter {
 public:
  explicit JsonlWriter(const std::string& path, bool append = false)
      : out_(path, append ? std::ios::app : std::ios::trunc) {
    if (!out_) throw Error("cannot open '" + path + "' for writing");
  }
  void write(const json& j) {
    out_ << j.dump() << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

namespace json_detail {

inline const json& require(const json& j, const char* field, const std::string& file, std::size_t line) {
  if (!j.contains(field)) throw InputError(file, line, field, "missing");
  return j.at(field);
}

inline std::string require_string(const json& j, const char* field, const std::string& file, std::size_t line) {
  const auto& v = require(j, field, file, line);
  if (!v.is_string()) throw InputError(file, line, field, "expected a string");
  return v.get<std::string>();
}

inline std::vector<std::string> require_strings(const json& j, const char* field, const std::string& file,
                                                std::size_t line) {
  const auto& v = require(j, field, file, line);
  if (!v.is_array()) throw InputError(file, line, field, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw InputError(file, line, field, "expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace json_detail

// Dataset lines: {id, question, golden_answers:[...], true_path?:[...]}

inline json to_json(const QASample& s) {
  json j{{"id", s.id}, {"question", s.question}, {"golden_answers", s.golden_answers}};
  if (!s.true_path.empty()) j["true_path"] = s.true_path;
  return j;
}

inline QASample sample_from_json(const json& j, const std::string& file = "<memory>", std::size_t line = 0) {
  using namespace json_detail;
  QASample s;
  s.id = require_string(j, "id", file, line);
  if (text::trim_view(s.id).empty()) throw InputError(file, line, "id", "empty");
  s.question = require_string(j, "question", file, line);
  s.golden_answers = require_strings(j, "golden_answers", file, line);
  if (s.golden_answers.empty()) throw InputError(file, line, "golden_answers", "empty");
  for (const auto& g : s.golden_answers)
    if (text::trim_view(g).empty()) throw InputError(file, line, "golden_answers", "blank entry");
  if (j.contains("true_path")) s.true_path = require_strings(j, "true_path", file, line);
  for (const auto& [key, _] : j.items())
    if (key != "id" && key != "question" && key != "golden_answers" && key != "true_path")
      throw InputError(file, line, key, "unknown field");
  return s;
}

inline std::vector<QASample> load_dataset(const std::string& path) {
  std::vector<QASample> out;
  std::set<std::string> ids;
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    auto s = sample_from_json(j, path, line);
    if (!ids.insert(s.id).second) throw InputError(path, line, "id", "duplicate id '" + s.id + "'");
    out.push_back(std::move(s));
  });
  return out;
}

// Trajectory lines: {sample_id, raw_text, steps:[{kind, body}]}; a
// tool_response body is an array of document strings.

inline json to_json(const Trajectory& t) {
  json steps = json::array();
  for (const auto& s : t.steps) {
    if (s.kind == StepKind::kToolResponse)
      steps.push_back({{"kind", to_string(s.kind)}, {"body", s.documents}});
    else
      steps.push_back({{"kind", to_string(s.kind)}, {"body", s.body}});
  }
  return {{"sample_id", t.sample_id}, {"raw_text", t.raw_text}, {"steps", steps}};
}

inline Trajectory trajectory_from_json(const json& j, const std::string& file = "<memory>", std::size_t line = 0) {
  using namespace json_detail;
  Trajectory t;
  t.sample_id = require_string(j, "sample_id", file, line);
  if (j.contains("raw_text")) t.raw_text = require_string(j, "raw_text", file, line);
  if (!j.contains("steps")) {
    if (t.raw_text.empty()) throw InputError(file, line, "steps", "missing and no raw_text to parse");
    t.steps = parse_trajectory_lenient(t.raw_text, t.sample_id).trajectory.steps;
    return t;
  }
  const auto& steps = j.at("steps");
  if (!steps.is_array()) throw InputError(file, line, "steps", "expected an array");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    std::string where = "steps[" + std::to_string(i) + "]";
    if (!s.is_object() || !s.contains("kind") || !s.at("kind").is_string())
      throw InputError(file, line, where + ".kind", "missing");
    auto kind = step_kind_from_string(s.at("kind").get<std::string>());
    if (!kind) throw InputError(file, line, where + ".kind", "unknown kind '" + s.at("kind").get<std::string>() + "'");
    if (!s.contains("body")) throw InputError(file, line, where + ".body", "missing");
    const auto& body = s.at("body");
    if (*kind == StepKind::kToolResponse) {
      if (body.is_string()) {
        t.steps.push_back(TrajectoryStep::tool_response(split_documents(body.get<std::string>())));
      } else if (body.is_array()) {
        std::vector<std::string> docs;
        for (const auto& d : body) {
          if (!d.is_string()) throw InputError(file, line, where + ".body", "expected document strings");
          docs.push_back(d.get<std::string>());
        }
        t.steps.push_back(TrajectoryStep::tool_response(std::move(docs)));
      } else {
        throw InputError(file, line, where + ".body", "expected a string or array");
      }
    } else {
      if (!body.is_string()) throw InputError(file, line, where + ".body", "expected a string");
      t.steps.push_back(TrajectoryStep{*kind, body.get<std::string>(), {}});
    }
  }
  return t;
}

inline std::vector<Trajectory> load_trajectories(const std::string& path) {
  std::vector<Trajectory> out;
  for_each_jsonl(path, [&](const json& j, std::size_t line) { out.push_back(trajectory_from_json(j, path, line)); });
  return out;
}

// Reference cache lines: {sample_id, ref_planner, ref_path:[...], provenance}

inline json to_json(const ReferenceBundle& r) {
  return {{"sample_id", r.sample_id},
          {"ref_planner", r.ref_planner},
          {"ref_path", r.ref_path},
          {"provenance", to_string(r.provenance)}};
}

inline ReferenceBundle reference_from_json(const json& j, const std::string& file = "<memory>", std::size_t line = 0) {
  using namespace json_detail;
  ReferenceBundle r;
  r.sample_id = require_string(j, "sample_id", file, line);
  r.ref_planner = require_string(j, "ref_planner", file, line);
  r.ref_path = require_strings(j, "ref_path", file, line);
  auto prov = require_string(j, "provenance", file, line);
  auto p = provenance_from_string(prov);
  if (!p) throw InputError(file, line, "provenance", "unknown provenance '" + prov + "'");
  r.provenance = *p;
  auto problems = check_reference(r);
  if (!problems.empty()) throw InputError(file, line, "ref_path", problems.front());
  return r;
}

// Verdicts use the judge's field names.

inline json to_json(const EvaluatorVerdict& v) {
  return {{"planner_score", v.planner_score.to_double()},
          {"model_plan_steps", v.model_plan_steps},
          {"effective_steps_self", v.effective_steps_self},
          {"effective_steps_ref", v.effective_steps_ref},
          {"outcome_accuracy_score", v.outcome_accuracy.to_double()},
          {"outcome_reasoning_score", v.outcome_reasoning.to_double()},
          {"degraded", v.degraded}};
}

inline json to_json(const RewardBreakdown& b, const std::string& sample_id) {
  return {{"sample_id", sample_id},     {"r_format", b.r_format}, {"s_self", b.s_self},
          {"s_ref", b.s_ref},           {"r_path", b.r_path},     {"r_outcome", b.r_outcome},
          {"r_total", b.r_total},       {"invalid", b.invalid},   {"exact_match", b.exact_match}};
}

}  // namespace pathreward
