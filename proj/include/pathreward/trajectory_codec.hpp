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

#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pathreward/core_model.hpp"
#include "pathreward/errors.hpp"
#include "pathreward/text.hpp"

namespace pathreward {

/// Tag vocabulary. Canonical uses reasoning/tool_call/tool_response/answer;
/// SearchR1 accepts the think/search/result synonyms.
enum class Dialect { kCanonical, kSearchR1 };

struct ParseOptions {
  Dialect dialect = Dialect::kCanonical;
};

struct FormatFlags {
  bool valid_format = false;
  bool has_answer = false;
  bool has_tool_call = false;
  bool has_tool_response = false;

  bool operator==(const FormatFlags&) const = default;
};

namespace codec_detail {

inline constexpr std::array<StepKind, 4> kKinds{StepKind::kReasoning, StepKind::kToolCall,
                                                StepKind::kToolResponse, StepKind::kAnswer};

inline std::string_view tag_name(StepKind kind, Dialect d) {
  if (d == Dialect::kSearchR1) {
    switch (kind) {
      case StepKind::kReasoning: return "think";
      case StepKind::kToolCall: return "search";
      case StepKind::kToolResponse: return "result";
      case StepKind::kAnswer: return "answer";
    }
  }
  switch (kind) {
    case StepKind::kReasoning: return "reasoning";
    case StepKind::kToolCall: return "tool_call";
    case StepKind::kToolResponse: return "tool_response";
    case StepKind::kAnswer: return "answer";
  }
  return "";
}

struct Tag {
  StepKind kind;
  bool closing;
  std::size_t offset;  // position of '<'
  std::size_t end;     // one past '>'
};

/// Every recognised tag in order of appearance.
inline std::vector<Tag> scan_tags(std::string_view text, Dialect d) {
  std::vector<Tag> tags;
  std::size_t pos = 0;
  while ((pos = text.find('<', pos)) != std::string_view::npos) {
    bool closing = pos + 1 < text.size() && text[pos + 1] == '/';
    std::size_t name_start = pos + (closing ? 2 : 1);
    bool matched = false;
    for (StepKind kind : kKinds) {
      auto name = tag_name(kind, d);
      if (text.substr(name_start, name.size()) == name && name_start + name.size() < text.size() &&
          text[name_start + name.size()] == '>') {
        tags.push_back({kind, closing, pos, name_start + name.size() + 1});
        pos = name_start + name.size() + 1;
        matched = true;
        break;
      }
    }
    if (!matched) ++pos;
  }
  return tags;
}

inline std::string open_tag(StepKind k, Dialect d) { return "<" + std::string(tag_name(k, d)) + ">"; }
inline std::string close_tag(StepKind k, Dialect d) { return "</" + std::string(tag_name(k, d)) + ">"; }

/// Matches "[n]" at `pos` followed by a space, newline or end; returns the
/// position just after the marker and its separator.
inline std::optional<std::size_t> doc_marker(std::string_view s, std::size_t pos, int n) {
  std::string marker = "[" + std::to_string(n) + "]";
  if (s.substr(pos, marker.size()) != marker) return std::nullopt;
  std::size_t after = pos + marker.size();
  if (after == s.size()) return after;
  if (s[after] == ' ' || s[after] == '\n') return after + 1;
  return std::nullopt;
}

}  // namespace codec_detail

/// Splits a tool_response body into documents. Bodies rendered as
/// "[1] doc\n[2] doc" are split on the markers; anything else is a single
/// document. An empty body has no documents.
inline std::vector<std::string> split_documents(std::string_view body) {
  auto trimmed = text::trim_view(body);
  if (trimmed.empty()) return {};
  auto first = codec_detail::doc_marker(trimmed, 0, 1);
  if (!first) return {std::string(trimmed)};
  std::vector<std::string> docs;
  std::size_t start = *first;
  int next = 2;
  std::size_t search = start;
  while (true) {
    std::size_t nl = trimmed.find('\n', search);
    if (nl == std::string_view::npos) break;
    if (auto after = codec_detail::doc_marker(trimmed, nl + 1, next)) {
      docs.push_back(text::trim(trimmed.substr(start, nl - start)));
      start = *after;
      search = start;
      ++next;
    } else {
      search = nl + 1;
    }
  }
  docs.push_back(text::trim(trimmed.substr(start)));
  return docs;
}

inline std::string render_documents(const std::vector<std::string>& docs) {
  std::string out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (i) out += '\n';
    out += "[" + std::to_string(i + 1) + "] " + text::trim(docs[i]);
  }
  return text::trim(out);
}

namespace codec_detail {

inline TrajectoryStep make_step(StepKind kind, std::string_view body) {
  if (kind == StepKind::kToolResponse) return TrajectoryStep::tool_response(split_documents(body));
  return TrajectoryStep{kind, text::trim(body), {}};
}

inline std::optional<std::size_t> first_non_space(std::string_view text, std::size_t from, std::size_t to) {
  for (std::size_t i = from; i < to; ++i)
    if (!text::is_space(text[i])) return i;
  return std::nullopt;
}

}  // namespace codec_detail

/// Strict parse of a tagged transcript. Throws ParseError on unclosed or
/// interleaved tags, nested same-kind tags, text outside tags, anything
/// after </answer>, an empty tool_call, or a tool_call not followed by a
/// tool_response (unless it is the last step).
inline Trajectory parse_trajectory(std::string_view text, std::string sample_id, ParseOptions opts = {}) {
  using namespace codec_detail;
  Trajectory t;
  t.sample_id = std::move(sample_id);
  t.raw_text = std::string(text);
  auto tags = scan_tags(text, opts.dialect);

  std::vector<std::size_t> call_offsets;
  std::optional<Tag> open;
  std::size_t cursor = 0;
  bool answered = false;
  for (const auto& tag : tags) {
    auto name = std::string(tag_name(tag.kind, opts.dialect));
    if (!open) {
      if (auto stray = first_non_space(text, cursor, tag.offset))
        throw ParseError(*stray, answered ? "content after </answer>" : "text outside tags");
      if (answered) throw ParseError(tag.offset, "tag after </answer>");
      if (tag.closing) throw ParseError(tag.offset, "unmatched </" + name + ">");
      open = tag;
      continue;
    }
    auto open_name = std::string(tag_name(open->kind, opts.dialect));
    if (!tag.closing) {
      if (tag.kind == open->kind) throw ParseError(tag.offset, "nested <" + name + "> inside <" + open_name + ">");
      throw ParseError(tag.offset, "<" + name + "> opened inside <" + open_name + ">");
    }
    if (tag.kind != open->kind) throw ParseError(tag.offset, "</" + name + "> closes <" + open_name + ">");
    auto body = text.substr(open->end, tag.offset - open->end);
    if (open->kind == StepKind::kToolCall) {
      if (text::trim_view(body).empty()) throw ParseError(open->offset, "empty tool_call query");
      call_offsets.push_back(open->offset);
    }
    t.steps.push_back(make_step(open->kind, body));
    if (open->kind == StepKind::kAnswer) answered = true;
    cursor = tag.end;
    open.reset();
  }
  if (open) throw ParseError(open->offset, "unclosed <" + std::string(tag_name(open->kind, opts.dialect)) + ">");
  if (auto stray = first_non_space(text, cursor, text.size()))
    throw ParseError(*stray, answered ? "content after </answer>" : "text outside tags");

  std::size_t call_index = 0;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    if (t.steps[i].kind != StepKind::kToolCall) continue;
    if (i + 1 < t.steps.size() && t.steps[i + 1].kind != StepKind::kToolResponse)
      throw ParseError(call_offsets[call_index], "tool_call not followed by tool_response");
    ++call_index;
  }
  return t;
}

struct LenientParse {
  Trajectory trajectory;
  /// The first strict-grammar violation, if any.
  std::optional<ParseError> error;
  /// The transcript ended inside an open tag.
  bool truncated = false;
};

/// Best-effort recovery of steps from arbitrary model output; never throws.
/// An open tag inside another implicitly closes it, unmatched closing tags
/// and stray text are dropped, parsing stops after the first closed answer,
/// and a tag left open at the end becomes a final (truncated) step.
inline LenientParse parse_trajectory_lenient(std::string_view text, std::string sample_id, ParseOptions opts = {}) {
  using namespace codec_detail;
  LenientParse out;
  try {
    out.trajectory = parse_trajectory(text, sample_id, opts);
    return out;
  } catch (const ParseError& e) {
    out.error = e;
  }
  auto& t = out.trajectory;
  t.sample_id = std::move(sample_id);
  t.raw_text = std::string(text);
  std::optional<Tag> open;
  for (const auto& tag : scan_tags(text, opts.dialect)) {
    if (!tag.closing) {
      if (open) t.steps.push_back(make_step(open->kind, text.substr(open->end, tag.offset - open->end)));
      open = tag;
      continue;
    }
    if (!open || tag.kind != open->kind) continue;
    t.steps.push_back(make_step(open->kind, text.substr(open->end, tag.offset - open->end)));
    bool answer = open->kind == StepKind::kAnswer;
    open.reset();
    if (answer) break;
  }
  if (open) {
    t.steps.push_back(make_step(open->kind, text.substr(open->end)));
    out.truncated = true;
  }
  // Queries must be non-empty to count as actions.
  std::erase_if(t.steps, [](const TrajectoryStep& s) {
    return s.kind == StepKind::kToolCall && text::trim_view(s.body).empty();
  });
  return out;
}

/// Canonical tagged text: one step per line, bodies trimmed.
inline std::string render_trajectory(const Trajectory& t, Dialect d = Dialect::kCanonical) {
  using namespace codec_detail;
  std::string out;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    if (i) out += '\n';
    out += open_tag(s.kind, d);
    out += s.kind == StepKind::kToolResponse ? render_documents(s.documents) : text::trim(s.body);
    out += close_tag(s.kind, d);
  }
  return out;
}

/// Format predicates over raw text. valid_format is strict-parse success;
/// each has_* looks for an open/close pair with a non-empty body anywhere.
inline FormatFlags format_flags(std::string_view text, ParseOptions opts = {}) {
  using namespace codec_detail;
  FormatFlags f;
  try {
    parse_trajectory(text, "", opts);
    f.valid_format = true;
  } catch (const ParseError&) {
    f.valid_format = false;
  }
  auto has_pair = [&](StepKind kind) {
    auto open = open_tag(kind, opts.dialect);
    auto close = close_tag(kind, opts.dialect);
    std::size_t pos = 0;
    while ((pos = text.find(open, pos)) != std::string_view::npos) {
      std::size_t body = pos + open.size();
      std::size_t end = text.find(close, body);
      if (end == std::string_view::npos) return false;
      if (!text::trim_view(text.substr(body, end - body)).empty()) return true;
      pos = end + close.size();
    }
    return false;
  };
  f.has_answer = has_pair(StepKind::kAnswer);
  f.has_tool_call = has_pair(StepKind::kToolCall);
  f.has_tool_response = has_pair(StepKind::kToolResponse);
  return f;
}

/// Flags of the original transcript when available, else of the canonical rendering.
inline FormatFlags format_flags(const Trajectory& t, ParseOptions opts = {}) {
  if (!t.raw_text.empty()) return format_flags(t.raw_text, opts);
  return format_flags(render_trajectory(t, opts.dialect), opts);
}

namespace codec_detail {

struct Marker {
  std::size_t start;  // first char of the number
  std::size_t after;  // first char after the separator
  int number;
};

inline std::vector<Marker> numbered_markers(std::string_view s) {
  std::vector<Marker> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) continue;
    if (i > 0 && !text::is_space(s[i - 1]) && s[i - 1] != ':' && s[i - 1] != '(') continue;
    std::size_t j = i;
    int n = 0;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])) && j - i < 3) n = n * 10 + (s[j++] - '0');
    if (j >= s.size() || (s[j] != '.' && s[j] != ')')) {
      i = j;
      continue;
    }
    if (j + 1 < s.size() && !text::is_space(s[j + 1])) {
      i = j;
      continue;
    }
    out.push_back({i, j + 1, n});
    i = j;
  }
  return out;
}

}  // namespace codec_detail

/// Enumerated sub-steps of a plan: "1. ... 2. ..." (inline or one per line),
/// falling back to "-", "*" or "•" bullet lines. Empty when neither is present.
inline std::vector<std::string> extract_plan_steps(std::string_view plan) {
  std::vector<std::string> steps;
  std::vector<codec_detail::Marker> chain;
  for (const auto& m : codec_detail::numbered_markers(plan)) {
    int expected = static_cast<int>(chain.size()) + 1;
    if (m.number == expected) chain.push_back(m);
  }
  if (!chain.empty()) {
    for (std::size_t i = 0; i < chain.size(); ++i) {
      std::size_t end = i + 1 < chain.size() ? chain[i + 1].start : plan.size();
      auto step = text::trim(plan.substr(chain[i].after, end - chain[i].after));
      if (!step.empty()) steps.push_back(std::move(step));
    }
    return steps;
  }
  std::size_t pos = 0;
  while (pos <= plan.size()) {
    std::size_t nl = plan.find('\n', pos);
    auto line = text::trim_view(plan.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    for (std::string_view bullet : {"- ", "* ", "• "}) {
      if (line.starts_with(bullet)) {
        auto step = text::trim(line.substr(bullet.size()));
        if (!step.empty()) steps.push_back(std::move(step));
        break;
      }
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return steps;
}

inline std::vector<std::string> extract_plan_steps(const Trajectory& t) {
  auto plan = t.plan();
  if (!plan) return {};
  return extract_plan_steps(*plan);
}

}  // namespace pathreward
