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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pathreward {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed tagged transcript; `offset` is the byte position of the offending tag.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::string reason)
      : Error("parse error at offset " + std::to_string(offset) + ": " + reason),
        offset_(offset),
        reason_(std::move(reason)) {}
  std::size_t offset() const { return offset_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t offset_;
  std::string reason_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A record in an input file failed validation.
class InputError : public Error {
 public:
  InputError(std::string file, std::size_t line, std::string field, const std::string& why)
      : Error(file + ":" + std::to_string(line) + ": field '" + field + "': " + why),
        file_(std::move(file)),
        line_(line),
        field_(std::move(field)) {}
  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::string file_;
  std::size_t line_;
  std::string field_;
};

class VerdictParseError : public Error {
 public:
  using Error::Error;
};

class MissingField : public Error {
 public:
  explicit MissingField(const std::string& field)
      : Error("missing field: " + field), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class LengthMismatch : public Error {
 public:
  LengthMismatch(std::size_t a, std::size_t b)
      : Error("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class EmptyVote : public Error {
 public:
  EmptyVote() : Error("no query reached the vote threshold") {}
};

class TemplateParseError : public Error {
 public:
  using Error::Error;
};

class DuplicateId : public Error {
 public:
  explicit DuplicateId(const std::string& id) : Error("duplicate id: " + id), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("retriever corpus is empty") {}
};

class InfeasibleWorld : public Error {
 public:
  using Error::Error;
};

/// Transport-level failures of the external backends.
class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

class PolicyUnavailable : public BackendUnavailable {
 public:
  using BackendUnavailable::BackendUnavailable;
};

class RetrieverUnavailable : public BackendUnavailable {
 public:
  using BackendUnavailable::BackendUnavailable;
};

}  // namespace pathreward
