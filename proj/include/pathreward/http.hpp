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

#include <chrono>
#include <cstdlib>
#include <optional>
#include <random>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "pathreward/errors.hpp"
#include "pathreward/log.hpp"

namespace pathreward::http {

/// "http://host:port/path" split into the pieces httplib wants.
struct Endpoint {
  std::string scheme = "http";
  std::string host;
  int port = 80;
  std::string path = "/";

  static Endpoint parse(const std::string& url) {
    Endpoint e;
    std::string rest = url;
    auto sep = rest.find("://");
    if (sep != std::string::npos) {
      e.scheme = rest.substr(0, sep);
      rest = rest.substr(sep + 3);
    }
    if (e.scheme != "http" && e.scheme != "https") throw Error("unsupported scheme in '" + url + "'");
    e.port = e.scheme == "https" ? 443 : 80;
    auto slash = rest.find('/');
    std::string authority = rest.substr(0, slash);
    e.path = slash == std::string::npos ? "/" : rest.substr(slash);
    auto colon = authority.rfind(':');
    if (colon != std::string::npos) {
      e.host = authority.substr(0, colon);
      try {
        e.port = std::stoi(authority.substr(colon + 1));
      } catch (const std::exception&) {
        throw Error("bad port in '" + url + "'");
      }
    } else {
      e.host = authority;
    }
    if (e.host.empty()) throw Error("missing host in '" + url + "'");
    return e;
  }

  std::string origin() const { return scheme + "://" + host + ":" + std::to_string(port); }
};

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds base_delay{200};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{5000};
  /// Each delay is scaled by a uniform factor in [1 − jitter, 1 + jitter].
  double jitter = 0.25;
  std::chrono::seconds timeout{60};
};

inline std::chrono::milliseconds backoff_delay(const RetryPolicy& p, int attempt) {
  static thread_local std::mt19937 rng{std::random_device{}()};
  double d = static_cast<double>(p.base_delay.count());
  for (int i = 0; i < attempt; ++i) d *= p.multiplier;
  d = std::min(d, static_cast<double>(p.max_delay.count()));
  std::uniform_real_distribution<double> u(1.0 - p.jitter, 1.0 + p.jitter);
  return std::chrono::milliseconds(static_cast<long long>(d * u(rng)));
}

/// Runs `attempt` until it returns without throwing BackendUnavailable, at
/// most `policy.attempts` times, sleeping with exponential backoff between
/// tries. Rethrows the last failure.
template <class F>
auto with_retries(const RetryPolicy& policy, const std::string& what, F&& attempt) -> decltype(attempt()) {
  int tries = std::max(policy.attempts, 1);
  for (int i = 0;; ++i) {
    try {
      return attempt();
    } catch (const BackendUnavailable& e) {
      log::warn(what + ": attempt " + std::to_string(i + 1) + "/" + std::to_string(tries) + " failed: " + e.what());
      if (i + 1 >= tries) throw;
      std::this_thread::sleep_for(backoff_delay(policy, i));
    }
  }
}

/// POSTs a JSON body and returns the parsed JSON reply. Transport errors,
/// non-2xx statuses and unparseable bodies raise BackendUnavailable.
inline nlohmann::json post_json(const Endpoint& ep, const nlohmann::json& body, const std::string& bearer_token,
                                std::chrono::seconds timeout) {
  httplib::Client client(ep.origin());
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers headers;
  if (!bearer_token.empty()) headers.emplace("Authorization", "Bearer " + bearer_token);
  auto res = client.Post(ep.path, headers, body.dump(), "application/json");
  if (!res) throw BackendUnavailable(ep.origin() + ep.path + ": " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw BackendUnavailable(ep.origin() + ep.path + ": HTTP " + std::to_string(res->status));
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw BackendUnavailable(ep.origin() + ep.path + ": unparseable reply: " + e.what());
  }
}

inline std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string();
}

}  // namespace pathreward::http
