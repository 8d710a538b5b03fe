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

// Independent reference implementations used as test oracles. Nothing here
// calls into the library's scoring code.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace oracle {

// Exact rational arithmetic for the reward formulas.
struct Frac {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Frac() = default;
  Frac(std::int64_t n, std::int64_t d = 1) : num(n), den(d) { reduce(); }

  void reduce() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    auto g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  friend Frac operator+(Frac a, Frac b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend Frac operator-(Frac a, Frac b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
  friend Frac operator*(Frac a, Frac b) { return {a.num * b.num, a.den * b.den}; }
  friend bool operator<(Frac a, Frac b) { return a.num * b.den < b.num * a.den; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline Frac milli(int m) { return {m, 1000}; }

struct GridPoint {
  int planner_milli;
  int n_plan;
  int n_exec;
  int n_covered;
  int ref_len;
  int n_actions;
  int acc_milli;
  int reason_milli;
  bool correct;
};

struct Weights {
  int lambda_f_milli = 100;
  int lambda_p_milli = 300;
  int lambda_a_milli = 600;
  int alpha_milli = 800;
  bool efficiency = true;  // false: the variant without the per-action factor
};

// Total reward of a trajectory with `n_actions` searches that is otherwise
// well formed (plan, one response per search, an answer). With no search
// the format rule rejects it outright.
inline Frac brute_total(const GridPoint& g, const Weights& w = {}) {
  if (g.n_actions == 0) return {0};
  Frac r_format = milli(100);

  int exec = std::min({g.n_exec, g.n_plan, g.n_actions});
  int cov = std::min({g.n_covered, g.ref_len, g.n_actions});

  Frac s_self{0};
  if (g.n_plan > 0) {
    s_self = milli(g.planner_milli) * Frac(exec, g.n_plan);
    if (w.efficiency) s_self = s_self * Frac(exec, g.n_actions);
  }
  Frac s_ref{0};
  if (g.ref_len > 0) {
    s_ref = Frac(cov, g.ref_len);
    if (w.efficiency) s_ref = s_ref * Frac(cov, g.n_actions);
  }
  Frac r_path = s_self < s_ref ? s_ref : s_self;

  Frac r_outcome = g.correct ? Frac(1)
                             : milli(w.alpha_milli) * milli(g.acc_milli) +
                                   (Frac(1) - milli(w.alpha_milli)) * milli(g.reason_milli);
  return milli(w.lambda_f_milli) * r_format + milli(w.lambda_p_milli) * r_path + milli(w.lambda_a_milli) * r_outcome;
}

// Format reward by hand. Row index = 8*valid + 4*answer + 2*tool_call +
// tool_response; columns soft, strict, off. -1 marks an invalid trajectory.
inline constexpr std::array<std::array<int, 3>, 16> kFormatTable{{
    // valid=0
    {-1, -1, -1},  // answer=0 call=0 resp=0
    {-1, -1, -1},  // answer=0 call=0 resp=1
    {-1, -1, -1},  // answer=0 call=1 resp=0
    {-1, -1, -1},  // answer=0 call=1 resp=1
    {-1, -1, 0},   // answer=1 call=0 resp=0
    {50, -1, 0},   // answer=1 call=0 resp=1
    {-1, -1, 0},   // answer=1 call=1 resp=0
    {50, -1, 0},   // answer=1 call=1 resp=1
    // valid=1
    {-1, -1, -1},
    {-1, -1, -1},
    {-1, -1, -1},
    {-1, -1, -1},
    {-1, -1, 0},
    {50, -1, 0},
    {100, 100, 0},
    {100, 100, 0},
}};

// Largest number of (left, right) pairs with edge(l, r), each side used at
// most once, by exhaustive search over assignments of left items.
template <class Edge>
int brute_matching(int n_left, int n_right, const Edge& edge) {
  std::vector<char> used(static_cast<std::size_t>(n_right), 0);
  int best = 0;
  auto go = [&](auto&& self, int l, int count) -> void {
    if (count + (n_left - l) <= best) return;
    if (l == n_left) {
      best = std::max(best, count);
      return;
    }
    self(self, l + 1, count);
    for (int r = 0; r < n_right; ++r) {
      if (used[static_cast<std::size_t>(r)] || !edge(l, r)) continue;
      used[static_cast<std::size_t>(r)] = 1;
      self(self, l + 1, count + 1);
      used[static_cast<std::size_t>(r)] = 0;
    }
  };
  go(go, 0, 0);
  return best;
}

// Token-set Jaccard over plain lowercase words separated by single spaces
// (fixtures use no punctuation or articles).
inline double plain_jaccard(const std::string& a, const std::string& b) {
  auto words = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == ' ') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) out.push_back(cur);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  auto x = words(a), y = words(b);
  std::vector<std::string> both;
  std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(both));
  std::size_t uni = x.size() + y.size() - both.size();
  return uni == 0 ? 0.0 : static_cast<double>(both.size()) / static_cast<double>(uni);
}

// Population z-scores computed directly from the definition.
inline std::vector<double> brute_advantages(const std::vector<double>& r, double eps = 1e-8) {
  long double mean = 0;
  for (double x : r) mean += x;
  mean /= static_cast<long double>(r.size());
  long double var = 0;
  for (double x : r) var += (x - mean) * (x - mean);
  var /= static_cast<long double>(r.size());
  std::vector<double> out;
  bool flat = std::all_of(r.begin(), r.end(), [&](double x) { return x == r.front(); });
  for (double x : r) out.push_back(flat ? 0.0 : static_cast<double>((x - mean) / (std::sqrt(var) + eps)));
  return out;
}

}  // namespace oracle
