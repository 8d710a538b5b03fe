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

#include <algorithm>
#include <filesystem>

#include "../support/generators.hpp"
#include "../support/local_server.hpp"
#include "../support/oracles.hpp"
#include "pathreward.hpp"

using namespace pathreward;

namespace {

const char* kCleanVerdict =
    R"({"planner_score":1.0,"model_plan_steps":2,"effective_steps_self":2,"effective_steps_ref":2,)"
    R"("outcome_accuracy_score":1.0,"outcome_reasoning_score":1.0})";

EvaluatorRequest full_request() {
  return {"Q?", {"Eddie Argos"}, "1. find band 2. find singer", {"band of song", "singer of band"},
          "<answer>x</answer>"};
}

http::RetryPolicy fast_retry(int attempts = 3) {
  http::RetryPolicy p;
  p.attempts = attempts;
  p.base_delay = std::chrono::milliseconds(1);
  p.max_delay = std::chrono::milliseconds(2);
  p.timeout = std::chrono::seconds(5);
  return p;
}

std::string chat_reply(const std::string& content) {
  return json{{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})}}.dump();
}

QASample qa(std::vector<std::string> golden = {"Eddie Argos"}) { return {"q", "Who?", std::move(golden), {}}; }

EvaluatorVerdict grid_verdict(int planner, int plan, int self, int ref, int acc, int reason) {
  EvaluatorVerdict v;
  v.planner_score = Decimal::from_milli(planner);
  v.model_plan_steps = plan;
  v.effective_steps_self = self;
  v.effective_steps_ref = ref;
  v.outcome_accuracy = Decimal::from_milli(acc);
  v.outcome_reasoning = Decimal::from_milli(reason);
  return v;
}

}  // namespace

TEST(RenderEvalPrompt, ContainsGridAndInputs) {
  auto p = render_eval_prompt(full_request());
  EXPECT_NE(p.find("0.2 (Bad) / 0.6 (Average) / 1.0 (Good) / 1.2 (Excellent)"), std::string::npos);
  EXPECT_NE(p.find("Eddie Argos"), std::string::npos);
  EXPECT_NE(p.find("1. find band 2. find singer"), std::string::npos);
  EXPECT_NE(p.find("1. band of song\n2. singer of band"), std::string::npos);
  EXPECT_NE(p.find("<answer>x</answer>"), std::string::npos);
  for (const char* slot : {"{question}", "{golden_answers}", "{ref_planner}", "{ref_reasoning_path}", "{trajectory}"})
    EXPECT_EQ(p.find(slot), std::string::npos) << slot;
}

TEST(RenderEvalPrompt, QuestionAppearsOnceInItsSlot) {
  auto p = render_eval_prompt(full_request());
  auto at = p.find("Question: Q?");
  ASSERT_NE(at, std::string::npos);
  EXPECT_EQ(p.find("Q?", at + 12), std::string::npos);
}

TEST(RenderEvalPrompt, MissingFields) {
  auto r = full_request();
  r.ref_path.clear();
  EXPECT_THROW(render_eval_prompt(r), MissingField);
  r = full_request();
  r.question = " ";
  EXPECT_THROW(render_eval_prompt(r), MissingField);
  r = full_request();
  r.golden_answers.clear();
  EXPECT_THROW(render_eval_prompt(r), MissingField);
  r = full_request();
  r.trajectory_text.clear();
  EXPECT_THROW(render_eval_prompt(r), MissingField);
  r = full_request();
  r.ref_planner.clear();
  EXPECT_THROW(render_eval_prompt(r), MissingField);
}

TEST(ParseVerdict, CleanObject) {
  auto v = parse_verdict(kCleanVerdict);
  EXPECT_EQ(v, grid_verdict(1000, 2, 2, 2, 1000, 1000));
  EXPECT_FALSE(v.degraded);
}

TEST(ParseVerdict, OffGridScoreSnapsAndDegrades) {
  std::string raw = kCleanVerdict;
  raw.replace(raw.find("1.0"), 3, "0.9");
  auto v = parse_verdict(raw);
  EXPECT_EQ(v.planner_score.milli(), 1000);
  EXPECT_TRUE(v.degraded);
}

TEST(ParseVerdict, ProseOnly) { EXPECT_THROW(parse_verdict("I cannot evaluate"), VerdictParseError); }

TEST(ParseVerdict, ProseThenObject) {
  auto v = parse_verdict(std::string("Sure, here is my evaluation {of sorts}:\n```json\n") + kCleanVerdict + "\n```");
  EXPECT_EQ(v, grid_verdict(1000, 2, 2, 2, 1000, 1000));
}

TEST(ParseVerdict, MissingFieldAndOddValues) {
  EXPECT_THROW(parse_verdict(R"({"planner_score":1.0})"), VerdictParseError);
  auto v = parse_verdict(
      R"({"planner_score":"0.6","model_plan_steps":2.4,"effective_steps_self":3,"effective_steps_ref":-1,)"
      R"("outcome_accuracy_score":0.5,"outcome_reasoning_score":0.8})");
  EXPECT_EQ(v.planner_score.milli(), 600);
  EXPECT_EQ(v.model_plan_steps, 2);
  EXPECT_EQ(v.effective_steps_self, 2);
  EXPECT_EQ(v.effective_steps_ref, 0);
  EXPECT_TRUE(v.degraded);
}

TEST(ParseVerdict, SerializeRoundTripOverGrid) {
  for (int planner : {0, 200, 600, 1000, 1200})
    for (int plan = 0; plan <= 4; ++plan)
      for (int self = 0; self <= plan; ++self)
        for (int ref = 0; ref <= 3; ++ref)
          for (int acc : {0, 500, 1000})
            for (int reason : {0, 500, 800, 1000}) {
              auto v = grid_verdict(planner, plan, self, ref, acc, reason);
              ASSERT_EQ(parse_verdict(serialize_verdict(v)), v);
            }
}

TEST(OracleEvaluate, ReverseOrderCoversBoth) {
  auto t = gen::well_formed({"singer of band", "band of song"}, "x");
  ReferenceBundle ref{"q", "p", {"band of song", "singer of band"}, Provenance::kOracle};
  EXPECT_EQ(oracle_evaluate(t, qa(), &ref).effective_steps_ref, 2);
}

TEST(OracleEvaluate, EmptyTrajectoryIsAllZero) {
  ReferenceBundle ref{"q", "p", {"band of song"}, Provenance::kOracle};
  EXPECT_EQ(oracle_evaluate(Trajectory{}, qa(), &ref), EvaluatorVerdict::zero(false));
}

TEST(OracleEvaluate, PlanMatchingReferenceExactlyIsExcellent) {
  auto t = gen::well_formed({"band of song", "singer of band"}, "Eddie Argos",
                            "I need to: 1. band of song 2. singer of band");
  ReferenceBundle ref{"q", "p", {"band of song", "singer of band"}, Provenance::kOracle};
  auto v = oracle_evaluate(t, qa(), &ref);
  EXPECT_EQ(v.planner_score.milli(), 1200);
  EXPECT_EQ(v.model_plan_steps, 2);
  EXPECT_EQ(v.effective_steps_self, 2);
  EXPECT_EQ(v.effective_steps_ref, 2);
  EXPECT_EQ(v.outcome_accuracy.milli(), 1000);
  EXPECT_EQ(v.outcome_reasoning.milli(), 1000);
}

TEST(OracleEvaluate, Rubric) {
  ReferenceBundle ref{"q", "p", {"band of song", "singer of band"}, Provenance::kOracle};
  // Plan covers both plus an extra step: good, not excellent.
  auto t = gen::well_formed({"band of song"}, "Eddie Argos plays", "1. band of song 2. singer of band 3. city of band");
  auto v = oracle_evaluate(t, qa(), &ref);
  EXPECT_EQ(v.planner_score.milli(), 1000);
  EXPECT_EQ(v.outcome_accuracy.milli(), 500);
  EXPECT_EQ(v.outcome_reasoning.milli(), 800);
  // Plan covers one step.
  t = gen::well_formed({"weather today"}, "no", "1. band of song 2. weather today");
  v = oracle_evaluate(t, qa(), &ref);
  EXPECT_EQ(v.planner_score.milli(), 600);
  EXPECT_EQ(v.effective_steps_self, 1);
  EXPECT_EQ(v.outcome_reasoning.milli(), 0);
  // Plan covers nothing.
  t = gen::well_formed({"a b"}, "no", "1. weather 2. sports");
  EXPECT_EQ(oracle_evaluate(t, qa(), &ref).planner_score.milli(), 200);
  // No plan at all.
  t = gen::well_formed({"a b"}, "no", "just go");
  EXPECT_EQ(oracle_evaluate(t, qa(), &ref).planner_score.milli(), 0);
}

TEST(OracleEvaluate, ReasoningGridThresholds) {
  ReferenceBundle ref{"q", "p", {"alpha one", "beta two", "gamma three"}, Provenance::kOracle};
  auto one = gen::well_formed({"alpha one"}, "n");
  EXPECT_EQ(oracle_evaluate(one, qa(), &ref).outcome_reasoning.milli(), 500);
  auto two = gen::well_formed({"alpha one", "beta two"}, "n");
  EXPECT_EQ(oracle_evaluate(two, qa(), &ref).outcome_reasoning.milli(), 800);
}

TEST(OracleEvaluate, CreditingIsInjective) {
  ReferenceBundle ref{"q", "p", {"band of song", "band of song album"}, Provenance::kOracle};
  auto t = gen::well_formed({"band of song"}, "x");
  EXPECT_EQ(oracle_evaluate(t, qa(), &ref).effective_steps_ref, 1);
  auto many = gen::well_formed({"band of song", "band of song", "band of song"}, "x");
  ReferenceBundle single{"q", "p", {"band of song"}, Provenance::kOracle};
  EXPECT_EQ(oracle_evaluate(many, qa(), &single).effective_steps_ref, 1);
}

TEST(OracleEvaluate, Deterministic) {
  gen::Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    auto t = gen::trajectory(rng);
    ReferenceBundle ref{"q", "p", {gen::phrase(rng, 3), gen::phrase(rng, 3) + " z"}, Provenance::kVoted};
    ASSERT_EQ(oracle_evaluate(t, qa(), &ref), oracle_evaluate(t, qa(), &ref));
  }
}

TEST(OracleEvaluate, OrderAgnosticUnderPermutation) {
  gen::Rng rng(10);
  const std::vector<std::string> vocab{"alpha", "beta", "gamma", "delta", "river", "city"};
  auto phrase = [&] {
    std::string s = vocab[static_cast<std::size_t>(gen::uniform(rng, 0, 5))];
    int n = gen::uniform(rng, 1, 2);
    for (int i = 0; i < n; ++i) s += " " + vocab[static_cast<std::size_t>(gen::uniform(rng, 0, 5))];
    return s;
  };
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> qs(static_cast<std::size_t>(gen::uniform(rng, 1, 5)));
    for (auto& q : qs) q = phrase();
    ReferenceBundle ref{"q", "p", {}, Provenance::kVoted};
    int len = gen::uniform(rng, 1, 4);
    for (int k = 0; k < len; ++k) ref.ref_path.push_back(phrase());
    auto base = oracle_evaluate(gen::well_formed(qs, "x"), qa(), &ref);
    auto perm = qs;
    std::shuffle(perm.begin(), perm.end(), rng);
    auto moved = oracle_evaluate(gen::well_formed(perm, "x"), qa(), &ref);
    ASSERT_EQ(base.effective_steps_ref, moved.effective_steps_ref);
  }
}

TEST(MaxBipartiteMatching, AgreesWithExhaustiveSearch) {
  gen::Rng rng(12);
  for (int i = 0; i < 3000; ++i) {
    int nl = gen::uniform(rng, 0, 6), nr = gen::uniform(rng, 0, 6);
    std::vector<std::vector<bool>> adj(static_cast<std::size_t>(nl), std::vector<bool>(static_cast<std::size_t>(nr)));
    for (auto& row : adj)
      for (std::size_t r = 0; r < row.size(); ++r) row[r] = gen::coin(rng, 0.35);
    auto edge = [&](std::size_t l, std::size_t r) { return static_cast<bool>(adj[l][r]); };
    auto got = max_bipartite_matching(static_cast<std::size_t>(nl), static_cast<std::size_t>(nr), edge);
    auto want = oracle::brute_matching(nl, nr, [&](int l, int r) {
      return static_cast<bool>(adj[static_cast<std::size_t>(l)][static_cast<std::size_t>(r)]);
    });
    ASSERT_EQ(static_cast<int>(got), want);
  }
}

TEST(OracleEvaluate, CoverageMatchesBruteForceCount) {
  gen::Rng rng(14);
  const std::vector<std::string> vocab{"alpha", "beta", "gamma", "delta"};
  auto phrase = [&] {
    return vocab[static_cast<std::size_t>(gen::uniform(rng, 0, 3))] + " " +
           vocab[static_cast<std::size_t>(gen::uniform(rng, 0, 3))];
  };
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::string> qs(static_cast<std::size_t>(gen::uniform(rng, 1, 4)));
    for (auto& q : qs) q = phrase();
    ReferenceBundle ref{"q", "p", {}, Provenance::kVoted};
    int len = gen::uniform(rng, 1, 3);
    for (int k = 0; k < len; ++k) ref.ref_path.push_back(phrase() + " x" + std::to_string(k % 2));
    auto want = oracle::brute_matching(static_cast<int>(qs.size()), len, [&](int a, int b) {
      return oracle::plain_jaccard(qs[static_cast<std::size_t>(a)], ref.ref_path[static_cast<std::size_t>(b)]) >= 0.6;
    });
    ASSERT_EQ(oracle_evaluate(gen::well_formed(qs, "x"), qa(), &ref).effective_steps_ref, want);
  }
}

TEST(MeasureAgreement, IdenticalLists) {
  std::vector<EvaluatorVerdict> a(200, grid_verdict(1000, 2, 2, 1, 500, 800));
  auto r = measure_agreement(a, a);
  EXPECT_EQ(r.n, 200u);
  EXPECT_EQ(r.plan_agreement, 1.0);
  EXPECT_EQ(r.step_agreement, 1.0);
  EXPECT_EQ(r.outcome_agreement, 1.0);
}

TEST(MeasureAgreement, PlantedPlanDisagreements) {
  std::vector<EvaluatorVerdict> a(200, grid_verdict(1000, 2, 2, 1, 500, 800)), b = a;
  for (int i = 0; i < 11; ++i) b[static_cast<std::size_t>(i * 17)].planner_score = 600_milli;
  auto r = measure_agreement(a, b);
  EXPECT_EQ(r.plan_agreement, 189.0 / 200.0);
  EXPECT_NEAR(r.plan_agreement, 0.945, 1e-15);
  EXPECT_EQ(r.step_agreement, 1.0);
}

TEST(MeasureAgreement, LengthMismatchAndEmpty) {
  std::vector<EvaluatorVerdict> a(3), b(2);
  EXPECT_THROW(measure_agreement(a, b), LengthMismatch);
  EXPECT_THROW(measure_agreement({}, {}), LengthMismatch);
}

TEST(RemoteEvaluate, HealthyEndpoint) {
  LocalServer server("/v1/chat/completions", [](const httplib::Request& req, httplib::Response& res) {
    auto body = json::parse(req.body);
    EXPECT_EQ(body.at("temperature"), 0);
    EXPECT_EQ(body.at("model"), "judge");
    EXPECT_EQ(req.get_header_value("Authorization"), "Bearer secret");
    LocalServer::reply_json(res, chat_reply(kCleanVerdict));
  });
  auto v = remote_evaluate(full_request(), http::Endpoint::parse(server.url("/v1/chat/completions")), "judge",
                           "secret", fast_retry());
  EXPECT_EQ(v, grid_verdict(1000, 2, 2, 2, 1000, 1000));
}

TEST(RemoteEvaluate, ProseAroundObject) {
  LocalServer server("/c", [](const httplib::Request&, httplib::Response& res) {
    LocalServer::reply_json(res, chat_reply(std::string("Let me think. ") + kCleanVerdict + " Done."));
  });
  auto v = remote_evaluate(full_request(), http::Endpoint::parse(server.url("/c")), "judge", "", fast_retry());
  EXPECT_FALSE(v.degraded);
  EXPECT_EQ(v.effective_steps_ref, 2);
}

TEST(RemoteEvaluate, EndpointDownDegradesAfterRetries) {
  LocalServer server("/c", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  auto v = remote_evaluate(full_request(), http::Endpoint::parse(server.url("/c")), "judge", "", fast_retry(3));
  EXPECT_EQ(server.hits(), 3);
  EXPECT_EQ(v, EvaluatorVerdict::zero(true));
  auto dead = remote_evaluate(full_request(), http::Endpoint::parse(dead_url("/c")), "judge", "", fast_retry(2));
  EXPECT_EQ(dead, EvaluatorVerdict::zero(true));
}

TEST(RemoteEvaluate, UnusableVerdictIsRetried) {
  std::atomic<int> calls{0};
  LocalServer server("/c", [&](const httplib::Request&, httplib::Response& res) {
    LocalServer::reply_json(res, chat_reply(++calls == 1 ? "I cannot evaluate" : kCleanVerdict));
  });
  auto v = remote_evaluate(full_request(), http::Endpoint::parse(server.url("/c")), "judge", "", fast_retry());
  EXPECT_FALSE(v.degraded);
  EXPECT_EQ(server.hits(), 2);
}

TEST(RemoteEvaluator, BatchCacheAndClamping) {
  auto path = (std::filesystem::temp_directory_path() / "pathreward_verdict_cache.jsonl").string();
  std::filesystem::remove(path);
  LocalServer server("/c", [](const httplib::Request&, httplib::Response& res) {
    LocalServer::reply_json(res, chat_reply(kCleanVerdict));
  });
  RemoteEvaluatorOptions o;
  o.endpoint = http::Endpoint::parse(server.url("/c"));
  o.retry = fast_retry();
  o.max_in_flight = 3;
  std::vector<Trajectory> ts;
  for (int i = 0; i < 6; ++i) {
    auto t = gen::well_formed({"q" + std::to_string(i)}, "x");
    t.sample_id = "s" + std::to_string(i);
    ts.push_back(t);
  }
  QASample s = qa();
  ReferenceBundle ref{"q", "p", {"a", "b"}, Provenance::kVoted};
  std::vector<const Trajectory*> tp;
  std::vector<const QASample*> sp;
  std::vector<const ReferenceBundle*> rp;
  for (const auto& t : ts) {
    tp.push_back(&t);
    sp.push_back(&s);
    rp.push_back(&ref);
  }
  {
    VerdictCache cache(path);
    RemoteEvaluator ev(o, &cache);
    auto out = ev.evaluate_batch(tp, sp, rp);
    ASSERT_EQ(out.size(), 6u);
    for (const auto& v : out) {
      EXPECT_EQ(v.effective_steps_ref, 1);  // clamped to one search
      EXPECT_EQ(v.effective_steps_self, 1);
    }
    EXPECT_EQ(server.hits(), 6);
    EXPECT_FALSE(ev.deterministic());
  }
  VerdictCache reloaded(path);
  EXPECT_EQ(reloaded.size(), 6u);
  RemoteEvaluator ev(o, &reloaded);
  ev.evaluate_batch(tp, sp, rp);
  EXPECT_EQ(server.hits(), 6);
  std::filesystem::remove(path);
}

TEST(RemoteEvaluator, MissingReferenceUsesPlaceholder) {
  std::string seen;
  LocalServer server("/c", [&](const httplib::Request& req, httplib::Response& res) {
    seen = json::parse(req.body).at("messages").at(0).at("content").get<std::string>();
    LocalServer::reply_json(res, chat_reply(kCleanVerdict));
  });
  RemoteEvaluatorOptions o;
  o.endpoint = http::Endpoint::parse(server.url("/c"));
  o.retry = fast_retry();
  RemoteEvaluator ev(o);
  auto v = ev.evaluate(gen::well_formed({"a"}, "x"), qa(), nullptr);
  EXPECT_NE(seen.find("(no reference available)"), std::string::npos);
  EXPECT_EQ(v.effective_steps_ref, 0);
}

TEST(VerdictCache, KeyedBySampleAndContent) {
  VerdictCache cache;
  auto t = gen::well_formed({"a"}, "x");
  cache.put(t, grid_verdict(600, 1, 1, 1, 0, 500));
  EXPECT_TRUE(cache.find(t).has_value());
  auto other = t;
  other.sample_id = "other";
  EXPECT_FALSE(cache.find(other).has_value());
  auto changed = gen::well_formed({"b"}, "x");
  EXPECT_FALSE(cache.find(changed).has_value());
}

TEST(Sha256, KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
