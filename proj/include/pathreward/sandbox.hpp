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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pathreward/agent_runtime.hpp"
#include "pathreward/core_model.hpp"
#include "pathreward/evaluator_gateway.hpp"
#include "pathreward/reference_factory.hpp"
#include "pathreward/reward_engine.hpp"
#include "pathreward/trajectory_codec.hpp"

namespace pathreward::sandbox {

/// splitmix64 finalizer; all sandbox randomness is keyed through it so a run
/// is a pure function of its seed regardless of scheduling.
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix(seed);
  for (auto p : path) s = mix(s ^ mix(p + 0x632be59bd9b4e019ULL));
  return s;
}

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform,
/// unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
}

template <class T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

inline const std::vector<std::string>& relation_vocabulary() {
  static const std::vector<std::string> kVocab{"mentor", "sibling", "rival",  "spouse",  "founder", "coach",
                                               "editor", "patron",  "heir",   "advisor", "partner", "tutor"};
  return kVocab;
}

inline constexpr std::string_view kConfirmed = "officially confirmed record";
inline constexpr std::string_view kRumor = "unconfirmed rumor";

inline std::string fact_text(std::string_view rel, std::string_view s, std::string_view o, bool confirmed) {
  return "The " + std::string(rel) + " of " + std::string(s) + " is " + std::string(o) + " (" +
         std::string(confirmed ? kConfirmed : kRumor) + ")";
}

struct Fact {
  std::string subject;
  std::string relation;
  std::string object;
  bool confirmed = true;
  bool operator==(const Fact&) const = default;
};

/// Chain structure behind one question.
struct Chain {
  /// chain[0] is the question's anchor entity, chain[m] the answer.
  std::vector<std::string> entities;
  std::vector<std::string> relations;
  /// Relation used for this chain's distractor facts.
  std::string side_relation;
  bool operator==(const Chain&) const = default;
};

struct WorldParams {
  std::uint64_t seed = 7;
  int n_entities = 200;
  int hops = 2;
  int n_samples = 50;
  /// Chance that a hop also has a same-relation rumor pointing elsewhere.
  double decoy_rate = 0.6;
};

struct SyntheticWorld {
  WorldParams params;
  std::vector<std::string> entities;
  std::vector<Fact> facts;
  std::vector<CorpusDoc> corpus;
  std::vector<QASample> samples;
  std::vector<Chain> chains;
  std::map<std::string, std::vector<std::string>> true_paths;

  bool operator==(const SyntheticWorld& o) const {
    return entities == o.entities && facts == o.facts && samples == o.samples && chains == o.chains &&
           true_paths == o.true_paths &&
           std::equal(corpus.begin(), corpus.end(), o.corpus.begin(), o.corpus.end(),
                      [](const CorpusDoc& a, const CorpusDoc& b) { return a.doc_id == b.doc_id && a.body == b.body; });
  }

  ReferenceBundle reference(std::size_t i) const {
    const auto& path = samples[i].true_path;
    return {samples[i].id, render_ref_planner(path), path, Provenance::kOracle};
  }
};

inline std::string hop_query(std::string_view rel, std::string_view subject) {
  return std::string(rel) + " of " + std::string(subject);
}

inline std::string chain_question(const Chain& c) {
  std::string q = "Who is the " + c.relations.back();
  for (std::size_t h = c.relations.size() - 1; h-- > 0;) q += " of the " + c.relations[h];
  return q + " of " + c.entities.front() + "?";
}

/// Disjoint relation chains over fixed-width entity ids, one confirmed
/// document per edge, plus rumor decoys and one off-question distractor per
/// chain subject, both pointing at entities outside every chain. A plain hop
/// query ties a rumor with its fact and the rumor wins the tie; adding
/// "confirmed" to the query breaks the tie the right way.
inline SyntheticWorld build_world(const WorldParams& p) {
  const auto& vocab = relation_vocabulary();
  if (p.hops < 1) throw InfeasibleWorld("hops must be at least 1");
  if (p.n_samples < 1) throw InfeasibleWorld("need at least one sample");
  if (static_cast<std::size_t>(p.hops) + 1 > vocab.size())
    throw InfeasibleWorld("not enough relations for " + std::to_string(p.hops) + " hops");
  // Chains are disjoint and at least one entity stays outside every chain
  // to serve as the object of rumors and distractors.
  if (static_cast<long>(p.n_entities) <= static_cast<long>(p.n_samples) * (p.hops + 1))
    throw InfeasibleWorld(std::to_string(p.n_entities) + " entities cannot hold " + std::to_string(p.n_samples) +
                          " disjoint chains of " + std::to_string(p.hops) + " hops plus a filler entity");
  if (p.decoy_rate < 0 || p.decoy_rate > 1) throw InfeasibleWorld("decoy_rate outside [0,1]");

  SyntheticWorld w;
  w.params = p;
  std::mt19937_64 rng(derive_seed(p.seed, {1}));
  int width = std::max<int>(3, static_cast<int>(std::to_string(p.n_entities - 1).size()));
  for (int i = 0; i < p.n_entities; ++i) {
    auto digits = std::to_string(i);
    w.entities.push_back("e" + std::string(static_cast<std::size_t>(width) - digits.size(), '0') + digits);
  }
  std::vector<std::string> pool = w.entities;
  shuffle(pool, rng);
  std::size_t n_chain = static_cast<std::size_t>(p.n_samples) * static_cast<std::size_t>(p.hops + 1);
  std::vector<std::string> fillers(pool.begin() + static_cast<long>(n_chain), pool.end());
  auto filler = [&] { return fillers[uniform_index(rng, fillers.size())]; };

  std::size_t next = 0;
  for (int s = 0; s < p.n_samples; ++s) {
    Chain c;
    for (int h = 0; h <= p.hops; ++h) c.entities.push_back(pool[next++]);
    std::vector<std::string> rels = vocab;
    shuffle(rels, rng);
    c.relations.assign(rels.begin(), rels.begin() + p.hops);
    c.side_relation = rels[static_cast<std::size_t>(p.hops)];
    for (int h = 0; h < p.hops; ++h) {
      const auto& subj = c.entities[static_cast<std::size_t>(h)];
      w.facts.push_back({subj, c.relations[static_cast<std::size_t>(h)], c.entities[static_cast<std::size_t>(h) + 1], true});
      if (uniform01(rng) < p.decoy_rate)
        w.facts.push_back({subj, c.relations[static_cast<std::size_t>(h)], filler(), false});
      w.facts.push_back({subj, c.side_relation, filler(), true});
    }
    QASample sample;
    sample.id = "q" + std::to_string(s);
    sample.question = chain_question(c);
    sample.golden_answers = {c.entities.back()};
    for (int h = 0; h < p.hops; ++h)
      sample.true_path.push_back(hop_query(c.relations[static_cast<std::size_t>(h)], c.entities[static_cast<std::size_t>(h)]));
    w.true_paths[sample.id] = sample.true_path;
    w.samples.push_back(std::move(sample));
    w.chains.push_back(std::move(c));
  }

  std::vector<std::size_t> order(w.facts.size());
  std::iota(order.begin(), order.end(), 0);
  shuffle(order, rng);
  // A rumor always directly follows its fact in `facts`; it takes the
  // smaller id of the pair so plain hop queries surface it first.
  for (std::size_t i = 0; i < w.facts.size(); ++i)
    if (!w.facts[i].confirmed && order[i] > order[i - 1]) std::swap(order[i], order[i - 1]);
  int id_width = static_cast<int>(std::to_string(w.facts.size()).size());
  w.corpus.resize(w.facts.size());
  for (std::size_t i = 0; i < w.facts.size(); ++i) {
    auto digits = std::to_string(order[i]);
    const auto& f = w.facts[i];
    w.corpus[i] = {"d" + std::string(static_cast<std::size_t>(id_width) - digits.size(), '0') + digits,
                   fact_text(f.relation, f.subject, f.object, f.confirmed)};
  }
  std::sort(w.corpus.begin(), w.corpus.end(), [](const auto& a, const auto& b) { return a.doc_id < b.doc_id; });
  return w;
}

/// Query templates available to the toy policy, plus answering.
enum Action : int {
  kHop = 0,         ///< "<next relation> of <current entity>"
  kVerify = 1,      ///< "confirmed" query for the first hop, later re-checking the last one
  kSideRelation = 2,
  kRepeat = 3,
  kQuestion = 4,
  kEntity = 5,
  kAnswer = 6,
};
inline constexpr int kNumActions = 7;
inline constexpr int kNumTemplates = 6;

inline const char* action_name(int a) {
  static constexpr const char* kNames[] = {"hop", "verify", "side", "repeat", "question", "entity", "answer"};
  return kNames[a];
}

/// Tabular softmax policy over actions, indexed by (hops resolved, whether
/// the latest resolution came from an unverified query).
struct PolicyTable {
  int hops = 2;
  std::vector<std::array<double, kNumActions>> logits;
  /// Actions the policy may take; masked ones have probability 0.
  std::array<bool, kNumActions> allowed{true, true, true, true, true, true, true};

  explicit PolicyTable(int m = 2) : hops(m), logits(static_cast<std::size_t>(2 * (m + 1))) {
    for (auto& row : logits) row.fill(0.0);
  }
  std::size_t n_states() const { return logits.size(); }
  static std::size_t state(int resolved, bool pending) { return static_cast<std::size_t>(2 * resolved + (pending ? 1 : 0)); }

  std::array<double, kNumActions> probs(std::size_t s) const {
    std::array<double, kNumActions> p{};
    double hi = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < kNumActions; ++a)
      if (allowed[static_cast<std::size_t>(a)]) hi = std::max(hi, logits[s][static_cast<std::size_t>(a)]);
    double z = 0;
    for (int a = 0; a < kNumActions; ++a) {
      auto i = static_cast<std::size_t>(a);
      p[i] = allowed[i] ? std::exp(logits[s][i] - hi) : 0.0;
      z += p[i];
    }
    for (auto& x : p) x /= z;
    return p;
  }

  /// A policy that plays `script[i]` in the state reached after i actions with
  /// probability 1 (the other logits pushed far down).
  static PolicyTable deterministic(int m, const std::vector<std::pair<std::size_t, int>>& choices) {
    PolicyTable t(m);
    for (auto& row : t.logits) row.fill(0.0);
    for (auto [state, action] : choices) {
      t.logits[state].fill(-1e6);
      t.logits[state][static_cast<std::size_t>(action)] = 0.0;
    }
    return t;
  }
};

struct Decision {
  std::size_t state;
  int action;
  bool operator==(const Decision&) const = default;
};

struct ToyPolicyOptions {
  /// Per-episode probability of omitting the plan's closing tag.
  double format_noise = 0.0;
  /// After this many searches the policy answers without sampling; 0 = no cap.
  int max_queries = 0;
};

/// One episode's worth of toy agent: samples an action per turn from the
/// table, phrases it as a query, and tracks which chain entity it currently
/// believes in by reading the top retrieved document.
class ToyPolicy : public PolicyBackend {
 public:
  ToyPolicy(const PolicyTable& table, const Chain& chain, std::string question, std::uint64_t seed,
            ToyPolicyOptions opts = {})
      : table_(table), chain_(chain), question_(std::move(question)), rng_(seed), opts_(opts) {
    believed_.push_back(chain_.entities.front());
    noisy_ = opts_.format_noise > 0 && uniform01(rng_) < opts_.format_noise;
  }

  std::string generate(const std::string& transcript, const std::vector<std::string>& stop_tags,
                       const Sampling&) override {
    if (awaiting_) read_response(transcript);
    bool forced = stop_tags.size() == 1 && stop_tags.front() == kAnswerClose;
    if (forced) return current() + "</answer>";
    std::string seg;
    if (first_) {
      seg += plan_text();
      if (!noisy_) seg += "</reasoning>";
      seg += "\n";
      first_ = false;
    } else {
      seg += "\n";
    }
    int action = kAnswer;
    if (opts_.max_queries == 0 || queries_ < opts_.max_queries) {
      auto s = PolicyTable::state(resolved(), pending_);
      action = sample(table_.probs(s));
      decisions_.push_back({s, action});
    }
    if (action == kAnswer) return seg + "<answer>" + current() + "</answer>";
    auto q = query_for(action);
    last_query_ = q;
    last_action_ = action;
    ++queries_;
    awaiting_ = true;
    return seg + "<tool_call>" + q + "</tool_call>";
  }

  const std::vector<Decision>& decisions() const { return decisions_; }
  bool noisy() const { return noisy_; }

  std::string plan_text() const {
    std::string out = "I need to:";
    for (std::size_t h = 0; h < chain_.relations.size(); ++h)
      out += " " + std::to_string(h + 1) + ". Find the " + chain_.relations[h] + " of " +
             (h == 0 ? chain_.entities.front() : std::string("the result")) + ".";
    return out;
  }

 private:
  int hops() const { return static_cast<int>(chain_.relations.size()); }
  int resolved() const { return static_cast<int>(believed_.size()) - 1; }
  const std::string& current() const { return believed_.back(); }

  int sample(const std::array<double, kNumActions>& p) {
    double u = uniform01(rng_);
    double acc = 0;
    int last = kAnswer;
    for (int a = 0; a < kNumActions; ++a) {
      if (p[static_cast<std::size_t>(a)] <= 0) continue;
      last = a;
      acc += p[static_cast<std::size_t>(a)];
      if (u < acc) return a;
    }
    return last;
  }

  std::string query_for(int action) const {
    int k = resolved();
    auto rel = [&](int h) { return chain_.relations[static_cast<std::size_t>(h)]; };
    auto ent = [&](int h) { return believed_[static_cast<std::size_t>(h)]; };
    switch (action) {
      case kHop:
        return k < hops() ? hop_query(rel(k), ent(k)) : hop_query(rel(k - 1), ent(k - 1));
      case kVerify: {
        int j = k > 0 ? k - 1 : 0;
        return "confirmed " + hop_query(rel(j), ent(j));
      }
      case kSideRelation:
        return hop_query(chain_.side_relation, current());
      case kRepeat:
        return last_query_.empty() ? question_ : last_query_;
      case kQuestion:
        return question_;
      case kEntity:
        return current();
    }
    return question_;
  }

  /// Believes the top document when it answers what the query asked (the
  /// query names its relation and subject) and that relation is the next hop
  /// from an entity on the believed chain; the chain is re-derived from there.
  void read_response(const std::string& transcript) {
    awaiting_ = false;
    auto open = transcript.rfind("<tool_response>");
    if (open == std::string::npos) return;
    open += std::string_view("<tool_response>").size();
    auto close = transcript.find("</tool_response>", open);
    auto docs = split_documents(std::string_view(transcript).substr(open, close - open));
    if (docs.empty()) return;
    auto words = text::split_whitespace(docs.front());
    if (words.size() < 6 || words[0] != "The" || words[2] != "of" || words[4] != "is") return;
    const auto& rel = words[1];
    const auto& subj = words[3];
    const auto& obj = words[5];
    auto asked = text::split_whitespace(last_query_);
    if (std::find(asked.begin(), asked.end(), rel) == asked.end() ||
        std::find(asked.begin(), asked.end(), subj) == asked.end())
      return;
    for (int j = resolved(); j >= 0; --j) {
      if (j >= hops() || believed_[static_cast<std::size_t>(j)] != subj || chain_.relations[static_cast<std::size_t>(j)] != rel)
        continue;
      believed_.resize(static_cast<std::size_t>(j) + 1);
      believed_.push_back(obj);
      pending_ = last_action_ != kVerify;
      return;
    }
  }

  const PolicyTable& table_;
  const Chain& chain_;
  std::string question_;
  std::mt19937_64 rng_;
  ToyPolicyOptions opts_;
  std::vector<std::string> believed_;
  bool pending_ = false;
  bool awaiting_ = false;
  bool first_ = true;
  bool noisy_ = false;
  int queries_ = 0;
  int last_action_ = kAnswer;
  std::string last_query_;
  std::vector<Decision> decisions_;
};

enum class RewardVariant { kPathCentric, kBinaryOutcome };

inline const char* to_string(RewardVariant v) {
  return v == RewardVariant::kPathCentric ? "path_centric" : "binary_outcome";
}

inline std::optional<RewardVariant> variant_from_string(std::string_view s) {
  if (s == "path_centric") return RewardVariant::kPathCentric;
  if (s == "binary_outcome" || s == "binary") return RewardVariant::kBinaryOutcome;
  return std::nullopt;
}

struct Rollout {
  EpisodeTrace trace;
  std::vector<Decision> decisions;
  RewardBreakdown breakdown;
  double reward = 0;
  bool correct = false;
  std::size_t covered = 0;
};

/// Plays one episode through the runtime and scores it.
inline Rollout rollout(const SyntheticWorld& world, std::size_t sample_index, const PolicyTable& table,
                       LexicalRetriever& retriever, RewardVariant variant, const Config& cfg, std::uint64_t seed,
                       ToyPolicyOptions popts = {}) {
  const auto& sample = world.samples[sample_index];
  ToyPolicy policy(table, world.chains[sample_index], sample.question, seed, popts);
  Rollout r;
  r.trace = run_episode(sample, policy, retriever, cfg.agent);
  r.decisions = policy.decisions();
  auto ref = world.reference(sample_index);
  auto verdict = oracle_evaluate(r.trace.trajectory, sample, &ref);
  r.covered = static_cast<std::size_t>(verdict.effective_steps_ref);
  r.correct = exact_match(r.trace.trajectory.answer().value_or(""), sample.golden_answers);
  r.breakdown = total_reward(r.trace.trajectory, sample, &ref, verdict, cfg.reward);
  r.reward = variant == RewardVariant::kPathCentric ? r.breakdown.r_total : (r.correct ? 1.0 : 0.0);
  return r;
}

/// Score-function estimate: Σ_e w_e Σ_t (onehot(a_t) − π(s_t)) / n_episodes,
/// restricted to allowed actions.
inline std::vector<std::array<double, kNumActions>> policy_gradient(const PolicyTable& table,
                                                                    const std::vector<const std::vector<Decision>*>& episodes,
                                                                    const std::vector<double>& weights) {
  std::vector<std::array<double, kNumActions>> grad(table.n_states());
  for (auto& g : grad) g.fill(0.0);
  if (episodes.empty()) return grad;
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    if (weights[e] == 0.0) continue;
    for (const auto& d : *episodes[e]) {
      auto p = table.probs(d.state);
      for (int a = 0; a < kNumActions; ++a) {
        auto i = static_cast<std::size_t>(a);
        if (!table.allowed[i]) continue;
        grad[d.state][i] += weights[e] * ((a == d.action ? 1.0 : 0.0) - p[i]);
      }
    }
  }
  for (auto& g : grad)
    for (auto& x : g) x /= static_cast<double>(episodes.size());
  return grad;
}

struct CurvePoint {
  int update = 0;
  double mean_reward = 0;
  double accuracy = 0;
  double mean_turns = 0;
  bool operator==(const CurvePoint&) const = default;
};

using LearningCurve = std::vector<CurvePoint>;

struct TrainOptions {
  RewardVariant variant = RewardVariant::kPathCentric;
  Config config;
  int group_size = 8;
  int questions_per_update = 8;
  int updates = 60;
  double learning_rate = 0.5;
  std::uint64_t seed = 0;
  double advantage_eps = 1e-8;
  ToyPolicyOptions policy;
  /// Starting table; uniform when absent.
  std::optional<PolicyTable> init;
};

struct TrainResult {
  LearningCurve curve;
  PolicyTable final_policy;
  /// Every rollout of every update, in order, when requested.
  std::vector<Rollout> rollouts;
};

inline TrainResult train(const SyntheticWorld& world, const TrainOptions& opts, bool keep_rollouts = false) {
  LexicalRetriever retriever(world.corpus);
  TrainResult res{{}, opts.init ? *opts.init : PolicyTable(world.params.hops), {}};
  auto& table = res.final_policy;
  for (int u = 0; u < opts.updates; ++u) {
    std::mt19937_64 pick(derive_seed(opts.seed, {2, static_cast<std::uint64_t>(u)}));
    std::vector<Rollout> batch;
    std::vector<double> advantages;
    for (int qi = 0; qi < opts.questions_per_update; ++qi) {
      std::size_t idx = uniform_index(pick, world.samples.size());
      std::vector<double> rewards;
      for (int g = 0; g < opts.group_size; ++g) {
        auto seed = derive_seed(opts.seed, {3, static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(qi),
                                            static_cast<std::uint64_t>(g)});
        batch.push_back(rollout(world, idx, table, retriever, opts.variant, opts.config, seed, opts.policy));
        rewards.push_back(batch.back().reward);
      }
      auto adv = grpo_advantages(rewards, opts.advantage_eps);
      advantages.insert(advantages.end(), adv.begin(), adv.end());
    }
    CurvePoint pt;
    pt.update = u;
    for (const auto& r : batch) {
      pt.mean_reward += r.reward;
      pt.accuracy += r.correct ? 1.0 : 0.0;
      pt.mean_turns += r.trace.turns_used;
    }
    double n = static_cast<double>(batch.size());
    pt.mean_reward /= n;
    pt.accuracy /= n;
    pt.mean_turns /= n;
    res.curve.push_back(pt);

    std::vector<const std::vector<Decision>*> eps;
    for (const auto& r : batch) eps.push_back(&r.decisions);
    auto grad = policy_gradient(table, eps, advantages);
    for (std::size_t s = 0; s < table.n_states(); ++s)
      for (std::size_t a = 0; a < kNumActions; ++a) table.logits[s][a] += opts.learning_rate * grad[s][a];
    if (keep_rollouts)
      for (auto& r : batch) res.rollouts.push_back(std::move(r));
  }
  return res;
}

/// First update at which the trailing mean accuracy over `window` updates
/// reaches `threshold`; nullopt if it never does.
inline std::optional<int> steps_to_threshold(const LearningCurve& curve, double threshold, int window = 5) {
  double sum = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    sum += curve[i].accuracy;
    if (i >= static_cast<std::size_t>(window)) sum -= curve[i - static_cast<std::size_t>(window)].accuracy;
    if (i + 1 >= static_cast<std::size_t>(window) && sum / window >= threshold) return static_cast<int>(i);
  }
  return std::nullopt;
}

/// Shortest round-trip decimal rendering, identical across runs.
inline std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string curve_csv(const LearningCurve& c) {
  std::string out = "update,mean_reward,accuracy,mean_turns\n";
  for (const auto& p : c)
    out += std::to_string(p.update) + "," + fmt(p.mean_reward) + "," + fmt(p.accuracy) + "," + fmt(p.mean_turns) + "\n";
  return out;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  auto n = v.size();
  if (n % 2) return v[n / 2];
  double a = v[n / 2 - 1], b = v[n / 2];
  if (std::isinf(a) || std::isinf(b)) return std::isinf(a) && std::isinf(b) && a == b ? a : (std::isinf(b) ? b : a);
  return (a + b) / 2;
}

/// Runs `fn(i)` for i in [0, n) on up to `parallelism` threads.
inline void parallel_for(std::size_t n, int parallelism, const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::max(parallelism, 1)), n);
  std::vector<std::jthread> pool;
  for (std::size_t i = 0; i < k; ++i) pool.emplace_back(worker);
}

struct VariantSpec {
  std::string name;
  TrainOptions options;
};

struct ComparisonRow {
  std::string variant;
  std::uint64_t seed = 0;
  /// +inf when the threshold is never reached.
  double steps = 0;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  std::map<std::string, double> medians;

  std::vector<double> steps_for(const std::string& variant) const {
    std::vector<double> out;
    for (const auto& r : rows)
      if (r.variant == variant) out.push_back(r.steps);
    return out;
  }

  std::string csv() const {
    std::string out = "variant,seed,steps_to_threshold\n";
    for (const auto& r : rows) out += r.variant + "," + std::to_string(r.seed) + "," + fmt(r.steps) + "\n";
    for (const auto& [name, m] : medians) out += name + ",median," + fmt(m) + "\n";
    return out;
  }
};

/// Trains every variant under every seed and records updates-to-threshold.
inline Comparison compare_variants(const SyntheticWorld& world, const std::vector<VariantSpec>& variants,
                                   const std::vector<std::uint64_t>& seeds, double threshold, int parallelism = 1) {
  if (variants.size() < 2) throw ConfigError("comparison needs at least two variants");
  if (seeds.size() < 5) throw ConfigError("comparison needs at least five seeds");
  Comparison c;
  c.rows.resize(variants.size() * seeds.size());
  parallel_for(c.rows.size(), parallelism, [&](std::size_t i) {
    const auto& v = variants[i / seeds.size()];
    auto opts = v.options;
    opts.seed = seeds[i % seeds.size()];
    auto res = train(world, opts);
    auto steps = steps_to_threshold(res.curve, threshold);
    c.rows[i] = {v.name, opts.seed, steps ? static_cast<double>(*steps) : std::numeric_limits<double>::infinity()};
  });
  for (const auto& v : variants) c.medians[v.name] = median(c.steps_for(v.name));
  return c;
}

struct SignTest {
  int wins = 0;
  int losses = 0;
  int ties = 0;
  /// One-sided P(wins ≥ observed) under a fair coin, ties dropped.
  double p_value = 1.0;
};

inline SignTest sign_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw LengthMismatch(a.size(), b.size());
  SignTest t;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) ++t.wins;
    else if (a[i] > b[i]) ++t.losses;
    else ++t.ties;
  }
  int n = t.wins + t.losses;
  double p = 0;
  for (int k = t.wins; k <= n; ++k) {
    double c = 1;
    for (int j = 0; j < k; ++j) c = c * (n - j) / (j + 1);
    p += c * std::pow(0.5, n);
  }
  t.p_value = n == 0 ? 1.0 : p;
  return t;
}

enum class SweepParameter { kLambdaP, kLambdaA };

inline std::optional<SweepParameter> sweep_parameter_from_string(std::string_view s) {
  if (s == "lambda_p") return SweepParameter::kLambdaP;
  if (s == "lambda_a") return SweepParameter::kLambdaA;
  return std::nullopt;
}

inline const char* to_string(SweepParameter p) { return p == SweepParameter::kLambdaP ? "lambda_p" : "lambda_a"; }

struct SweepRow {
  Decimal value;
  double mean_reward = 0;
  double mean_accuracy = 0;
  double median_accuracy = 0;
  std::vector<double> per_seed_accuracy;
};

/// Average of the last `window` curve points.
inline CurvePoint window_average(const LearningCurve& c, int window) {
  CurvePoint out;
  std::size_t n = std::min<std::size_t>(c.size(), static_cast<std::size_t>(std::max(window, 1)));
  for (std::size_t i = c.size() - n; i < c.size(); ++i) {
    out.mean_reward += c[i].mean_reward;
    out.accuracy += c[i].accuracy;
    out.mean_turns += c[i].mean_turns;
  }
  if (n) {
    out.mean_reward /= static_cast<double>(n);
    out.accuracy /= static_cast<double>(n);
    out.mean_turns /= static_cast<double>(n);
  }
  out.update = c.empty() ? 0 : c.back().update;
  return out;
}

inline std::vector<SweepRow> sweep(const SyntheticWorld& world, SweepParameter param, const std::vector<Decimal>& grid,
                                   const std::vector<std::uint64_t>& seeds, const TrainOptions& base, int window = 10,
                                   int parallelism = 1) {
  if (grid.empty()) throw ConfigError("sweep grid is empty");
  if (seeds.empty()) throw ConfigError("sweep needs at least one seed");
  std::vector<CurvePoint> finals(grid.size() * seeds.size());
  parallel_for(finals.size(), parallelism, [&](std::size_t i) {
    auto opts = base;
    opts.seed = seeds[i % seeds.size()];
    auto value = grid[i / seeds.size()];
    (param == SweepParameter::kLambdaP ? opts.config.reward.lambda_p : opts.config.reward.lambda_a) = value;
    finals[i] = window_average(train(world, opts).curve, window);
  });
  std::vector<SweepRow> rows;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    SweepRow row;
    row.value = grid[g];
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const auto& f = finals[g * seeds.size() + s];
      row.mean_reward += f.mean_reward;
      row.mean_accuracy += f.accuracy;
      row.per_seed_accuracy.push_back(f.accuracy);
    }
    row.mean_reward /= static_cast<double>(seeds.size());
    row.mean_accuracy /= static_cast<double>(seeds.size());
    row.median_accuracy = median(row.per_seed_accuracy);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string sweep_csv(SweepParameter param, const std::vector<SweepRow>& rows) {
  std::string out = "parameter,value,mean_final_reward,mean_final_accuracy,median_final_accuracy\n";
  for (const auto& r : rows)
    out += std::string(to_string(param)) + "," + r.value.to_string() + "," + fmt(r.mean_reward) + "," +
           fmt(r.mean_accuracy) + "," + fmt(r.median_accuracy) + "\n";
  return out;
}

/// Spearman rank correlation with average ranks for ties. NaN when either
/// side has zero variance.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw LengthMismatch(x.size(), y.size());
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  auto rx = ranks(x), ry = ranks(y);
  double n = static_cast<double>(x.size());
  double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

struct GradientCheck {
  std::vector<double> score_function;
  std::vector<double> finite_difference;
  double relative_error = 0;
};

/// Compares the trainer's score-function gradient (weights = raw rewards)
/// with a central finite difference of the Monte Carlo expected reward, on
/// a policy restricted to two templates at the first turn. Both estimates
/// reuse the same per-rollout random streams.
inline GradientCheck gradient_check(const SyntheticWorld& world, std::array<int, 2> templates,
                                    std::array<double, 2> logits, int rollouts, double h, std::uint64_t seed,
                                    const Config& cfg = default_config(), int parallelism = 1) {
  PolicyTable base(world.params.hops);
  base.allowed.fill(false);
  for (int a : templates) base.allowed[static_cast<std::size_t>(a)] = true;
  auto s0 = PolicyTable::state(0, false);
  base.logits[s0][static_cast<std::size_t>(templates[0])] = logits[0];
  base.logits[s0][static_cast<std::size_t>(templates[1])] = logits[1];
  ToyPolicyOptions popts;
  popts.max_queries = 1;

  auto run_all = [&](const PolicyTable& table) {
    std::vector<double> rewards(static_cast<std::size_t>(rollouts));
    std::vector<std::vector<Decision>> decisions(static_cast<std::size_t>(rollouts));
    int workers = std::max(parallelism, 1);
    std::vector<std::unique_ptr<LexicalRetriever>> retrievers;
    for (int w = 0; w < workers; ++w) retrievers.push_back(std::make_unique<LexicalRetriever>(world.corpus));
    std::size_t chunk = (static_cast<std::size_t>(rollouts) + static_cast<std::size_t>(workers) - 1) /
                        static_cast<std::size_t>(workers);
    parallel_for(static_cast<std::size_t>(workers), workers, [&](std::size_t w) {
      auto& retriever = *retrievers[w];
      for (std::size_t i = w * chunk; i < std::min<std::size_t>((w + 1) * chunk, static_cast<std::size_t>(rollouts)); ++i) {
        std::mt19937_64 pick(derive_seed(seed, {4, i}));
        auto idx = uniform_index(pick, world.samples.size());
        auto r = rollout(world, idx, table, retriever, RewardVariant::kPathCentric, cfg, derive_seed(seed, {5, i}), popts);
        rewards[i] = r.reward;
        decisions[i] = r.decisions;
      }
    });
    return std::make_pair(rewards, decisions);
  };

  GradientCheck out;
  auto [rewards, decisions] = run_all(base);
  std::vector<const std::vector<Decision>*> eps;
  for (const auto& d : decisions) eps.push_back(&d);
  auto grad = policy_gradient(base, eps, rewards);
  for (int a : templates) out.score_function.push_back(grad[s0][static_cast<std::size_t>(a)]);

  for (int a : templates) {
    auto plus = base, minus = base;
    plus.logits[s0][static_cast<std::size_t>(a)] += h;
    minus.logits[s0][static_cast<std::size_t>(a)] -= h;
    auto jp = run_all(plus).first;
    auto jm = run_all(minus).first;
    double mean_p = std::accumulate(jp.begin(), jp.end(), 0.0) / rollouts;
    double mean_m = std::accumulate(jm.begin(), jm.end(), 0.0) / rollouts;
    out.finite_difference.push_back((mean_p - mean_m) / (2 * h));
  }
  double num = 0, den = 0;
  for (std::size_t i = 0; i < 2; ++i) {
    num += (out.score_function[i] - out.finite_difference[i]) * (out.score_function[i] - out.finite_difference[i]);
    den += out.finite_difference[i] * out.finite_difference[i];
  }
  out.relative_error = den > 0 ? std::sqrt(num / den) : std::numeric_limits<double>::infinity();
  return out;
}

/// World files in the formats the other tools read: corpus, dataset (with
/// true paths) and an oracle reference cache.
inline void dump_world(const SyntheticWorld& w, const std::string& corpus_path, const std::string& dataset_path,
                       const std::string& refs_path = "") {
  {
    JsonlWriter out(corpus_path);
    for (const auto& d : w.corpus) out.write({{"doc_id", d.doc_id}, {"body", d.body}});
  }
  {
    JsonlWriter out(dataset_path);
    for (const auto& s : w.samples) out.write(to_json(s));
  }
  if (!refs_path.empty()) {
    JsonlWriter out(refs_path);
    for (std::size_t i = 0; i < w.samples.size(); ++i) out.write(to_json(w.reference(i)));
  }
}

}  // namespace pathreward::sandbox
