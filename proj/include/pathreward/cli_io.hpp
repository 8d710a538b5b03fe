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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pathreward/agent_runtime.hpp"
#include "pathreward/core_model.hpp"
#include "pathreward/errors.hpp"
#include "pathreward/evaluator_gateway.hpp"
#include "pathreward/json_io.hpp"
#include "pathreward/log.hpp"
#include "pathreward/reference_factory.hpp"
#include "pathreward/reward_engine.hpp"
#include "pathreward/sandbox.hpp"

namespace pathreward::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kUsage = 1, kInputInvalid = 2, kBackendUnreachable = 3 };

/// Config resolution: defaults, then the file, then each --set in order.
inline Config resolve_config(const std::string& config_path, const std::vector<std::string>& overrides) {
  Config cfg = default_config();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw InputError(config_path, 0, "<file>", "cannot open for reading");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      cfg = parse_config(buf.str(), cfg);
    } catch (const ConfigError& e) {
      throw ConfigError(config_path + ": " + e.what());
    }
  }
  for (const auto& kv : overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    apply_setting(cfg, text::trim(std::string_view(kv).substr(0, eq)), std::string_view(kv).substr(eq + 1));
  }
  auto problems = validate_config(cfg);
  if (!problems.empty()) throw ConfigError(problems.front());
  return cfg;
}

inline std::string file_sha256(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, 0, "<file>", "cannot open for reading");
  std::stringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

inline void require_file(const std::string& path, const char* flag) {
  if (path.empty()) throw ConfigError(std::string(flag) + " is required");
  if (!std::filesystem::is_regular_file(path)) throw InputError(path, 0, "<file>", "does not exist");
}

inline void prepare_output(const std::string& path) {
  if (path.empty()) throw ConfigError("--output is required");
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

inline void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << body;
}

/// Sidecar describing how an output was produced. It is written once with
/// complete=false before any work and rewritten on success.
class Manifest {
 public:
  Manifest(std::string subcommand, std::string output) : output_(std::move(output)) {
    doc_ = {{"tool", "pathreward"},
            {"version", kToolVersion},
            {"subcommand", std::move(subcommand)},
            {"inputs", json::object()},
            {"seeds", json::array()},
            {"deterministic", true},
            {"complete", false}};
  }

  static std::string path_for(const std::string& output) { return output + ".manifest.json"; }

  void config(const Config& cfg) { doc_["config"] = serialize_config(cfg); }
  void input(const std::string& role, const std::string& path) {
    doc_["inputs"][role] = {{"path", path}, {"sha256", file_sha256(path)}};
  }
  void seeds(const std::vector<std::uint64_t>& s) { doc_["seeds"] = s; }
  void deterministic(bool d) { doc_["deterministic"] = d; }
  void set(const std::string& key, json value) { doc_[key] = std::move(value); }
  void flush() { write_text(path_for(output_), doc_.dump(2) + "\n"); }
  void finish(bool complete) {
    doc_["complete"] = complete;
    flush();
  }

 private:
  std::string output_;
  json doc_;
};

/// Runs a subcommand body, mapping failures onto exit codes.
inline int guarded(const std::function<int()>& body, std::ostream& err = std::cerr) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const BackendUnavailable& e) {
    err << "error: " << e.what() << '\n';
    return kBackendUnreachable;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputInvalid;
  }
}

// ---- score ---------------------------------------------------------------

struct ScoreOptions {
  std::string input;
  std::string dataset;
  std::string ref_cache;
  std::string output;
  std::string evaluator = "oracle";
  std::string endpoint;
  std::string model = "judge";
  /// Optional JSONL of the verdicts used, one per input line.
  std::string verdicts;
  /// Optional persistent judge cache for the remote evaluator.
  std::string verdict_cache;
  int max_in_flight = 8;
};

inline std::map<std::string, QASample> index_dataset(const std::vector<QASample>& ds) {
  std::map<std::string, QASample> out;
  for (const auto& s : ds) out.emplace(s.id, s);
  return out;
}

inline int cmd_score(const ScoreOptions& o, const Config& cfg, std::ostream& err = std::cerr) {
  require_file(o.input, "--input");
  require_file(o.dataset, "--dataset");
  if (!o.ref_cache.empty()) require_file(o.ref_cache, "--ref-cache");
  if (o.evaluator != "oracle" && o.evaluator != "remote")
    throw ConfigError("--evaluator must be oracle or remote, got '" + o.evaluator + "'");
  if (o.evaluator == "remote" && o.endpoint.empty()) throw ConfigError("--endpoint is required with --evaluator remote");
  prepare_output(o.output);

  Manifest manifest("score", o.output);
  manifest.config(cfg);
  manifest.input("trajectories", o.input);
  manifest.input("dataset", o.dataset);
  if (!o.ref_cache.empty()) manifest.input("ref_cache", o.ref_cache);
  manifest.set("evaluator", o.evaluator);
  manifest.deterministic(o.evaluator == "oracle");
  manifest.flush();

  auto samples = index_dataset(load_dataset(o.dataset));
  std::map<std::string, ReferenceBundle> refs;
  if (!o.ref_cache.empty()) refs = load_cache(o.ref_cache);

  std::vector<Trajectory> trajs;
  for_each_jsonl(o.input, [&](const json& j, std::size_t line) {
    auto t = trajectory_from_json(j, o.input, line);
    if (!samples.count(t.sample_id))
      throw InputError(o.input, line, "sample_id", "'" + t.sample_id + "' is not in " + o.dataset);
    trajs.push_back(std::move(t));
  });

  std::unique_ptr<Evaluator> evaluator;
  std::optional<VerdictCache> cache;
  if (o.evaluator == "oracle") {
    evaluator = std::make_unique<OracleEvaluator>();
  } else {
    if (!o.verdict_cache.empty()) cache.emplace(o.verdict_cache);
    RemoteEvaluatorOptions ro;
    ro.endpoint = http::Endpoint::parse(o.endpoint);
    ro.model = o.model;
    ro.api_key = http::env_or_empty("EVALUATOR_API_KEY");
    ro.max_in_flight = o.max_in_flight;
    evaluator = std::make_unique<RemoteEvaluator>(ro, cache ? &*cache : nullptr);
  }

  std::vector<const Trajectory*> tp;
  std::vector<const QASample*> sp;
  std::vector<const ReferenceBundle*> rp;
  for (const auto& t : trajs) {
    tp.push_back(&t);
    sp.push_back(&samples.at(t.sample_id));
    auto it = refs.find(t.sample_id);
    rp.push_back(it == refs.end() ? nullptr : &it->second);
  }
  auto verdicts = evaluator->evaluate_batch(tp, sp, rp);

  JsonlWriter out(o.output);
  std::optional<JsonlWriter> vout;
  if (!o.verdicts.empty()) {
    prepare_output(o.verdicts);
    vout.emplace(o.verdicts);
  }
  double sum = 0;
  std::size_t invalid = 0, degraded = 0;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    auto b = total_reward(trajs[i], *sp[i], rp[i], verdicts[i], cfg.reward);
    out.write(to_json(b, trajs[i].sample_id));
    if (vout) vout->write({{"sample_id", trajs[i].sample_id}, {"verdict", to_json(verdicts[i])}});
    sum += b.r_total;
    invalid += b.invalid;
    degraded += verdicts[i].degraded;
  }
  double mean = trajs.empty() ? 0.0 : sum / static_cast<double>(trajs.size());
  err << "scored " << trajs.size() << " trajectories: mean r_total " << sandbox::fmt(mean) << ", invalid " << invalid
      << ", degraded verdicts " << degraded << '\n';

  bool unreachable = o.evaluator == "remote" && !trajs.empty() && degraded == trajs.size();
  manifest.set("summary", {{"n", trajs.size()}, {"mean_r_total", mean}, {"invalid", invalid}, {"degraded", degraded}});
  manifest.finish(!unreachable);
  if (unreachable) {
    err << "error: every verdict fell back to zero; the judge looks unreachable\n";
    return kBackendUnreachable;
  }
  return kOk;
}

// ---- gen-ref -------------------------------------------------------------

struct GenRefOptions {
  std::string dataset;
  std::string output;
  bool oracle = false;
  int k = 4;
  int enough_correct = 3;
  /// Generator endpoint (completion API) and model.
  std::string endpoint;
  std::string model = "generator";
  /// Retrieval backend for candidate episodes: a local corpus or a service.
  std::string corpus;
  std::string retriever_endpoint;
  int parallelism = 1;
};

using PolicyFactory = std::function<std::unique_ptr<PolicyBackend>()>;

struct GenRefReport {
  CacheBuildReport cache;
  std::size_t generator_runs = 0;
  double mean_runs_per_sample = 0;
};

inline std::unique_ptr<Retriever> make_retriever(const std::string& corpus, const std::string& endpoint) {
  if (!corpus.empty()) {
    require_file(corpus, "--corpus");
    return std::make_unique<LexicalRetriever>(load_corpus(corpus));
  }
  if (!endpoint.empty()) return std::make_unique<RemoteRetriever>(http::Endpoint::parse(endpoint));
  throw ConfigError("one of --corpus or --retriever-endpoint is required");
}

/// `make_policy` overrides the remote generator (tests pass scripted ones).
/// Generator runs are counted per policy instance: one per candidate episode
/// plus one for the single-pass fallback.
inline GenRefReport gen_ref(const GenRefOptions& o, const Config& cfg, PolicyFactory make_policy = {},
                            std::unique_ptr<Retriever> retriever = nullptr) {
  require_file(o.dataset, "--dataset");
  prepare_output(o.output);
  auto dataset = load_dataset(o.dataset);

  Manifest manifest("gen-ref", o.output);
  manifest.config(cfg);
  manifest.input("dataset", o.dataset);
  manifest.set("k", o.k);
  manifest.set("oracle", o.oracle);
  manifest.deterministic(o.oracle);
  manifest.flush();

  GenRefReport report;
  if (o.oracle) {
    for (std::size_t i = 0; i < dataset.size(); ++i)
      if (dataset[i].true_path.empty())
        throw InputError(o.dataset, i + 1, "true_path", "--oracle needs true paths on every sample");
    report.cache = build_cache(dataset, o.output, [](const QASample& s) -> std::optional<ReferenceBundle> {
      return ReferenceBundle{s.id, render_ref_planner(s.true_path), s.true_path, Provenance::kOracle};
    });
  } else {
    if (!make_policy) {
      if (o.endpoint.empty()) throw ConfigError("--endpoint is required unless --oracle is given");
      auto ep = http::Endpoint::parse(o.endpoint);
      auto key = http::env_or_empty("POLICY_API_KEY");
      make_policy = [ep, key, model = o.model] { return std::make_unique<RemotePolicy>(ep, model, key); };
    }
    if (!retriever) retriever = make_retriever(o.corpus, o.retriever_endpoint);
    std::atomic<std::size_t> runs{0};
    PolicyFactory counted = [&]() {
      ++runs;
      return make_policy();
    };
    ReferenceBuildOptions bo;
    bo.candidates.k = o.k;
    bo.candidates.enough_correct = o.enough_correct;
    bo.agent = cfg.agent;
    report.cache = build_cache(
        dataset, o.output, [&](const QASample& s) { return build_reference(s, bo, counted, *retriever); },
        o.parallelism);
    report.generator_runs = runs;
  }
  std::size_t built = report.cache.written + report.cache.failed;
  report.mean_runs_per_sample = built ? static_cast<double>(report.generator_runs) / static_cast<double>(built) : 0.0;
  manifest.set("report", {{"written", report.cache.written},
                          {"skipped", report.cache.skipped},
                          {"failed", report.cache.failed},
                          {"generator_runs", report.generator_runs}});
  manifest.finish(report.cache.failed == 0);
  return report;
}

inline int cmd_gen_ref(const GenRefOptions& o, const Config& cfg, std::ostream& err = std::cerr,
                       PolicyFactory make_policy = {}, std::unique_ptr<Retriever> retriever = nullptr) {
  auto r = gen_ref(o, cfg, std::move(make_policy), std::move(retriever));
  err << "references: " << r.cache.written << " written, " << r.cache.skipped << " already cached, "
      << r.cache.failed << " failed; mean generator runs per sample " << sandbox::fmt(r.mean_runs_per_sample)
      << '\n';
  return kOk;
}

// ---- run-agent -----------------------------------------------------------

struct RunAgentOptions {
  std::string dataset;
  std::string output;
  /// Per-episode metrics; defaults to <output>.metrics.jsonl.
  std::string metrics;
  std::string endpoint;
  std::string model = "policy";
  std::string corpus;
  std::string retriever_endpoint;
  int parallelism = 4;
};

inline int cmd_run_agent(const RunAgentOptions& o, const Config& cfg, std::ostream& err = std::cerr,
                         std::function<std::unique_ptr<PolicyBackend>(std::size_t)> make_policy = {},
                         std::unique_ptr<Retriever> retriever = nullptr) {
  require_file(o.dataset, "--dataset");
  prepare_output(o.output);
  if (!make_policy) {
    if (o.endpoint.empty()) throw ConfigError("--endpoint is required");
    auto ep = http::Endpoint::parse(o.endpoint);
    auto key = http::env_or_empty("POLICY_API_KEY");
    make_policy = [ep, key, model = o.model](std::size_t) { return std::make_unique<RemotePolicy>(ep, model, key); };
  }
  if (!retriever) retriever = make_retriever(o.corpus, o.retriever_endpoint);
  auto dataset = load_dataset(o.dataset);

  Manifest manifest("run-agent", o.output);
  manifest.config(cfg);
  manifest.input("dataset", o.dataset);
  if (!o.corpus.empty()) manifest.input("corpus", o.corpus);
  manifest.deterministic(false);
  manifest.flush();

  auto traces = run_episodes(dataset, make_policy, *retriever, cfg.agent, o.parallelism);
  std::string metrics_path = o.metrics.empty() ? o.output + ".metrics.jsonl" : o.metrics;
  prepare_output(metrics_path);
  JsonlWriter out(o.output);
  JsonlWriter mout(metrics_path);
  std::size_t failed = 0, answered = 0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    out.write(to_json(traces[i].trajectory));
    auto m = metrics_json(traces[i]);
    m["sample_id"] = dataset[i].id;
    mout.write(m);
    failed += traces[i].error.has_value();
    auto ans = traces[i].trajectory.answer();
    answered += ans && exact_match(*ans, dataset[i].golden_answers);
  }
  err << "ran " << traces.size() << " episodes: " << answered << " exact matches, " << failed << " failed\n";
  manifest.set("summary", {{"episodes", traces.size()}, {"exact_matches", answered}, {"failed", failed}});
  manifest.finish(failed == 0);
  return failed == 0 ? kOk : kBackendUnreachable;
}

// ---- sandbox commands ----------------------------------------------------

struct ToyOptions {
  std::uint64_t seed = 0;
  /// Number of training runs; run r uses seed + r.
  int runs = 1;
  std::uint64_t world_seed = 7;
  int samples = 50;
  int hops = 2;
  int entities = 200;
  double decoy_rate = 0.6;
  int updates = 100;
  int group_size = 8;
  int questions_per_update = 8;
  double learning_rate = 0.5;
  double format_noise = 0.0;
  int parallelism = 1;
  std::string output;
};

inline sandbox::SyntheticWorld toy_world(const ToyOptions& o) {
  sandbox::WorldParams p;
  p.seed = o.world_seed;
  p.n_samples = o.samples;
  p.hops = o.hops;
  p.n_entities = o.entities;
  p.decoy_rate = o.decoy_rate;
  return sandbox::build_world(p);
}

inline sandbox::TrainOptions toy_train_options(const ToyOptions& o, const Config& cfg) {
  if (o.runs < 1) throw ConfigError("--runs must be at least 1");
  sandbox::TrainOptions t;
  t.config = cfg;
  t.updates = o.updates;
  t.group_size = o.group_size;
  t.questions_per_update = o.questions_per_update;
  t.learning_rate = o.learning_rate;
  t.seed = o.seed;
  t.policy.format_noise = o.format_noise;
  return t;
}

inline std::vector<std::uint64_t> run_seeds(const ToyOptions& o) {
  std::vector<std::uint64_t> s;
  for (int r = 0; r < o.runs; ++r) s.push_back(o.seed + static_cast<std::uint64_t>(r));
  return s;
}

inline void describe_world(Manifest& m, const ToyOptions& o) {
  m.set("world", {{"seed", o.world_seed},
                  {"samples", o.samples},
                  {"hops", o.hops},
                  {"entities", o.entities},
                  {"decoy_rate", o.decoy_rate}});
  m.set("training", {{"updates", o.updates},
                     {"group_size", o.group_size},
                     {"questions_per_update", o.questions_per_update},
                     {"learning_rate", o.learning_rate},
                     {"format_noise", o.format_noise}});
}

inline std::vector<sandbox::RewardVariant> parse_variants(const std::string& list) {
  std::vector<sandbox::RewardVariant> out;
  for (const auto& name : text::split(list, ',')) {
    auto v = sandbox::variant_from_string(text::trim(name));
    if (!v) throw ConfigError("unknown variant '" + text::trim(name) + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw ConfigError("--variant is empty");
  return out;
}

/// One variant and no threshold: the learning curve of the first run.
/// With --threshold: steps-to-threshold per (variant, run) plus medians.
inline int cmd_train_toy(const ToyOptions& o, const std::string& variants, std::optional<double> threshold,
                         const Config& cfg, std::ostream& err = std::cerr) {
  prepare_output(o.output);
  auto vs = parse_variants(variants);
  auto base = toy_train_options(o, cfg);
  auto seeds = run_seeds(o);
  Manifest manifest("train-toy", o.output);
  manifest.config(cfg);
  manifest.seeds(seeds);
  manifest.set("variant", variants);
  describe_world(manifest, o);
  manifest.flush();
  auto world = toy_world(o);

  if (!threshold) {
    if (vs.size() != 1) throw ConfigError("several variants need --threshold");
    base.variant = vs.front();
    auto result = sandbox::train(world, base);
    write_text(o.output, sandbox::curve_csv(result.curve));
    const auto& last = result.curve.back();
    err << "trained " << result.curve.size() << " updates: final accuracy " << sandbox::fmt(last.accuracy)
        << ", final mean reward " << sandbox::fmt(last.mean_reward) << '\n';
  } else {
    std::vector<sandbox::VariantSpec> specs;
    for (auto v : vs) {
      auto opts = base;
      opts.variant = v;
      specs.push_back({sandbox::to_string(v), opts});
    }
    auto c = sandbox::compare_variants(world, specs, seeds, *threshold, o.parallelism);
    write_text(o.output, c.csv());
    for (const auto& [name, m] : c.medians) err << name << ": median updates to threshold " << sandbox::fmt(m) << '\n';
    if (specs.size() == 2) {
      auto st = sandbox::sign_test(c.steps_for(specs[0].name), c.steps_for(specs[1].name));
      err << "sign test " << specs[0].name << " faster: " << st.wins << " wins, " << st.losses
          << " losses, p=" << sandbox::fmt(st.p_value) << '\n';
      manifest.set("sign_test", {{"wins", st.wins}, {"losses", st.losses}, {"p_value", st.p_value}});
    }
    manifest.set("threshold", *threshold);
  }
  manifest.finish(true);
  return kOk;
}

inline std::vector<Decimal> parse_grid(const std::string& grid) {
  std::vector<Decimal> out;
  for (const auto& v : text::split(grid, ',')) {
    try {
      out.push_back(Decimal::parse(text::trim(v)));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("--grid: " + std::string(e.what()));
    }
  }
  if (out.empty()) throw ConfigError("--grid is empty");
  return out;
}

inline int cmd_sweep(const ToyOptions& o, const std::string& parameter, const std::string& grid, int window,
                     const Config& cfg, std::ostream& err = std::cerr) {
  prepare_output(o.output);
  auto param = sandbox::sweep_parameter_from_string(parameter);
  if (!param) throw ConfigError("unknown sweep parameter '" + parameter + "'");
  auto values = parse_grid(grid);
  auto base = toy_train_options(o, cfg);
  auto seeds = run_seeds(o);
  Manifest manifest("sweep", o.output);
  manifest.config(cfg);
  manifest.seeds(seeds);
  manifest.set("parameter", parameter);
  manifest.set("grid", grid);
  manifest.set("window", window);
  describe_world(manifest, o);
  manifest.flush();

  auto rows = sandbox::sweep(toy_world(o), *param, values, seeds, base, window, o.parallelism);
  write_text(o.output, sandbox::sweep_csv(*param, rows));
  err << "swept " << rows.size() << " values over " << seeds.size() << " runs\n";
  manifest.finish(true);
  return kOk;
}

struct DumpWorldOptions {
  ToyOptions world;
  /// Directory receiving corpus.jsonl, dataset.jsonl and refs.jsonl.
  std::string output;
};

inline int cmd_dump_world(const DumpWorldOptions& o, std::ostream& err = std::cerr) {
  if (o.output.empty()) throw ConfigError("--output is required");
  std::filesystem::create_directories(o.output);
  auto dir = std::filesystem::path(o.output);
  auto w = toy_world(o.world);
  sandbox::dump_world(w, (dir / "corpus.jsonl").string(), (dir / "dataset.jsonl").string(),
                      (dir / "refs.jsonl").string());
  err << "wrote " << w.samples.size() << " samples and " << w.corpus.size() << " documents to " << o.output << '\n';
  return kOk;
}

// ---- agree ---------------------------------------------------------------

/// Verdict lines are either {sample_id, verdict:{...}} (as written by score
/// --verdicts or the judge cache) or a bare verdict object.
inline std::vector<EvaluatorVerdict> load_verdicts(const std::string& path) {
  std::vector<EvaluatorVerdict> out;
  for_each_jsonl(path, [&](const json& j, std::size_t line) {
    const json& v = j.contains("verdict") ? j.at("verdict") : j;
    try {
      out.push_back(parse_verdict(v.dump()));
    } catch (const VerdictParseError& e) {
      throw InputError(path, line, "verdict", e.what());
    }
  });
  return out;
}

inline int cmd_agree(const std::string& a, const std::string& b, const std::string& output,
                     std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  require_file(a, "--input");
  require_file(b, "--input");
  auto va = load_verdicts(a);
  auto vb = load_verdicts(b);
  if (va.size() != vb.size())
    throw InputError(b, 0, "<file>", std::to_string(vb.size()) + " verdicts vs " + std::to_string(va.size()) + " in " + a);
  if (va.empty()) throw InputError(a, 0, "<file>", "no verdicts");
  auto report = to_json(measure_agreement(va, vb)).dump(2) + "\n";
  if (output.empty()) {
    out << report;
  } else {
    prepare_output(output);
    Manifest manifest("agree", output);
    manifest.input("a", a);
    manifest.input("b", b);
    manifest.flush();
    write_text(output, report);
    manifest.finish(true);
  }
  err << "compared " << va.size() << " verdict pairs\n";
  return kOk;
}

}  // namespace pathreward::cli
