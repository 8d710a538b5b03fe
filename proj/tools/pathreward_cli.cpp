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

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pathreward/cli_io.hpp"

namespace cli = pathreward::cli;

namespace {

struct Common {
  std::string config;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "key = value config file");
  app->add_option("--set", c.overrides, "override one config key (key=value); repeatable, wins over --config");
}

void add_world(CLI::App* app, cli::ToyOptions& o) {
  app->add_option("--seed", o.seed, "base training seed");
  app->add_option("--world-seed", o.world_seed, "seed of the synthetic world");
  app->add_option("--samples", o.samples, "questions in the world");
  app->add_option("--hops", o.hops, "hops per question");
  app->add_option("--entities", o.entities, "entity pool size");
  app->add_option("--decoy-rate", o.decoy_rate, "chance of a rumor decoy per hop");
  app->add_option("--updates", o.updates, "policy updates per run");
  app->add_option("--group-size", o.group_size, "rollouts per question (G)");
  app->add_option("--questions", o.questions_per_update, "questions per update");
  app->add_option("--lr", o.learning_rate, "learning rate");
  app->add_option("--format-noise", o.format_noise, "chance per episode of a malformed plan");
  app->add_option("--parallelism", o.parallelism, "worker threads");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Path-centric reward shaping for agentic retrieval"};
  app.set_version_flag("--version", cli::kToolVersion);
  app.require_subcommand(1);

  Common common;

  cli::ScoreOptions score;
  auto* s = app.add_subcommand("score", "score trajectories into reward breakdowns");
  add_common(s, common);
  s->add_option("--input", score.input, "trajectories JSONL")->required();
  s->add_option("--dataset", score.dataset, "dataset JSONL")->required();
  s->add_option("--ref-cache", score.ref_cache, "reference cache JSONL");
  s->add_option("--output", score.output, "rewards JSONL")->required();
  s->add_option("--evaluator", score.evaluator, "oracle or remote")->check(CLI::IsMember({"oracle", "remote"}));
  s->add_option("--endpoint", score.endpoint, "judge chat-completions URL");
  s->add_option("--model", score.model, "judge model name");
  s->add_option("--verdicts", score.verdicts, "also write the verdicts used");
  s->add_option("--verdict-cache", score.verdict_cache, "persistent judge cache JSONL");
  s->add_option("--max-in-flight", score.max_in_flight, "concurrent judge requests");

  cli::GenRefOptions gen;
  auto* g = app.add_subcommand("gen-ref", "build the reference cache");
  add_common(g, common);
  g->add_option("--dataset", gen.dataset, "dataset JSONL")->required();
  g->add_option("--output,--ref-cache", gen.output, "reference cache JSONL (appended, resumable)")->required();
  g->add_flag("--oracle", gen.oracle, "use the dataset's true paths");
  g->add_option("--k", gen.k, "candidate episodes per sample");
  g->add_option("--enough-correct", gen.enough_correct, "stop after this many correct candidates (0: never)");
  g->add_option("--endpoint", gen.endpoint, "generator completions URL");
  g->add_option("--model", gen.model, "generator model name");
  g->add_option("--corpus", gen.corpus, "corpus JSONL for a local lexical retriever");
  g->add_option("--retriever-endpoint", gen.retriever_endpoint, "retrieval service URL");
  g->add_option("--parallelism", gen.parallelism, "samples built concurrently");

  cli::RunAgentOptions run;
  auto* r = app.add_subcommand("run-agent", "run the search agent over a dataset");
  add_common(r, common);
  r->add_option("--dataset", run.dataset, "dataset JSONL")->required();
  r->add_option("--output", run.output, "trajectories JSONL")->required();
  r->add_option("--metrics", run.metrics, "per-episode metrics JSONL");
  r->add_option("--endpoint", run.endpoint, "policy completions URL")->required();
  r->add_option("--model", run.model, "policy model name");
  r->add_option("--corpus", run.corpus, "corpus JSONL for a local lexical retriever");
  r->add_option("--retriever-endpoint", run.retriever_endpoint, "retrieval service URL");
  r->add_option("--parallelism", run.parallelism, "episodes in flight");

  cli::ToyOptions toy;
  std::string variants = "path_centric";
  double threshold = 0;
  auto* t = app.add_subcommand("train-toy", "train the tabular policy in the synthetic world");
  add_common(t, common);
  add_world(t, toy);
  t->add_option("--variant", variants, "reward variant(s): path_centric, binary_outcome (comma separated)");
  t->add_option("--threshold", threshold, "compare variants by updates to this accuracy");
  t->add_option("--runs", toy.runs, "runs per variant when comparing (seeds seed..seed+runs-1)");
  t->add_option("--output", toy.output, "curve or comparison CSV")->required();

  cli::ToyOptions sw;
  sw.runs = 10;
  std::string parameter = "lambda_p";
  std::string grid = "0.2,0.3,0.4";
  int window = 10;
  auto* w = app.add_subcommand("sweep", "sweep a reward coefficient in the synthetic world");
  add_common(w, common);
  add_world(w, sw);
  w->add_option("--parameter", parameter, "lambda_p or lambda_a")->check(CLI::IsMember({"lambda_p", "lambda_a"}));
  w->add_option("--grid", grid, "comma-separated values");
  w->add_option("--runs", sw.runs, "runs per value (seeds seed..seed+runs-1)");
  w->add_option("--window", window, "trailing updates averaged for the final score");
  w->add_option("--output", sw.output, "sweep CSV")->required();

  std::vector<std::string> agree_inputs;
  std::string agree_output;
  auto* a = app.add_subcommand("agree", "agreement rates between two verdict files");
  a->add_option("--input", agree_inputs, "two verdict JSONL files")->required()->expected(2);
  a->add_option("--output", agree_output, "report JSON (stdout when omitted)");

  cli::DumpWorldOptions dump;
  auto* d = app.add_subcommand("dump-world", "write a synthetic world as corpus, dataset and reference files");
  add_world(d, dump.world);
  d->add_option("--output", dump.output, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? cli::kOk : cli::kUsage;
  }

  return cli::guarded([&]() -> int {
    auto cfg = [&] { return cli::resolve_config(common.config, common.overrides); };
    if (s->parsed()) return cli::cmd_score(score, cfg());
    if (g->parsed()) return cli::cmd_gen_ref(gen, cfg());
    if (r->parsed()) return cli::cmd_run_agent(run, cfg());
    if (t->parsed()) {
      std::optional<double> thr;
      if (t->count("--threshold")) thr = threshold;
      return cli::cmd_train_toy(toy, variants, thr, cfg());
    }
    if (w->parsed()) return cli::cmd_sweep(sw, parameter, grid, window, cfg());
    if (a->parsed()) return cli::cmd_agree(agree_inputs[0], agree_inputs[1], agree_output);
    if (d->parsed()) return cli::cmd_dump_world(dump);
    return cli::kUsage;
  });
}
