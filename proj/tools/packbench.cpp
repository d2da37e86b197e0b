// Copyright 2026 The PackBench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// packbench: command-line front end.
//
//   packbench gen --kind rs --count 3000 --out seq.jsonl
//   packbench compare-stability --seq seq.jsonl
//   packbench run --policy greedy --episodes 100 --out runs/
//   packbench render --seq seq.jsonl --trace runs/traces/episode_0000.jsonl --step 10 --out img/
//   packbench serve

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "packbench.hpp"

namespace fs = std::filesystem;
using namespace packbench;

namespace {

struct BinFlags {
  std::vector<double> bin{0.6, 0.6, 0.6};
  double resolution = 0.005;

  void add(CLI::App* app) {
    app->add_option("--bin", bin, "Bin size W D H in meters")->expected(3);
    app->add_option("--resolution", resolution, "Grid cell edge in meters");
  }
  GridSpec spec() const { return GridSpec::make(bin[0], bin[1], bin[2], resolution); }
};

struct SeqFlags {
  std::string kind = "rs";
  std::size_t count = 100;
  double min = 0.03;
  double max = 0.3;

  void add(CLI::App* app) {
    app->add_option("--kind", kind, "Sequence kind: rs, cut1, cut2");
    app->add_option("--count", count, "Number of items (rs only)");
    app->add_option("--min", min, "Smallest item dimension, meters");
    app->add_option("--max", max, "Largest item dimension, meters");
  }
  SequenceSpec spec(const GridSpec& bin, std::uint64_t seed) const {
    const auto k = parse_kind(kind);
    if (!k) throw Error("unknown --kind " + kind);
    SequenceSpec s;
    s.kind = *k;
    s.seed = seed;
    s.count = count;
    s.min = min;
    s.max = max;
    s.bin = bin;
    return s;
  }
};

CheckMode parse_checker(const std::string& s) {
  if (s == "ch1") return CheckMode::ConvexHull1;
  if (s == "cha") return CheckMode::ConvexHullAlpha;
  throw Error("unknown --checker " + s + " (expected ch1 or cha)");
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

nlohmann::ordered_json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

void write_meta(const fs::path& dir, const std::string& command) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ofstream out(dir / "meta.json");
  std::ostringstream ts;
  ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
  out << nlohmann::ordered_json{{"command", command}, {"timestamp", ts.str()}}.dump() << '\n';
}

int cmd_gen(const BinFlags& bf, const SeqFlags& sf, std::uint64_t seed, const std::string& out) {
  const ItemSequence seq = generate(sf.spec(bf.spec(), seed));
  if (out.empty() || out == "-") {
    save_sequence(seq, std::cout);
  } else {
    save_sequence(seq, out);
  }
  double total = 0.0;
  for (const auto& b : seq.items) total += b.volume();
  std::cerr << "kind " << to_string(seq.kind) << ", " << seq.items.size() << " items, volume "
            << fixed(total, 6) << " m^3 (" << fixed(100.0 * total / seq.bin.bin_w / seq.bin.bin_d /
                                                        seq.bin.bin_h,
                                                    2)
            << "% of bin), volume std " << fixed(volume_std(seq.items), 6) << " m^3\n";
  return 0;
}

int cmd_compare(const std::string& seq_path, std::uint64_t seed, const std::string& out) {
  const ItemSequence seq = load_sequence(seq_path);
  std::vector<FallReport> reports;
  for (CheckMode m : {CheckMode::ConvexHull1, CheckMode::ConvexHullAlpha}) {
    reports.push_back(compare_stability(seq.items, seq.bin, m, seed));
  }
  std::cout << std::left << std::setw(16) << "Method" << std::setw(12) << "Placements"
            << std::setw(12) << "Fall number" << std::setw(12) << "Fall rate" << "Time (s)\n";
  for (const FallReport& r : reports) {
    std::cout << std::setw(16)
              << (r.mode == CheckMode::ConvexHull1 ? "convexHull-1" : "convexHull-alpha")
              << std::setw(12) << r.placements << std::setw(12) << r.falls << std::setw(12)
              << (fixed(100.0 * r.fall_rate(), 2) + "%") << fixed(r.seconds, 2) << '\n';
  }
  if (!out.empty()) {
    const fs::path dir(out);
    fs::create_directories(dir);
    nlohmann::ordered_json rep;
    rep["sequence"] = seq_path;
    rep["items"] = seq.items.size();
    rep["seed"] = seed;
    for (const FallReport& r : reports) {
      const std::string m = to_string(r.mode);
      rep[m] = {{"placements", r.placements}, {"falls", r.falls}, {"fall_rate", r.fall_rate()},
                {"bins", r.bins}, {"skipped", r.skipped}};
      std::ofstream v(dir / ("verdicts_" + m + ".jsonl"));
      write_verdicts(v, r.verdicts);
    }
    std::ofstream(dir / "report.json") << rep.dump(2) << '\n';
    write_meta(dir, "compare-stability");
    nlohmann::ordered_json timing;
    for (const FallReport& r : reports) timing[to_string(r.mode)] = r.seconds;
    std::ofstream(dir / "timing.json") << timing.dump() << '\n';
  }
  return 0;
}

struct RunFlags {
  std::string policy = "random";
  std::string checker = "cha";
  std::size_t episodes = 10;
  std::string seq;
  std::string agent_cmd;
  bool no_judge = false;
};

int cmd_run(const BinFlags& bf, const SeqFlags& sf, const RunFlags& rf, std::uint64_t seed,
            const std::string& out) {
  const auto policy = parse_policy(rf.policy);
  if (!policy) throw Error("unknown --policy " + rf.policy);
  RunOptions opt;
  opt.policy = *policy;
  opt.env.checker = parse_checker(rf.checker);
  opt.judge = !rf.no_judge;
  opt.agent_cmd = rf.agent_cmd;
  if (opt.policy == PolicyKind::External && opt.agent_cmd.empty()) {
    throw Error("--policy external requires --agent-cmd");
  }
  if (!opt.agent_cmd.empty()) opt.policy = PolicyKind::External;

  std::optional<ItemSequence> fixed_seq;
  if (!rf.seq.empty()) {
    fixed_seq = load_sequence(rf.seq);
    opt.env.spec = fixed_seq->bin;
  } else {
    opt.env.spec = bf.spec();
    validate_bounds(sf.spec(opt.env.spec, seed));
  }

  const fs::path dir(out);
  fs::create_directories(dir / "traces");
  struct Slot {
    EpisodeResult result;
    std::string trace_file;
  };
  const auto slots = parallel_map<Slot>(rf.episodes, [&](std::size_t i) {
    const std::uint64_t ep_seed = derive_seed(seed, i);
    const std::vector<BoxDims> items =
        fixed_seq ? fixed_seq->items : generate(sf.spec(opt.env.spec, ep_seed)).items;
    const EpisodeRun run = run_episode(opt, items, ep_seed);
    std::ostringstream name;
    name << "episode_" << std::setw(4) << std::setfill('0') << i << ".jsonl";
    std::ofstream t(dir / "traces" / name.str(), std::ios::binary);
    write_trace(t, opt, ep_seed, run);
    if (!t) throw Error("failed writing trace " + name.str());
    return Slot{run.result, name.str()};
  });

  std::vector<double> util, vstd;
  nlohmann::ordered_json episodes = nlohmann::ordered_json::array();
  std::size_t falls = 0, agent_errors = 0;
  std::ofstream csv(dir / "scatter.csv");
  csv << "episode,utilization,volume_std\n";
  csv << std::setprecision(17);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const EpisodeResult& r = slots[i].result;
    util.push_back(r.utilization);
    vstd.push_back(r.volume_std);
    falls += r.falls;
    if (r.reason == Termination::AgentError || r.reason == Termination::RejectedAction) {
      ++agent_errors;
    }
    csv << i << ',' << r.utilization << ',' << r.volume_std << '\n';
    nlohmann::ordered_json e;
    e["episode"] = i;
    e["trace"] = "traces/" + slots[i].trace_file;
    e["utilization"] = r.utilization;
    e["items_placed"] = r.items_placed;
    e["items_total"] = r.items_total;
    e["reason"] = to_string(r.reason);
    e["falls"] = r.falls;
    e["wasted_fraction"] = r.wasted_fraction;
    e["discounted_return"] = r.discounted_return;
    e["volume_std"] = r.volume_std;
    if (!r.detail.empty()) e["detail"] = r.detail;
    episodes.push_back(std::move(e));
  }
  nlohmann::ordered_json rep;
  rep["policy"] = to_string(opt.policy);
  rep["checker"] = to_string(opt.env.checker);
  rep["seed"] = seed;
  rep["episodes"] = rf.episodes;
  rep["mean_utilization"] = number_or_null(mean(util));
  rep["median_utilization"] = number_or_null(median(util));
  rep["utilization_vs_volume_std_pearson"] = number_or_null(pearson(vstd, util));
  rep["falls"] = falls;
  rep["agent_failures"] = agent_errors;
  rep["results"] = std::move(episodes);
  std::ofstream(dir / "report.json") << rep.dump(2) << '\n';
  write_meta(dir, "run");
  std::cout << rf.episodes << " episodes, mean utilization " << fixed(mean(util), 4)
            << ", median " << fixed(median(util), 4) << ", falls " << falls << '\n';
  return 0;
}

int cmd_render(const std::string& seq_path, const std::string& trace_path, long step,
               const std::string& checker, const std::string& out) {
  const ItemSequence seq = load_sequence(seq_path);
  std::ifstream tin(trace_path);
  if (!tin) throw Error("cannot open " + trace_path);
  const std::vector<Action> actions = read_trace_actions(tin);
  if (step < 0 || static_cast<std::size_t>(step) > actions.size()) {
    throw Error("step " + std::to_string(step) + " outside [0, " +
                std::to_string(actions.size()) + "]");
  }
  PackingEnv env(EnvConfig{seq.bin, parse_checker(checker), 1.0});
  env.reset(seq.items);
  for (long i = 0; i < step; ++i) env.step(actions[static_cast<std::size_t>(i)]);
  const fs::path dir(out);
  fs::create_directories(dir);
  const double nz = seq.bin.nz;
  write_pgm(env.state().heightmap, nz, (dir / "heightmap.pgm").string());
  write_pgm(env.state().empty_map, nz, (dir / "empty_map.pgm").string());
  std::ofstream hm(dir / "heightmap.txt");
  write_map_text(env.state().heightmap, hm);
  std::ofstream em(dir / "empty_map.txt");
  write_map_text(env.state().empty_map, em);
  if (!env.done()) {
    for (int o = 0; o < Orientation::kCount; ++o) {
      const std::string stem = "stable_o" + std::to_string(o);
      write_pgm(env.stable_map({o}), 1.0, (dir / (stem + ".pgm")).string());
      std::ofstream t(dir / (stem + ".txt"));
      write_map_text(env.stable_map({o}), t);
    }
  }
  return 0;
}

int cmd_serve(const std::string& agent_cmd) {
  EnvServer server;
  if (agent_cmd.empty()) {
    StreamChannel ch(std::cin, std::cout);
    server.serve(ch);
  } else {
    SubprocessChannel ch(agent_cmd);
    server.serve(ch);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"packbench: online 3D bin packing engine and stability benchmark"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  std::string out;

  BinFlags gen_bin;
  SeqFlags gen_seq;
  auto* gen = app.add_subcommand("gen", "Generate an item sequence (PBSEQ v1)");
  gen_bin.add(gen);
  gen_seq.add(gen);
  gen->add_option("--seed", seed, "Generator seed");
  gen->add_option("--out", out, "Output file (default: stdout)");

  std::string seq_path;
  auto* cmp = app.add_subcommand("compare-stability",
                                 "Oracle-judged fall rates of random-stable packing, ch1 vs cha");
  cmp->add_option("--seq", seq_path, "Sequence file")->required();
  cmp->add_option("--seed", seed, "Placement seed");
  cmp->add_option("--out", out, "Directory for report.json and verdict files");

  BinFlags run_bin;
  SeqFlags run_seq;
  RunFlags rf;
  auto* run = app.add_subcommand("run", "Run episodes with a policy and write traces");
  run_bin.add(run);
  run_seq.add(run);
  run->add_option("--seq", rf.seq, "Replay this sequence file in every episode");
  run->add_option("--policy", rf.policy, "random, dblf, greedy, external");
  run->add_option("--checker", rf.checker, "ch1 or cha");
  run->add_option("--episodes", rf.episodes, "Number of episodes");
  run->add_option("--seed", seed, "Base seed");
  run->add_option("--out", out, "Output directory")->required();
  run->add_option("--agent-cmd", rf.agent_cmd, "Shell command of an external PBENV v1 agent");
  run->add_flag("--no-judge", rf.no_judge, "Skip the equilibrium oracle");

  std::string trace_path;
  std::string render_checker = "cha";
  long step = 0;
  auto* render = app.add_subcommand("render", "Render maps after a trace prefix as PGM");
  render->add_option("--seq", seq_path, "Sequence file")->required();
  render->add_option("--trace", trace_path, "PBTRACE v1 file")->required();
  render->add_option("--step", step, "Number of trace steps to replay")->required();
  render->add_option("--checker", render_checker, "ch1 or cha");
  render->add_option("--out", out, "Output directory")->required();

  std::string serve_agent;
  auto* serve = app.add_subcommand("serve", "Serve PBENV v1 on stdin/stdout");
  serve->add_option("--agent-cmd", serve_agent, "Spawn this agent and serve it over pipes");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) return cmd_gen(gen_bin, gen_seq, seed, out);
    if (*cmp) return cmd_compare(seq_path, seed, out);
    if (*run) return cmd_run(run_bin, run_seq, rf, seed, out);
    if (*render) return cmd_render(seq_path, trace_path, step, render_checker, out);
    if (*serve) return cmd_serve(serve_agent);
  } catch (const ParseError& e) {
    std::cerr << "packbench: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "packbench: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
