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

/**
 * @file experiment.hpp
 * @brief Episode runner, traces, the heuristic-versus-oracle fall
 *        comparison, and a small ordered worker pool.
 *
 * PBTRACE v1 is JSON lines: a header
 *   {"schema":"PBTRACE v1","policy","checker","seed","bin":[W,D,H],
 *    "resolution","items"}
 * then one record per step
 *   {"step","action":{"o","x","y"},"r_v","r_waste","utilization"}
 * and a closing
 *   {"done":true,"reason","utilization","items_placed","falls","detail"}.
 *
 * PBVERDICT v1 is a header {"schema":"PBVERDICT v1"} followed by
 *   {"step","stable","first_infeasible"} per placement (null when stable).
 */

#ifndef PACKBENCH_EXPERIMENT_HPP
#define PACKBENCH_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "packbench/env.hpp"
#include "packbench/oracle.hpp"
#include "packbench/policies.hpp"
#include "packbench/protocol.hpp"
#include "packbench/random.hpp"

namespace packbench {

inline constexpr const char* kTraceSchema = "PBTRACE v1";
inline constexpr const char* kVerdictSchema = "PBVERDICT v1";

struct TraceRecord {
  std::size_t step = 0;
  Action action;
  RewardBreakdown reward;
  double utilization = 0.0;
};

struct VerdictRecord {
  std::size_t step = 0;
  bool stable = true;
  std::optional<int> first_infeasible;
};

struct EpisodeRun {
  EpisodeResult result;
  std::vector<TraceRecord> trace;
  std::vector<VerdictRecord> verdicts;
  /// Final state, for rendering and accounting checks.
  EnvState final_state;
};

struct RunOptions {
  EnvConfig env;
  PolicyKind policy = PolicyKind::RandomStable;
  /// Judge every placement with the equilibrium oracle; a fall ends the
  /// episode.
  bool judge = true;
  /// Command line of the external agent, for PolicyKind::External.
  std::string agent_cmd;
};

/**
 * Plays one episode. The policy RNG is seeded from `seed` alone, so a run is
 * a pure function of (options, items, seed). Rejected actions and agent
 * failures end the episode with the matching reason.
 */
inline EpisodeRun run_episode(const RunOptions& opt, std::span<const BoxDims> items,
                              std::uint64_t seed) {
  EpisodeRun run;
  PackingEnv env(opt.env);
  run.result.items_total = items.size();
  run.result.volume_std = volume_std(std::vector<BoxDims>(items.begin(), items.end()));
  if (items.empty()) {
    run.result.reason = Termination::SequenceExhausted;
    return run;
  }
  env.reset(items, seed);
  Rng rng(derive_seed(seed, 0x706f6c6963790000ULL));

  std::unique_ptr<SubprocessChannel> channel;
  std::unique_ptr<ExternalAgent> agent;
  if (opt.policy == PolicyKind::External) {
    if (opt.agent_cmd.empty()) throw Error("external policy needs an agent command");
    channel = std::make_unique<SubprocessChannel>(opt.agent_cmd);
    agent = std::make_unique<ExternalAgent>(*channel);
  }

  double discount = 1.0;
  while (!env.done()) {
    std::optional<Action> a;
    try {
      switch (opt.policy) {
        case PolicyKind::RandomStable: a = random_stable(env, rng); break;
        case PolicyKind::DBLF: a = greedy_dblf(env); break;
        case PolicyKind::GreedyMinWaste: a = greedy_min_waste(env); break;
        case PolicyKind::External: a = agent->act(env); break;
      }
    } catch (const TransportError& e) {
      run.result.detail = std::string("transport error: ") + e.what();
      env.terminate(Termination::AgentError);
      break;
    } catch (const ProtocolError& e) {
      run.result.detail = std::string("protocol error: ") + e.what();
      env.terminate(Termination::AgentError);
      break;
    }
    if (!a) {
      env.terminate(Termination::CannotPack);
      break;
    }
    StepResult s;
    try {
      s = env.step(*a);
    } catch (const RejectedAction& e) {
      run.result.detail = e.what();
      env.terminate(Termination::RejectedAction);
      break;
    }
    run.trace.push_back({run.trace.size(), *a, s.reward, env.utilization()});
    run.result.rewards.push_back(s.reward);
    run.result.discounted_return += discount * s.reward.total;
    discount *= opt.env.gamma;
    if (opt.judge) {
      const StabilityVerdict v = equilibrium_feasible(env.state().placed);
      run.verdicts.push_back({run.trace.size() - 1, v.stable, v.first_infeasible});
      if (!v.stable) {
        ++run.result.falls;
        run.result.detail = v.diagnostic;
        env.terminate(Termination::Fall);
      }
    }
  }
  if (agent) agent->finish(env);

  const EnvState& st = env.state();
  run.result.utilization = env.utilization();
  run.result.items_placed = st.placed.size();
  run.result.reason = st.reason;
  run.result.wasted_fraction =
      static_cast<double>(st.wasted_voxels) / static_cast<double>(env.spec().volume_voxels());
  run.final_state = st;
  return run;
}

inline void write_trace(std::ostream& out, const RunOptions& opt, std::uint64_t seed,
                        const EpisodeRun& run) {
  using nlohmann::ordered_json;
  const GridSpec& s = opt.env.spec;
  ordered_json h;
  h["schema"] = kTraceSchema;
  h["policy"] = to_string(opt.policy);
  h["checker"] = to_string(opt.env.checker);
  h["seed"] = seed;
  h["bin"] = {s.bin_w, s.bin_d, s.bin_h};
  h["resolution"] = s.resolution;
  h["items"] = run.result.items_total;
  out << h.dump() << '\n';
  for (const TraceRecord& r : run.trace) {
    ordered_json j;
    j["step"] = r.step;
    j["action"] = {{"o", r.action.orientation.index},
                   {"x", r.action.position.x},
                   {"y", r.action.position.y}};
    j["r_v"] = r.reward.r_v;
    j["r_waste"] = r.reward.r_waste;
    j["utilization"] = r.utilization;
    out << j.dump() << '\n';
  }
  ordered_json f;
  f["done"] = true;
  f["reason"] = to_string(run.result.reason);
  f["utilization"] = run.result.utilization;
  f["items_placed"] = run.result.items_placed;
  f["falls"] = run.result.falls;
  f["detail"] = run.result.detail;
  out << f.dump() << '\n';
}

inline void write_verdicts(std::ostream& out, std::span<const VerdictRecord> verdicts) {
  using nlohmann::ordered_json;
  out << ordered_json{{"schema", kVerdictSchema}}.dump() << '\n';
  for (const VerdictRecord& v : verdicts) {
    ordered_json j;
    j["step"] = v.step;
    j["stable"] = v.stable;
    j["first_infeasible"] = v.first_infeasible ? ordered_json(*v.first_infeasible) : nullptr;
    out << j.dump() << '\n';
  }
}

/// Parsed PBTRACE v1 file: the actions, in order.
inline std::vector<Action> read_trace_actions(std::istream& in) {
  std::vector<Action> actions;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(lineno, std::string("malformed JSON: ") + e.what());
    }
    if (lineno == 1) {
      if (j.value("schema", "") != kTraceSchema) throw ParseError(1, "not a PBTRACE v1 file");
      continue;
    }
    if (j.contains("done")) break;
    try {
      const auto& a = j.at("action");
      actions.push_back({{a.at("o").get<int>()}, {a.at("x").get<int>(), a.at("y").get<int>()}});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(lineno, std::string("bad record: ") + e.what());
    }
  }
  return actions;
}

/// Per-checker outcome of the fall comparison.
struct FallReport {
  CheckMode mode = CheckMode::ConvexHullAlpha;
  std::size_t items = 0;
  std::size_t placements = 0;
  std::size_t falls = 0;
  std::size_t bins = 0;
  /// Items that fit no empty bin.
  std::size_t skipped = 0;
  double seconds = 0.0;
  std::vector<VerdictRecord> verdicts;

  double fall_rate() const noexcept {
    return placements ? static_cast<double>(falls) / static_cast<double>(placements) : 0.0;
  }
};

/**
 * Streams `items` through successive bins with random-stable placements
 * under `mode`, judging every placement with the oracle. An item that
 * cannot be packed closes the bin and opens a fresh one; a fall also closes
 * the bin, and packing resumes with the next item in a fresh bin.
 */
inline FallReport compare_stability(std::span<const BoxDims> items, const GridSpec& spec,
                                    CheckMode mode, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  FallReport rep;
  rep.mode = mode;
  rep.items = items.size();
  Rng rng(seed);
  PackingEnv env(EnvConfig{spec, mode, 1.0});
  std::size_t next = 0;
  while (next < items.size()) {
    env.reset(items.subspan(next), seed);
    ++rep.bins;
    bool placed_any = false;
    while (!env.done()) {
      const std::optional<Action> a = random_stable(env, rng);
      if (!a) break;
      env.step(*a);
      ++next;
      placed_any = true;
      const StabilityVerdict v = equilibrium_feasible(env.state().placed);
      rep.verdicts.push_back({rep.placements, v.stable, v.first_infeasible});
      ++rep.placements;
      if (!v.stable) {
        ++rep.falls;
        env.terminate(Termination::Fall);
      }
    }
    if (!placed_any) {
      ++rep.skipped;
      ++next;
    }
  }
  rep.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

// Statistics over episode results.

inline double mean(std::span<const double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double median(std::span<const double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> c(v.begin(), v.end());
  std::sort(c.begin(), c.end());
  const std::size_t n = c.size();
  return n % 2 ? c[n / 2] : 0.5 * (c[n / 2 - 1] + c[n / 2]);
}

/// Pearson correlation; NaN when either side has zero variance.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mx = mean(x.first(n));
  const double my = mean(y.first(n));
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

/// Worker count: PACKBENCH_THREADS if set and positive, else the hardware
/// concurrency, never more than `jobs`.
inline std::size_t worker_count(std::size_t jobs) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PACKBENCH_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) n = static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

/**
 * Runs job(i) for i in [0, jobs) on a pool of worker_count(jobs) threads.
 * Each job writes only its own result slot, so the output order is the
 * index order regardless of scheduling. The first exception is rethrown.
 */
template <typename R>
std::vector<R> parallel_map(std::size_t jobs, const std::function<R(std::size_t)>& job) {
  std::vector<R> out(jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  const auto worker = [&] {
    for (std::size_t i = next++; i < jobs && !failed; i = next++) {
      try {
        out[i] = job(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  const std::size_t n = worker_count(jobs);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace packbench

#endif  // PACKBENCH_EXPERIMENT_HPP
