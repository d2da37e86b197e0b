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
 * @file protocol.hpp
 * @brief PBENV v1: line-delimited JSON between the engine and a learning
 *        agent.
 *
 * Every message is one JSON object on one line with a "type" field. Both
 * directions open with {"type":"hello","protocol":"PBENV v1"}.
 *
 * Server mode (the agent drives; `packbench serve`):
 *   {"type":"reset","spec":{...},"seed":N}  -> {"type":"observation",...}
 *   {"type":"maps"}                         -> {"type":"maps","orientation_mask":M,
 *                                               "stable_maps":[6 x RLE]}
 *   {"type":"step","o":O,"x":X,"y":Y}       -> {"type":"step","observation":...,
 *                                               "r_v","r_waste","reward","done",
 *                                               "utilization"}
 *   {"type":"close"}                        -> connection ends
 * Failures answer {"type":"error","message":...}; the session stays open.
 *
 * Agent mode (the engine drives; `run --agent-cmd`): for every step the
 * engine sends {"type":"act","step":N,"observation":...,"orientation_mask":M,
 * "stable_maps":[...]} and the agent answers {"type":"action","o","x","y"}.
 * When the episode ends the engine sends {"type":"done","utilization","reason"}.
 *
 * An observation is {"nx","ny","heightmap":[row-major voxel heights],
 * "item":[w,d,h] meters}. A stable map is {"first":0|1,"runs":[...]}: run
 * lengths of alternating values over the row-major cells, starting with
 * `first`.
 */

#ifndef PACKBENCH_PROTOCOL_HPP
#define PACKBENCH_PROTOCOL_HPP

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <csignal>
#include <cstdint>
#include <cstring>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "packbench/datasets.hpp"
#include "packbench/env.hpp"
#include "packbench/errors.hpp"

namespace packbench {

inline constexpr const char* kProtocolVersion = "PBENV v1";

using Json = nlohmann::json;

/// One ordered, line-oriented duplex connection.
class Channel {
 public:
  virtual ~Channel() = default;
  /// False at end of stream.
  virtual bool read_line(std::string& line) = 0;
  virtual void write_line(const std::string& line) = 0;
};

class StreamChannel : public Channel {
 public:
  StreamChannel(std::istream& in, std::ostream& out) : in_(in), out_(out) {}

  bool read_line(std::string& line) override { return static_cast<bool>(std::getline(in_, line)); }

  void write_line(const std::string& line) override {
    out_ << line << '\n';
    out_.flush();
    if (!out_) throw TransportError("output stream closed");
  }

 private:
  std::istream& in_;
  std::ostream& out_;
};

/// Runs `sh -c command` with its stdin and stdout connected to this channel.
/// The child's stderr is inherited.
class SubprocessChannel : public Channel {
 public:
  explicit SubprocessChannel(const std::string& command) {
    // A dead agent must surface as a TransportError, not kill the engine.
    std::signal(SIGPIPE, SIG_IGN);
    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0) throw TransportError(std::string("pipe: ") + std::strerror(errno));
    if (pipe(from_child) != 0) {
      close(to_child[0]);
      close(to_child[1]);
      throw TransportError(std::string("pipe: ") + std::strerror(errno));
    }
    pid_ = fork();
    if (pid_ < 0) {
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) close(fd);
      throw TransportError(std::string("fork: ") + std::strerror(errno));
    }
    if (pid_ == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) close(fd);
      execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
  }

  SubprocessChannel(const SubprocessChannel&) = delete;
  SubprocessChannel& operator=(const SubprocessChannel&) = delete;

  ~SubprocessChannel() override {
    if (write_fd_ >= 0) close(write_fd_);
    if (read_fd_ >= 0) close(read_fd_);
    if (pid_ > 0) {
      int status = 0;
      waitpid(pid_, &status, 0);
    }
  }

  bool read_line(std::string& line) override {
    for (;;) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return true;
      }
      char chunk[4096];
      const ssize_t n = read(read_fd_, chunk, sizeof chunk);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        if (buffer_.empty()) return false;
        line = std::move(buffer_);
        buffer_.clear();
        return true;
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  void write_line(const std::string& line) override {
    const std::string data = line + '\n';
    std::size_t off = 0;
    while (off < data.size()) {
      const ssize_t n = write(write_fd_, data.data() + off, data.size() - off);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) throw TransportError(std::string("agent pipe closed: ") + std::strerror(errno));
      off += static_cast<std::size_t>(n);
    }
  }

 private:
  pid_t pid_ = -1;
  int write_fd_ = -1;
  int read_fd_ = -1;
  std::string buffer_;
};

inline Json rle_encode(const StableActionMap& m) {
  Json runs = Json::array();
  const auto cells = m.cells();
  const int first = cells.empty() ? 0 : (cells[0] ? 1 : 0);
  int current = first;
  std::int64_t run = 0;
  for (std::uint8_t v : cells) {
    const int b = v ? 1 : 0;
    if (b == current) {
      ++run;
    } else {
      runs.push_back(run);
      current = b;
      run = 1;
    }
  }
  if (run > 0) runs.push_back(run);
  return Json{{"first", first}, {"runs", runs}};
}

inline StableActionMap rle_decode(const Json& j, int nx, int ny) {
  StableActionMap m(nx, ny, 0);
  try {
    int current = j.at("first").get<int>();
    if (current != 0 && current != 1) throw ProtocolError("RLE first must be 0 or 1");
    std::size_t pos = 0;
    const std::size_t total = m.size();
    for (const auto& r : j.at("runs")) {
      const auto len = r.get<std::int64_t>();
      if (len < 0 || pos + static_cast<std::size_t>(len) > total) {
        throw ProtocolError("RLE runs overflow the grid");
      }
      for (std::int64_t k = 0; k < len; ++k) {
        m(static_cast<int>(pos % static_cast<std::size_t>(nx)),
          static_cast<int>(pos / static_cast<std::size_t>(nx))) = static_cast<std::uint8_t>(current);
        ++pos;
      }
      current ^= 1;
    }
    if (pos != total) throw ProtocolError("RLE runs do not cover the grid");
  } catch (const Json::exception& e) {
    throw ProtocolError(std::string("bad RLE map: ") + e.what());
  }
  return m;
}

inline Json encode_observation(const PackingEnv& env) {
  const Heightmap& hm = env.state().heightmap;
  Json heights = Json::array();
  for (std::int32_t v : hm.cells()) heights.push_back(v);
  Json j{{"nx", hm.nx()}, {"ny", hm.ny()}, {"heightmap", std::move(heights)}};
  if (env.done()) {
    j["item"] = nullptr;
  } else {
    const BoxDims& item = env.upcoming_item();
    j["item"] = {item.w, item.d, item.h};
  }
  return j;
}

inline Json encode_maps(const PackingEnv& env) {
  Json maps = Json::array();
  for (int o = 0; o < Orientation::kCount; ++o) maps.push_back(rle_encode(env.stable_map({o})));
  return Json{{"orientation_mask", env.orientation_mask()}, {"stable_maps", std::move(maps)}};
}

inline Json error_message(const std::string& what) {
  return Json{{"type", "error"}, {"message", what}};
}

inline Json hello_message() { return Json{{"type", "hello"}, {"protocol", kProtocolVersion}}; }

/// Parses one line; throws ProtocolError on malformed JSON or a missing type.
inline Json parse_message(const std::string& line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::exception& e) {
    throw ProtocolError(std::string("malformed message: ") + e.what());
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw ProtocolError("message without a string \"type\"");
  }
  return j;
}

inline void expect_hello(const Json& j) {
  if (j.value("type", "") != "hello" || j.value("protocol", "") != kProtocolVersion) {
    throw ProtocolError(std::string("expected hello for ") + kProtocolVersion + ", got " +
                        j.dump());
  }
}

/**
 * Episode spec accepted by reset: {"bin":[W,D,H], "resolution", "kind",
 * "count", "min", "max", "checker":"ch1"|"cha", "gamma"} with the usual
 * defaults, or {"items":[[w,d,h],...]} to pin the sequence.
 */
struct ResetRequest {
  EnvConfig config;
  std::vector<BoxDims> items;
  std::uint64_t seed = 0;
};

inline ResetRequest parse_reset(const Json& msg) {
  ResetRequest r;
  try {
    const Json spec = msg.value("spec", Json::object());
    r.seed = msg.value("seed", std::uint64_t{0});
    std::vector<double> bin = spec.value("bin", std::vector<double>{0.6, 0.6, 0.6});
    if (bin.size() != 3) throw ProtocolError("spec.bin must be [W,D,H]");
    const double res = spec.value("resolution", 0.005);
    r.config.spec = GridSpec::make(bin[0], bin[1], bin[2], res);
    const std::string checker = spec.value("checker", "cha");
    if (checker == "ch1") {
      r.config.checker = CheckMode::ConvexHull1;
    } else if (checker == "cha") {
      r.config.checker = CheckMode::ConvexHullAlpha;
    } else {
      throw ProtocolError("spec.checker must be \"ch1\" or \"cha\"");
    }
    r.config.gamma = spec.value("gamma", 1.0);
    if (spec.contains("items")) {
      for (const auto& it : spec.at("items")) {
        r.items.push_back({it.at(0).get<double>(), it.at(1).get<double>(), it.at(2).get<double>()});
      }
    } else {
      const auto kind = parse_kind(spec.value("kind", "rs"));
      if (!kind) throw ProtocolError("unknown spec.kind");
      SequenceSpec s;
      s.kind = *kind;
      s.seed = r.seed;
      s.count = spec.value("count", std::size_t{100});
      s.min = spec.value("min", 0.03);
      s.max = spec.value("max", 0.3);
      s.bin = r.config.spec;
      r.items = generate(s).items;
    }
  } catch (const Json::exception& e) {
    throw ProtocolError(std::string("bad reset: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ProtocolError(std::string("bad reset: ") + e.what());
  }
  if (r.items.empty()) throw ProtocolError("reset produced an empty item sequence");
  return r;
}

/// Server side of agent-driven sessions.
class EnvServer {
 public:
  /// Answers one request. Errors become {"type":"error"} replies.
  Json handle(const Json& msg) {
    const std::string type = msg.value("type", "");
    try {
      if (type == "reset") {
        ResetRequest r = parse_reset(msg);
        env_ = std::make_unique<PackingEnv>(r.config);
        env_->reset(r.items, r.seed);
        return Json{{"type", "observation"},
                    {"observation", encode_observation(*env_)},
                    {"done", env_->done()}};
      }
      if (!env_) throw ProtocolError("\"" + type + "\" before reset");
      if (type == "maps") {
        Json j = encode_maps(*env_);
        j["type"] = "maps";
        return j;
      }
      if (type == "step") {
        const Action a{{msg.at("o").get<int>()}, {msg.at("x").get<int>(), msg.at("y").get<int>()}};
        const StepResult s = env_->step(a);
        return Json{{"type", "step"},
                    {"observation", encode_observation(*env_)},
                    {"r_v", s.reward.r_v},
                    {"r_waste", s.reward.r_waste},
                    {"reward", s.reward.total},
                    {"done", s.done},
                    {"utilization", env_->utilization()}};
      }
      throw ProtocolError("unknown message type \"" + type + "\"");
    } catch (const Json::exception& e) {
      return error_message(std::string("bad ") + type + ": " + e.what());
    } catch (const Error& e) {
      return error_message(e.what());
    }
  }

  /// Runs a session until end of stream or "close". Throws ProtocolError if
  /// the handshake fails.
  void serve(Channel& ch) {
    std::string line;
    if (!ch.read_line(line)) return;
    try {
      expect_hello(parse_message(line));
    } catch (const ProtocolError& e) {
      ch.write_line(error_message(e.what()).dump());
      throw;
    }
    ch.write_line(hello_message().dump());
    while (ch.read_line(line)) {
      if (line.empty()) continue;
      Json msg;
      try {
        msg = parse_message(line);
      } catch (const ProtocolError& e) {
        ch.write_line(error_message(e.what()).dump());
        continue;
      }
      if (msg["type"] == "close") return;
      ch.write_line(handle(msg).dump());
    }
  }

  const PackingEnv* env() const noexcept { return env_.get(); }

 private:
  std::unique_ptr<PackingEnv> env_;
};

/// Engine side of agent mode: asks an external process for each action.
class ExternalAgent {
 public:
  explicit ExternalAgent(Channel& ch) : ch_(ch) {}

  /// Sends the state and returns the agent's reply, unvalidated.
  /// Throws TransportError on disconnect, ProtocolError on a bad reply.
  Action act(const PackingEnv& env) {
    if (!greeted_) {
      ch_.write_line(hello_message().dump());
      expect_hello(receive());
      greeted_ = true;
    }
    Json msg = encode_maps(env);
    msg["type"] = "act";
    msg["step"] = env.state().step;
    msg["observation"] = encode_observation(env);
    ch_.write_line(msg.dump());
    const Json reply = receive();
    if (reply["type"] != "action") {
      throw ProtocolError("expected an action, got " + reply.dump());
    }
    try {
      return Action{{reply.at("o").get<int>()},
                    {reply.at("x").get<int>(), reply.at("y").get<int>()}};
    } catch (const Json::exception& e) {
      throw ProtocolError(std::string("bad action: ") + e.what());
    }
  }

  /// Tells the agent the episode is over. Best effort: a vanished agent is
  /// not an error at this point.
  void finish(const PackingEnv& env) noexcept {
    try {
      ch_.write_line(Json{{"type", "done"},
                          {"utilization", env.utilization()},
                          {"reason", to_string(env.state().reason)}}
                         .dump());
    } catch (...) {
    }
  }

 private:
  Json receive() {
    std::string line;
    do {
      if (!ch_.read_line(line)) throw TransportError("agent disconnected");
    } while (line.empty());
    return parse_message(line);
  }

  Channel& ch_;
  bool greeted_ = false;
};

}  // namespace packbench

#endif  // PACKBENCH_PROTOCOL_HPP
