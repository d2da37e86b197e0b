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


#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "packbench.hpp"

namespace fs = std::filesystem;
namespace pb = packbench;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("packbench_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(PACKBENCH_CLI) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const char* kSmall = "--bin 0.1 0.1 0.1 --resolution 0.01 --min 0.02 --max 0.05";

}  // namespace

TEST(MapIoTest, TextRoundTrip) {
  pb::Heightmap h(4, 3, 0);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 4; ++x) h(x, y) = x * 10 + y;
  }
  std::stringstream s;
  pb::write_map_text(h, s);
  EXPECT_EQ(s.str().substr(0, 13), "PBMAP v1\n4 3\n");
  EXPECT_EQ(pb::read_map_text<pb::Heightmap>(s), h);
}

TEST(MapIoTest, TextErrorsCarryLineNumbers) {
  std::stringstream bad("PBMAP v1\n2 2\n1 2\n3\n");
  try {
    pb::read_map_text<pb::Heightmap>(bad);
    FAIL();
  } catch (const pb::ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  std::stringstream wrong("PBMAP v2\n");
  EXPECT_THROW(pb::read_map_text<pb::Heightmap>(wrong), pb::ParseError);
}

TEST(MapIoTest, PgmScalesAndClamps) {
  pb::Heightmap h(3, 1, 0);
  h(1, 0) = 5;
  h(2, 0) = 20;
  std::stringstream s;
  pb::write_pgm(h, 10.0, s);
  const std::string out = s.str();
  const std::string header = "P5\n3 1\n255\n";
  ASSERT_EQ(out.size(), header.size() + 3);
  EXPECT_EQ(out.substr(0, header.size()), header);
  EXPECT_EQ(static_cast<unsigned char>(out[header.size()]), 0);
  EXPECT_EQ(static_cast<unsigned char>(out[header.size() + 1]), 128);
  EXPECT_EQ(static_cast<unsigned char>(out[header.size() + 2]), 255);
}

TEST(CliTest, GenIsReproducible) {
  const fs::path d = scratch("gen");
  const std::string args = std::string("gen ") + kSmall + " --count 30 --seed 9 --out ";
  ASSERT_EQ(cli(args + (d / "a.txt").string()), 0);
  ASSERT_EQ(cli(args + (d / "b.txt").string()), 0);
  EXPECT_EQ(slurp(d / "a.txt"), slurp(d / "b.txt"));
  const pb::ItemSequence seq = pb::load_sequence((d / "a.txt").string());
  EXPECT_EQ(seq.items.size(), 30u);
  EXPECT_EQ(seq.seed, 9u);
}

TEST(CliTest, GenCutFillsBin) {
  const fs::path d = scratch("cut");
  ASSERT_EQ(cli(std::string("gen --kind cut1 ") + kSmall + " --seed 4 --out " +
                (d / "c.txt").string()),
            0);
  const pb::ItemSequence seq = pb::load_sequence((d / "c.txt").string());
  std::int64_t vox = 0;
  for (const auto& s : seq.layout) vox += std::int64_t{s.dims.w} * s.dims.d * s.dims.h;
  EXPECT_EQ(vox, std::int64_t{seq.bin.nx} * seq.bin.ny * seq.bin.nz);
}

TEST(CliTest, BadArgumentsFail) {
  EXPECT_NE(cli("gen --kind hexagons"), 0);
  EXPECT_NE(cli("gen --min 0.5 --max 0.1"), 0);
  EXPECT_NE(cli("compare-stability --seq /nonexistent/seq.txt"), 0);
  EXPECT_NE(cli("frobnicate"), 0);
}

TEST(CliTest, MalformedSequenceExitCode) {
  const fs::path d = scratch("malformed");
  std::ofstream(d / "bad.txt") << "PBSEQ v1\ngarbage\n";
  EXPECT_EQ(cli("compare-stability --seq " + (d / "bad.txt").string()), 2);
}

TEST(CliTest, CompareStabilityWritesReport) {
  const fs::path d = scratch("cmp");
  ASSERT_EQ(cli(std::string("gen ") + kSmall + " --count 40 --out " + (d / "s.txt").string()),
            0);
  ASSERT_EQ(cli("compare-stability --seq " + (d / "s.txt").string() + " --out " +
                (d / "out").string()),
            0);
  const auto rep = nlohmann::json::parse(slurp(d / "out" / "report.json"));
  ASSERT_TRUE(rep.is_object());
  EXPECT_TRUE(fs::exists(d / "out" / "verdicts_ch1.jsonl"));
  EXPECT_TRUE(fs::exists(d / "out" / "verdicts_cha.jsonl"));
  EXPECT_TRUE(fs::exists(d / "out" / "timing.json"));
  const std::string first = slurp(d / "out" / "report.json");
  ASSERT_EQ(cli("compare-stability --seq " + (d / "s.txt").string() + " --out " +
                (d / "out").string()),
            0);
  EXPECT_EQ(slurp(d / "out" / "report.json"), first);
}

TEST(CliTest, CompareStabilityEmptySequence) {
  const fs::path d = scratch("cmp_empty");
  ASSERT_EQ(cli(std::string("gen ") + kSmall + " --count 0 --out " + (d / "s.txt").string()),
            0);
  EXPECT_EQ(cli("compare-stability --seq " + (d / "s.txt").string()), 0);
}

TEST(CliTest, RunIsDeterministic) {
  const fs::path d = scratch("run");
  const std::string args = std::string("run ") + kSmall +
                           " --count 20 --policy greedy --episodes 3 --seed 5 --out ";
  ASSERT_EQ(cli(args + (d / "a").string()), 0);
  ASSERT_EQ(cli(args + (d / "b").string()), 0);
  EXPECT_EQ(slurp(d / "a" / "report.json"), slurp(d / "b" / "report.json"));
  EXPECT_EQ(slurp(d / "a" / "scatter.csv"), slurp(d / "b" / "scatter.csv"));
  for (int i = 0; i < 3; ++i) {
    const std::string t = "traces/episode_000" + std::to_string(i) + ".jsonl";
    ASSERT_TRUE(fs::exists(d / "a" / t));
    EXPECT_EQ(slurp(d / "a" / t), slurp(d / "b" / t));
  }
  const auto rep = nlohmann::json::parse(slurp(d / "a" / "report.json"));
  EXPECT_EQ(rep["results"].size(), 3u);
  EXPECT_EQ(rep["falls"], 0);
  std::ifstream csv(d / "a" / "scatter.csv");
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 4);
}

TEST(CliTest, RunWithExternalAgent) {
  const fs::path d = scratch("run_agent");
  ASSERT_EQ(cli(std::string("run ") + kSmall + " --count 10 --episodes 2 --agent-cmd '" +
                PACKBENCH_TEST_AGENT + " first' --out " + d.string()),
            0);
  const auto rep = nlohmann::json::parse(slurp(d / "report.json"));
  EXPECT_EQ(rep["policy"], "external");
  EXPECT_EQ(rep["agent_failures"], 0);
}

TEST(CliTest, RenderEmptyBinAndBadStep) {
  const fs::path d = scratch("render");
  ASSERT_EQ(cli(std::string("gen ") + kSmall + " --count 10 --out " + (d / "s.txt").string()),
            0);
  ASSERT_EQ(cli("run --seq " + (d / "s.txt").string() +
                " --policy dblf --episodes 1 --out " + (d / "run").string()),
            0);
  const std::string base = "render --seq " + (d / "s.txt").string() + " --trace " +
                           (d / "run" / "traces" / "episode_0000.jsonl").string();
  ASSERT_EQ(cli(base + " --step 0 --out " + (d / "r0").string()), 0);
  const std::string pgm = slurp(d / "r0" / "heightmap.pgm");
  const std::string header = "P5\n10 10\n255\n";
  ASSERT_EQ(pgm.size(), header.size() + 100);
  EXPECT_EQ(pgm.substr(header.size()), std::string(100, '\0'));
  std::ifstream st(d / "r0" / "stable_o0.txt");
  const auto m = pb::read_map_text<pb::StableActionMap>(st);
  EXPECT_GT(pb::count_true(m), 0);

  ASSERT_EQ(cli(base + " --step 3 --out " + (d / "r3").string()), 0);
  std::ifstream ht(d / "r3" / "heightmap.txt");
  const auto hm = pb::read_map_text<pb::Heightmap>(ht);
  EXPECT_GT(*std::max_element(hm.cells().begin(), hm.cells().end()), 0);

  EXPECT_NE(cli(base + " --step 100000 --out " + (d / "rx").string()), 0);
  EXPECT_NE(cli(base + " --step -1 --out " + (d / "rx").string()), 0);
}

TEST(CliTest, ServeOverStdio) {
  const fs::path d = scratch("serve");
  {
    std::ofstream in(d / "in.jsonl");
    in << pb::hello_message().dump() << '\n'
       << R"({"type":"reset","seed":1,"spec":{"bin":[0.1,0.1,0.1],"resolution":0.01,"count":5,"min":0.02,"max":0.05}})"
       << '\n'
       << R"({"type":"step","o":0,"x":0,"y":0})" << '\n'
       << R"({"type":"close"})" << '\n';
  }
  const std::string cmd = std::string(PACKBENCH_CLI) + " serve < " + (d / "in.jsonl").string() +
                          " > " + (d / "out.jsonl").string();
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  std::ifstream out(d / "out.jsonl");
  std::string line;
  std::vector<std::string> types;
  while (std::getline(out, line)) types.push_back(nlohmann::json::parse(line)["type"]);
  EXPECT_EQ(types, (std::vector<std::string>{"hello", "observation", "step"}));
}
