// Copyright 2026 The Privsem Authors
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

#include "privsem/cli.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli_harness.h"
#include "gtest/gtest.h"
#include "privsem/instance_io.h"

namespace privsem {
namespace {

using testing::CliRun;
using testing::Invoke;
using testing::kData;
using testing::ReadFile;

std::filesystem::path WriteTemp(const std::string& name, const std::string& text) {
  auto p = std::filesystem::temp_directory_path() / ("privsem_cli_test_" + name);
  std::ofstream(p) << text;
  return p;
}

ErrorCode ParseCode(const std::string& text) {
  try {
    ParseInstanceText(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "parsed";
  return ErrorCode::kInvalidArgument;
}

const char* kMinimal = R"({"version": 1, "mode": "single",
  "variables": [{"name": "S", "symbols": ["0", "1"]}, {"name": "X", "symbols": ["0", "1"]}],
  "joint": ["3/8", "1/8", "1/8", "3/8"], "f": [0, 1], "h": [0, 1], "epsilon": 0.1})";

TEST(ParseTest, MinimalInstance) {
  ParsedInstance p = ParseInstanceFile(kData + "/minimal.json");
  ASSERT_TRUE(p.single.has_value());
  EXPECT_EQ(p.mode, "single");
  EXPECT_EQ(p.single->epsilon, 0.1);
  EXPECT_TRUE(p.single->sfh.is_exact());
  EXPECT_FALSE(p.seed.has_value());
}

TEST(ParseTest, MassDeficitNamesTheJoint) {
  std::string text = kMinimal;
  text.replace(text.find("\"3/8\", \"1/8\", \"1/8\", \"3/8\""), 26, "0.3, 0.1, 0.1, 0.4");
  try {
    ParseInstanceText(text);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidationError);
    EXPECT_NE(std::string(e.what()).find("joint"), std::string::npos) << e.what();
  }
}

TEST(ParseTest, MixedRepresentationsAreRejected) {
  std::string text = kMinimal;
  text.replace(text.find("\"3/8\", \"1/8\""), 12, "0.375, \"1/8\"");
  EXPECT_EQ(ParseCode(text), ErrorCode::kValidationError);
}

TEST(ParseTest, EmptyTaskIsRejected) {
  std::string text = ReadFile(kData + "/multi.json");
  text.replace(text.find("[[1]"), 4, "[[]");
  EXPECT_EQ(ParseCode(text), ErrorCode::kValidationError);
}

TEST(ParseTest, MalformedFiles) {
  EXPECT_EQ(ParseCode("{"), ErrorCode::kParseError);
  std::string text = kMinimal;
  text.replace(text.find("\"version\": 1"), 12, "\"version\": 7");
  EXPECT_EQ(ParseCode(text), ErrorCode::kParseError);
  EXPECT_THROW(ParseInstanceFile(kData + "/missing.json"), Error);
}

TEST(CommandTest, BoundsOnSumOfBitsIsTight) {
  CliRun r = Invoke({"bounds", kData + "/example1.json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["bounds"]["tight_l1"].get<bool>());
  EXPECT_NEAR(j["bounds"]["upper"].get<double>(), 0.8, 1e-12);
}

TEST(CommandTest, SeparationsOfSix) {
  CliRun r = Invoke({"separations", "--size", "6"});
  ASSERT_EQ(r.code, kExitOk);
  auto s = nlohmann::json::parse(r.out)["separations"];
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0]["s1"], 2);
  EXPECT_EQ(s[0]["s2"], 3);
  EXPECT_EQ(s[1]["s1"], 3);
  EXPECT_EQ(s[1]["s2"], 2);
}

TEST(CommandTest, SweepUpperIsMonotone) {
  CliRun r = Invoke({"sweep", kData + "/example1.json", "--epsilon-grid", "0:1.4:15"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "epsilon,l1,l2,l3,l4,upper,achieved");
  double previous = -1.0;
  int rows = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    ASSERT_EQ(cells.size(), 7u) << line;
    const double upper = std::stod(cells[5]);
    EXPECT_GE(upper, previous);
    previous = upper;
    ++rows;
  }
  EXPECT_EQ(rows, 15);
}

TEST(ExitCodeTest, UsageValidationAndViolation) {
  EXPECT_EQ(Invoke({}).code, kExitUsage);
  EXPECT_EQ(Invoke({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"mechanize", kData + "/minimal.json", "--method", "magic"}).code,
            kExitUsage);
  EXPECT_EQ(Invoke({"bounds", kData + "/missing.json"}).code, kExitValidation);
  auto bad = WriteTemp("bad.json", R"({"version": 1, "mode": "single"})");
  CliRun r = Invoke({"bounds", bad.string()});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(Invoke({"verify", kData + "/minimal.json", "--iters", "100"}).code, kExitOk);
  // At zero tolerance the round-off of the constructions counts as a breach.
  r = Invoke({"verify", kData + "/minimal.json", "--iters", "100", "--tolerance", "0"});
  EXPECT_EQ(r.code, kExitViolation);
  EXPECT_NE(r.err.find("violation"), std::string::npos);
}

TEST(SeedTest, FlagThenFileThenEnvironment) {
  auto seed_of = [](const CliRun& r) { return nlohmann::json::parse(r.out)["seed"].get<int>(); };
  EXPECT_EQ(seed_of(Invoke({"mechanize", kData + "/example1.json"})), 11);
  EXPECT_EQ(seed_of(Invoke({"mechanize", kData + "/example1.json", "--seed", "4"})), 4);
  setenv("PRIVSEM_SEED", "21", 1);
  EXPECT_EQ(seed_of(Invoke({"mechanize", kData + "/minimal.json"})), 21);
  EXPECT_EQ(seed_of(Invoke({"mechanize", kData + "/example1.json"})), 11);
  unsetenv("PRIVSEM_SEED");
  EXPECT_EQ(seed_of(Invoke({"mechanize", kData + "/minimal.json"})), 0);
}

TEST(OutputTest, OutFlagWritesTheReport) {
  auto path = std::filesystem::temp_directory_path() / "privsem_cli_test_out.json";
  CliRun r = Invoke({"bounds", kData + "/minimal.json", "--out", path.string()});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(ReadFile(path), Invoke({"bounds", kData + "/minimal.json"}).out);
}

TEST(GoldenTest, ReportsMatchAndAreDeterministic) {
  for (const auto& c : testing::GoldenCases()) {
    CliRun a = Invoke(c.args);
    CliRun b = Invoke(c.args);
    ASSERT_EQ(a.code, kExitOk) << c.golden << ": " << a.err;
    EXPECT_EQ(a.out, b.out) << c.golden;
    const auto path = std::filesystem::path(testing::kGolden) / c.golden;
    if (std::getenv("PRIVSEM_UPDATE_GOLDEN")) {
      std::ofstream(path, std::ios::binary) << a.out;
      continue;
    }
    ASSERT_TRUE(std::filesystem::exists(path)) << path;
    EXPECT_EQ(a.out, ReadFile(path)) << c.golden;
  }
}

}  // namespace
}  // namespace privsem
