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

#include "privsem/oracle.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "testing.h"

namespace privsem {
namespace {

using testing::IdentityTaskInstance;
using testing::SumOfBitsInstance;

JointDistribution RandomSX(std::size_t ns, std::size_t nx, std::uint64_t seed) {
  return RandomRationalJoint(std::vector<std::size_t>{ns, nx}, seed)
      .RenameVariable("V0", "S")
      .RenameVariable("V1", "X");
}

SearchConfig Small(std::uint64_t seed) {
  return {.u_size = 0, .iterations = 400, .restarts = 2, .seed = seed, .step = 0.5,
          .threads = 1};
}

// I(S;U) of a channel over the positive-mass (S, F, H) cells, by enumeration.
double ChannelLeakage(const InstanceSingle& inst, const std::vector<std::vector<double>>& q,
                      double w, std::size_t u0) {
  const std::size_t ns = inst.sfh.shape()[0], nu = q[0].size();
  std::vector<double> su(ns * nu, 0.0);
  std::size_t row = 0;
  for (std::size_t c = 0; c < inst.sfh.num_cells(); ++c) {
    const double p = inst.sfh.probabilities()[c];
    if (p <= 0.0) continue;
    const std::size_t s = inst.sfh.Coordinates(c)[0];
    for (std::size_t u = 0; u < nu; ++u) {
      su[s * nu + u] += p * ((1 - w) * q[row][u] + (u == u0 ? w : 0.0));
    }
    ++row;
  }
  return testing::RefEntropyOf(su, [nu](std::size_t i) { return i / nu; }) +
         testing::RefEntropyOf(su, [nu](std::size_t i) { return i % nu; }) -
         testing::RefEntropy(su);
}

TEST(SearchTest, AboveTheMutualInformationBeatsTheBaseline) {
  InstanceSingle inst = SumOfBitsInstance(1.5);
  SearchResult r = RandomSearch(inst, Small(1));
  EXPECT_GE(r.evaluation.utility, 0.0);
  EXPECT_LE(r.evaluation.leakage, inst.epsilon + 1e-6);
  EXPECT_EQ(r.mechanism.method, MechanismMethod::kOracle);
}

TEST(SearchTest, NeverExceedsTheUpperBound) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    InstanceSingle inst = IdentityTaskInstance(RandomSX(2 + seed % 2, 3, seed), 0.0);
    inst.epsilon = 0.3 * MutualInformation(inst.sfh, {"S"}, {"H"});
    SearchResult r = RandomSearch(inst, Small(seed));
    EXPECT_LE(r.evaluation.leakage, inst.epsilon + 1e-6) << seed;
    EXPECT_LE(r.evaluation.utility, SingleTaskBounds(inst).upper + 1e-6) << seed;
  }
}

TEST(SearchTest, ZeroBudgetGivesAFeasibleChannel) {
  InstanceSingle inst = SumOfBitsInstance(0.0);
  SearchResult r = RandomSearch(inst, Small(3));
  EXPECT_LE(r.evaluation.leakage, 1e-6);
}

TEST(SearchTest, SumOfBitsNearTheOptimum) {
  InstanceSingle inst = SumOfBitsInstance(0.3);
  SearchResult r = RandomSearch(inst, {.seed = 11});
  const double optimum = SingleTaskBounds(inst).upper;
  EXPECT_NEAR(optimum, 0.8, 1e-12);
  EXPECT_GE(r.evaluation.utility, optimum - 0.05);
  EXPECT_LE(r.evaluation.utility, optimum + 1e-6);
}

TEST(SearchTest, MonotoneInIterations) {
  InstanceSingle inst = IdentityTaskInstance(RandomSX(3, 3, 17), 0.0);
  inst.epsilon = 0.4 * MutualInformation(inst.sfh, {"S"}, {"H"});
  double previous = -1.0;
  for (std::size_t iters : {0, 10, 100, 1000, 3000}) {
    SearchConfig cfg = Small(5);
    cfg.iterations = iters;
    const double u = RandomSearch(inst, cfg).evaluation.utility;
    EXPECT_GE(u, previous - 1e-12) << iters;
    previous = u;
  }
}

TEST(SearchTest, ThreadCountDoesNotChangeTheResult) {
  InstanceSingle inst = SumOfBitsInstance(0.2);
  SearchConfig cfg = Small(9);
  cfg.restarts = 4;
  SearchResult a = RandomSearch(inst, cfg);
  cfg.threads = 4;
  SearchResult b = RandomSearch(inst, cfg);
  EXPECT_EQ(a.evaluation.utility, b.evaluation.utility);
  EXPECT_EQ(a.restart_utilities, b.restart_utilities);
  EXPECT_TRUE(SameDistribution(a.mechanism.extended, b.mechanism.extended, 0.0));
}

TEST(RepairTest, RepairedChannelIsFeasible) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    InstanceSingle inst = IdentityTaskInstance(RandomSX(3, 3, 70 + seed), 0.0);
    inst.epsilon = 0.2 * MutualInformation(inst.sfh, {"S"}, {"H"});
    std::size_t rows = 0;
    for (double p : inst.sfh.probabilities()) rows += p > 0.0;
    Rng rng(seed);
    std::vector<std::vector<double>> q(rows, std::vector<double>(4));
    for (auto& row : q) {
      double total = 0.0;
      for (double& v : row) total += v = rng.Uniform() + 1e-3;
      for (double& v : row) v /= total;
    }
    const double w = RepairWeight(inst, q, 3, inst.epsilon);
    EXPECT_GE(w, 0.0);
    EXPECT_LE(w, 1.0);
    EXPECT_LE(ChannelLeakage(inst, q, w, 3), inst.epsilon + 1e-9) << seed;
  }
}

TEST(SandwichTest, TightInstanceHasZeroWidth) {
  SandwichReport r = SandwichCheck(SumOfBitsInstance(0.3), Small(2));
  EXPECT_NEAR(r.upper_used - r.lower_used, 0.0, 1e-12);
  EXPECT_NEAR(r.best_constructed, r.upper_used, 1e-9);
  EXPECT_TRUE(r.violations.empty());
  EXPECT_TRUE(r.feasible);
}

TEST(SandwichTest, RandomInstancesHaveNoViolations) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    InstanceSingle inst =
        IdentityTaskInstance(RandomSX(2 + seed % 3, 2 + seed % 2, 1000 + seed), 0.0);
    inst.epsilon = 0.5 * MutualInformation(inst.sfh, {"S"}, {"H"});
    SandwichReport r = SandwichCheck(inst, Small(seed));
    EXPECT_TRUE(r.violations.empty()) << seed << ": " << r.violations.front();
  }
}

TEST(SandwichTest, NearTheMutualInformation) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    InstanceSingle inst = IdentityTaskInstance(RandomSX(3, 3, 2000 + seed), 0.0);
    inst.epsilon = 0.99 * MutualInformation(inst.sfh, {"S"}, {"H"});
    SandwichReport r = SandwichCheck(inst, Small(seed));
    EXPECT_TRUE(r.violations.empty()) << seed << ": " << r.violations.front();
  }
}

InstanceSingle CopiedBit(double eps) {
  auto sx = JointDistribution::FromRationals(
      {Alphabet::Indexed("S", 2), Alphabet::Indexed("X", 2)},
      {Rational(1, 2), 0, 0, Rational(1, 2)});
  return IdentityTaskInstance(sx, eps);
}

TEST(ExhaustiveTest, CopiedBitRespectsTheUpperBound) {
  ExhaustiveResult r = ExhaustiveTiny(CopiedBit(0.2), 2, 16);
  EXPECT_EQ(r.channels, 17u * 17u);
  EXPECT_GT(r.feasible, 0u);
  EXPECT_LE(r.best_utility, 0.2 + 1e-6);
  EXPECT_LE(r.best_leakage, 0.2 + 1e-9);
}

TEST(ExhaustiveTest, UnitGridHasOnlyCorners) {
  ExhaustiveResult r = ExhaustiveTiny(CopiedBit(0.2), 3, 1);
  EXPECT_EQ(r.channels, 9u);
  // Only the constant corners leak less than a full bit.
  EXPECT_EQ(r.feasible, 3u);
  EXPECT_NEAR(r.best_utility, 0.0, 1e-12);
}

TEST(ExhaustiveTest, IndependentTaskIsUnconstrained) {
  std::vector<Rational> m(4, Rational(1, 4));
  auto sx = JointDistribution::FromRationals(
      {Alphabet::Indexed("S", 2), Alphabet::Indexed("X", 2)}, m);
  for (std::size_t q : {1, 4}) {
    ExhaustiveResult r = ExhaustiveTiny(IdentityTaskInstance(sx, 0.0), 2, q);
    EXPECT_NEAR(r.best_utility, 1.0, 1e-9) << q;
  }
}

TEST(ExhaustiveTest, Errors) {
  InstanceSingle inst = IdentityTaskInstance(RandomSX(2, 2, 1), 0.1);
  EXPECT_THROW(ExhaustiveTiny(inst, 3, 200), Error);
  try {
    ExhaustiveTiny(inst, 3, 200);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGridTooLarge);
  }
  try {
    ExhaustiveTiny(inst, 4, 2);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

}  // namespace
}  // namespace privsem
