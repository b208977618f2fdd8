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

// Search-based verification of single-task instances: random channels with
// leakage repair and hill-climbing, a sandwich harness, and a grid oracle
// for tiny alphabets.

#ifndef PRIVSEM_ORACLE_H_
#define PRIVSEM_ORACLE_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "privsem/single_task.h"

namespace privsem {

struct SearchConfig {
  // |U| cap; 0 means |S| * |X| + 2.
  std::size_t u_size = 0;
  std::size_t iterations = 10000;
  std::size_t restarts = 5;
  std::uint64_t seed = 0;
  // Largest fraction of a cell's mass moved by one hill-climbing step.
  double step = 0.5;
  // Restarts run on this many threads; the result does not depend on it.
  unsigned threads = 1;
};

struct SearchResult {
  MechanismResult mechanism;
  Evaluation evaluation{};
  // Best utility after each restart, as seen by the search itself.
  std::vector<double> restart_utilities{};
};

// Never fails on a valid instance; with no feasible improvement the result
// is the constant-U channel.
SearchResult RandomSearch(const InstanceSingle& instance,
                          const SearchConfig& config);

// Smallest mixing weight w in [0, 1] such that the channel
// (1 - w) q + w * [U = u0] has I(U;S) <= epsilon, by bisection. Rows of q
// are indexed by the positive-mass cells of (S, F, H) in order.
double RepairWeight(const InstanceSingle& instance,
                    const std::vector<std::vector<double>>& channel,
                    std::size_t constant_symbol, double epsilon);

struct SandwichReport {
  double best_constructed = 0.0;
  double best_searched = 0.0;
  double best_found_utility = 0.0;
  double lower_used = 0.0;
  double upper_used = 0.0;
  bool feasible = false;
  std::vector<std::string> violations;
};

SandwichReport SandwichCheck(const InstanceSingle& instance,
                             const SearchConfig& config,
                             double lower_tolerance = 1e-9,
                             double upper_tolerance = 1e-6);

struct ExhaustiveResult {
  double best_utility = 0.0;
  double best_leakage = 0.0;
  std::uint64_t channels = 0;
  std::uint64_t feasible = 0;
};

inline constexpr std::uint64_t kMaxGridPoints = 10'000'000;

// Every channel P(U|S,F,H) with entries on the 1/q grid, |U| = u_size <= 3.
ExhaustiveResult ExhaustiveTiny(const InstanceSingle& instance,
                                std::size_t u_size, std::size_t q);

}  // namespace privsem

#endif  // PRIVSEM_ORACLE_H_
