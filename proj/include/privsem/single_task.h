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

#ifndef PRIVSEM_SINGLE_TASK_H_
#define PRIVSEM_SINGLE_TASK_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "privsem/prob_core.h"
#include "privsem/representation.h"

namespace privsem {

// Variable names of the derived joint and of every mechanism's extended
// joint.
inline constexpr char kPrivateVar[] = "S";
inline constexpr char kSemanticVar[] = "F";
inline constexpr char kTaskVar[] = "H";
inline constexpr char kDisclosedVar[] = "U";

// One private variable S, an information source X (one or more variables
// of `joint`), a numeric semantic f(X), a task h(X) and a leakage budget.
struct InstanceSingle {
  JointDistribution joint;
  std::string private_name;
  DeterministicMap semantic;
  DeterministicMap task;
  double epsilon = 0.0;
  // (S, F, H), derived from the above.
  JointDistribution sfh;
};

InstanceSingle MakeInstance(JointDistribution joint, std::string private_name,
                            DeterministicMap semantic, DeterministicMap task,
                            double epsilon);

// Leakage-utility quantities of one candidate split S = (S1, S2).
struct SeparationTerm {
  SeparationShape shape;
  double h_s2 = 0.0;
  double h_s2_given_task = 0.0;
  double alpha2 = 0.0;      // epsilon / H(S2)
  bool valid = false;       // alpha2 <= 1
  double l3_penalty = 0.0;  // alpha2 H(S2|h)
  double l4_penalty = 0.0;  // alpha2 (H(S|h) - slack)
};

struct BoundsReportSingle {
  double epsilon = 0.0;
  double h_private = 0.0;             // H(S)
  double h_task = 0.0;                // H(h)
  double h_task_given_private = 0.0;  // H(h|S)
  double h_private_given_task = 0.0;  // H(S|h)
  double mutual_information = 0.0;    // I(S;h)
  double sfrl_slack = 0.0;            // log2(I(S;h)+1)+4
  double alpha = 0.0;                 // epsilon / H(S)

  double l1 = 0.0;
  double l1_alt = 0.0;  // H(h) - H(S) + epsilon
  double l2 = 0.0;
  std::optional<double> l3;
  std::optional<double> l4;
  std::optional<SeparationShape> l3_separation;
  std::optional<SeparationShape> l4_separation;
  std::vector<SeparationTerm> separations;

  double effective_lower = 0.0;  // max(0, l1..l4)
  double upper = 0.0;            // H(h|S) + epsilon
  bool tight_l1 = false;         // H(S|h) == 0
};

// Requires H(S) > 0 and epsilon < I(S;h).
BoundsReportSingle SingleTaskBounds(const InstanceSingle& instance);

// W = Z with probability alpha, the fresh symbol otherwise.
struct RandomizedResponse {
  Alphabet input;
  Alphabet output;  // input symbols followed by the fresh symbol
  double alpha = 0.0;
  Rational alpha_exact;
  JointDistribution joint;  // (Z, W)

  double Conditional(std::size_t z, std::size_t w) const;
};

// `target` is a pmf over a single variable Z. The joint is exact when the
// target is; alpha then enters as the exact value of its double.
RandomizedResponse MakeRandomizedResponse(const JointDistribution& target,
                                          double alpha,
                                          std::string fresh_symbol = "c",
                                          std::string output_name = "W");

enum class MechanismMethod { kEfrl, kEsfrl, kSepL3, kSepL4, kPassthrough, kOracle };

std::string_view MethodName(MechanismMethod method);
std::optional<MechanismMethod> ParseMethod(std::string_view name);

struct MechanismOptions {
  std::uint64_t seed = 0;
  std::size_t restarts = 8;
};

struct MechanismResult {
  JointDistribution extended;  // (S, F, H, U)
  std::vector<double> u_labels{};
  MechanismMethod method = MechanismMethod::kPassthrough;
  std::optional<SeparationRep> chosen_separation{};
  // The common-randomness part, for the constructed methods.
  std::optional<FrlResult> representation{};
  double alpha = 0.0;  // randomization probability of W
};

// efrl/esfrl: FRL/SFRL output of (S, h) plus randomized response over S
// with alpha = epsilon/H(S). sep_l3/sep_l4: SFRL output plus randomized
// response over S2 of the split minimising the respective penalty.
// passthrough: U = h(X).
MechanismResult BuildMechanism(const InstanceSingle& instance,
                               MechanismMethod method,
                               MechanismOptions options = {});

struct Evaluation {
  double leakage = 0.0;              // I(U;S)
  double utility = 0.0;              // I(U;h)
  double conditional_leakage = 0.0;  // I(S;U|h)
  double identity_residual = 0.0;    // key identity with X <- h
};

Evaluation EvaluateMechanism(const InstanceSingle& instance,
                             const MechanismResult& mechanism);

struct NoiseEntry {
  std::size_t s = 0, f = 0, h = 0, u = 0;
  Rational noise;             // label(u) - f
  double noise_value = 0.0;
  double probability = 0.0;   // P(U = u | s, f, h)
};

struct NoiseTable {
  std::vector<NoiseEntry> entries;  // positive-mass cells only
  std::vector<double> support;      // distinct noise values, ascending
  bool reconstruction_exact = false;
};

NoiseTable ExtractNoise(const InstanceSingle& instance,
                        const MechanismResult& mechanism);

struct ConstructedMechanism {
  MechanismMethod method;
  MechanismResult mechanism;
  Evaluation evaluation;
};

// Every constructed method that applies to the instance (separation methods
// are skipped when no split is valid).
std::vector<ConstructedMechanism> ConstructAll(const InstanceSingle& instance,
                                               MechanismOptions options = {});

struct ScenarioVerdict {
  bool premise = false;
  std::optional<bool> ordering_holds;  // empty when the premise fails
  double margin = 0.0;
  std::string_view Status() const;
};

struct ScenarioReport {
  double epsilon = 0.0;
  double l1 = 0.0, l2 = 0.0, l3_bar = 0.0, l4_bar = 0.0;
  double sfrl_slack = 0.0;
  double alpha = 0.0, alpha2 = 0.0;
  double h_private = 0.0, h_s2 = 0.0;
  double h_private_given_task = 0.0;
  double h_s1_given_task = 0.0, h_s2_given_task = 0.0;
  ScenarioVerdict scenario1;  // H(S|h) <= slack  =>  L4bar >= L2
  ScenarioVerdict scenario2;  // H(S2|h) = 0, H(S1|h) >= slack  =>  L3bar dominates
};

// `joint` holds the declared split (s1, s2) and the task variable; other
// variables are ignored. The bounds use the fixed split, no minimisation.
ScenarioReport CompareScenarios(const JointDistribution& joint,
                                const std::string& s1, const std::string& s2,
                                const std::string& task, double epsilon,
                                double tolerance = 1e-9);

}  // namespace privsem

#endif  // PRIVSEM_SINGLE_TASK_H_
