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

// Multi-task private semantic communication over a product source
// P(S, X) = prod_i P(S_i, X_i). Task j observes the components listed in
// tasks[j]; the objective is sum_j lambda_j I(U; h_j(X)).

#ifndef PRIVSEM_MULTI_TASK_H_
#define PRIVSEM_MULTI_TASK_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "privsem/prob_core.h"
#include "privsem/representation.h"
#include "privsem/single_task.h"

namespace privsem {

struct InstanceMulti {
  // Each component is a joint over exactly (S_i, X_i).
  std::vector<JointDistribution> components;
  // 0-based component indices per task.
  std::vector<std::vector<std::size_t>> tasks;
  std::vector<double> weights;
  double epsilon = 0.0;
};

InstanceMulti MakeMultiInstance(std::vector<JointDistribution> components,
                                std::vector<std::vector<std::size_t>> tasks,
                                std::vector<double> weights, double epsilon);

// Per-component information quantities.
struct ComponentQuantities {
  double h_s = 0.0;
  double h_x = 0.0;
  double h_x_given_s = 0.0;
  double h_s_given_x = 0.0;
  double i_sx = 0.0;
  double slack = 0.0;  // log2(I(S_i;X_i)+1)+4
  std::vector<SeparationTerm> separations;
};

struct TaskCoefficients {
  std::vector<ComponentQuantities> quantities;
  std::vector<double> mu;
  std::vector<double> gamma1;
  // Absent when no split of S_i has H(S_i2) >= epsilon.
  std::vector<std::optional<double>> gamma3;
  std::vector<std::optional<double>> gamma4;
  std::vector<std::optional<SeparationShape>> gamma3_separation;
  std::vector<std::optional<SeparationShape>> gamma4_separation;
  std::vector<double> delta1;
  std::vector<double> delta2;
  std::vector<double> delta;
};

TaskCoefficients ComputeTaskCoefficients(const InstanceMulti& instance);

double MultiUpperBound(const InstanceMulti& instance,
                       const TaskCoefficients& coeffs);

enum class AllocationRule { kL1, kL2, kL3, kL4 };

std::string_view RuleName(AllocationRule rule);
std::optional<AllocationRule> ParseRule(std::string_view name);

// Whole budget on the component with the largest rule coefficient, ties to
// the lowest index. Components without a rule coefficient never win.
std::vector<double> AllocateEpsilon(const TaskCoefficients& coeffs,
                                    double epsilon, AllocationRule rule);

struct LowerBoundMulti {
  AllocationRule rule = AllocationRule::kL1;
  double value = 0.0;
  std::vector<double> allocation;
  std::vector<double> beta;  // value = sum_i mu_i beta_i
};

struct BoundsReportMulti {
  double epsilon = 0.0;
  double upper = 0.0;
  // Indexed by rule; l3/l4 absent when no component has a valid split.
  std::vector<std::optional<LowerBoundMulti>> lowers;
  double effective_lower = 0.0;
};

std::vector<std::optional<LowerBoundMulti>> MultiLowerBounds(
    const InstanceMulti& instance, const TaskCoefficients& coeffs);

BoundsReportMulti MultiBounds(const InstanceMulti& instance);

enum class ZeroBudgetPolicy {
  kFrl,       // FRL at epsilon_i = 0: perfectly private, keeps H(X|S)-H(S|X)
  kConstant,  // U_i constant
};

struct ComponentMechanism {
  // (S_i, X_i, U_i); U_i is named "U<i+1>".
  JointDistribution joint;
  std::vector<double> u_labels;
  MechanismMethod method = MechanismMethod::kEfrl;
  double epsilon = 0.0;
  bool constant = false;
};

struct MultiMechanism {
  std::vector<ComponentMechanism> components;
};

struct ComposeOptions {
  MechanismOptions mechanism;
  ZeroBudgetPolicy zero_budget = ZeroBudgetPolicy::kFrl;
};

// method: kEfrl, kEsfrl or kPassthrough (U_i = X_i, allocation ignored).
MultiMechanism ComposeMechanism(const InstanceMulti& instance,
                                const std::vector<double>& allocation,
                                MechanismMethod method,
                                ComposeOptions options = {});

struct MultiEvaluation {
  double leakage = 0.0;  // I(S; U)
  std::vector<double> task_utilities;
  double objective = 0.0;
  std::vector<double> component_leakage;  // I(S_i; U_i)
  std::vector<double> component_utility;  // I(U_i; X_i)
  // |sum_j lambda_j I(U;h_j) - sum_i mu_i I(U_i;X_i)|
  double additivity_residual = 0.0;
  // |I(S;U) - sum_i I(S_i;U_i)|
  double leakage_residual = 0.0;
  // True when the task utilities came from the full product joint.
  bool dense = false;
  // P(u_i, x_j) = P(u_i) P(x_j) for every i != j, compared exactly when the
  // components are rational.
  bool cross_independent = false;
  bool cross_check_exact = false;
};

MultiEvaluation EvaluateMulti(const InstanceMulti& instance,
                              const MultiMechanism& mechanism,
                              std::size_t dense_cell_limit = kMaxCells);

}  // namespace privsem

#endif  // PRIVSEM_MULTI_TASK_H_
