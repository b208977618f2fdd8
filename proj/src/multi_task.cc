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

#include "privsem/multi_task.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace privsem {
namespace {

constexpr double kZeroEntropy = 1e-12;

const std::string& SName(const JointDistribution& sx) {
  return sx.variable(0).name();
}
const std::string& XName(const JointDistribution& sx) {
  return sx.variable(1).name();
}

std::string FreshName(const std::set<std::string>& taken, std::string base) {
  while (taken.count(base)) base += "'";
  return base;
}

ComponentQuantities Quantities(const JointDistribution& sx, double epsilon) {
  const VarList s{SName(sx)}, x{XName(sx)};
  ComponentQuantities q;
  q.h_s = Entropy(sx, s);
  q.h_x = Entropy(sx, x);
  q.h_x_given_s = ConditionalEntropy(sx, x, s);
  q.h_s_given_x = ConditionalEntropy(sx, s, x);
  q.i_sx = MutualInformation(sx, s, x);
  q.slack = SfrlSlack(q.i_sx);

  const std::string s2 = "\x1f" "S2";
  for (const auto& rep : AllSeparations(sx.variable(0))) {
    JointDistribution with_s2 = ApplyMap(sx, rep.ComponentMap(2, s2), s2);
    SeparationTerm t;
    t.shape = rep.shape();
    t.h_s2 = Entropy(with_s2, {s2});
    t.h_s2_given_task = ConditionalEntropy(with_s2, {s2}, x);
    t.valid = t.h_s2 > kZeroEntropy && t.h_s2 >= epsilon;
    if (t.valid) {
      t.alpha2 = epsilon / t.h_s2;
      t.l3_penalty = t.alpha2 * t.h_s2_given_task;
      t.l4_penalty = t.alpha2 * (q.h_s_given_x - q.slack);
    }
    q.separations.push_back(t);
  }
  return q;
}

// 1 - min over valid splits of ratio(t), with the arg-min shape.
template <class Ratio>
std::pair<std::optional<double>, std::optional<SeparationShape>> SplitGamma(
    const std::vector<SeparationTerm>& terms, Ratio ratio) {
  std::optional<double> best;
  std::optional<SeparationShape> shape;
  for (const auto& t : terms) {
    if (!t.valid) continue;
    const double r = ratio(t);
    if (!best || r < *best - 1e-12) {
      best = r;
      shape = t.shape;
    }
  }
  if (!best) return {std::nullopt, std::nullopt};
  return {1.0 - *best, shape};
}

std::optional<double> RuleCoefficient(const TaskCoefficients& c,
                                      std::size_t i, AllocationRule rule) {
  switch (rule) {
    case AllocationRule::kL1: return c.mu[i];
    case AllocationRule::kL2: return c.mu[i] * c.gamma1[i];
    case AllocationRule::kL3:
      if (!c.gamma3[i]) return std::nullopt;
      return c.mu[i] * *c.gamma3[i];
    case AllocationRule::kL4:
      if (!c.gamma4[i]) return std::nullopt;
      return c.mu[i] * *c.gamma4[i];
  }
  return std::nullopt;
}

void RequireConsistent(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInconsistentMechanism, what);
}

ComponentMechanism ConstantComponent(const JointDistribution& sx,
                                     const std::string& u_name) {
  std::vector<Alphabet> vars = sx.variables();
  vars.emplace_back(u_name, std::vector<std::string>{"u0"});
  ComponentMechanism c{
      .joint = sx.is_exact()
                   ? JointDistribution::FromRationals(vars, sx.exact())
                   : JointDistribution::FromDoubles(vars, sx.probabilities()),
      .u_labels = {0.0},
      .method = MechanismMethod::kPassthrough,
      .epsilon = 0.0,
      .constant = true};
  return c;
}

ComponentMechanism PassthroughComponent(const JointDistribution& sx,
                                        const std::string& u_name) {
  const Alphabet& x = sx.variable(1);
  ComponentMechanism c{
      .joint = ApplyMap(sx, DeterministicMap::Identity(x, u_name), u_name),
      .u_labels = std::vector<double>(x.size()),
      .method = MechanismMethod::kPassthrough};
  std::iota(c.u_labels.begin(), c.u_labels.end(), 0.0);
  return c;
}

ComponentMechanism ConstructedComponent(const JointDistribution& sx,
                                        const std::string& u_name,
                                        double epsilon, MechanismMethod method,
                                        const MechanismOptions& options) {
  const Alphabet& x = sx.variable(1);
  InstanceSingle single = MakeInstance(
      sx, SName(sx), DeterministicMap::Identity(x, "\x1f" "f"),
      DeterministicMap::Identity(x, "\x1f" "h"), epsilon);
  MechanismResult m = BuildMechanism(single, method, options);
  const std::string ts = "\x1f" "s", tx = "\x1f" "x", tu = "\x1f" "u";
  JointDistribution joint = m.extended.Marginal({kPrivateVar, kTaskVar, kDisclosedVar})
                                .RenameVariable(kPrivateVar, ts)
                                .RenameVariable(kTaskVar, tx)
                                .RenameVariable(kDisclosedVar, tu)
                                .RenameVariable(ts, SName(sx))
                                .RenameVariable(tx, XName(sx))
                                .RenameVariable(tu, u_name);
  return ComponentMechanism{.joint = std::move(joint),
                            .u_labels = std::move(m.u_labels),
                            .method = method,
                            .epsilon = epsilon};
}

// P(a, b) == P(a) P(b) on a two-variable table, exactly when rational.
bool Factorises(const JointDistribution& ab) {
  const std::size_t na = ab.shape()[0], nb = ab.shape()[1];
  if (ab.is_exact()) {
    const auto& p = ab.exact();
    std::vector<Rational> pa(na, Rational(0)), pb(nb, Rational(0));
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < nb; ++j) {
        pa[i] += p[i * nb + j];
        pb[j] += p[i * nb + j];
      }
    }
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < nb; ++j) {
        if (p[i * nb + j] != pa[i] * pb[j]) return false;
      }
    }
    return true;
  }
  const auto& p = ab.probabilities();
  std::vector<double> pa(na, 0.0), pb(nb, 0.0);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      pa[i] += p[i * nb + j];
      pb[j] += p[i * nb + j];
    }
  }
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      if (std::abs(p[i * nb + j] - pa[i] * pb[j]) > 1e-15) return false;
    }
  }
  return true;
}

}  // namespace

InstanceMulti MakeMultiInstance(std::vector<JointDistribution> components,
                                std::vector<std::vector<std::size_t>> tasks,
                                std::vector<double> weights, double epsilon) {
  if (components.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no components");
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (components[i].num_variables() != 2) {
      throw Error(ErrorCode::kShapeMismatch,
                  "component " + std::to_string(i + 1) +
                      " must be a joint over (S_i, X_i)");
    }
    for (const auto& a : components[i].variables()) {
      if (!names.insert(a.name()).second) {
        throw Error(ErrorCode::kNameCollision,
                    "variable '" + a.name() + "' appears in two components");
      }
    }
  }
  if (tasks.empty()) throw Error(ErrorCode::kInvalidArgument, "no tasks");
  for (std::size_t j = 0; j < tasks.size(); ++j) {
    const std::string where = "task " + std::to_string(j + 1);
    if (tasks[j].empty()) {
      throw Error(ErrorCode::kInvalidArgument, where + " is empty");
    }
    std::set<std::size_t> seen;
    for (std::size_t i : tasks[j]) {
      if (i >= components.size()) {
        throw Error(ErrorCode::kInvalidArgument,
                    where + " names component " + std::to_string(i + 1) +
                        " of " + std::to_string(components.size()));
      }
      if (!seen.insert(i).second) {
        throw Error(ErrorCode::kInvalidArgument,
                    where + " repeats component " + std::to_string(i + 1));
      }
    }
  }
  if (weights.size() != tasks.size()) {
    throw Error(ErrorCode::kShapeMismatch, "one weight per task");
  }
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "weights must be >= 0");
    }
  }
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    throw Error(ErrorCode::kEpsilonOutOfRange, "epsilon must be >= 0");
  }
  return InstanceMulti{std::move(components), std::move(tasks),
                       std::move(weights), epsilon};
}

TaskCoefficients ComputeTaskCoefficients(const InstanceMulti& instance) {
  const std::size_t n = instance.components.size();
  TaskCoefficients c;
  c.mu.assign(n, 0.0);
  std::vector<double> count(n, 0.0);
  for (std::size_t j = 0; j < instance.tasks.size(); ++j) {
    for (std::size_t i : instance.tasks[j]) {
      c.mu[i] += instance.weights[j];
      count[i] += 1.0;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    ComponentQuantities q = Quantities(instance.components[i], instance.epsilon);
    if (q.h_s <= kZeroEntropy) {
      throw Error(ErrorCode::kDegenerateComponent,
                  "component " + std::to_string(i + 1) + " has H(S) = 0");
    }
    c.gamma1.push_back(1.0 - q.h_s_given_x / q.h_s + q.slack / q.h_s);
    auto [g3, s3] = SplitGamma(q.separations, [](const SeparationTerm& t) {
      return t.h_s2_given_task / t.h_s2;
    });
    const double excess = q.h_s_given_x - q.slack;
    auto [g4, s4] = SplitGamma(q.separations, [excess](const SeparationTerm& t) {
      return excess / t.h_s2;
    });
    c.gamma3.push_back(g3);
    c.gamma3_separation.push_back(s3);
    c.gamma4.push_back(g4);
    c.gamma4_separation.push_back(s4);
    c.delta1.push_back(count[i] * (q.i_sx + q.h_s_given_x));
    c.delta2.push_back(count[i] * (q.i_sx + q.slack));
    c.delta.push_back(std::min(c.delta1.back(), c.delta2.back()));
    c.quantities.push_back(std::move(q));
  }
  return c;
}

double MultiUpperBound(const InstanceMulti& instance,
                       const TaskCoefficients& coeffs) {
  double total = instance.epsilon *
                 *std::max_element(coeffs.mu.begin(), coeffs.mu.end());
  for (std::size_t i = 0; i < coeffs.mu.size(); ++i) {
    total += coeffs.mu[i] *
             (coeffs.quantities[i].h_x_given_s + coeffs.delta[i]);
  }
  return total;
}

std::string_view RuleName(AllocationRule rule) {
  switch (rule) {
    case AllocationRule::kL1: return "l1";
    case AllocationRule::kL2: return "l2";
    case AllocationRule::kL3: return "l3";
    case AllocationRule::kL4: return "l4";
  }
  return "unknown";
}

std::optional<AllocationRule> ParseRule(std::string_view name) {
  if (name == "l1") return AllocationRule::kL1;
  if (name == "l2") return AllocationRule::kL2;
  if (name == "l3") return AllocationRule::kL3;
  if (name == "l4") return AllocationRule::kL4;
  return std::nullopt;
}

std::vector<double> AllocateEpsilon(const TaskCoefficients& coeffs,
                                    double epsilon, AllocationRule rule) {
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    throw Error(ErrorCode::kEpsilonOutOfRange, "epsilon must be >= 0");
  }
  std::vector<double> allocation(coeffs.mu.size(), 0.0);
  if (epsilon == 0.0) return allocation;
  std::optional<std::size_t> best;
  std::optional<double> best_value;
  for (std::size_t i = 0; i < coeffs.mu.size(); ++i) {
    auto v = RuleCoefficient(coeffs, i, rule);
    if (v && (!best || *v > *best_value)) {
      best = i;
      best_value = v;
    }
  }
  if (best) allocation[*best] = epsilon;
  return allocation;
}

std::vector<std::optional<LowerBoundMulti>> MultiLowerBounds(
    const InstanceMulti& instance, const TaskCoefficients& coeffs) {
  std::vector<std::optional<LowerBoundMulti>> out;
  const std::size_t n = coeffs.mu.size();
  for (AllocationRule rule : {AllocationRule::kL1, AllocationRule::kL2,
                              AllocationRule::kL3, AllocationRule::kL4}) {
    bool available = false;
    for (std::size_t i = 0; i < n; ++i) {
      available = available || RuleCoefficient(coeffs, i, rule).has_value();
    }
    if (!available) {
      out.push_back(std::nullopt);
      continue;
    }
    LowerBoundMulti b;
    b.rule = rule;
    b.allocation = AllocateEpsilon(coeffs, instance.epsilon, rule);
    for (std::size_t i = 0; i < n; ++i) {
      const ComponentQuantities& q = coeffs.quantities[i];
      const double e = b.allocation[i];
      double beta = 0.0;
      switch (rule) {
        case AllocationRule::kL1:
          beta = q.h_x_given_s - q.h_s_given_x + e;
          break;
        case AllocationRule::kL2: {
          const double alpha = e / q.h_s;
          beta = q.h_x_given_s - alpha * q.h_s_given_x + e -
                 (1.0 - alpha) * q.slack;
          break;
        }
        case AllocationRule::kL3:
          beta = q.h_x_given_s - q.slack + (e > 0.0 ? *coeffs.gamma3[i] * e : 0.0);
          break;
        case AllocationRule::kL4:
          beta = q.h_x_given_s - q.slack + (e > 0.0 ? *coeffs.gamma4[i] * e : 0.0);
          break;
      }
      b.beta.push_back(beta);
      b.value += coeffs.mu[i] * beta;
    }
    out.push_back(std::move(b));
  }
  return out;
}

BoundsReportMulti MultiBounds(const InstanceMulti& instance) {
  TaskCoefficients coeffs = ComputeTaskCoefficients(instance);
  BoundsReportMulti r;
  r.epsilon = instance.epsilon;
  r.upper = MultiUpperBound(instance, coeffs);
  r.lowers = MultiLowerBounds(instance, coeffs);
  r.effective_lower = 0.0;
  for (const auto& l : r.lowers) {
    if (l) r.effective_lower = std::max(r.effective_lower, l->value);
  }
  return r;
}

MultiMechanism ComposeMechanism(const InstanceMulti& instance,
                                const std::vector<double>& allocation,
                                MechanismMethod method,
                                ComposeOptions options) {
  const std::size_t n = instance.components.size();
  if (method != MechanismMethod::kEfrl && method != MechanismMethod::kEsfrl &&
      method != MechanismMethod::kPassthrough) {
    throw Error(ErrorCode::kInvalidArgument,
                "multi-task composition supports efrl, esfrl and passthrough");
  }
  if (allocation.size() != n) {
    throw Error(ErrorCode::kShapeMismatch, "one budget per component");
  }
  std::set<std::string> taken;
  for (const auto& sx : instance.components) {
    for (const auto& a : sx.variables()) taken.insert(a.name());
  }

  MultiMechanism mech;
  for (std::size_t i = 0; i < n; ++i) {
    const JointDistribution& sx = instance.components[i];
    const std::string u_name = FreshName(taken, "U" + std::to_string(i + 1));
    taken.insert(u_name);
    const double e = allocation[i];
    if (!std::isfinite(e) || e < 0.0) {
      throw Error(ErrorCode::kComponentEpsilonOutOfRange,
                  "component " + std::to_string(i + 1) + " budget must be >= 0");
    }
    if (method == MechanismMethod::kPassthrough) {
      mech.components.push_back(PassthroughComponent(sx, u_name));
      continue;
    }
    const double info = MutualInformation(sx, {SName(sx)}, {XName(sx)});
    if (e == 0.0) {
      if (options.zero_budget == ZeroBudgetPolicy::kConstant) {
        mech.components.push_back(ConstantComponent(sx, u_name));
      } else if (info <= kZeroEntropy) {
        // S_i and X_i are independent, so X_i itself leaks nothing.
        mech.components.push_back(PassthroughComponent(sx, u_name));
      } else {
        MechanismOptions o = options.mechanism;
        o.seed = DeriveSeed(options.mechanism.seed, i);
        mech.components.push_back(
            ConstructedComponent(sx, u_name, 0.0, method, o));
      }
      continue;
    }
    if (!(e < info)) {
      throw Error(ErrorCode::kComponentEpsilonOutOfRange,
                  "component " + std::to_string(i + 1) + " budget " +
                      std::to_string(e) + " >= I(S;X) = " +
                      std::to_string(info));
    }
    MechanismOptions o = options.mechanism;
    o.seed = DeriveSeed(options.mechanism.seed, i);
    mech.components.push_back(ConstructedComponent(sx, u_name, e, method, o));
  }
  return mech;
}

MultiEvaluation EvaluateMulti(const InstanceMulti& instance,
                              const MultiMechanism& mechanism,
                              std::size_t dense_cell_limit) {
  const std::size_t n = instance.components.size();
  RequireConsistent(mechanism.components.size() == n,
                    "mechanism has a different number of components");
  MultiEvaluation e;
  std::vector<double> mu(n, 0.0);
  for (std::size_t j = 0; j < instance.tasks.size(); ++j) {
    for (std::size_t i : instance.tasks[j]) mu[i] += instance.weights[j];
  }

  std::vector<std::string> u_names;
  double cells = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const JointDistribution& sx = instance.components[i];
    const JointDistribution& j = mechanism.components[i].joint;
    bool ok = j.num_variables() == 3 && j.variable(0) == sx.variable(0) &&
              j.variable(1) == sx.variable(1) &&
              mechanism.components[i].u_labels.size() == j.shape()[2];
    ok = ok && SameDistribution(j.Marginal({SName(sx), XName(sx)}), sx, 1e-12);
    RequireConsistent(ok, "component " + std::to_string(i + 1) +
                              " does not extend the instance's (S_i, X_i)");
    u_names.push_back(j.variable(2).name());
    e.component_leakage.push_back(
        MutualInformation(j, {SName(sx)}, {u_names[i]}));
    e.component_utility.push_back(
        MutualInformation(j, {u_names[i]}, {XName(sx)}));
    cells *= static_cast<double>(j.num_cells());
  }

  const double leak_sum = std::accumulate(e.component_leakage.begin(),
                                          e.component_leakage.end(), 0.0);
  if (cells <= static_cast<double>(dense_cell_limit)) {
    std::vector<JointDistribution> parts;
    for (const auto& c : mechanism.components) parts.push_back(c.joint.ToDouble());
    JointDistribution full = ProductCompose(parts);
    VarList all_s;
    for (const auto& sx : instance.components) all_s.push_back(SName(sx));
    e.leakage = MutualInformation(full, u_names, all_s);
    for (const auto& task : instance.tasks) {
      VarList xs;
      for (std::size_t i : task) xs.push_back(XName(instance.components[i]));
      e.task_utilities.push_back(MutualInformation(full, u_names, xs));
    }
    e.dense = true;
  } else {
    e.leakage = leak_sum;
    for (const auto& task : instance.tasks) {
      double u = 0.0;
      for (std::size_t i : task) u += e.component_utility[i];
      e.task_utilities.push_back(u);
    }
  }
  e.leakage_residual = std::abs(e.leakage - leak_sum);
  double weighted = 0.0;
  for (std::size_t i = 0; i < n; ++i) weighted += mu[i] * e.component_utility[i];
  for (std::size_t j = 0; j < instance.tasks.size(); ++j) {
    e.objective += instance.weights[j] * e.task_utilities[j];
  }
  e.additivity_residual = std::abs(e.objective - weighted);

  // Cross-component independence on the pairwise product of (X_i, U_i)
  // blocks.
  e.cross_independent = true;
  e.cross_check_exact = true;
  std::vector<JointDistribution> blocks;
  for (std::size_t i = 0; i < n; ++i) {
    blocks.push_back(mechanism.components[i].joint.Marginal(
        {XName(instance.components[i]), u_names[i]}));
    e.cross_check_exact = e.cross_check_exact && blocks.back().is_exact();
  }
  for (std::size_t i = 0; i < n && e.cross_independent; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<JointDistribution> pair{blocks[i], blocks[j]};
      if (!e.cross_check_exact) {
        pair = {blocks[i].ToDouble(), blocks[j].ToDouble()};
      }
      JointDistribution uv = ProductCompose(pair).Marginal(
          {u_names[i], XName(instance.components[j])});
      if (!Factorises(uv)) {
        e.cross_independent = false;
        break;
      }
    }
  }
  return e;
}

}  // namespace privsem
