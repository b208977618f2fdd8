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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit status
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "cli_harness.h"
#include "privsem/multi_task.h"
#include "privsem/oracle.h"
#include "privsem/representation.h"
#include "privsem/single_task.h"
#include "testing.h"

namespace privsem {
namespace {

using testing::RefEntropy;
using testing::RefEntropyOf;

struct Outcome {
  bool pass = true;
  std::string detail;

  // Records the first failure only.
  void Require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

std::string Fmt(const char* format, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, format, a, b);
  return buf;
}

// Reference information quantities of a two-variable table (A, B).
struct Pair {
  double ha, hb, hab;
  double I() const { return ha + hb - hab; }
  double AGivenB() const { return hab - hb; }
  double BGivenA() const { return hab - ha; }
};

Pair RefPair(const std::vector<double>& p, std::size_t nb) {
  return {RefEntropyOf(p, [nb](std::size_t c) { return c / nb; }),
          RefEntropyOf(p, [nb](std::size_t c) { return c % nb; }), RefEntropy(p)};
}

// (S, h) table of an instance by summing out F.
std::vector<double> PrivateTaskTable(const InstanceSingle& inst) {
  const auto& shape = inst.sfh.shape();
  std::vector<double> sh(shape[0] * shape[2], 0.0);
  for (std::size_t c = 0; c < inst.sfh.num_cells(); ++c) {
    const auto k = inst.sfh.Coordinates(c);
    sh[k[0] * shape[2] + k[2]] += inst.sfh.probabilities()[c];
  }
  return sh;
}

// Random (S, X) joint with a random surjective task map onto 2..|X| symbols.
InstanceSingle RandomInstance(std::uint64_t seed) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    const std::uint64_t s = DeriveSeed(seed, attempt);
    Rng rng(s);
    const std::size_t ns = 2 + rng.Below(3), nx = 2 + rng.Below(3);
    const std::size_t nh = 2 + rng.Below(nx - 1);
    auto sx = RandomRationalJoint(std::vector<std::size_t>{ns, nx}, s)
                  .RenameVariable("V0", "S")
                  .RenameVariable("V1", "X");
    std::vector<std::size_t> table(nx);
    for (std::size_t x = 0; x < nx; ++x) table[x] = x < nh ? x : rng.Below(nh);
    for (std::size_t x = nx; x > 1; --x) std::swap(table[x - 1], table[rng.Below(x)]);
    const Alphabet& x = sx.variable(1);
    InstanceSingle inst = MakeInstance(sx, "S", DeterministicMap::Identity(x, "f"),
                                       DeterministicMap({x}, Alphabet::Indexed("h", nh), table),
                                       0.0);
    if (RefPair(PrivateTaskTable(inst), nh).I() >= 1e-3) return inst;
  }
}

InstanceSingle WithBudget(const InstanceSingle& inst, double epsilon) {
  InstanceSingle out = inst;
  out.epsilon = epsilon;
  return out;
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Outcome KeyIdentity() {
  Outcome o;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    std::vector<std::size_t> shape{2 + rng.Below(3), 2 + rng.Below(3), 2 + rng.Below(3)};
    auto j = RandomJoint(shape, seed, {.zero_fraction = seed % 2 ? 0.2 : 0.0});
    const double r = KeyIdentityResidual(j, {"V0"}, {"V1"}, {"V2"});
    o.Require(std::abs(r) <= 1e-9, Fmt("seed %.0f residual %.3g", double(seed), r));
  }
  return o;
}

std::vector<JointDistribution> FrlInstances() {
  std::vector<JointDistribution> out;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const std::size_t nx = 2 + rng.Below(4), ny = 2 + rng.Below(4);
    out.push_back(RandomRationalJoint(std::vector<std::size_t>{nx, ny}, seed, 16, 0.15)
                      .RenameVariable("V0", "X")
                      .RenameVariable("V1", "Y"));
  }
  return out;
}

Outcome FrlExactness(const std::vector<JointDistribution>& instances) {
  Outcome o;
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const auto& j = instances[k];
    FrlResult r = FrlConstruct(j, {.require_exact = true});
    const std::size_t cap = j.shape()[0] * (j.shape()[1] - 1) + 1;
    o.Require(testing::ExactlyIndependent(r), Fmt("instance %.0f: X and U dependent", k));
    o.Require(testing::ExactlyDeterministic(r), Fmt("instance %.0f: Y not a function", k));
    o.Require(r.u_alphabet.size() <= cap && r.unreduced_atoms <= cap,
              Fmt("instance %.0f: |U| = %.0f over the cap", k, double(r.u_alphabet.size())));
  }
  return o;
}

Outcome SfrlFlag(const std::vector<JointDistribution>& instances) {
  Outcome o;
  int met = 0;
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const auto& j = instances[k];
    FrlResult r = SfrlConstruct(j, {.seed = k, .require_exact = true});
    // I(X;U|Y) from the (X, Y, U) table.
    const auto& p = r.joint.probabilities();
    const std::size_t ny = j.shape()[1], nu = r.joint.shape()[2];
    const double h_xyu = RefEntropy(p);
    const double h_y = RefEntropyOf(p, [&](std::size_t c) { return (c / nu) % ny; });
    const double h_xy = RefEntropyOf(p, [&](std::size_t c) { return c / nu; });
    const double h_yu = RefEntropyOf(p, [&](std::size_t c) { return c % (ny * nu); });
    const double leak = h_xy + h_yu - h_xyu - h_y;
    const double slack = std::log2(RefPair(j.probabilities(), ny).I() + 1) + 4;
    const bool ok = leak <= slack && r.meets_sfrl_bound;
    met += ok;
    o.Require(ok, Fmt("instance %.0f: I(X;U|Y) = %.6f", k, leak));
  }
  if (o.pass) o.detail = std::to_string(met) + "/" + std::to_string(instances.size());
  return o;
}

struct Grid {
  InstanceSingle instance;
  BoundsReportSingle bounds;
};

std::vector<Grid> EfrlGrid() {
  std::vector<Grid> out;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    InstanceSingle base = RandomInstance(1000 + seed);
    const double i = MutualInformation(base.sfh, {"S"}, {"H"});
    for (int k = 1; k <= 9; ++k) {
      InstanceSingle inst = WithBudget(base, 0.1 * k * i);
      out.push_back({inst, SingleTaskBounds(inst)});
    }
  }
  return out;
}

Outcome EfrlAchievability(const std::vector<Grid>& grid) {
  Outcome o;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto& g = grid[k];
    Evaluation e = EvaluateMechanism(g.instance, BuildMechanism(g.instance, MechanismMethod::kEfrl));
    o.Require(std::abs(e.leakage - g.instance.epsilon) <= 1e-9,
              Fmt("case %.0f: leakage off by %.3g", k, e.leakage - g.instance.epsilon));
    o.Require(e.utility >= g.bounds.l1 - 1e-9,
              Fmt("case %.0f: utility below l1 by %.3g", k, g.bounds.l1 - e.utility));
  }
  o.detail = o.pass ? std::to_string(grid.size()) + " cases" : o.detail;
  return o;
}

Outcome Sandwich(const std::vector<Grid>& grid) {
  Outcome o;
  const unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  double worst_gap = -1e300;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto& g = grid[k];
    double best = 0.0;
    for (const auto& c : ConstructAll(g.instance, {.seed = k})) {
      best = std::max(best, c.evaluation.utility);
    }
    o.Require(g.bounds.effective_lower <= best + 1e-9,
              Fmt("case %.0f: constructions below the lower bound by %.3g", k,
                  g.bounds.effective_lower - best));
    o.Require(best <= g.bounds.upper + 1e-9, Fmt("case %.0f: construction above upper", k));
    SearchResult s = RandomSearch(
        g.instance, {.iterations = 10000, .restarts = 5, .seed = k, .threads = threads});
    o.Require(s.evaluation.leakage <= g.instance.epsilon + 1e-6,
              Fmt("case %.0f: search infeasible", k));
    o.Require(s.evaluation.utility <= g.bounds.upper + 1e-6,
              Fmt("case %.0f: search exceeds upper by %.3g", k,
                  s.evaluation.utility - g.bounds.upper));
    worst_gap = std::max(worst_gap, s.evaluation.utility - g.bounds.upper);
  }
  if (o.pass) o.detail = Fmt("max search - upper = %.3g", worst_gap);
  return o;
}

Outcome Tightness() {
  Outcome o;
  std::vector<InstanceSingle> family{testing::SumOfBitsInstance(0.0)};
  // Sum of two bits: H(h|S) by enumeration of the four equally likely pairs.
  const std::vector<double> pairs(4, 0.25);
  const double ref = RefEntropy(pairs) -
                     RefEntropyOf(pairs, [](std::size_t i) { return (i >> 1) + (i & 1); });
  o.Require(std::abs(SingleTaskBounds(WithBudget(family[0], 0.1)).h_task_given_private - ref) <=
                1e-12,
            "H(h|S) differs from enumeration");
  // S = g(X) with h = X.
  for (std::uint64_t seed = 0; family.size() < 11; ++seed) {
    Rng rng(seed);
    const std::size_t nx = 3 + rng.Below(3), ns = 2 + rng.Below(2);
    std::vector<std::size_t> g(nx);
    for (std::size_t x = 0; x < nx; ++x) g[x] = x < ns ? x : rng.Below(ns);
    auto px = RandomRationalJoint(std::vector<std::size_t>{nx}, seed);
    std::vector<Rational> m(ns * nx, Rational(0));
    for (std::size_t x = 0; x < nx; ++x) m[g[x] * nx + x] = px.exact()[x];
    auto sx = JointDistribution::FromRationals(
        {Alphabet::Indexed("S", ns), Alphabet::Indexed("X", nx)}, m);
    if (RefPair(sx.probabilities(), nx).ha > 0.55) {
      family.push_back(testing::IdentityTaskInstance(sx, 0.0));
    }
  }
  int cases = 0;
  for (const auto& base : family) {
    const auto sh = PrivateTaskTable(base);
    const double h_task_given_s = RefPair(sh, base.sfh.shape()[2]).BGivenA();
    for (double eps : {0.1, 0.3, 0.5}) {
      InstanceSingle inst = WithBudget(base, eps);
      const double u =
          EvaluateMechanism(inst, BuildMechanism(inst, MechanismMethod::kEfrl)).utility;
      o.Require(std::abs(u - (h_task_given_s + eps)) <= 1e-9,
                Fmt("utility %.12f vs %.12f", u, h_task_given_s + eps));
      o.Require(SingleTaskBounds(inst).tight_l1, "tightness flag not set");
      ++cases;
    }
  }
  if (o.pass) o.detail = std::to_string(cases) + " cases";
  return o;
}

Outcome Separations() {
  Outcome o;
  using S = SeparationShape;
  o.Require(EnumerateSeparations(6) == std::vector<S>{{2, 3, false}, {3, 2, false}},
            "size 6");
  o.Require(EnumerateSeparations(5) == std::vector<S>{{2, 3, true}, {3, 2, true}}, "size 5");
  auto five = RandomRationalJoint(std::vector<std::size_t>{5}, 3).RenameVariable("V0", "S");
  for (const auto& rep : AllSeparations(five.variable(0))) {
    auto j = ApplySeparation(five, rep);
    o.Require(std::count(j.exact().begin(), j.exact().end(), Rational(0)) == 1,
              "padded split must have exactly one zero cell");
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 3 + seed % 10;
    auto s = RandomJoint(std::vector<std::size_t>{n}, seed).RenameVariable("V0", "S");
    const double h = RefEntropy(s.probabilities());
    for (const auto& rep : AllSeparations(s.variable(0))) {
      const double h12 = RefEntropy(ApplySeparation(s, rep).probabilities());
      o.Require(std::abs(h12 - h) <= 1e-12, Fmt("pmf %.0f: entropy changed by %.3g",
                                                double(seed), h12 - h));
    }
  }
  return o;
}

// Reference L1, L2, L3bar, L4bar from a (S1, S2, T) table.
struct ScenarioRef {
  double l1, l2, l3, l4;
};

ScenarioRef RefScenario(const JointDistribution& j, double eps) {
  const auto& p = j.probabilities();
  const std::size_t n1 = j.shape()[0], n2 = j.shape()[1], nt = j.shape()[2];
  const Pair st = RefPair(p, nt);  // (S1 S2) vs T
  const double h_s2 = RefEntropyOf(p, [&](std::size_t c) { return (c / nt) % n2; });
  const double h_s2t = RefEntropyOf(p, [&](std::size_t c) { return c % (n2 * nt); });
  (void)n1;
  const double c = std::log2(st.I() + 1) + 4;
  const double a = eps / st.ha, a2 = eps / h_s2;
  const double h_t_s = st.BGivenA(), h_s_t = st.AGivenB();
  return {h_t_s - h_s_t + eps, h_t_s - a * h_s_t + eps - (1 - a) * c,
          h_t_s + eps - c - a2 * (h_s2t - st.hb),
          h_t_s + eps - (1 - a2) * c - a2 * h_s_t};
}

Outcome Scenarios() {
  Outcome o;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto j = RandomRationalJoint(std::vector<std::size_t>{2, 2, 4}, 40 + seed)
                 .RenameVariable("V0", "S1")
                 .RenameVariable("V1", "S2")
                 .RenameVariable("V2", "T");
    const double eps = 0.3 * std::min(MutualInformation(j, {"S1", "S2"}, {"T"}).value,
                                      Entropy(j, {"S2"}).value);
    ScenarioReport r = CompareScenarios(j, "S1", "S2", "T", eps);
    const ScenarioRef ref = RefScenario(j, eps);
    o.Require(r.scenario1.premise, Fmt("scenario 1 instance %.0f: premise", double(seed)));
    o.Require(ref.l4 >= ref.l2 - 1e-9,
              Fmt("scenario 1 instance %.0f: L4bar - L2 = %.3g", double(seed), ref.l4 - ref.l2));
    o.Require(r.scenario1.ordering_holds.value_or(false) &&
                  std::abs(r.scenario1.margin - (ref.l4 - ref.l2)) <= 1e-9,
              Fmt("scenario 1 instance %.0f: verdict disagrees", double(seed)));
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    // S1 uniform on 32 symbols independent of T; S2 a binary function of T.
    Rng rng(seed);
    const std::size_t nt = 2 + rng.Below(3);
    auto pt = RandomRationalJoint(std::vector<std::size_t>{nt}, 70 + seed);
    std::vector<std::size_t> g(nt);
    for (std::size_t t = 0; t < nt; ++t) g[t] = t < 2 ? t : rng.Below(2);
    std::vector<Rational> m(32 * 2 * nt, Rational(0));
    for (std::size_t s1 = 0; s1 < 32; ++s1) {
      for (std::size_t t = 0; t < nt; ++t) m[(s1 * 2 + g[t]) * nt + t] = pt.exact()[t] / 32;
    }
    auto j = JointDistribution::FromRationals(
        {Alphabet::Indexed("S1", 32), Alphabet::Indexed("S2", 2), Alphabet::Indexed("T", nt)},
        m);
    const double eps = 0.3 * Entropy(j, {"S2"});
    ScenarioReport r = CompareScenarios(j, "S1", "S2", "T", eps);
    const ScenarioRef ref = RefScenario(j, eps);
    const double margin = ref.l3 - std::max({ref.l2, ref.l4, ref.l1});
    o.Require(r.scenario2.premise, Fmt("scenario 2 instance %.0f: premise", double(seed)));
    o.Require(margin >= -1e-9, Fmt("scenario 2 instance %.0f: margin %.3g", double(seed), margin));
    o.Require(r.scenario2.ordering_holds.value_or(false) &&
                  std::abs(r.scenario2.margin - margin) <= 1e-9,
              Fmt("scenario 2 instance %.0f: verdict disagrees", double(seed)));
  }
  return o;
}

std::vector<InstanceMulti> MultiInstances() {
  std::vector<InstanceMulti> out;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const std::size_t n = 1 + rng.Below(3), l = 1 + rng.Below(3);
    std::vector<JointDistribution> comps;
    double min_i = 1e300;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string k = std::to_string(i + 1);
      comps.push_back(RandomRationalJoint(std::vector<std::size_t>{2 + rng.Below(3),
                                                                   2 + rng.Below(3)},
                                          DeriveSeed(seed, i))
                          .RenameVariable("V0", "S" + k)
                          .RenameVariable("V1", "X" + k));
      min_i = std::min(min_i, MutualInformation(comps.back(), {"S" + k}, {"X" + k}).value);
    }
    std::vector<std::vector<std::size_t>> tasks;
    std::vector<double> weights;
    for (std::size_t j = 0; j < l; ++j) {
      const std::size_t mask = 1 + rng.Below((std::size_t{1} << n) - 1);
      std::vector<std::size_t> t;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask >> i & 1) t.push_back(i);
      }
      tasks.push_back(t);
      weights.push_back(0.1 + rng.Uniform());
    }
    out.push_back(MakeMultiInstance(comps, tasks, weights, 0.5 * min_i));
  }
  return out;
}

Outcome MultiSandwich(const std::vector<InstanceMulti>& instances) {
  Outcome o;
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const auto& inst = instances[k];
    BoundsReportMulti b = MultiBounds(inst);
    for (const auto& l : b.lowers) {
      if (l) {
        o.Require(l->value <= b.upper + 1e-9,
                  Fmt("instance %.0f: %s above upper", k) + std::string(RuleName(l->rule)));
      }
    }
    MultiMechanism m = ComposeMechanism(inst, b.lowers[0]->allocation, MechanismMethod::kEfrl,
                                        {.mechanism = {.seed = k}, .zero_budget = {}});
    MultiEvaluation e = EvaluateMulti(inst, m);
    o.Require(e.leakage <= inst.epsilon + 1e-9, Fmt("instance %.0f: leakage %.12f", k, e.leakage));
    o.Require(e.objective >= b.lowers[0]->value - 1e-9,
              Fmt("instance %.0f: objective below l1 by %.3g", k, b.lowers[0]->value - e.objective));
    o.Require(e.additivity_residual <= 1e-9, Fmt("instance %.0f: additivity %.3g", k,
                                                 e.additivity_residual));
    o.Require(e.cross_independent && e.cross_check_exact,
              Fmt("instance %.0f: cross-component dependence", k));
  }
  return o;
}

Outcome Allocation(const std::vector<InstanceMulti>& instances) {
  Outcome o;
  std::size_t points = 0;
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const auto& inst = instances[k];
    const std::size_t n = inst.components.size();
    std::vector<double> mu(n, 0.0), base(n);
    for (std::size_t j = 0; j < inst.tasks.size(); ++j) {
      for (std::size_t i : inst.tasks[j]) mu[i] += inst.weights[j];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Pair q = RefPair(inst.components[i].probabilities(), inst.components[i].shape()[1]);
      base[i] = q.BGivenA() - q.AGivenB();
    }
    const double chosen = MultiBounds(inst).lowers[0]->value;
    const double step = inst.epsilon / 10;
    std::vector<int> units(n, 0);
    std::function<void(std::size_t, int)> walk = [&](std::size_t i, int left) {
      if (i == n) {
        double v = 0.0;
        for (std::size_t c = 0; c < n; ++c) v += mu[c] * (base[c] + units[c] * step);
        ++points;
        o.Require(v <= chosen + 1e-9, Fmt("instance %.0f: grid beats the corner by %.3g",
                                          double(k), v - chosen));
        return;
      }
      for (int u = 0; u <= left; ++u) {
        units[i] = u;
        walk(i + 1, left - u);
      }
    };
    walk(0, 10);
  }
  if (o.pass) o.detail = std::to_string(points) + " grid allocations";
  return o;
}

Outcome OutOfRange() {
  Outcome o;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    InstanceSingle base = RandomInstance(5000 + seed);
    const auto sh = PrivateTaskTable(base);
    const Pair ref = RefPair(sh, base.sfh.shape()[2]);
    for (double extra : {0.0, 0.5}) {
      InstanceSingle inst = WithBudget(base, MutualInformation(base.sfh, {"S"}, {"H"}) + extra);
      Evaluation e =
          EvaluateMechanism(inst, BuildMechanism(inst, MechanismMethod::kPassthrough));
      o.Require(std::abs(e.utility - ref.hb) <= 1e-12,
                Fmt("passthrough utility off by %.3g", e.utility - ref.hb));
      o.Require(std::abs(e.leakage - ref.I()) <= 1e-12,
                Fmt("passthrough leakage off by %.3g", e.leakage - ref.I()));
    }
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto sx = RandomRationalJoint(std::vector<std::size_t>{2 + seed % 4, 2 + seed % 3}, 6000 + seed)
                  .RenameVariable("V0", "S")
                  .RenameVariable("V1", "X");
    const double eps = 0.4 * MutualInformation(sx, {"S"}, {"X"});
    InstanceMulti multi = MakeMultiInstance({sx}, {{0}}, {1.0}, eps);
    BoundsReportMulti m = MultiBounds(multi);
    BoundsReportSingle s = SingleTaskBounds(testing::IdentityTaskInstance(sx, eps));
    const double delta = ComputeTaskCoefficients(multi).delta[0];
    const std::optional<double> single[] = {s.l1, s.l2, s.l3, s.l4};
    for (int r = 0; r < 4; ++r) {
      o.Require(m.lowers[r].has_value() == single[r].has_value(), "availability differs");
      if (m.lowers[r] && single[r]) {
        o.Require(std::abs(m.lowers[r]->value - *single[r]) <= 1e-9,
                  Fmt("lower bound %.0f differs by %.3g", r + 1, m.lowers[r]->value - *single[r]));
      }
    }
    o.Require(std::abs(m.upper - (s.upper + delta)) <= 1e-9, "upper bound differs");
  }
  return o;
}

Outcome Determinism() {
  Outcome o;
  for (const auto& c : testing::GoldenCases()) {
    const auto a = testing::Invoke(c.args);
    const auto b = testing::Invoke(c.args);
    o.Require(a.code == kExitOk, std::string(c.golden) + ": exit " + std::to_string(a.code));
    o.Require(a.out == b.out, std::string(c.golden) + ": repeated runs differ");
    const auto path = std::filesystem::path(testing::kGolden) / c.golden;
    o.Require(a.out == testing::ReadFile(path), std::string(c.golden) + ": golden differs");
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  // 0 means no limit
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace privsem

int main() {
  using namespace privsem;
  const auto frl = FrlInstances();
  std::vector<Grid> grid;
  std::vector<InstanceMulti> multi;
  const std::vector<Criterion> criteria{
      {1, "key identity", 1.0, KeyIdentity},
      {2, "FRL exactness", 5.0, [&] { return FrlExactness(frl); }},
      {3, "SFRL bound flag", 30.0, [&] { return SfrlFlag(frl); }},
      {4, "EFRL achievability",
       0.0,
       [&] {
         grid = EfrlGrid();
         return EfrlAchievability(grid);
       }},
      {5, "single-task sandwich", 0.0, [&] { return Sandwich(grid); }},
      {6, "tightness", 0.0, Tightness},
      {7, "separations", 0.0, Separations},
      {8, "scenario orderings", 0.0, Scenarios},
      {9, "multi-task sandwich",
       0.0,
       [&] {
         multi = MultiInstances();
         return MultiSandwich(multi);
       }},
      {10, "allocation optimality", 0.0, [&] { return Allocation(multi); }},
      {11, "out-of-range budget", 0.0, OutOfRange},
      {12, "determinism", 0.0, Determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double t = Seconds(start);
    if (c.limit_seconds > 0 && t >= c.limit_seconds && o.pass) {
      o.pass = false;
      o.detail = Fmt("took %.2f s, limit %.0f s", t, c.limit_seconds);
    }
    failed += !o.pass;
    std::printf("criterion %2d %-24s %s (%.2f s)%s%s\n", c.id, c.name, o.pass ? "PASS" : "FAIL",
                t, o.detail.empty() ? "" : "  ", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
