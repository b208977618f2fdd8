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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace privsem {
namespace {

constexpr double kFeasibleSlack = 1e-12;

double XLogX(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

// Positive-mass cells of (S, F, H) and the constant marginal entropies.
struct Problem {
  std::size_t ns = 0, nh = 0, nu = 0;
  std::vector<std::size_t> row_s, row_h, row_cell;
  std::vector<double> row_p;
  std::vector<double> p_s;
  double h_s = 0.0, h_h = 0.0;
  double epsilon = 0.0;
};

Problem MakeProblem(const InstanceSingle& instance, std::size_t nu) {
  const JointDistribution& sfh = instance.sfh;
  Problem p;
  p.ns = sfh.shape()[0];
  p.nh = sfh.shape()[2];
  p.nu = nu;
  p.epsilon = instance.epsilon;
  const std::size_t nf = sfh.shape()[1];
  const auto& mass = sfh.probabilities();
  p.p_s.assign(p.ns, 0.0);
  std::vector<double> p_h(p.nh, 0.0);
  for (std::size_t cell = 0; cell < mass.size(); ++cell) {
    if (mass[cell] <= 0.0) continue;
    const std::size_t s = cell / (nf * p.nh), h = cell % p.nh;
    p.row_s.push_back(s);
    p.row_h.push_back(h);
    p.row_cell.push_back(cell);
    p.row_p.push_back(mass[cell]);
    p.p_s[s] += mass[cell];
    p_h[h] += mass[cell];
  }
  for (double v : p.p_s) p.h_s -= XLogX(v);
  for (double v : p_h) p.h_h -= XLogX(v);
  return p;
}

// Joint tables P(s,u), P(h,u), P(u) of a channel, with per-column
// sum p log p so that a move touching two columns costs O(|S| + |H|).
class Tables {
 public:
  Tables(const Problem& p, const std::vector<std::vector<double>>& q)
      : p_(p),
        su_(p.ns * p.nu, 0.0),
        hu_(p.nh * p.nu, 0.0),
        pu_(p.nu, 0.0),
        col_(p.nu, {0.0, 0.0, 0.0}) {
    for (std::size_t r = 0; r < q.size(); ++r) {
      for (std::size_t u = 0; u < p.nu; ++u) Add(r, u, p.row_p[r] * q[r][u]);
    }
    for (std::size_t u = 0; u < p.nu; ++u) Refresh(u);
  }

  void Add(std::size_t row, std::size_t u, double m) {
    su_[p_.row_s[row] * p_.nu + u] += m;
    hu_[p_.row_h[row] * p_.nu + u] += m;
    pu_[u] += m;
  }

  void Refresh(std::size_t u) {
    Column c{XLogX(pu_[u]), 0.0, 0.0};
    for (std::size_t s = 0; s < p_.ns; ++s) c.su += XLogX(su_[s * p_.nu + u]);
    for (std::size_t h = 0; h < p_.nh; ++h) c.hu += XLogX(hu_[h * p_.nu + u]);
    col_[u] = c;
  }

  // (I(U;S), I(U;H)).
  std::pair<double, double> Measure() const {
    double a = 0.0, b = 0.0, c = 0.0;
    for (const auto& col : col_) {
      a += col.u;
      b += col.su;
      c += col.hu;
    }
    return {p_.h_s - a + b, p_.h_h - a + c};
  }

  // Leakage after mixing the channel with weight w toward [U = u0].
  double MixedLeakage(double w, std::size_t u0) const {
    double a = 0.0, b = 0.0;
    for (std::size_t u = 0; u < p_.nu; ++u) {
      const double extra = u == u0 ? w : 0.0;
      a += XLogX((1.0 - w) * pu_[u] + extra);
      for (std::size_t s = 0; s < p_.ns; ++s) {
        b += XLogX((1.0 - w) * su_[s * p_.nu + u] + extra * p_.p_s[s]);
      }
    }
    return p_.h_s - a + b;
  }

 private:
  struct Column {
    double u, su, hu;
  };
  const Problem& p_;
  std::vector<double> su_, hu_, pu_;
  std::vector<Column> col_;
};

double Bisect(const Tables& t, std::size_t u0, double epsilon) {
  if (t.MixedLeakage(0.0, u0) <= epsilon) return 0.0;
  // Leakage is convex along the segment and 0 at w = 1, so the feasible
  // weights form an interval [w*, 1].
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (t.MixedLeakage(mid, u0) <= epsilon ? hi : lo) = mid;
  }
  return hi;
}

struct RestartOutcome {
  std::vector<std::vector<double>> channel;
  double utility = 0.0;
};

RestartOutcome RunRestart(const Problem& p, const SearchConfig& cfg,
                          std::size_t restart) {
  Rng rng(DeriveSeed(cfg.seed, restart));
  const std::size_t rows = p.row_p.size(), nu = p.nu, u0 = nu - 1;
  std::vector<std::vector<double>> q(rows, std::vector<double>(nu, 0.0));
  for (std::size_t r = 0; r < rows; ++r) {
    if (nu == 1) {
      q[r][0] = 1.0;
    } else if (restart == 0) {
      q[r][p.row_h[r] % (nu - 1)] = 1.0;
    } else {
      double total = 0.0;
      for (auto& v : q[r]) total += v = -std::log1p(-rng.Uniform());
      for (auto& v : q[r]) v /= total;
    }
  }
  {
    Tables t(p, q);
    const double w = Bisect(t, u0, p.epsilon);
    for (auto& row : q) {
      for (auto& v : row) v *= 1.0 - w;
      row[u0] += w;
    }
  }
  Tables t(p, q);
  auto [leak, util] = t.Measure();
  if (nu < 2 || rows == 0) return {std::move(q), util};

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    const std::size_t r = rng.Below(rows);
    const std::size_t a = rng.Below(nu);
    std::size_t b = rng.Below(nu - 1);
    if (b >= a) ++b;
    double d = cfg.step * rng.Uniform() * q[r][a];
    if (d <= 0.0) continue;
    const double pr = p.row_p[r];
    auto apply = [&](double amount) {
      q[r][a] -= amount;
      q[r][b] += amount;
      t.Add(r, a, -pr * amount);
      t.Add(r, b, pr * amount);
      t.Refresh(a);
      t.Refresh(b);
    };
    bool accepted = false;
    for (int shrink = 0; shrink < 4 && !accepted; ++shrink, d *= 0.5) {
      apply(d);
      auto [nl, nv] = t.Measure();
      const bool feasible = nl <= p.epsilon + kFeasibleSlack;
      if (feasible && (nv > util + 1e-13 || (nv >= util && nl < leak - 1e-13))) {
        leak = nl;
        util = nv;
        accepted = true;
      } else {
        apply(-d);
        if (feasible) break;  // a smaller step will not help utility
      }
    }
  }
  // Clean up rounding drift before reporting.
  for (auto& row : q) {
    for (auto& v : row) v = std::max(v, 0.0);
    const double total = std::accumulate(row.begin(), row.end(), 0.0);
    for (auto& v : row) v /= total;
  }
  Tables clean(p, q);
  auto [final_leak, final_util] = clean.Measure();
  if (final_leak > p.epsilon + kFeasibleSlack) {
    const double w = Bisect(clean, u0, p.epsilon);
    for (auto& row : q) {
      for (auto& v : row) v *= 1.0 - w;
      row[u0] += w;
    }
    final_util = Tables(p, q).Measure().second;
  }
  return {std::move(q), final_util};
}

MechanismResult ToMechanism(const InstanceSingle& instance, const Problem& p,
                            const std::vector<std::vector<double>>& q) {
  const JointDistribution& sfh = instance.sfh;
  std::vector<double> mass(sfh.num_cells() * p.nu, 0.0);
  for (std::size_t r = 0; r < p.row_p.size(); ++r) {
    for (std::size_t u = 0; u < p.nu; ++u) {
      mass[p.row_cell[r] * p.nu + u] = p.row_p[r] * q[r][u];
    }
  }
  std::vector<Alphabet> vars = sfh.variables();
  vars.push_back(Alphabet::Indexed(kDisclosedVar, p.nu));
  MechanismResult m{
      .extended = JointDistribution::FromDoubles(std::move(vars), std::move(mass)),
      .method = MechanismMethod::kOracle};
  m.u_labels.resize(p.nu);
  std::iota(m.u_labels.begin(), m.u_labels.end(), 0.0);
  return m;
}

std::size_t DefaultUSize(const InstanceSingle& instance) {
  const std::size_t ns = instance.sfh.shape()[0];
  const std::size_t nx = instance.joint.num_cells() /
                         instance.joint.variable(
                             instance.joint.VariableIndex(instance.private_name))
                             .size();
  return ns * nx + 2;
}

}  // namespace

double RepairWeight(const InstanceSingle& instance,
                    const std::vector<std::vector<double>>& channel,
                    std::size_t constant_symbol, double epsilon) {
  if (channel.empty()) return 0.0;
  Problem p = MakeProblem(instance, channel.front().size());
  if (channel.size() != p.row_p.size() || constant_symbol >= p.nu) {
    throw Error(ErrorCode::kShapeMismatch,
                "one channel row per positive-mass (S, F, H) cell");
  }
  return Bisect(Tables(p, channel), constant_symbol, epsilon);
}

SearchResult RandomSearch(const InstanceSingle& instance,
                          const SearchConfig& config) {
  const std::size_t nu = config.u_size ? config.u_size : DefaultUSize(instance);
  const Problem p = MakeProblem(instance, nu);
  const std::size_t restarts = std::max<std::size_t>(config.restarts, 1);
  std::vector<RestartOutcome> outcomes(restarts);
  const unsigned threads =
      std::clamp<unsigned>(config.threads, 1, static_cast<unsigned>(restarts));
  if (threads == 1) {
    for (std::size_t r = 0; r < restarts; ++r) outcomes[r] = RunRestart(p, config, r);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < restarts; r += threads) {
          outcomes[r] = RunRestart(p, config, r);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  std::size_t best = 0;
  SearchResult result{.mechanism = ToMechanism(instance, p, outcomes[0].channel)};
  for (std::size_t r = 0; r < restarts; ++r) {
    result.restart_utilities.push_back(outcomes[r].utility);
    if (outcomes[r].utility > outcomes[best].utility) best = r;
  }
  result.mechanism = ToMechanism(instance, p, outcomes[best].channel);
  result.evaluation = EvaluateMechanism(instance, result.mechanism);
  return result;
}

SandwichReport SandwichCheck(const InstanceSingle& instance,
                             const SearchConfig& config,
                             double lower_tolerance, double upper_tolerance) {
  const BoundsReportSingle bounds = SingleTaskBounds(instance);
  SandwichReport r;
  r.lower_used = bounds.effective_lower;
  r.upper_used = bounds.upper;
  const double eps = instance.epsilon;

  MechanismOptions options{.seed = config.seed};
  for (const auto& c : ConstructAll(instance, options)) {
    r.best_constructed = std::max(r.best_constructed, c.evaluation.utility);
    const std::string name(MethodName(c.method));
    if (c.evaluation.leakage > eps + lower_tolerance) {
      r.violations.push_back(name + " leaks " +
                             std::to_string(c.evaluation.leakage));
    }
    if (c.evaluation.utility > bounds.upper + lower_tolerance) {
      r.violations.push_back(name + " exceeds the upper bound");
    }
  }
  const SearchResult search = RandomSearch(instance, config);
  r.best_searched = search.evaluation.utility;
  r.feasible = search.evaluation.leakage <= eps + upper_tolerance;
  if (!r.feasible) {
    r.violations.push_back("search returned an infeasible channel");
  }
  if (r.best_searched > bounds.upper + upper_tolerance) {
    r.violations.push_back("search exceeds the upper bound");
  }
  r.best_found_utility = std::max(r.best_constructed, r.best_searched);
  if (r.best_found_utility < bounds.effective_lower - lower_tolerance) {
    r.violations.push_back("best utility is below the lower bound");
  }
  return r;
}

ExhaustiveResult ExhaustiveTiny(const InstanceSingle& instance,
                                std::size_t u_size, std::size_t q) {
  if (u_size < 1 || u_size > 3) {
    throw Error(ErrorCode::kInvalidArgument, "u_size must be 1, 2 or 3");
  }
  if (q < 1) throw Error(ErrorCode::kInvalidArgument, "q must be >= 1");
  const Problem p = MakeProblem(instance, u_size);

  std::vector<std::vector<double>> compositions;
  for (std::size_t a = 0; a <= q; ++a) {
    if (u_size == 1) {
      if (a == q) compositions.push_back({1.0});
      continue;
    }
    for (std::size_t b = 0; a + b <= q; ++b) {
      if (u_size == 2) {
        if (a + b == q) compositions.push_back({double(a) / q, double(b) / q});
        continue;
      }
      const std::size_t c = q - a - b;
      compositions.push_back({double(a) / q, double(b) / q, double(c) / q});
    }
  }
  const std::size_t rows = p.row_p.size();
  double points = 1.0;
  for (std::size_t r = 0; r < rows; ++r) points *= compositions.size();
  if (points > static_cast<double>(kMaxGridPoints)) {
    throw Error(ErrorCode::kGridTooLarge,
                std::to_string(static_cast<double>(points)) + " grid channels");
  }

  ExhaustiveResult result;
  std::vector<std::size_t> index(rows, 0);
  std::vector<std::vector<double>> channel(rows);
  while (true) {
    for (std::size_t r = 0; r < rows; ++r) channel[r] = compositions[index[r]];
    auto [leak, util] = Tables(p, channel).Measure();
    ++result.channels;
    if (leak <= p.epsilon + kFeasibleSlack) {
      ++result.feasible;
      if (result.feasible == 1 || util > result.best_utility) {
        result.best_utility = util;
        result.best_leakage = leak;
      }
    }
    std::size_t r = 0;
    while (r < rows && ++index[r] == compositions.size()) index[r++] = 0;
    if (r == rows) break;
  }
  return result;
}

}  // namespace privsem
