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

#include "privsem/representation.h"

#include <algorithm>
#include <map>
#include <numeric>

namespace privsem {
namespace {

using Layout = std::vector<std::vector<std::size_t>>;

// Breakpoints of double rows closer than this are treated as one.
constexpr double kBreakpointTolerance = 1e-13;

template <class T>
struct Rows {
  std::vector<T> px;
  std::vector<std::vector<T>> cond;  // cond[x][y] = P(Y=y | X=x)
};

template <class T>
bool Same(const T& a, const T& b) {
  if constexpr (std::is_same_v<T, double>) {
    return std::abs(a - b) <= kBreakpointTolerance;
  } else {
    return a == b;
  }
}

template <class T>
bool Covers(const T& end, const T& point) {
  if constexpr (std::is_same_v<T, double>) {
    return end >= point - kBreakpointTolerance;
  } else {
    return end >= point;
  }
}

template <class T>
Rows<T> MakeRows(const JointDistribution& joint, const std::vector<T>& mass) {
  const std::size_t nx = joint.shape()[0];
  const std::size_t ny = joint.shape()[1];
  Rows<T> rows;
  rows.px.assign(nx, T(0));
  rows.cond.assign(nx, std::vector<T>(ny, T(0)));
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) rows.px[x] += mass[x * ny + y];
    if (rows.px[x] == T(0)) {
      // Unreachable x: any row works, a point mass adds no breakpoints.
      rows.cond[x][0] = T(1);
      continue;
    }
    for (std::size_t y = 0; y < ny; ++y) {
      rows.cond[x][y] = mass[x * ny + y] / rows.px[x];
    }
  }
  return rows;
}

template <class T>
struct Refinement {
  std::vector<T> mass;                          // per atom
  std::vector<std::vector<std::size_t>> decode;  // decode[u][x] = y
  std::size_t unreduced = 0;
};

template <class T>
Refinement<T> Refine(const Rows<T>& rows, const Layout& layout) {
  const std::size_t nx = rows.cond.size();
  std::vector<std::vector<T>> ends(nx);
  std::vector<T> points;
  for (std::size_t x = 0; x < nx; ++x) {
    T acc(0);
    for (std::size_t y : layout[x]) {
      acc += rows.cond[x][y];
      ends[x].push_back(acc);
      points.push_back(acc);
    }
  }
  std::sort(points.begin(), points.end());

  Refinement<T> out;
  std::vector<std::size_t> cursor(nx, 0);
  T prev(0);
  std::map<std::vector<std::size_t>, std::size_t> merged;
  for (std::size_t k = 0; k < points.size(); ++k) {
    T end = points[k];
    if (k + 1 == points.size()) end = T(1);
    if (Same(end, prev) || end < prev) continue;
    ++out.unreduced;
    std::vector<std::size_t> column(nx);
    for (std::size_t x = 0; x < nx; ++x) {
      while (cursor[x] + 1 < ends[x].size() && !Covers(ends[x][cursor[x]], end)) {
        ++cursor[x];
      }
      column[x] = layout[x][cursor[x]];
    }
    T length = end - prev;
    auto [it, inserted] = merged.emplace(column, out.mass.size());
    if (inserted) {
      out.mass.push_back(length);
      out.decode.push_back(std::move(column));
    } else {
      out.mass[it->second] += length;
    }
    prev = end;
  }
  return out;
}

// H(Y|U) of a refinement; I(X;U|Y) = H(Y|U) - I(X;Y) for every layout.
double ConditionalTaskEntropy(const Rows<double>& rows,
                              const Refinement<double>& r,
                              std::size_t ny) {
  double h = 0.0;
  std::vector<double> py(ny);
  for (std::size_t u = 0; u < r.mass.size(); ++u) {
    std::fill(py.begin(), py.end(), 0.0);
    for (std::size_t x = 0; x < rows.px.size(); ++x) {
      py[r.decode[u][x]] += rows.px[x];
    }
    for (double p : py) {
      if (p > 0.0) h -= r.mass[u] * p * std::log2(p);
    }
  }
  return h;
}

template <class T>
FrlResult Assemble(const JointDistribution& joint, const Rows<T>& rows,
                   const Layout& layout, FrlBackend backend,
                   const std::string& u_name) {
  Refinement<T> r = Refine(rows, layout);
  const Alphabet& xa = joint.variable(0);
  const Alphabet& ya = joint.variable(1);
  const std::size_t nx = xa.size();
  const std::size_t ny = ya.size();
  const std::size_t nu = r.mass.size();

  std::vector<std::string> symbols;
  for (std::size_t u = 0; u < nu; ++u) symbols.push_back("u" + std::to_string(u));
  Alphabet ua(u_name, std::move(symbols));

  std::vector<std::size_t> table(nx * nu);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t u = 0; u < nu; ++u) table[x * nu + u] = r.decode[u][x];
  }

  std::vector<T> cells(nx * ny * nu, T(0));
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t u = 0; u < nu; ++u) {
      cells[(x * ny + r.decode[u][x]) * nu + u] = rows.px[x] * r.mass[u];
    }
  }

  auto build = [](std::vector<Alphabet> vars, std::vector<T> mass) {
    if constexpr (std::is_same_v<T, double>) {
      return JointDistribution::FromDoubles(std::move(vars), std::move(mass));
    } else {
      return JointDistribution::FromRationals(std::move(vars), std::move(mass));
    }
  };

  FrlResult result{
      .u_alphabet = ua,
      .u_pmf = build({ua}, r.mass),
      .decoder = DeterministicMap({xa, ua}, ya, std::move(table)),
      .joint = build({xa, ya, ua}, std::move(cells)),
  };
  result.backend = backend;
  result.unreduced_atoms = r.unreduced;
  result.layout = layout;
  const VarList x{xa.name()}, y{ya.name()}, u{u_name};
  result.measured.i_xu = MutualInformation(result.joint, x, u);
  result.measured.h_y_given_xu = ConditionalEntropy(result.joint, y, {xa.name(), u_name});
  result.measured.i_xu_given_y = MutualInformation(result.joint, x, u, y);
  result.sfrl_bound = SfrlSlack(MutualInformation(joint, x, y));
  result.meets_sfrl_bound =
      result.measured.i_xu_given_y <= result.sfrl_bound + 1e-12;
  return result;
}

void CheckPair(const JointDistribution& joint, bool require_exact) {
  if (joint.num_variables() != 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "functional representation needs a joint over (X, Y)");
  }
  if (require_exact && !joint.is_exact()) {
    throw Error(ErrorCode::kNonRationalInput,
                "exact construction requested on a double table");
  }
}

Layout NaiveLayout(std::size_t nx, std::size_t ny) {
  std::vector<std::size_t> order(ny);
  std::iota(order.begin(), order.end(), 0);
  return Layout(nx, order);
}

// One global order: symbols with the largest guaranteed overlap across the
// reachable rows (min_x P(y|x)) first, then by P(y).
Layout GreedyLayout(const Rows<double>& rows) {
  const std::size_t nx = rows.cond.size();
  const std::size_t ny = rows.cond[0].size();
  std::vector<double> overlap(ny, 1.0), py(ny, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    if (rows.px[x] <= 0.0) continue;
    for (std::size_t y = 0; y < ny; ++y) {
      overlap[y] = std::min(overlap[y], rows.cond[x][y]);
      py[y] += rows.px[x] * rows.cond[x][y];
    }
  }
  std::vector<std::size_t> order(ny);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (overlap[a] != overlap[b]) return overlap[a] > overlap[b];
    return py[a] > py[b];
  });
  return Layout(nx, order);
}

double Objective(const Rows<double>& rows, const Layout& layout) {
  return ConditionalTaskEntropy(rows, Refine(rows, layout),
                                rows.cond[0].size());
}

// First-improvement adjacent swaps within each row.
double Polish(const Rows<double>& rows, Layout& layout) {
  double best = Objective(rows, layout);
  constexpr int kMaxPasses = 20;
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    bool improved = false;
    for (std::size_t x = 0; x < layout.size(); ++x) {
      if (rows.px[x] <= 0.0) continue;
      for (std::size_t k = 0; k + 1 < layout[x].size(); ++k) {
        std::swap(layout[x][k], layout[x][k + 1]);
        double value = Objective(rows, layout);
        if (value < best - 1e-12) {
          best = value;
          improved = true;
        } else {
          std::swap(layout[x][k], layout[x][k + 1]);
        }
      }
    }
    if (!improved) break;
  }
  return best;
}

Layout SearchLayout(const Rows<double>& rows, const SfrlConfig& config) {
  const std::size_t nx = rows.cond.size();
  const std::size_t ny = rows.cond[0].size();
  Layout best = NaiveLayout(nx, ny);
  double best_value = Objective(rows, best);

  auto consider = [&](Layout candidate) {
    double value = Polish(rows, candidate);
    if (value < best_value - 1e-12) {
      best_value = value;
      best = std::move(candidate);
    }
  };
  consider(GreedyLayout(rows));
  for (std::size_t r = 0; r < config.restarts; ++r) {
    Rng rng(DeriveSeed(config.seed, r));
    Layout candidate = GreedyLayout(rows);
    for (auto& order : candidate) {
      // Fisher-Yates on each row independently.
      for (std::size_t k = order.size(); k > 1; --k) {
        std::swap(order[k - 1], order[rng.Below(k)]);
      }
    }
    consider(std::move(candidate));
  }
  return best;
}

}  // namespace

FrlResult FrlConstruct(const JointDistribution& joint, FrlOptions options) {
  CheckPair(joint, options.require_exact);
  const Layout layout = NaiveLayout(joint.shape()[0], joint.shape()[1]);
  if (joint.is_exact()) {
    return Assemble(joint, MakeRows(joint, joint.exact()), layout,
                    FrlBackend::kFrl, options.u_name);
  }
  return Assemble(joint, MakeRows(joint, joint.probabilities()), layout,
                  FrlBackend::kFrl, options.u_name);
}

FrlResult SfrlConstruct(const JointDistribution& joint, SfrlConfig config) {
  CheckPair(joint, config.require_exact);
  const Layout layout =
      SearchLayout(MakeRows(joint, joint.probabilities()), config);
  if (joint.is_exact()) {
    return Assemble(joint, MakeRows(joint, joint.exact()), layout,
                    FrlBackend::kSfrl, config.u_name);
  }
  return Assemble(joint, MakeRows(joint, joint.probabilities()), layout,
                  FrlBackend::kSfrl, config.u_name);
}

std::vector<SeparationShape> EnumerateSeparations(std::size_t size) {
  std::vector<SeparationShape> out;
  if (size < 2) return out;
  auto pairs = [](std::size_t n, bool padded) {
    std::vector<SeparationShape> found;
    for (std::size_t a = 2; a * 2 <= n; ++a) {
      if (n % a == 0 && n / a >= 2) found.push_back({a, n / a, padded});
    }
    return found;
  };
  out = pairs(size, false);
  if (out.empty()) out = pairs(size + 1, true);
  return out;
}

SeparationRep::SeparationRep(Alphabet source, SeparationShape shape)
    : source_(std::move(source)), shape_(shape) {
  const std::size_t cells = shape_.s1_size * shape_.s2_size;
  const std::size_t expected = shape_.padded ? cells - 1 : cells;
  if (shape_.s1_size < 2 || shape_.s2_size < 2 || source_.size() != expected) {
    throw Error(ErrorCode::kBijectionMismatch,
                "shape " + std::to_string(shape_.s1_size) + "x" +
                    std::to_string(shape_.s2_size) +
                    (shape_.padded ? " (padded)" : "") + " does not fit |S|=" +
                    std::to_string(source_.size()));
  }
  for (std::size_t s = 0; s < source_.size(); ++s) {
    bijection_.emplace_back(s / shape_.s2_size, s % shape_.s2_size);
  }
}

DeterministicMap SeparationRep::ComponentMap(int which, std::string name) const {
  if (which != 1 && which != 2) {
    throw Error(ErrorCode::kInvalidArgument, "component must be 1 or 2");
  }
  std::vector<std::size_t> table;
  for (const auto& [a, b] : bijection_) table.push_back(which == 1 ? a : b);
  std::size_t size = which == 1 ? shape_.s1_size : shape_.s2_size;
  return DeterministicMap({source_}, Alphabet::Indexed(std::move(name), size),
                          std::move(table));
}

std::vector<SeparationRep> AllSeparations(const Alphabet& source) {
  std::vector<SeparationRep> reps;
  for (const auto& shape : EnumerateSeparations(source.size())) {
    reps.emplace_back(source, shape);
  }
  return reps;
}

JointDistribution ApplySeparation(const JointDistribution& s_pmf,
                                  const SeparationRep& rep,
                                  std::string s1_name, std::string s2_name) {
  if (s_pmf.num_variables() != 1 || !(s_pmf.variable(0) == rep.source())) {
    throw Error(ErrorCode::kBijectionMismatch,
                "pmf alphabet does not match the separation source");
  }
  if (s1_name.empty()) s1_name = rep.source().name() + "1";
  if (s2_name.empty()) s2_name = rep.source().name() + "2";
  const std::size_t b = rep.shape().s2_size;
  std::vector<Alphabet> vars{Alphabet::Indexed(s1_name, rep.shape().s1_size),
                             Alphabet::Indexed(s2_name, b)};
  const std::size_t cells = rep.shape().s1_size * b;
  if (s_pmf.is_exact()) {
    std::vector<Rational> mass(cells, Rational(0));
    for (std::size_t s = 0; s < rep.source().size(); ++s) {
      auto [i, j] = rep.Pair(s);
      mass[i * b + j] = s_pmf.exact()[s];
    }
    return JointDistribution::FromRationals(std::move(vars), std::move(mass));
  }
  std::vector<double> mass(cells, 0.0);
  for (std::size_t s = 0; s < rep.source().size(); ++s) {
    auto [i, j] = rep.Pair(s);
    mass[i * b + j] = s_pmf.probabilities()[s];
  }
  return JointDistribution::FromDoubles(std::move(vars), std::move(mass));
}

}  // namespace privsem
