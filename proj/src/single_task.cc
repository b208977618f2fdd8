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

#include "privsem/single_task.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace privsem {
namespace {

constexpr double kZeroEntropy = 1e-12;

template <class T>
const std::vector<T>& MassOf(const JointDistribution& joint) {
  if constexpr (std::is_same_v<T, double>) {
    return joint.probabilities();
  } else {
    return joint.exact();
  }
}

template <class T>
JointDistribution BuildJoint(std::vector<Alphabet> vars, std::vector<T> mass) {
  if constexpr (std::is_same_v<T, double>) {
    return JointDistribution::FromDoubles(std::move(vars), std::move(mass));
  } else {
    return JointDistribution::FromRationals(std::move(vars), std::move(mass));
  }
}

std::string FreshSymbol(const std::vector<std::string>& taken,
                        std::string base) {
  while (std::find(taken.begin(), taken.end(), base) != taken.end()) {
    base += "'";
  }
  return base;
}

// Conditional table P(W = w | S = s) of a randomized response that reveals
// `reveal[s]` with probability `alpha` and the fresh last symbol otherwise.
template <class T>
std::vector<std::vector<T>> ResponseRows(const std::vector<std::size_t>& reveal,
                                         std::size_t w_size, const T& alpha) {
  std::vector<std::vector<T>> rows(reveal.size(), std::vector<T>(w_size, T(0)));
  for (std::size_t s = 0; s < reveal.size(); ++s) {
    rows[s][reveal[s]] += alpha;
    rows[s][w_size - 1] += T(1) - alpha;
  }
  return rows;
}

// Extended joint over (S, F, H, U) with U = (Ubar, W), where Ubar is drawn
// from the representation given (S, H) and W from `w_rows` given S. Columns
// of U that carry no mass are dropped.
template <class T>
JointDistribution AssembleExtended(const JointDistribution& sfh,
                                   const FrlResult& frl,
                                   const std::vector<std::vector<T>>& w_rows,
                                   const std::vector<std::string>& w_symbols) {
  const std::size_t ns = sfh.shape()[0], nf = sfh.shape()[1],
                    nh = sfh.shape()[2];
  const std::size_t nb = frl.u_alphabet.size();
  const std::size_t nw = w_symbols.size();
  const std::size_t nu = nb * nw;
  const auto& sfh_mass = MassOf<T>(sfh);
  const auto& frl_mass = MassOf<T>(frl.joint);  // (S, H, Ubar)

  std::vector<T> sh(ns * nh, T(0));
  for (std::size_t i = 0; i < ns * nh; ++i) {
    for (std::size_t b = 0; b < nb; ++b) sh[i] += frl_mass[i * nb + b];
  }

  std::vector<T> wide(ns * nf * nh * nu, T(0));
  std::vector<bool> used(nu, false);
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t f = 0; f < nf; ++f) {
      for (std::size_t h = 0; h < nh; ++h) {
        const std::size_t cell = (s * nf + f) * nh + h;
        const T& p = sfh_mass[cell];
        if (p == T(0)) continue;
        const T& psh = sh[s * nh + h];
        for (std::size_t b = 0; b < nb; ++b) {
          const T& joint_b = frl_mass[(s * nh + h) * nb + b];
          if (joint_b == T(0)) continue;
          T pb = p * joint_b / psh;
          for (std::size_t w = 0; w < nw; ++w) {
            if (w_rows[s][w] == T(0)) continue;
            const std::size_t u = b * nw + w;
            wide[cell * nu + u] = pb * w_rows[s][w];
            used[u] = true;
          }
        }
      }
    }
  }

  std::vector<std::size_t> keep;
  std::vector<std::string> u_symbols;
  for (std::size_t u = 0; u < nu; ++u) {
    if (!used[u]) continue;
    keep.push_back(u);
    u_symbols.push_back(frl.u_alphabet.symbol(u / nw) + "|" +
                        w_symbols[u % nw]);
  }
  std::vector<T> mass(ns * nf * nh * keep.size(), T(0));
  for (std::size_t cell = 0; cell < ns * nf * nh; ++cell) {
    for (std::size_t k = 0; k < keep.size(); ++k) {
      mass[cell * keep.size() + k] = wide[cell * nu + keep[k]];
    }
  }
  std::vector<Alphabet> vars = sfh.variables();
  vars.emplace_back(kDisclosedVar, std::move(u_symbols));
  return BuildJoint<T>(std::move(vars), std::move(mass));
}

struct BaseQuantities {
  double h_s, h_h, h_h_given_s, h_s_given_h, i_sh;
};

BaseQuantities Quantities(const JointDistribution& sfh) {
  const VarList s{kPrivateVar}, h{kTaskVar};
  return {Entropy(sfh, s), Entropy(sfh, h), ConditionalEntropy(sfh, h, s),
          ConditionalEntropy(sfh, s, h), MutualInformation(sfh, s, h)};
}

void RequireConstructible(const BaseQuantities& q, double epsilon) {
  if (q.h_s <= kZeroEntropy) {
    throw Error(ErrorCode::kDegeneratePrivateData, "H(S) = 0");
  }
  if (!(epsilon < q.i_sh)) {
    throw Error(ErrorCode::kEpsilonOutOfRange,
                "epsilon " + std::to_string(epsilon) + " >= I(S;h) = " +
                    std::to_string(q.i_sh) + "; use passthrough");
  }
}

std::vector<SeparationTerm> SeparationTerms(const JointDistribution& sfh,
                                            const BaseQuantities& q,
                                            double epsilon, double slack) {
  std::vector<SeparationTerm> terms;
  const JointDistribution sh = sfh.Marginal({kPrivateVar, kTaskVar});
  for (const auto& rep : AllSeparations(sh.variable(0))) {
    JointDistribution with_s2 =
        ApplyMap(sh, rep.ComponentMap(2, "S2"), "S2");
    SeparationTerm t;
    t.shape = rep.shape();
    t.h_s2 = Entropy(with_s2, {"S2"});
    t.h_s2_given_task = ConditionalEntropy(with_s2, {"S2"}, {kTaskVar});
    t.valid = t.h_s2 > kZeroEntropy && t.h_s2 >= epsilon;
    t.alpha2 = t.h_s2 > kZeroEntropy ? epsilon / t.h_s2
                                     : std::numeric_limits<double>::infinity();
    if (t.valid) {
      t.l3_penalty = t.alpha2 * t.h_s2_given_task;
      t.l4_penalty = t.alpha2 * (q.h_s_given_h - slack);
    }
    terms.push_back(t);
  }
  return terms;
}

// Index of the valid term with the smallest penalty; ties keep the earlier
// (lexicographically smaller) shape.
template <class Penalty>
std::optional<std::size_t> Minimiser(const std::vector<SeparationTerm>& terms,
                                     Penalty penalty) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (!terms[i].valid) continue;
    if (!best || penalty(terms[i]) < penalty(terms[*best]) - 1e-12) best = i;
  }
  return best;
}

template <class T>
MechanismResult BuildConstructed(const InstanceSingle& instance,
                                 MechanismMethod method,
                                 const MechanismOptions& options,
                                 const BaseQuantities& q) {
  const JointDistribution& sfh = instance.sfh;
  const JointDistribution sh = sfh.Marginal({kPrivateVar, kTaskVar});
  const Alphabet& s_alphabet = sh.variable(0);
  const double epsilon = instance.epsilon;

  MechanismResult result{.extended = sfh, .method = method};
  if (method == MechanismMethod::kEfrl) {
    result.representation = FrlConstruct(sh, {.u_name = "Ubar"});
  } else {
    result.representation = SfrlConstruct(
        sh, {.restarts = options.restarts, .seed = options.seed, .u_name = "Ubar"});
  }

  std::vector<std::size_t> reveal(s_alphabet.size());
  std::vector<std::string> w_symbols;
  double alpha = 0.0;
  if (method == MechanismMethod::kEfrl || method == MechanismMethod::kEsfrl) {
    std::iota(reveal.begin(), reveal.end(), 0);
    w_symbols = s_alphabet.symbols();
    alpha = epsilon / q.h_s;
  } else {
    const double slack = SfrlSlack(q.i_sh);
    auto terms = SeparationTerms(sfh, q, epsilon, slack);
    auto pick = method == MechanismMethod::kSepL3
                    ? Minimiser(terms, [](const SeparationTerm& t) { return t.l3_penalty; })
                    : Minimiser(terms, [](const SeparationTerm& t) { return t.l4_penalty; });
    if (!pick) {
      throw Error(ErrorCode::kNoValidSeparation,
                  "every split of S has H(S2) < epsilon");
    }
    SeparationRep rep(s_alphabet, terms[*pick].shape);
    for (std::size_t s = 0; s < s_alphabet.size(); ++s) {
      reveal[s] = rep.Pair(s).second;
    }
    w_symbols = Alphabet::Indexed("S2", rep.shape().s2_size).symbols();
    alpha = terms[*pick].alpha2;
    result.chosen_separation = std::move(rep);
  }
  w_symbols.push_back(FreshSymbol(w_symbols, "c"));
  result.alpha = alpha;

  T alpha_t;
  if constexpr (std::is_same_v<T, double>) {
    alpha_t = alpha;
  } else {
    alpha_t = FromDouble(alpha);
  }
  auto rows = ResponseRows<T>(reveal, w_symbols.size(), alpha_t);
  result.extended =
      AssembleExtended<T>(sfh, *result.representation, rows, w_symbols);
  const std::size_t nu = result.extended.shape()[3];
  result.u_labels.resize(nu);
  std::iota(result.u_labels.begin(), result.u_labels.end(), 0.0);
  return result;
}

}  // namespace

InstanceSingle MakeInstance(JointDistribution joint, std::string private_name,
                            DeterministicMap semantic, DeterministicMap task,
                            double epsilon) {
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    throw Error(ErrorCode::kEpsilonOutOfRange, "epsilon must be >= 0");
  }
  joint.VariableIndex(private_name);
  for (const auto* map : {&semantic, &task}) {
    for (const auto& a : map->source()) {
      if (a.name() == private_name) {
        throw Error(ErrorCode::kSourceMismatch,
                    "semantic and task must be functions of X only");
      }
    }
  }
  const std::string tmp_f = "\x1f" "F", tmp_h = "\x1f" "H";
  JointDistribution extended =
      ApplyMap(ApplyMap(joint, semantic, tmp_f), task, tmp_h);
  JointDistribution sfh = extended.Marginal({private_name, tmp_f, tmp_h})
                              .RenameVariable(private_name, kPrivateVar)
                              .RenameVariable(tmp_f, kSemanticVar)
                              .RenameVariable(tmp_h, kTaskVar);
  return InstanceSingle{std::move(joint), std::move(private_name),
                        std::move(semantic), std::move(task), epsilon,
                        std::move(sfh)};
}

BoundsReportSingle SingleTaskBounds(const InstanceSingle& instance) {
  const BaseQuantities q = Quantities(instance.sfh);
  RequireConstructible(q, instance.epsilon);
  const double eps = instance.epsilon;

  BoundsReportSingle r;
  r.epsilon = eps;
  r.h_private = q.h_s;
  r.h_task = q.h_h;
  r.h_task_given_private = q.h_h_given_s;
  r.h_private_given_task = q.h_s_given_h;
  r.mutual_information = q.i_sh;
  r.sfrl_slack = SfrlSlack(q.i_sh);
  r.alpha = eps / q.h_s;

  r.l1 = q.h_h_given_s - q.h_s_given_h + eps;
  r.l1_alt = q.h_h - q.h_s + eps;
  r.l2 = q.h_h_given_s - r.alpha * q.h_s_given_h + eps -
         (1.0 - r.alpha) * r.sfrl_slack;

  r.separations = SeparationTerms(instance.sfh, q, eps, r.sfrl_slack);
  const double base = q.h_h_given_s + eps - r.sfrl_slack;
  if (auto i = Minimiser(r.separations,
                         [](const SeparationTerm& t) { return t.l3_penalty; })) {
    r.l3 = base - r.separations[*i].l3_penalty;
    r.l3_separation = r.separations[*i].shape;
  }
  if (auto i = Minimiser(r.separations,
                         [](const SeparationTerm& t) { return t.l4_penalty; })) {
    r.l4 = base - r.separations[*i].l4_penalty;
    r.l4_separation = r.separations[*i].shape;
  }

  r.effective_lower = std::max({0.0, r.l1, r.l2});
  if (r.l3) r.effective_lower = std::max(r.effective_lower, *r.l3);
  if (r.l4) r.effective_lower = std::max(r.effective_lower, *r.l4);
  r.upper = q.h_h_given_s + eps;
  r.tight_l1 = q.h_s_given_h <= kZeroEntropy;
  return r;
}

double RandomizedResponse::Conditional(std::size_t z, std::size_t w) const {
  if (w + 1 == output.size()) return 1.0 - alpha;
  return w == z ? alpha : 0.0;
}

RandomizedResponse MakeRandomizedResponse(const JointDistribution& target,
                                          double alpha,
                                          std::string fresh_symbol,
                                          std::string output_name) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kAlphaOutOfRange,
                "alpha " + std::to_string(alpha) + " outside [0, 1]");
  }
  if (target.num_variables() != 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "randomized response needs a pmf over one variable");
  }
  const Alphabet& z = target.variable(0);
  if (z.Find(fresh_symbol)) {
    throw Error(ErrorCode::kSymbolCollision,
                "fresh symbol '" + fresh_symbol + "' is already in " + z.name());
  }
  std::vector<std::string> w_symbols = z.symbols();
  w_symbols.push_back(std::move(fresh_symbol));
  Alphabet w(std::move(output_name), std::move(w_symbols));
  const std::size_t nz = z.size(), nw = w.size();

  RandomizedResponse rr{.input = z,
                        .output = w,
                        .alpha = alpha,
                        .alpha_exact = FromDouble(alpha),
                        .joint = target};
  if (target.is_exact()) {
    std::vector<Rational> mass(nz * nw, Rational(0));
    for (std::size_t s = 0; s < nz; ++s) {
      mass[s * nw + s] = target.exact()[s] * rr.alpha_exact;
      mass[s * nw + nw - 1] = target.exact()[s] * (1 - rr.alpha_exact);
    }
    rr.joint = JointDistribution::FromRationals({z, w}, std::move(mass));
  } else {
    std::vector<double> mass(nz * nw, 0.0);
    for (std::size_t s = 0; s < nz; ++s) {
      mass[s * nw + s] = target.probabilities()[s] * alpha;
      mass[s * nw + nw - 1] = target.probabilities()[s] * (1.0 - alpha);
    }
    rr.joint = JointDistribution::FromDoubles({z, w}, std::move(mass));
  }
  return rr;
}

std::string_view MethodName(MechanismMethod method) {
  switch (method) {
    case MechanismMethod::kEfrl: return "efrl";
    case MechanismMethod::kEsfrl: return "esfrl";
    case MechanismMethod::kSepL3: return "sep_l3";
    case MechanismMethod::kSepL4: return "sep_l4";
    case MechanismMethod::kPassthrough: return "passthrough";
    case MechanismMethod::kOracle: return "oracle";
  }
  return "unknown";
}

std::optional<MechanismMethod> ParseMethod(std::string_view name) {
  if (name == "efrl") return MechanismMethod::kEfrl;
  if (name == "esfrl") return MechanismMethod::kEsfrl;
  if (name == "sep3" || name == "sep_l3") return MechanismMethod::kSepL3;
  if (name == "sep4" || name == "sep_l4") return MechanismMethod::kSepL4;
  if (name == "passthrough") return MechanismMethod::kPassthrough;
  return std::nullopt;
}

MechanismResult BuildMechanism(const InstanceSingle& instance,
                               MechanismMethod method,
                               MechanismOptions options) {
  if (method == MechanismMethod::kPassthrough) {
    const Alphabet& task = instance.sfh.variable(2);
    MechanismResult result{
        .extended = ApplyMap(instance.sfh,
                             DeterministicMap::Identity(task, kDisclosedVar),
                             kDisclosedVar),
        .method = method};
    if (instance.task.numeric_labels()) {
      result.u_labels = *instance.task.numeric_labels();
    } else {
      result.u_labels.resize(task.size());
      std::iota(result.u_labels.begin(), result.u_labels.end(), 0.0);
    }
    return result;
  }
  if (method == MechanismMethod::kOracle) {
    throw Error(ErrorCode::kInvalidArgument,
                "oracle mechanisms come from the search module");
  }
  const BaseQuantities q = Quantities(instance.sfh);
  RequireConstructible(q, instance.epsilon);
  if (instance.sfh.is_exact()) {
    return BuildConstructed<Rational>(instance, method, options, q);
  }
  return BuildConstructed<double>(instance, method, options, q);
}

Evaluation EvaluateMechanism(const InstanceSingle& instance,
                             const MechanismResult& mechanism) {
  const JointDistribution& ext = mechanism.extended;
  bool consistent = ext.num_variables() == 4 &&
                    ext.variable(3).name() == kDisclosedVar &&
                    mechanism.u_labels.size() == ext.shape()[3];
  if (consistent) {
    for (std::size_t i = 0; i < 3; ++i) {
      consistent = consistent && ext.variable(i) == instance.sfh.variable(i);
    }
  }
  if (consistent) {
    consistent = SameDistribution(
        ext.Marginal({kPrivateVar, kSemanticVar, kTaskVar}), instance.sfh,
        1e-12);
  }
  if (!consistent) {
    throw Error(ErrorCode::kInconsistentMechanism,
                "mechanism does not extend the instance's (S, F, H) joint");
  }
  const VarList s{kPrivateVar}, h{kTaskVar}, u{kDisclosedVar};
  Evaluation e;
  e.leakage = MutualInformation(ext, u, s);
  e.utility = MutualInformation(ext, u, h);
  e.conditional_leakage = MutualInformation(ext, s, u, h);
  e.identity_residual = KeyIdentityResidual(ext, s, h, u);
  return e;
}

NoiseTable ExtractNoise(const InstanceSingle& instance,
                        const MechanismResult& mechanism) {
  const auto& labels = instance.semantic.numeric_labels();
  if (!labels) {
    throw Error(ErrorCode::kMissingNumericLabels,
                "the semantic f(X) has no numeric labels");
  }
  const JointDistribution& ext = mechanism.extended;
  const std::size_t nf = ext.shape()[1], nh = ext.shape()[2],
                    nu = ext.shape()[3];
  if (mechanism.u_labels.size() != nu) {
    throw Error(ErrorCode::kInconsistentMechanism, "one label per U symbol");
  }
  std::vector<Rational> u_exact, f_exact;
  for (double v : mechanism.u_labels) u_exact.push_back(FromDouble(v));
  for (double v : *labels) f_exact.push_back(FromDouble(v));

  NoiseTable table;
  table.reconstruction_exact = true;
  std::set<double> support;
  const auto& p = ext.probabilities();
  for (std::size_t row = 0; row * nu < p.size(); ++row) {
    double row_mass = 0.0;
    for (std::size_t u = 0; u < nu; ++u) row_mass += p[row * nu + u];
    if (row_mass <= 0.0) continue;
    for (std::size_t u = 0; u < nu; ++u) {
      if (p[row * nu + u] <= 0.0) continue;
      NoiseEntry e;
      e.s = row / (nf * nh);
      e.f = (row / nh) % nf;
      e.h = row % nh;
      e.u = u;
      e.noise = u_exact[u] - f_exact[e.f];
      e.noise_value = ToDouble(e.noise);
      e.probability = p[row * nu + u] / row_mass;
      table.reconstruction_exact =
          table.reconstruction_exact && f_exact[e.f] + e.noise == u_exact[u];
      support.insert(e.noise_value);
      table.entries.push_back(std::move(e));
    }
  }
  table.support.assign(support.begin(), support.end());
  return table;
}

std::vector<ConstructedMechanism> ConstructAll(const InstanceSingle& instance,
                                               MechanismOptions options) {
  std::vector<ConstructedMechanism> out;
  for (MechanismMethod m : {MechanismMethod::kEfrl, MechanismMethod::kEsfrl,
                            MechanismMethod::kSepL3, MechanismMethod::kSepL4}) {
    try {
      MechanismResult mech = BuildMechanism(instance, m, options);
      Evaluation eval = EvaluateMechanism(instance, mech);
      out.push_back({m, std::move(mech), eval});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoValidSeparation) throw;
    }
  }
  return out;
}

std::string_view ScenarioVerdict::Status() const {
  if (!premise) return "not applicable";
  return ordering_holds.value_or(false) ? "holds" : "violated";
}

ScenarioReport CompareScenarios(const JointDistribution& joint,
                                const std::string& s1, const std::string& s2,
                                const std::string& task, double epsilon,
                                double tolerance) {
  for (const auto* name : {&s1, &s2}) {
    if (!joint.HasVariable(*name)) {
      throw Error(ErrorCode::kMissingSplitVariables,
                  "split variable '" + *name + "' not in the joint");
    }
  }
  const VarList s{s1, s2}, h{task};
  ScenarioReport r;
  r.epsilon = epsilon;
  r.h_private = Entropy(joint, s);
  r.h_s2 = Entropy(joint, {s2});
  if (r.h_private <= kZeroEntropy || r.h_s2 <= kZeroEntropy) {
    throw Error(ErrorCode::kDegeneratePrivateData, "H(S2) = 0");
  }
  r.h_private_given_task = ConditionalEntropy(joint, s, h);
  r.h_s1_given_task = ConditionalEntropy(joint, {s1}, h);
  r.h_s2_given_task = ConditionalEntropy(joint, {s2}, h);
  const double h_task_given_s = ConditionalEntropy(joint, h, s);
  r.sfrl_slack = SfrlSlack(MutualInformation(joint, s, h));
  r.alpha = epsilon / r.h_private;
  r.alpha2 = epsilon / r.h_s2;

  const double c = r.sfrl_slack;
  r.l1 = h_task_given_s - r.h_private_given_task + epsilon;
  r.l2 = h_task_given_s - r.alpha * r.h_private_given_task + epsilon -
         (1.0 - r.alpha) * c;
  r.l3_bar = h_task_given_s + epsilon - c - r.alpha2 * r.h_s2_given_task;
  r.l4_bar = h_task_given_s + epsilon - (1.0 - r.alpha2) * c -
             r.alpha2 * r.h_private_given_task;

  r.scenario1.premise = r.h_private_given_task <= c + tolerance;
  r.scenario1.margin = r.l4_bar - r.l2;
  if (r.scenario1.premise) {
    r.scenario1.ordering_holds = r.scenario1.margin >= -tolerance;
  }
  r.scenario2.premise = r.h_s2_given_task <= kZeroEntropy &&
                        r.h_s1_given_task >= c - tolerance;
  r.scenario2.margin = r.l3_bar - std::max({r.l2, r.l4_bar, r.l1});
  if (r.scenario2.premise) {
    r.scenario2.ordering_holds = r.scenario2.margin >= -tolerance;
  }
  return r;
}

}  // namespace privsem
