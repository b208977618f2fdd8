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

#include "privsem/report.h"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>

namespace privsem {
namespace {

bool IsScalar(const Json& v) { return !v.is_array() && !v.is_object(); }

void Dump(const Json& v, int depth, std::string& out) {
  const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
  if (v.is_object()) {
    if (v.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (const auto& [key, item] : v.items()) {
      if (!first) out += ",\n";
      first = false;
      out += pad + Json(key).dump() + ": ";
      Dump(item, depth + 1, out);
    }
    out += "\n" + close + "}";
  } else if (v.is_array()) {
    const bool flat = std::all_of(v.begin(), v.end(), IsScalar);
    if (v.empty() || flat) {
      out += "[";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        Dump(v[i], depth + 1, out);
      }
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ",\n";
      out += pad;
      Dump(v[i], depth + 1, out);
    }
    out += "\n" + close + "]";
  } else if (v.is_number_float()) {
    out += FormatDouble(v.get<double>());
  } else {
    out += v.dump();
  }
}

Json Optional(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

std::string FormatDouble(double v) {
  if (!std::isfinite(v)) return "null";
  if (v == 0.0) return "0";  // folds -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string DumpJson(const Json& value) {
  std::string out;
  Dump(value, 0, out);
  out += "\n";
  return out;
}

std::string InstanceDigest(const nlohmann::json& source) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : source.dump()) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, hash);
  return buf;
}

Json JointJson(const JointDistribution& joint) {
  Json vars = Json::array();
  for (const auto& a : joint.variables()) {
    vars.push_back({{"name", a.name()}, {"symbols", a.symbols()}});
  }
  Json mass = Json::array();
  if (joint.is_exact()) {
    for (const auto& m : joint.exact()) mass.push_back(m.str());
  } else {
    for (double m : joint.probabilities()) mass.push_back(m);
  }
  return {{"variables", vars}, {"exact", joint.is_exact()}, {"mass", mass}};
}

Json ShapeJson(const SeparationShape& shape) {
  return {{"s1", shape.s1_size}, {"s2", shape.s2_size}, {"padded", shape.padded}};
}

Json BoundsJson(const BoundsReportSingle& b) {
  Json seps = Json::array();
  for (const auto& t : b.separations) {
    Json j = ShapeJson(t.shape);
    j["h_s2"] = t.h_s2;
    j["h_s2_given_task"] = t.h_s2_given_task;
    j["valid"] = t.valid;
    if (t.valid) {
      j["alpha2"] = t.alpha2;
      j["l3_penalty"] = t.l3_penalty;
      j["l4_penalty"] = t.l4_penalty;
    }
    seps.push_back(j);
  }
  return {
      {"epsilon", b.epsilon},
      {"h_private", b.h_private},
      {"h_task", b.h_task},
      {"h_task_given_private", b.h_task_given_private},
      {"h_private_given_task", b.h_private_given_task},
      {"mutual_information", b.mutual_information},
      {"sfrl_slack", b.sfrl_slack},
      {"alpha", b.alpha},
      {"l1", b.l1},
      {"l1_alt", b.l1_alt},
      {"l2", b.l2},
      {"l3", Optional(b.l3)},
      {"l4", Optional(b.l4)},
      {"l3_separation", b.l3_separation ? ShapeJson(*b.l3_separation) : Json(nullptr)},
      {"l4_separation", b.l4_separation ? ShapeJson(*b.l4_separation) : Json(nullptr)},
      {"effective_lower", b.effective_lower},
      {"upper", b.upper},
      {"tight_l1", b.tight_l1},
      {"separations", seps},
  };
}

Json EvaluationJson(const Evaluation& e) {
  return {{"leakage", e.leakage},
          {"utility", e.utility},
          {"conditional_leakage", e.conditional_leakage},
          {"identity_residual", e.identity_residual}};
}

Json MechanismJson(const InstanceSingle& instance, const MechanismResult& m) {
  Json j;
  j["method"] = std::string(MethodName(m.method));
  j["alpha"] = m.alpha;
  j["u_alphabet"] = m.extended.variable(3).symbols();
  j["u_labels"] = m.u_labels;
  if (m.chosen_separation) {
    Json sep = ShapeJson(m.chosen_separation->shape());
    Json pairs = Json::array();
    for (const auto& [a, b] : m.chosen_separation->bijection()) {
      pairs.push_back(Json::array({a, b}));
    }
    sep["bijection"] = pairs;
    j["chosen_separation"] = sep;
  } else {
    j["chosen_separation"] = nullptr;
  }
  if (m.representation) {
    const FrlResult& r = *m.representation;
    j["representation"] = {
        {"backend", r.backend == FrlBackend::kFrl ? "frl" : "sfrl"},
        {"atoms", r.u_alphabet.size()},
        {"unreduced_atoms", r.unreduced_atoms},
        {"i_xu", r.measured.i_xu},
        {"h_y_given_xu", r.measured.h_y_given_xu},
        {"i_xu_given_y", r.measured.i_xu_given_y},
        {"sfrl_bound", r.sfrl_bound},
        {"meets_sfrl_bound", r.meets_sfrl_bound},
    };
  } else {
    j["representation"] = nullptr;
  }
  j["extended"] = JointJson(m.extended);
  if (instance.semantic.numeric_labels()) {
    NoiseTable noise = ExtractNoise(instance, m);
    const auto& ext = m.extended;
    Json entries = Json::array();
    for (const auto& e : noise.entries) {
      entries.push_back({{"s", ext.variable(0).symbol(e.s)},
                         {"f", ext.variable(1).symbol(e.f)},
                         {"h", ext.variable(2).symbol(e.h)},
                         {"u", ext.variable(3).symbol(e.u)},
                         {"noise", e.noise.str()},
                         {"noise_value", e.noise_value},
                         {"probability", e.probability}});
    }
    j["noise"] = {{"support", noise.support},
                  {"reconstruction_exact", noise.reconstruction_exact},
                  {"entries", entries}};
  } else {
    j["noise"] = nullptr;
  }
  return j;
}

Json SandwichJson(const SandwichReport& r) {
  return {{"best_constructed", r.best_constructed},
          {"best_searched", r.best_searched},
          {"best_found_utility", r.best_found_utility},
          {"lower_used", r.lower_used},
          {"upper_used", r.upper_used},
          {"feasible", r.feasible},
          {"violations", r.violations}};
}

Json CoefficientsJson(const TaskCoefficients& c) {
  Json g3 = Json::array(), g4 = Json::array();
  for (const auto& v : c.gamma3) g3.push_back(Optional(v));
  for (const auto& v : c.gamma4) g4.push_back(Optional(v));
  return {{"mu", c.mu},         {"gamma1", c.gamma1}, {"gamma3", g3},
          {"gamma4", g4},       {"delta1", c.delta1}, {"delta2", c.delta2},
          {"delta", c.delta}};
}

Json MultiBoundsJson(const BoundsReportMulti& b) {
  Json lowers = Json::object();
  const AllocationRule rules[] = {AllocationRule::kL1, AllocationRule::kL2,
                                  AllocationRule::kL3, AllocationRule::kL4};
  for (std::size_t k = 0; k < b.lowers.size(); ++k) {
    const std::string name(RuleName(rules[k]));
    if (!b.lowers[k]) {
      lowers[name] = nullptr;
      continue;
    }
    lowers[name] = {{"value", b.lowers[k]->value},
                    {"allocation", b.lowers[k]->allocation},
                    {"beta", b.lowers[k]->beta}};
  }
  return {{"epsilon", b.epsilon},
          {"upper", b.upper},
          {"lowers", lowers},
          {"effective_lower", b.effective_lower}};
}

Json MultiEvaluationJson(const MultiEvaluation& e) {
  return {{"leakage", e.leakage},
          {"task_utilities", e.task_utilities},
          {"objective", e.objective},
          {"component_leakage", e.component_leakage},
          {"component_utility", e.component_utility},
          {"additivity_residual", e.additivity_residual},
          {"leakage_residual", e.leakage_residual},
          {"dense", e.dense},
          {"cross_independent", e.cross_independent},
          {"cross_check_exact", e.cross_check_exact}};
}

}  // namespace privsem
