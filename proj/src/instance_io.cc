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

#include "privsem/instance_io.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace privsem {
namespace {

using nlohmann::json;

[[noreturn]] void Fail(const std::string& field, const std::string& message) {
  throw Error(ErrorCode::kParseError, field + ": " + message);
}

// Runs `fn`, re-raising library errors as validation errors on `field`.
template <class Fn>
auto Validated(const std::string& field, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError ||
        e.code() == ErrorCode::kValidationError) {
      throw;
    }
    throw Error(ErrorCode::kValidationError, field + ": " + e.what());
  }
}

const json& Field(const json& object, const std::string& key,
                  const std::string& where) {
  if (!object.is_object()) Fail(where, "expected an object");
  auto it = object.find(key);
  if (it == object.end()) Fail(where.empty() ? key : where + "." + key, "missing");
  return *it;
}

double Number(const json& v, const std::string& field) {
  if (!v.is_number()) Fail(field, "expected a number");
  return v.get<double>();
}

std::vector<std::string> Symbols(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) Fail(field, "expected a non-empty array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i].is_string()) {
      out.push_back(v[i].get<std::string>());
    } else if (v[i].is_number_integer()) {
      out.push_back(v[i].dump());
    } else {
      Fail(field + "[" + std::to_string(i) + "]", "expected a string");
    }
  }
  return out;
}

std::string ShortNumber(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

JointDistribution ParseJoint(const json& v, std::vector<Alphabet> vars,
                             const std::string& field) {
  if (!v.is_array()) Fail(field, "expected an array of masses");
  std::size_t cells = 1;
  for (const auto& a : vars) cells *= a.size();
  if (v.size() != cells) {
    throw Error(ErrorCode::kValidationError,
                field + ": expected " + std::to_string(cells) + " masses, got " +
                    std::to_string(v.size()));
  }
  bool strings = false, numbers = false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i].is_string()) {
      strings = true;
    } else if (v[i].is_number()) {
      numbers = true;
    } else {
      Fail(field + "[" + std::to_string(i) + "]", "expected \"p/q\" or a number");
    }
  }
  if (strings && numbers) {
    throw Error(ErrorCode::kValidationError,
                field + ": " +
                    Error(ErrorCode::kMixedRepresentation,
                          "\"p/q\" strings and numbers are mixed")
                        .what());
  }
  return Validated(field, [&] {
    if (strings) {
      std::vector<Rational> mass;
      for (const auto& m : v) mass.push_back(ParseRational(m.get<std::string>()));
      return JointDistribution::FromRationals(std::move(vars), std::move(mass));
    }
    std::vector<double> mass;
    for (const auto& m : v) mass.push_back(m.get<double>());
    return JointDistribution::FromDoubles(std::move(vars), std::move(mass));
  });
}

double Epsilon(const json& root) {
  return Number(Field(root, "epsilon", ""), "epsilon");
}

DeterministicMap SemanticMap(const json& v, const std::vector<Alphabet>& source,
                             std::size_t cells) {
  if (!v.is_array() || v.size() != cells) {
    Fail("f", "expected " + std::to_string(cells) + " numbers");
  }
  std::vector<double> values;
  for (std::size_t i = 0; i < v.size(); ++i) {
    values.push_back(Number(v[i], "f[" + std::to_string(i) + "]"));
  }
  std::vector<double> labels = values;
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  std::vector<std::string> symbols;
  for (double l : labels) symbols.push_back(ShortNumber(l));
  std::vector<std::size_t> table;
  for (double x : values) {
    table.push_back(std::lower_bound(labels.begin(), labels.end(), x) -
                    labels.begin());
  }
  return Validated("f", [&] {
    return DeterministicMap(source, Alphabet("F", symbols), table, labels);
  });
}

DeterministicMap TaskMap(const json& v, const std::vector<Alphabet>& source,
                         std::size_t cells) {
  if (!v.is_array() || v.size() != cells) {
    Fail("h", "expected " + std::to_string(cells) + " labels");
  }
  const bool numeric = std::all_of(v.begin(), v.end(),
                                   [](const json& x) { return x.is_number(); });
  std::vector<std::string> symbols;
  std::vector<std::size_t> table;
  std::optional<std::vector<double>> labels;
  if (numeric) {
    std::vector<double> values;
    for (const auto& x : v) values.push_back(x.get<double>());
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (double l : sorted) symbols.push_back(ShortNumber(l));
    for (double x : values) {
      table.push_back(std::lower_bound(sorted.begin(), sorted.end(), x) -
                      sorted.begin());
    }
    labels = sorted;
  } else {
    std::map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) {
        Fail("h[" + std::to_string(i) + "]", "labels must be all strings or all numbers");
      }
      const std::string label = v[i].get<std::string>();
      auto [it, inserted] = seen.emplace(label, symbols.size());
      if (inserted) symbols.push_back(label);
      table.push_back(it->second);
    }
  }
  return Validated("h", [&] {
    return DeterministicMap(source, Alphabet("H", symbols), table, labels);
  });
}

InstanceSingle ParseSingle(const json& root) {
  const json& vars_json = Field(root, "variables", "");
  if (!vars_json.is_array() || vars_json.size() < 2) {
    Fail("variables", "expected the private variable and at least one source variable");
  }
  std::vector<Alphabet> vars;
  for (std::size_t i = 0; i < vars_json.size(); ++i) {
    const std::string where = "variables[" + std::to_string(i) + "]";
    const json& name = Field(vars_json[i], "name", where);
    if (!name.is_string()) Fail(where + ".name", "expected a string");
    auto symbols = Symbols(Field(vars_json[i], "symbols", where), where + ".symbols");
    vars.push_back(Validated(where, [&] {
      return Alphabet(name.get<std::string>(), std::move(symbols));
    }));
  }
  std::string private_name = vars.front().name();
  if (auto it = root.find("private"); it != root.end()) {
    if (!it->is_string()) Fail("private", "expected a variable name");
    private_name = it->get<std::string>();
  }
  JointDistribution joint = ParseJoint(Field(root, "joint", ""), vars, "joint");
  Validated("private", [&] { return joint.VariableIndex(private_name); });

  std::vector<Alphabet> source;
  std::size_t cells = 1;
  for (const auto& a : vars) {
    if (a.name() == private_name) continue;
    source.push_back(a);
    cells *= a.size();
  }
  DeterministicMap f = SemanticMap(Field(root, "f", ""), source, cells);
  DeterministicMap h = TaskMap(Field(root, "h", ""), source, cells);
  const double eps = Epsilon(root);
  return Validated("epsilon", [&] {
    return MakeInstance(std::move(joint), private_name, std::move(f),
                        std::move(h), eps);
  });
}

InstanceMulti ParseMulti(const json& root) {
  const json& comps = Field(root, "components", "");
  if (!comps.is_array() || comps.empty()) {
    Fail("components", "expected a non-empty array");
  }
  std::vector<JointDistribution> components;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const std::string where = "components[" + std::to_string(i) + "]";
    const json& c = comps[i];
    std::string s_name = "S" + std::to_string(i + 1);
    std::string x_name = "X" + std::to_string(i + 1);
    if (c.is_object() && c.contains("s_name")) s_name = c["s_name"].get<std::string>();
    if (c.is_object() && c.contains("x_name")) x_name = c["x_name"].get<std::string>();
    auto s = Symbols(Field(c, "s_symbols", where), where + ".s_symbols");
    auto x = Symbols(Field(c, "x_symbols", where), where + ".x_symbols");
    std::vector<Alphabet> vars = Validated(where, [&] {
      return std::vector<Alphabet>{Alphabet(s_name, s), Alphabet(x_name, x)};
    });
    components.push_back(ParseJoint(Field(c, "joint", where), vars, where + ".joint"));
  }

  const json& tasks_json = Field(root, "tasks", "");
  if (!tasks_json.is_array()) Fail("tasks", "expected an array of index lists");
  std::vector<std::vector<std::size_t>> tasks;
  for (std::size_t j = 0; j < tasks_json.size(); ++j) {
    const std::string where = "tasks[" + std::to_string(j) + "]";
    if (!tasks_json[j].is_array()) Fail(where, "expected an array of indices");
    if (tasks_json[j].empty()) {
      throw Error(ErrorCode::kValidationError, where + ": task is empty");
    }
    std::vector<std::size_t> task;
    for (const auto& idx : tasks_json[j]) {
      if (!idx.is_number_integer()) Fail(where, "indices must be integers");
      const auto k = idx.get<long long>();
      if (k < 1) {
        throw Error(ErrorCode::kValidationError,
                    where + ": component indices start at 1");
      }
      task.push_back(static_cast<std::size_t>(k - 1));
    }
    tasks.push_back(std::move(task));
  }
  const json& weights_json = Field(root, "weights", "");
  if (!weights_json.is_array()) Fail("weights", "expected an array of numbers");
  std::vector<double> weights;
  for (std::size_t j = 0; j < weights_json.size(); ++j) {
    weights.push_back(Number(weights_json[j], "weights[" + std::to_string(j) + "]"));
  }
  const double eps = Epsilon(root);
  return Validated("instance", [&] {
    return MakeMultiInstance(std::move(components), std::move(tasks),
                             std::move(weights), eps);
  });
}

}  // namespace

ParsedInstance ParseInstanceText(std::string_view text) {
  ParsedInstance out;
  try {
    out.source = json::parse(text);
  } catch (const json::parse_error& e) {
    Fail("json", e.what());
  }
  const json& root = out.source;
  if (!root.is_object()) Fail("json", "top level must be an object");
  const json& version = Field(root, "version", "");
  if (!version.is_number_integer() || version.get<long long>() != kInstanceVersion) {
    Fail("version", "unsupported version " + version.dump() + " (expected " +
                        std::to_string(kInstanceVersion) + ")");
  }
  const json& mode = Field(root, "mode", "");
  if (!mode.is_string()) Fail("mode", "expected \"single\" or \"multi\"");
  out.mode = mode.get<std::string>();
  if (auto it = root.find("seed"); it != root.end()) {
    if (!it->is_number_unsigned()) Fail("seed", "expected a non-negative integer");
    out.seed = it->get<std::uint64_t>();
  }
  if (out.mode == "single") {
    out.single = ParseSingle(root);
  } else if (out.mode == "multi") {
    out.multi = ParseMulti(root);
  } else {
    Fail("mode", "expected \"single\" or \"multi\", got \"" + out.mode + "\"");
  }
  return out;
}

ParsedInstance ParseInstanceFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(path, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseInstanceText(buf.str());
}

InstanceSingle WithEpsilon(const InstanceSingle& instance, double epsilon) {
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    throw Error(ErrorCode::kEpsilonOutOfRange, "epsilon must be >= 0");
  }
  InstanceSingle copy = instance;
  copy.epsilon = epsilon;
  return copy;
}

}  // namespace privsem
