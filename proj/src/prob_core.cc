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

#include "privsem/prob_core.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

namespace privsem {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNegativeMass: return "NegativeMass";
    case ErrorCode::kMassNotOne: return "MassNotOne";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kMixedRepresentation: return "MixedRepresentation";
    case ErrorCode::kUnknownVariable: return "UnknownVariable";
    case ErrorCode::kOverlappingSubsets: return "OverlappingSubsets";
    case ErrorCode::kSourceMismatch: return "SourceMismatch";
    case ErrorCode::kNameCollision: return "NameCollision";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNonRationalInput: return "NonRationalInput";
    case ErrorCode::kBijectionMismatch: return "BijectionMismatch";
    case ErrorCode::kEpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::kDegeneratePrivateData: return "DegeneratePrivateData";
    case ErrorCode::kAlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::kSymbolCollision: return "SymbolCollision";
    case ErrorCode::kNoValidSeparation: return "NoValidSeparation";
    case ErrorCode::kInconsistentMechanism: return "InconsistentMechanism";
    case ErrorCode::kMissingNumericLabels: return "MissingNumericLabels";
    case ErrorCode::kMissingSplitVariables: return "MissingSplitVariables";
    case ErrorCode::kDegenerateComponent: return "DegenerateComponent";
    case ErrorCode::kComponentEpsilonOutOfRange:
      return "ComponentEpsilonOutOfRange";
    case ErrorCode::kGridTooLarge: return "GridTooLarge";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
  }
  return "Unknown";
}

namespace {

using boost::multiprecision::cpp_int;

cpp_int ParseInteger(std::string_view digits, std::string_view whole) {
  if (digits.empty() ||
      !std::all_of(digits.begin(), digits.end(),
                   [](char c) { return c >= '0' && c <= '9'; })) {
    throw Error(ErrorCode::kParseError,
                "malformed number '" + std::string(whole) + "'");
  }
  return cpp_int(std::string(digits));
}

std::size_t CheckedProduct(std::span<const std::size_t> sizes) {
  std::size_t total = 1;
  for (std::size_t s : sizes) {
    if (s == 0) {
      throw Error(ErrorCode::kShapeMismatch, "alphabet of size zero");
    }
    if (total > kMaxCells / s) {
      throw Error(ErrorCode::kTooLarge,
                  "table exceeds " + std::to_string(kMaxCells) + " cells");
    }
    total *= s;
  }
  return total;
}

std::vector<std::size_t> ShapeOf(const std::vector<Alphabet>& variables) {
  std::vector<std::size_t> shape;
  shape.reserve(variables.size());
  for (const auto& v : variables) shape.push_back(v.size());
  return shape;
}

void CheckDistinctNames(const std::vector<Alphabet>& variables) {
  std::set<std::string> seen;
  for (const auto& v : variables) {
    if (!seen.insert(v.name()).second) {
      throw Error(ErrorCode::kNameCollision,
                  "variable '" + v.name() + "' appears twice");
    }
  }
}

// Index of the marginal cell for every cell of `joint`.
std::vector<std::size_t> ProjectionMap(const JointDistribution& joint,
                                       std::span<const std::size_t> indices,
                                       std::size_t* marginal_cells) {
  const auto& shape = joint.shape();
  std::vector<std::size_t> marginal_stride(shape.size(), 0);
  std::size_t stride = 1;
  for (std::size_t k = indices.size(); k-- > 0;) {
    marginal_stride[indices[k]] = stride;
    stride *= shape[indices[k]];
  }
  *marginal_cells = stride;

  std::vector<std::size_t> map(joint.num_cells());
  std::vector<std::size_t> coords(shape.size(), 0);
  std::size_t target = 0;
  for (std::size_t cell = 0; cell < map.size(); ++cell) {
    map[cell] = target;
    // Odometer increment over the full table, last variable fastest.
    for (std::size_t d = shape.size(); d-- > 0;) {
      if (++coords[d] < shape[d]) {
        target += marginal_stride[d];
        break;
      }
      target -= marginal_stride[d] * (shape[d] - 1);
      coords[d] = 0;
    }
  }
  return map;
}

std::vector<double> MarginalProbabilities(const JointDistribution& joint,
                                          std::span<const std::size_t> idx) {
  std::size_t cells = 0;
  auto map = ProjectionMap(joint, idx, &cells);
  std::vector<double> out(cells, 0.0);
  const auto& p = joint.probabilities();
  for (std::size_t i = 0; i < p.size(); ++i) out[map[i]] += p[i];
  return out;
}

double EntropyOfMass(const std::vector<double>& mass) {
  double h = 0.0;
  for (double p : mass) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double EntropyByIndex(const JointDistribution& joint,
                      std::span<const std::size_t> idx) {
  if (idx.empty()) return 0.0;
  return EntropyOfMass(MarginalProbabilities(joint, idx));
}

std::vector<std::size_t> ResolveDistinct(const JointDistribution& joint,
                                         const VarList& vars) {
  auto idx = joint.VariableIndices(vars);
  std::set<std::size_t> unique(idx.begin(), idx.end());
  if (unique.size() != idx.size()) {
    throw Error(ErrorCode::kOverlappingSubsets,
                "a variable is listed twice in one subset");
  }
  return idx;
}

}  // namespace

Rational ParseRational(std::string_view text) {
  std::string_view t = text;
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) {
    t.remove_prefix(1);
  }
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) {
    t.remove_suffix(1);
  }
  bool negative = false;
  if (!t.empty() && (t.front() == '-' || t.front() == '+')) {
    negative = t.front() == '-';
    t.remove_prefix(1);
  }
  Rational value;
  if (auto slash = t.find('/'); slash != std::string_view::npos) {
    cpp_int num = ParseInteger(t.substr(0, slash), text);
    cpp_int den = ParseInteger(t.substr(slash + 1), text);
    if (den == 0) {
      throw Error(ErrorCode::kParseError,
                  "zero denominator in '" + std::string(text) + "'");
    }
    value = Rational(num, den);
  } else if (auto dot = t.find('.'); dot != std::string_view::npos) {
    std::string_view whole = t.substr(0, dot);
    std::string_view frac = t.substr(dot + 1);
    if (whole.empty() && frac.empty()) {
      throw Error(ErrorCode::kParseError,
                  "malformed number '" + std::string(text) + "'");
    }
    cpp_int w = whole.empty() ? cpp_int(0) : ParseInteger(whole, text);
    cpp_int f = frac.empty() ? cpp_int(0) : ParseInteger(frac, text);
    cpp_int scale = boost::multiprecision::pow(cpp_int(10),
                                               static_cast<unsigned>(frac.size()));
    value = Rational(w * scale + f, scale);
  } else {
    value = Rational(ParseInteger(t, text));
  }
  return negative ? Rational(-value) : value;
}

double ToDouble(const Rational& r) { return r.convert_to<double>(); }

Rational FromDouble(double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kInvalidArgument, "non-finite value");
  }
  if (value == 0.0) return Rational(0);
  int exponent = 0;
  double mantissa = std::frexp(value, &exponent);
  // mantissa * 2^53 is an integer for every finite double.
  auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational r{cpp_int(scaled)};
  if (exponent > 0) {
    r *= Rational(boost::multiprecision::pow(cpp_int(2),
                                             static_cast<unsigned>(exponent)));
  } else if (exponent < 0) {
    r /= Rational(boost::multiprecision::pow(cpp_int(2),
                                             static_cast<unsigned>(-exponent)));
  }
  return r;
}

Alphabet::Alphabet(std::string name, std::vector<std::string> symbols)
    : name_(std::move(name)), symbols_(std::move(symbols)) {
  if (symbols_.empty()) {
    throw Error(ErrorCode::kShapeMismatch,
                "alphabet '" + name_ + "' has no symbols");
  }
  std::unordered_set<std::string> seen;
  for (const auto& s : symbols_) {
    if (!seen.insert(s).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "alphabet '" + name_ + "' repeats symbol '" + s + "'");
    }
  }
}

Alphabet Alphabet::Indexed(std::string name, std::size_t size) {
  std::vector<std::string> symbols;
  symbols.reserve(size);
  for (std::size_t i = 0; i < size; ++i) symbols.push_back(std::to_string(i));
  return Alphabet(std::move(name), std::move(symbols));
}

std::optional<std::size_t> Alphabet::Find(std::string_view symbol) const {
  auto it = std::find(symbols_.begin(), symbols_.end(), symbol);
  if (it == symbols_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - symbols_.begin());
}

Alphabet Alphabet::Renamed(std::string name) const {
  Alphabet copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

JointDistribution::JointDistribution(std::vector<Alphabet> variables,
                                     std::vector<double> probabilities,
                                     std::optional<std::vector<Rational>> exact)
    : variables_(std::move(variables)),
      shape_(ShapeOf(variables_)),
      strides_(shape_.size(), 1),
      probabilities_(std::move(probabilities)),
      exact_(std::move(exact)) {
  for (std::size_t d = shape_.size(); d-- > 1;) {
    strides_[d - 1] = strides_[d] * shape_[d];
  }
}

JointDistribution ValidateJoint(std::vector<Alphabet> variables,
                                std::vector<double> mass) {
  return JointDistribution::FromDoubles(std::move(variables), std::move(mass));
}

JointDistribution ValidateJoint(std::vector<Alphabet> variables,
                                std::vector<Rational> mass) {
  return JointDistribution::FromRationals(std::move(variables),
                                          std::move(mass));
}

JointDistribution JointDistribution::FromDoubles(std::vector<Alphabet> variables,
                                                 std::vector<double> mass) {
  CheckDistinctNames(variables);
  auto shape = ShapeOf(variables);
  std::size_t cells = CheckedProduct(shape);
  if (mass.size() != cells) {
    throw Error(ErrorCode::kShapeMismatch,
                "table has " + std::to_string(mass.size()) +
                    " entries, alphabets need " + std::to_string(cells));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (!std::isfinite(mass[i]) || mass[i] < 0.0) {
      std::ostringstream os;
      os << "entry " << i << " is " << mass[i];
      throw Error(ErrorCode::kNegativeMass, os.str());
    }
    total += mass[i];
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "total mass " << total << " (deficit " << 1.0 - total << ")";
    throw Error(ErrorCode::kMassNotOne, os.str());
  }
  return JointDistribution(std::move(variables), std::move(mass), std::nullopt);
}

JointDistribution JointDistribution::FromRationals(
    std::vector<Alphabet> variables, std::vector<Rational> mass) {
  CheckDistinctNames(variables);
  auto shape = ShapeOf(variables);
  std::size_t cells = CheckedProduct(shape);
  if (mass.size() != cells) {
    throw Error(ErrorCode::kShapeMismatch,
                "table has " + std::to_string(mass.size()) +
                    " entries, alphabets need " + std::to_string(cells));
  }
  Rational total = 0;
  std::vector<double> view(mass.size());
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] < 0) {
      throw Error(ErrorCode::kNegativeMass,
                  "entry " + std::to_string(i) + " is " + mass[i].str());
    }
    total += mass[i];
    view[i] = privsem::ToDouble(mass[i]);
  }
  if (total != 1) {
    throw Error(ErrorCode::kMassNotOne,
                "total mass " + total.str() + " (deficit " +
                    Rational(1 - total).str() + ")");
  }
  return JointDistribution(std::move(variables), std::move(view),
                           std::move(mass));
}

const std::vector<Rational>& JointDistribution::exact() const {
  if (!exact_) {
    throw Error(ErrorCode::kNonRationalInput,
                "distribution is stored as doubles");
  }
  return *exact_;
}

bool JointDistribution::HasVariable(std::string_view name) const {
  return std::any_of(variables_.begin(), variables_.end(),
                     [&](const Alphabet& a) { return a.name() == name; });
}

std::size_t JointDistribution::VariableIndex(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name() == name) return i;
  }
  throw Error(ErrorCode::kUnknownVariable,
              "no variable named '" + std::string(name) + "'");
}

std::vector<std::size_t> JointDistribution::VariableIndices(
    std::span<const std::string> names) const {
  std::vector<std::size_t> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(VariableIndex(n));
  return out;
}

std::size_t JointDistribution::CellIndex(
    std::span<const std::size_t> coords) const {
  if (coords.size() != shape_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "coordinate arity mismatch");
  }
  std::size_t cell = 0;
  for (std::size_t d = 0; d < coords.size(); ++d) {
    if (coords[d] >= shape_[d]) {
      throw Error(ErrorCode::kShapeMismatch, "coordinate out of range");
    }
    cell += coords[d] * strides_[d];
  }
  return cell;
}

std::vector<std::size_t> JointDistribution::Coordinates(std::size_t cell) const {
  std::vector<std::size_t> coords(shape_.size());
  for (std::size_t d = 0; d < shape_.size(); ++d) {
    coords[d] = cell / strides_[d];
    cell %= strides_[d];
  }
  return coords;
}

JointDistribution JointDistribution::Marginal(
    std::span<const std::string> names) const {
  auto idx = VariableIndices(names);
  std::set<std::size_t> unique(idx.begin(), idx.end());
  if (unique.size() != idx.size()) {
    throw Error(ErrorCode::kOverlappingSubsets,
                "marginal lists a variable twice");
  }
  std::vector<Alphabet> vars;
  for (std::size_t i : idx) vars.push_back(variables_[i]);
  std::size_t cells = 0;
  auto map = ProjectionMap(*this, idx, &cells);
  std::vector<double> view(cells, 0.0);
  if (exact_) {
    std::vector<Rational> mass(cells, Rational(0));
    for (std::size_t i = 0; i < map.size(); ++i) {
      if ((*exact_)[i] != 0) mass[map[i]] += (*exact_)[i];
    }
    for (std::size_t i = 0; i < cells; ++i) view[i] = privsem::ToDouble(mass[i]);
    return JointDistribution(std::move(vars), std::move(view), std::move(mass));
  }
  for (std::size_t i = 0; i < map.size(); ++i) {
    view[map[i]] += probabilities_[i];
  }
  return JointDistribution(std::move(vars), std::move(view), std::nullopt);
}

JointDistribution JointDistribution::RenameVariable(std::string_view from,
                                                    std::string to) const {
  std::size_t i = VariableIndex(from);
  if (from != to && HasVariable(to)) {
    throw Error(ErrorCode::kNameCollision,
                "variable '" + to + "' already exists");
  }
  JointDistribution copy = *this;
  copy.variables_[i] = variables_[i].Renamed(std::move(to));
  return copy;
}

JointDistribution JointDistribution::ToDouble() const {
  return JointDistribution(variables_, probabilities_, std::nullopt);
}

bool SameDistribution(const JointDistribution& a, const JointDistribution& b,
                      double tolerance) {
  if (a.variables() != b.variables()) return false;
  if (a.is_exact() && b.is_exact()) return a.exact() == b.exact();
  for (std::size_t i = 0; i < a.num_cells(); ++i) {
    if (std::abs(a.probabilities()[i] - b.probabilities()[i]) > tolerance) {
      return false;
    }
  }
  return true;
}

DeterministicMap::DeterministicMap(std::vector<Alphabet> source,
                                   Alphabet target,
                                   std::vector<std::size_t> table,
                                   std::optional<std::vector<double>> labels)
    : source_(std::move(source)),
      target_(std::move(target)),
      table_(std::move(table)),
      numeric_labels_(std::move(labels)) {
  std::size_t cells = CheckedProduct(ShapeOf(source_));
  if (table_.size() != cells) {
    throw Error(ErrorCode::kShapeMismatch,
                "map table has " + std::to_string(table_.size()) +
                    " entries, source needs " + std::to_string(cells));
  }
  for (std::size_t t : table_) {
    if (t >= target_.size()) {
      throw Error(ErrorCode::kShapeMismatch, "map entry outside target");
    }
  }
  if (numeric_labels_) {
    if (numeric_labels_->size() != target_.size()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "need one numeric label per target symbol");
    }
    std::set<double> seen;
    for (double v : *numeric_labels_) {
      if (!std::isfinite(v) || !seen.insert(v).second) {
        throw Error(ErrorCode::kInvalidArgument,
                    "numeric labels must be finite and distinct");
      }
    }
  }
}

DeterministicMap DeterministicMap::Identity(const Alphabet& alphabet,
                                            std::string target_name) {
  std::vector<std::size_t> table(alphabet.size());
  std::iota(table.begin(), table.end(), 0);
  std::vector<double> labels(alphabet.size());
  std::iota(labels.begin(), labels.end(), 0.0);
  return DeterministicMap({alphabet}, alphabet.Renamed(std::move(target_name)),
                          std::move(table), std::move(labels));
}

std::size_t DeterministicMap::Apply(
    std::span<const std::size_t> source_coords) const {
  std::size_t cell = 0;
  for (std::size_t d = 0; d < source_.size(); ++d) {
    cell = cell * source_[d].size() + source_coords[d];
  }
  return table_[cell];
}

InfoValue Entropy(const JointDistribution& joint, const VarList& vars) {
  auto idx = ResolveDistinct(joint, vars);
  return {EntropyByIndex(joint, idx), InfoKind::kEntropy};
}

InfoValue ConditionalEntropy(const JointDistribution& joint, const VarList& of,
                             const VarList& given) {
  VarList all = of;
  all.insert(all.end(), given.begin(), given.end());
  auto both = ResolveDistinct(joint, all);
  auto cond = joint.VariableIndices(given);
  return {EntropyByIndex(joint, both) - EntropyByIndex(joint, cond),
          InfoKind::kConditionalEntropy};
}

InfoValue MutualInformation(const JointDistribution& joint, const VarList& a,
                            const VarList& b, const VarList& c) {
  VarList ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  ResolveDistinct(joint, ab);
  ResolveDistinct(joint, c);
  InfoKind kind = c.empty() ? InfoKind::kMutualInformation
                            : InfoKind::kConditionalMutualInformation;
  if (a.empty() || b.empty()) return {0.0, kind};

  // C may share variables with A or B; subsets are taken as sets.
  auto with_c = [&](const VarList& v) {
    auto idx = joint.VariableIndices(v);
    auto cc = joint.VariableIndices(c);
    std::set<std::size_t> u(idx.begin(), idx.end());
    u.insert(cc.begin(), cc.end());
    return std::vector<std::size_t>(u.begin(), u.end());
  };
  const double value = EntropyByIndex(joint, with_c(a)) +
                       EntropyByIndex(joint, with_c(b)) -
                       EntropyByIndex(joint, with_c(ab)) -
                       EntropyByIndex(joint, joint.VariableIndices(c));
  return {value, kind};
}

JointDistribution ApplyMap(const JointDistribution& joint,
                           const DeterministicMap& map,
                           std::string new_variable) {
  std::vector<std::size_t> source_idx;
  for (const auto& alphabet : map.source()) {
    if (!joint.HasVariable(alphabet.name())) {
      throw Error(ErrorCode::kSourceMismatch,
                  "map reads unknown variable '" + alphabet.name() + "'");
    }
    std::size_t i = joint.VariableIndex(alphabet.name());
    if (!(joint.variable(i) == alphabet)) {
      throw Error(ErrorCode::kSourceMismatch,
                  "alphabet of '" + alphabet.name() + "' differs from map");
    }
    source_idx.push_back(i);
  }
  if (joint.HasVariable(new_variable)) {
    throw Error(ErrorCode::kNameCollision,
                "variable '" + new_variable + "' already exists");
  }
  std::vector<Alphabet> vars = joint.variables();
  vars.push_back(map.target().Renamed(new_variable));
  const std::size_t width = map.target().size();
  std::size_t cells = joint.num_cells();
  if (cells > kMaxCells / width) {
    throw Error(ErrorCode::kTooLarge, "mapped table too large");
  }

  std::vector<std::size_t> target_of(cells);
  std::vector<std::size_t> src(source_idx.size());
  for (std::size_t cell = 0; cell < cells; ++cell) {
    auto coords = joint.Coordinates(cell);
    for (std::size_t k = 0; k < source_idx.size(); ++k) {
      src[k] = coords[source_idx[k]];
    }
    target_of[cell] = cell * width + map.Apply(src);
  }
  if (joint.is_exact()) {
    std::vector<Rational> mass(cells * width, Rational(0));
    for (std::size_t cell = 0; cell < cells; ++cell) {
      mass[target_of[cell]] = joint.exact()[cell];
    }
    return JointDistribution::FromRationals(std::move(vars), std::move(mass));
  }
  std::vector<double> mass(cells * width, 0.0);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    mass[target_of[cell]] = joint.probabilities()[cell];
  }
  return JointDistribution::FromDoubles(std::move(vars), std::move(mass));
}

JointDistribution ProductCompose(std::span<const JointDistribution> parts) {
  if (parts.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "nothing to compose");
  }
  std::vector<Alphabet> vars;
  bool exact = true;
  std::vector<std::size_t> part_cells;
  for (const auto& p : parts) {
    for (const auto& v : p.variables()) vars.push_back(v);
    exact = exact && p.is_exact();
    part_cells.push_back(p.num_cells());
  }
  CheckDistinctNames(vars);
  std::size_t cells = CheckedProduct(part_cells);

  std::vector<std::size_t> coords(parts.size(), 0);
  if (exact) {
    std::vector<Rational> mass(cells);
    for (std::size_t cell = 0; cell < cells; ++cell) {
      Rational m = 1;
      for (std::size_t k = 0; k < parts.size() && m != 0; ++k) {
        m *= parts[k].exact()[coords[k]];
      }
      mass[cell] = std::move(m);
      for (std::size_t k = parts.size(); k-- > 0;) {
        if (++coords[k] < part_cells[k]) break;
        coords[k] = 0;
      }
    }
    return JointDistribution::FromRationals(std::move(vars), std::move(mass));
  }
  std::vector<double> mass(cells);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    double m = 1.0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      m *= parts[k].probabilities()[coords[k]];
    }
    mass[cell] = m;
    for (std::size_t k = parts.size(); k-- > 0;) {
      if (++coords[k] < part_cells[k]) break;
      coords[k] = 0;
    }
  }
  // Rounding in the products can drift the total by a few ulps.
  return JointDistribution::FromDoubles(std::move(vars), std::move(mass));
}

double KeyIdentityResidual(const JointDistribution& joint, const VarList& s,
                           const VarList& x, const VarList& u) {
  VarList us = u;
  us.insert(us.end(), s.begin(), s.end());
  double lhs = MutualInformation(joint, x, u);
  double rhs = MutualInformation(joint, s, u) +
               ConditionalEntropy(joint, x, s) -
               ConditionalEntropy(joint, x, us) -
               MutualInformation(joint, s, u, x);
  return lhs - rhs;
}

std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 over the pair.
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::Below(std::size_t n) {
  return static_cast<std::size_t>(Uniform() * static_cast<double>(n)) % n;
}

namespace {

std::vector<Alphabet> DefaultVariables(std::span<const std::size_t> shape) {
  std::vector<Alphabet> vars;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    vars.push_back(Alphabet::Indexed("V" + std::to_string(k), shape[k]));
  }
  return vars;
}

}  // namespace

JointDistribution RandomJoint(std::span<const std::size_t> shape,
                              std::uint64_t seed, RandomJointOptions options) {
  auto vars = DefaultVariables(shape);
  std::size_t cells = CheckedProduct(shape);
  Rng rng(seed);
  std::vector<double> w(cells);
  double total = 0.0;
  for (auto& x : w) {
    bool zero = options.zero_fraction > 0.0 && rng.Uniform() < options.zero_fraction;
    // Exponential weights give a uniform draw from the simplex.
    x = zero ? 0.0 : -std::log(1.0 - rng.Uniform());
    total += x;
  }
  if (total == 0.0) {
    w[rng.Below(cells)] = 1.0;
    total = 1.0;
  }
  for (auto& x : w) x /= total;
  return JointDistribution::FromDoubles(std::move(vars), std::move(w));
}

JointDistribution RandomRationalJoint(std::span<const std::size_t> shape,
                                      std::uint64_t seed,
                                      std::uint32_t max_weight,
                                      double zero_fraction) {
  if (max_weight == 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_weight must be positive");
  }
  auto vars = DefaultVariables(shape);
  std::size_t cells = CheckedProduct(shape);
  Rng rng(seed);
  std::vector<std::uint64_t> w(cells);
  std::uint64_t total = 0;
  for (auto& x : w) {
    bool zero = zero_fraction > 0.0 && rng.Uniform() < zero_fraction;
    x = zero ? 0 : 1 + rng.Below(max_weight);
    total += x;
  }
  if (total == 0) {
    w[rng.Below(cells)] = 1;
    total = 1;
  }
  std::vector<Rational> mass;
  mass.reserve(cells);
  for (auto x : w) mass.emplace_back(cpp_int(x), cpp_int(total));
  return JointDistribution::FromRationals(std::move(vars), std::move(mass));
}

}  // namespace privsem
