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

#ifndef PRIVSEM_PROB_CORE_H_
#define PRIVSEM_PROB_CORE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "privsem/error.h"

namespace privsem {

using Rational = boost::multiprecision::cpp_rational;

// Dense tables above this many cells are rejected with ErrorCode::kTooLarge.
inline constexpr std::size_t kMaxCells = 1'000'000;

// Tolerance on the total mass of double-valued tables.
inline constexpr double kMassTolerance = 1e-12;

// Parses "p/q", an integer, or a plain decimal ("0.25") into an exact
// rational. Throws kParseError on malformed text or a zero denominator.
Rational ParseRational(std::string_view text);

double ToDouble(const Rational& r);

// Exact rational value of a finite double.
Rational FromDouble(double value);

class Alphabet {
 public:
  Alphabet() = default;
  Alphabet(std::string name, std::vector<std::string> symbols);

  // Symbols "0", "1", ..., "size-1".
  static Alphabet Indexed(std::string name, std::size_t size);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }
  const std::string& symbol(std::size_t i) const { return symbols_.at(i); }
  std::optional<std::size_t> Find(std::string_view symbol) const;
  Alphabet Renamed(std::string name) const;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::string name_;
  std::vector<std::string> symbols_;
};

enum class Representation { kDouble, kRational };

// Probability mass function over the product of a list of named finite
// alphabets. The table is dense and row-major with the first variable
// outermost. Rational tables keep an exact copy next to the double view;
// every structural operation on them is exact.
class JointDistribution {
 public:
  // Both factories validate: non-negative masses, total one (exactly for
  // rationals, within kMassTolerance for doubles), shape == product of
  // alphabet sizes. They never renormalize.
  static JointDistribution FromDoubles(std::vector<Alphabet> variables,
                                       std::vector<double> mass);
  static JointDistribution FromRationals(std::vector<Alphabet> variables,
                                         std::vector<Rational> mass);

  const std::vector<Alphabet>& variables() const { return variables_; }
  const Alphabet& variable(std::size_t i) const { return variables_.at(i); }
  std::size_t num_variables() const { return variables_.size(); }
  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t num_cells() const { return probabilities_.size(); }

  Representation representation() const {
    return exact_ ? Representation::kRational : Representation::kDouble;
  }
  bool is_exact() const { return exact_.has_value(); }

  const std::vector<double>& probabilities() const { return probabilities_; }
  // Throws kNonRationalInput for double tables.
  const std::vector<Rational>& exact() const;

  bool HasVariable(std::string_view name) const;
  std::size_t VariableIndex(std::string_view name) const;
  std::vector<std::size_t> VariableIndices(
      std::span<const std::string> names) const;

  std::size_t CellIndex(std::span<const std::size_t> coords) const;
  std::vector<std::size_t> Coordinates(std::size_t cell) const;
  double Probability(std::span<const std::size_t> coords) const {
    return probabilities_[CellIndex(coords)];
  }

  // Marginal over `names`, in the given order.
  JointDistribution Marginal(std::span<const std::string> names) const;
  JointDistribution Marginal(std::initializer_list<std::string> names) const {
    return Marginal(std::vector<std::string>(names));
  }
  JointDistribution RenameVariable(std::string_view from, std::string to) const;
  // Same table with the exact copy dropped.
  JointDistribution ToDouble() const;

 private:
  JointDistribution(std::vector<Alphabet> variables,
                    std::vector<double> probabilities,
                    std::optional<std::vector<Rational>> exact);

  std::vector<Alphabet> variables_;
  std::vector<std::size_t> shape_;
  std::vector<std::size_t> strides_;
  std::vector<double> probabilities_;
  std::optional<std::vector<Rational>> exact_;
};

// Exact equality for two rational tables, |difference| <= tolerance
// otherwise. Variables must match in name, symbols and order.
bool SameDistribution(const JointDistribution& a, const JointDistribution& b,
                      double tolerance = kMassTolerance);

// A total function from a product of source alphabets to a target alphabet.
class DeterministicMap {
 public:
  DeterministicMap() = default;
  // `table` is row-major over `source` (first alphabet outermost).
  // `numeric_labels`, when given, holds one distinct real per target symbol.
  DeterministicMap(std::vector<Alphabet> source, Alphabet target,
                   std::vector<std::size_t> table,
                   std::optional<std::vector<double>> numeric_labels = {});

  // Identity on `alphabet` into a copy named `target_name`, labelled 0..n-1.
  static DeterministicMap Identity(const Alphabet& alphabet,
                                   std::string target_name);

  const std::vector<Alphabet>& source() const { return source_; }
  const Alphabet& target() const { return target_; }
  const std::vector<std::size_t>& table() const { return table_; }
  const std::optional<std::vector<double>>& numeric_labels() const {
    return numeric_labels_;
  }
  std::size_t Apply(std::span<const std::size_t> source_coords) const;

 private:
  std::vector<Alphabet> source_;
  Alphabet target_;
  std::vector<std::size_t> table_;
  std::optional<std::vector<double>> numeric_labels_;
};

enum class InfoKind {
  kEntropy,
  kConditionalEntropy,
  kMutualInformation,
  kConditionalMutualInformation,
};

// An information measure in bits.
struct InfoValue {
  double value = 0.0;
  InfoKind kind = InfoKind::kEntropy;

  operator double() const { return value; }
};

using VarList = std::vector<std::string>;

// Raw table validation; the JointDistribution factories call these.
JointDistribution ValidateJoint(std::vector<Alphabet> variables,
                                std::vector<double> mass);
JointDistribution ValidateJoint(std::vector<Alphabet> variables,
                                std::vector<Rational> mass);

InfoValue Entropy(const JointDistribution& joint, const VarList& vars);
InfoValue ConditionalEntropy(const JointDistribution& joint, const VarList& of,
                             const VarList& given);
// I(A;B|C). A and B must be disjoint; C may overlap either. Empty A or B
// gives 0.
InfoValue MutualInformation(const JointDistribution& joint, const VarList& a,
                            const VarList& b, const VarList& c = {});

// Appends `new_variable` = map(source variables). The old marginal is
// unchanged and the result is exact for rational tables.
JointDistribution ApplyMap(const JointDistribution& joint,
                           const DeterministicMap& map,
                           std::string new_variable);

// Independent product of joints with pairwise disjoint variable names.
JointDistribution ProductCompose(std::span<const JointDistribution> parts);

// I(X;U) - [I(S;U) + H(X|S) - H(X|U,S) - I(S;U|X)]; zero for every joint.
double KeyIdentityResidual(const JointDistribution& joint, const VarList& s,
                           const VarList& x, const VarList& u);

// Variables are named V0, V1, ... with indexed symbols.
struct RandomJointOptions {
  double zero_fraction = 0.0;
};
JointDistribution RandomJoint(std::span<const std::size_t> shape,
                              std::uint64_t seed,
                              RandomJointOptions options = {});
// Integer weights in [1, max_weight] (or 0 with probability zero_fraction),
// divided by their sum.
JointDistribution RandomRationalJoint(std::span<const std::size_t> shape,
                                      std::uint64_t seed,
                                      std::uint32_t max_weight = 16,
                                      double zero_fraction = 0.0);

// Seeded randomness shared by every module. Uniform draws are built from
// raw 64-bit output so results do not depend on the standard library's
// distribution implementations.
std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // Uniform on [0, 1).
  double Uniform();
  // Uniform on {0, ..., n-1}.
  std::size_t Below(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace privsem

#endif  // PRIVSEM_PROB_CORE_H_
