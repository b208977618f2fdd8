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

#ifndef PRIVSEM_REPRESENTATION_H_
#define PRIVSEM_REPRESENTATION_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "privsem/prob_core.h"

namespace privsem {

// log2(I + 1) + 4: the guaranteed SFRL slack on I(X;U|Y), in bits.
inline double SfrlSlack(double mutual_information) {
  return std::log2(mutual_information + 1.0) + 4.0;
}

enum class FrlBackend { kFrl, kSfrl };

struct FrlMeasures {
  double i_xu = 0.0;          // I(X;U)
  double h_y_given_xu = 0.0;  // H(Y|X,U)
  double i_xu_given_y = 0.0;  // I(X;U|Y)
};

// A functional representation of Y given X: U is independent of X and
// Y = decoder(X, U).
struct FrlResult {
  Alphabet u_alphabet;
  JointDistribution u_pmf;    // over U alone
  DeterministicMap decoder;   // (X, U) -> Y
  JointDistribution joint;    // over (X, Y, U)
  FrlMeasures measured{};
  FrlBackend backend = FrlBackend::kFrl;
  std::size_t unreduced_atoms = 0;
  double sfrl_bound = 0.0;
  bool meets_sfrl_bound = false;
  // Order in which each row P(Y|X=x) lays its intervals on [0, 1).
  std::vector<std::vector<std::size_t>> layout{};
};

struct FrlOptions {
  // Reject double-valued input instead of building an approximate result.
  bool require_exact = false;
  std::string u_name = "U";
};

// `joint` has exactly two variables, (X, Y) in that order. Every row
// P(Y|X=x) is cut into consecutive intervals in target-symbol order; U is
// the atom of the common refinement, after merging atoms that decode
// identically.
FrlResult FrlConstruct(const JointDistribution& joint, FrlOptions options = {});

struct SfrlConfig {
  std::size_t restarts = 8;
  std::uint64_t seed = 0;
  bool require_exact = false;
  std::string u_name = "U";
};

// Same refinement, but the interval order of every row is searched to
// minimise I(X;U|Y): naive order, greedy largest-overlap-first order, and
// seeded random restarts, each polished by adjacent swaps.
FrlResult SfrlConstruct(const JointDistribution& joint, SfrlConfig config = {});

struct SeparationShape {
  std::size_t s1_size = 0;
  std::size_t s2_size = 0;
  bool padded = false;

  friend bool operator==(const SeparationShape&,
                         const SeparationShape&) = default;
};

// Ordered factor pairs (a, b) of `size` with 2 <= a, b < size, or of size+1
// (padded) when `size` is prime. Size 2 has none: 3 is prime too.
std::vector<SeparationShape> EnumerateSeparations(std::size_t size);

// A bijection from S onto a subset of S1 x S2, row-major over the source
// symbols. When padded, the last pair (|S1|-1, |S2|-1) is unmapped.
class SeparationRep {
 public:
  SeparationRep(Alphabet source, SeparationShape shape);

  const Alphabet& source() const { return source_; }
  const SeparationShape& shape() const { return shape_; }
  std::pair<std::size_t, std::size_t> Pair(std::size_t s) const {
    return bijection_.at(s);
  }
  const std::vector<std::pair<std::size_t, std::size_t>>& bijection() const {
    return bijection_;
  }
  // S -> S1 (which == 1) or S -> S2 (which == 2).
  DeterministicMap ComponentMap(int which, std::string name) const;

 private:
  Alphabet source_;
  SeparationShape shape_;
  std::vector<std::pair<std::size_t, std::size_t>> bijection_;
};

std::vector<SeparationRep> AllSeparations(const Alphabet& source);

// Joint over (S1, S2) carrying P_S on the mapped cells. `s_pmf` has the
// single variable rep.source(). Default names append "1" and "2".
JointDistribution ApplySeparation(const JointDistribution& s_pmf,
                                  const SeparationRep& rep,
                                  std::string s1_name = "",
                                  std::string s2_name = "");

}  // namespace privsem

#endif  // PRIVSEM_REPRESENTATION_H_
