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

// Helpers shared by the test binaries. The entropy helpers here are written
// directly from the definition and do not call into the library, so they
// can serve as an independent reference.

#ifndef PRIVSEM_TESTS_TESTING_H_
#define PRIVSEM_TESTS_TESTING_H_

#include <cmath>
#include <map>
#include <vector>

#include "privsem/prob_core.h"
#include "privsem/representation.h"
#include "privsem/single_task.h"

namespace privsem::testing {

inline double RefEntropy(const std::vector<double>& pmf) {
  double h = 0.0;
  for (double p : pmf) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

// Entropy of the image of a pmf under `key`, by enumeration.
template <class Key>
double RefEntropyOf(const std::vector<double>& pmf, Key key) {
  std::map<decltype(key(std::size_t{0})), double> image;
  for (std::size_t i = 0; i < pmf.size(); ++i) image[key(i)] += pmf[i];
  std::vector<double> v;
  for (const auto& [k, p] : image) v.push_back(p);
  return RefEntropy(v);
}

// Two iid uniform bits (X1, X2); S = X1 + X2 is private, h = (X1, X2).
inline JointDistribution SumOfBits() {
  Alphabet s("S", {"0", "1", "2"}), x1("X1", {"0", "1"}), x2("X2", {"0", "1"});
  std::vector<Rational> m(12, Rational(0));
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) m[(a + b) * 4 + a * 2 + b] = Rational(1, 4);
  }
  return JointDistribution::FromRationals({s, x1, x2}, m);
}

// Instance on a joint over (S, X): f = index of X, h = X itself.
inline InstanceSingle IdentityTaskInstance(const JointDistribution& sx,
                                           double epsilon) {
  const Alphabet& x = sx.variable(1);
  return MakeInstance(sx, sx.variable(0).name(),
                      DeterministicMap::Identity(x, "f"),
                      DeterministicMap::Identity(x, "h"), epsilon);
}

inline InstanceSingle SumOfBitsInstance(double epsilon) {
  JointDistribution j = SumOfBits();
  const std::vector<Alphabet> src{j.variable(1), j.variable(2)};
  DeterministicMap f(src, Alphabet::Indexed("f", 4), {0, 1, 2, 3},
                     std::vector<double>{0, 1, 2, 3});
  DeterministicMap h(src, Alphabet("h", {"00", "01", "10", "11"}), {0, 1, 2, 3});
  return MakeInstance(j, "S", f, h, epsilon);
}

// P(x, u) == P(x) P(u) for every cell, summed by hand from the (X, Y, U)
// table.
inline bool ExactlyIndependent(const FrlResult& r) {
  const auto& shape = r.joint.shape();
  const std::size_t nx = shape[0], ny = shape[1], nu = shape[2];
  const auto& p = r.joint.exact();
  std::vector<Rational> px(nx, Rational(0)), pu(nu, Rational(0));
  std::vector<Rational> pxu(nx * nu, Rational(0));
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) {
      for (std::size_t u = 0; u < nu; ++u) {
        const Rational& m = p[(x * ny + y) * nu + u];
        px[x] += m;
        pu[u] += m;
        pxu[x * nu + u] += m;
      }
    }
  }
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t u = 0; u < nu; ++u) {
      if (pxu[x * nu + u] != px[x] * pu[u]) return false;
    }
  }
  return true;
}

// Every (x, u) with positive mass has exactly one y of positive mass.
inline bool ExactlyDeterministic(const FrlResult& r) {
  const auto& shape = r.joint.shape();
  const std::size_t nx = shape[0], ny = shape[1], nu = shape[2];
  const auto& p = r.joint.exact();
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t u = 0; u < nu; ++u) {
      int support = 0;
      for (std::size_t y = 0; y < ny; ++y) support += p[(x * ny + y) * nu + u] > 0;
      if (support > 1) return false;
    }
  }
  return true;
}

}  // namespace privsem::testing

#endif  // PRIVSEM_TESTS_TESTING_H_
