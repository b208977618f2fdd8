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

// Report serialization. Reports keep insertion order, and every float is
// written with 17 significant digits so that reports round-trip exactly.

#ifndef PRIVSEM_REPORT_H_
#define PRIVSEM_REPORT_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "privsem/multi_task.h"
#include "privsem/oracle.h"
#include "privsem/single_task.h"

namespace privsem {

inline constexpr char kToolVersion[] = "0.1.0";

using Json = nlohmann::ordered_json;

std::string FormatDouble(double v);
std::string DumpJson(const Json& value);

// FNV-1a over the compact dump of the parsed instance file.
std::string InstanceDigest(const nlohmann::json& source);

Json JointJson(const JointDistribution& joint);
Json ShapeJson(const SeparationShape& shape);
Json BoundsJson(const BoundsReportSingle& bounds);
Json EvaluationJson(const Evaluation& evaluation);
Json MechanismJson(const InstanceSingle& instance,
                   const MechanismResult& mechanism);
Json SandwichJson(const SandwichReport& report);
Json CoefficientsJson(const TaskCoefficients& coeffs);
Json MultiBoundsJson(const BoundsReportMulti& bounds);
Json MultiEvaluationJson(const MultiEvaluation& evaluation);

}  // namespace privsem

#endif  // PRIVSEM_REPORT_H_
