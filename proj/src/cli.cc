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

#include "privsem/cli.h"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "privsem/instance_io.h"
#include "privsem/report.h"

namespace privsem {
namespace {

struct Common {
  std::string out_path;
  double tolerance = 1e-9;
  std::string format = "json";
  unsigned threads = 1;
  CLI::Option* format_option = nullptr;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void AddCommon(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out_path, "Write the report here instead of stdout");
  sub->add_option("--tolerance", c.tolerance, "Numerical tolerance")
      ->check(CLI::NonNegativeNumber);
  c.format_option = sub->add_option("--format", c.format, "json or csv")
                        ->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--threads", c.threads, "Threads for search restarts")
      ->check(CLI::PositiveNumber);
}

std::uint64_t ResolveSeed(const std::optional<std::uint64_t>& flag,
                          const std::optional<std::uint64_t>& file) {
  if (flag) return *flag;
  if (file) return *file;
  if (const char* env = std::getenv("PRIVSEM_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || env[0] == '-') {
      throw UsageError("PRIVSEM_SEED must be an unsigned integer");
    }
    return v;
  }
  return 0;
}

Json Header(const std::string& command, const ParsedInstance* parsed) {
  Json j;
  j["tool"] = "privsem";
  j["version"] = kToolVersion;
  j["command"] = command;
  if (parsed) {
    j["instance_digest"] = InstanceDigest(parsed->source);
    j["mode"] = parsed->mode;
  }
  return j;
}

void Emit(const std::string& content, const Common& c, std::ostream& out) {
  if (c.out_path.empty()) {
    out << content;
    return;
  }
  std::ofstream file(c.out_path, std::ios::binary);
  if (!file || !(file << content)) {
    throw Error(ErrorCode::kValidationError, "--out: cannot write " + c.out_path);
  }
}

std::string Cell(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : "";
}

std::string CsvRow(const std::vector<std::string>& cells) {
  std::string row;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) row += ",";
    row += cells[i];
  }
  return row + "\n";
}

const InstanceSingle& NeedSingle(const ParsedInstance& p, const std::string& cmd) {
  if (!p.single) {
    throw Error(ErrorCode::kValidationError,
                "mode: " + cmd + " needs a single-task instance");
  }
  return *p.single;
}

const InstanceMulti& NeedMulti(const ParsedInstance& p, const std::string& cmd) {
  if (!p.multi) {
    throw Error(ErrorCode::kValidationError,
                "mode: " + cmd + " needs a multi-task instance");
  }
  return *p.multi;
}

double BestConstructed(const InstanceSingle& inst, std::uint64_t seed) {
  double best = 0.0;
  for (const auto& c : ConstructAll(inst, {.seed = seed})) {
    best = std::max(best, c.evaluation.utility);
  }
  return best;
}

InstanceMulti MultiWithEpsilon(const InstanceMulti& inst, double epsilon) {
  InstanceMulti copy = inst;
  copy.epsilon = epsilon;
  return copy;
}

// ---- commands --------------------------------------------------------

int Bounds(const ParsedInstance& p, const Common& c, std::ostream& out) {
  Json j = Header("bounds", &p);
  if (p.single) {
    const InstanceSingle& inst = *p.single;
    try {
      BoundsReportSingle b = SingleTaskBounds(inst);
      if (c.format == "csv") {
        Emit(CsvRow({"epsilon", "l1", "l2", "l3", "l4", "upper", "effective_lower",
                     "tight_l1"}) +
                 CsvRow({FormatDouble(b.epsilon), FormatDouble(b.l1),
                         FormatDouble(b.l2), Cell(b.l3), Cell(b.l4),
                         FormatDouble(b.upper), FormatDouble(b.effective_lower),
                         b.tight_l1 ? "true" : "false"}),
             c, out);
        return kExitOk;
      }
      j["in_range"] = true;
      j["bounds"] = BoundsJson(b);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEpsilonOutOfRange) throw;
      // Beyond I(S;h) the task itself can be released.
      MechanismResult m = BuildMechanism(inst, MechanismMethod::kPassthrough);
      const Evaluation ev = EvaluateMechanism(inst, m);
      j["in_range"] = false;
      j["epsilon"] = inst.epsilon;
      j["mutual_information"] = ev.leakage;
      j["passthrough"] = EvaluationJson(ev);
    }
  } else {
    const InstanceMulti& inst = *p.multi;
    const TaskCoefficients coeffs = ComputeTaskCoefficients(inst);
    BoundsReportMulti b = MultiBounds(inst);
    if (c.format == "csv") {
      std::vector<std::string> row{FormatDouble(b.epsilon)};
      for (const auto& l : b.lowers) row.push_back(l ? FormatDouble(l->value) : "");
      row.push_back(FormatDouble(b.upper));
      row.push_back(FormatDouble(b.effective_lower));
      Emit(CsvRow({"epsilon", "l1", "l2", "l3", "l4", "upper", "effective_lower"}) +
               CsvRow(row),
           c, out);
      return kExitOk;
    }
    j["coefficients"] = CoefficientsJson(coeffs);
    j["bounds"] = MultiBoundsJson(b);
  }
  Emit(DumpJson(j), c, out);
  return kExitOk;
}

int Mechanize(const ParsedInstance& p, const Common& c, const std::string& method_name,
              std::uint64_t seed, std::ostream& out) {
  const InstanceSingle& inst = NeedSingle(p, "mechanize");
  const MechanismMethod method = *ParseMethod(method_name);
  MechanismResult m = BuildMechanism(inst, method, {.seed = seed});
  const Evaluation ev = EvaluateMechanism(inst, m);
  if (c.format == "csv") {
    const JointDistribution& ext = m.extended;
    std::string csv = CsvRow({"S", "F", "H", "U", "probability"});
    const auto& mass = ext.probabilities();
    for (std::size_t i = 0; i < mass.size(); ++i) {
      if (mass[i] <= 0.0) continue;
      auto co = ext.Coordinates(i);
      csv += CsvRow({ext.variable(0).symbol(co[0]), ext.variable(1).symbol(co[1]),
                     ext.variable(2).symbol(co[2]), ext.variable(3).symbol(co[3]),
                     FormatDouble(mass[i])});
    }
    Emit(csv, c, out);
    return kExitOk;
  }
  Json j = Header("mechanize", &p);
  j["seed"] = seed;
  j["epsilon"] = inst.epsilon;
  j["mechanism"] = MechanismJson(inst, m);
  j["evaluation"] = EvaluationJson(ev);
  Json flags;
  try {
    flags["tight_l1"] = SingleTaskBounds(inst).tight_l1;
  } catch (const Error&) {
    flags["tight_l1"] = nullptr;
  }
  flags["meets_sfrl_bound"] =
      m.representation ? Json(m.representation->meets_sfrl_bound) : Json(nullptr);
  flags["separation_chosen"] = m.chosen_separation.has_value();
  j["flags"] = flags;
  Emit(DumpJson(j), c, out);
  return kExitOk;
}

int Verify(const ParsedInstance& p, const Common& c, std::size_t iters,
           std::size_t restarts, std::uint64_t seed, std::ostream& out,
           std::ostream& err) {
  Json j = Header("verify", &p);
  j["seed"] = seed;
  std::vector<std::string> violations;
  if (p.single) {
    const InstanceSingle& inst = *p.single;
    SearchConfig cfg{.iterations = iters, .restarts = restarts, .seed = seed,
                     .threads = c.threads};
    SandwichReport r =
        SandwichCheck(inst, cfg, c.tolerance, std::max(1e-6, c.tolerance));
    violations = r.violations;
    j["epsilon"] = inst.epsilon;
    j["iterations"] = iters;
    j["restarts"] = restarts;
    j["sandwich"] = SandwichJson(r);
  } else {
    const InstanceMulti& inst = *p.multi;
    BoundsReportMulti b = MultiBounds(inst);
    const double tol = c.tolerance;
    for (const auto& l : b.lowers) {
      if (l && l->value > b.upper + tol) {
        violations.push_back(std::string(RuleName(l->rule)) + " exceeds the upper bound");
      }
    }
    MultiMechanism mech = ComposeMechanism(inst, b.lowers[0]->allocation,
                                           MechanismMethod::kEfrl,
                                           {.mechanism = {.seed = seed}});
    MultiEvaluation ev = EvaluateMulti(inst, mech);
    if (ev.leakage > inst.epsilon + tol) violations.push_back("leakage exceeds epsilon");
    if (ev.objective < b.lowers[0]->value - tol) {
      violations.push_back("objective is below l1");
    }
    if (ev.objective > b.upper + tol) violations.push_back("objective exceeds the upper bound");
    if (ev.additivity_residual > tol) violations.push_back("additivity residual");
    if (!ev.cross_independent) violations.push_back("components are not independent");
    j["epsilon"] = inst.epsilon;
    j["bounds"] = MultiBoundsJson(b);
    j["evaluation"] = MultiEvaluationJson(ev);
    j["violations"] = violations;
  }
  j["ok"] = violations.empty();
  Emit(DumpJson(j), c, out);
  for (const auto& v : violations) err << "violation: " << v << "\n";
  return violations.empty() ? kExitOk : kExitViolation;
}

int Separations(std::size_t size, const Common& c, std::ostream& out) {
  const auto shapes = EnumerateSeparations(size);
  if (c.format == "csv") {
    std::string csv = CsvRow({"s1", "s2", "padded"});
    for (const auto& s : shapes) {
      csv += CsvRow({std::to_string(s.s1_size), std::to_string(s.s2_size),
                     s.padded ? "true" : "false"});
    }
    Emit(csv, c, out);
    return kExitOk;
  }
  Json j = Header("separations", nullptr);
  j["size"] = size;
  Json list = Json::array();
  for (const auto& s : shapes) list.push_back(ShapeJson(s));
  j["separations"] = list;
  Emit(DumpJson(j), c, out);
  return kExitOk;
}

int MultiAllocate(const ParsedInstance& p, const Common& c, const std::string& rule_name,
                  const std::string& method_name, std::uint64_t seed,
                  std::ostream& out) {
  const InstanceMulti& inst = NeedMulti(p, "multi-allocate");
  const AllocationRule rule = *ParseRule(rule_name);
  const TaskCoefficients coeffs = ComputeTaskCoefficients(inst);
  const BoundsReportMulti b = MultiBounds(inst);
  const auto& chosen = b.lowers[static_cast<std::size_t>(rule)];
  const std::vector<double> allocation =
      chosen ? chosen->allocation : AllocateEpsilon(coeffs, inst.epsilon, rule);

  Json j = Header("multi-allocate", &p);
  j["seed"] = seed;
  j["rule"] = rule_name;
  j["coefficients"] = CoefficientsJson(coeffs);
  j["allocation"] = allocation;
  j["bound"] = chosen ? Json(chosen->value) : Json(nullptr);
  j["upper"] = b.upper;
  try {
    MultiMechanism mech = ComposeMechanism(inst, allocation, *ParseMethod(method_name),
                                           {.mechanism = {.seed = seed}});
    MultiEvaluation ev = EvaluateMulti(inst, mech);
    Json comps = Json::array();
    for (const auto& m : mech.components) {
      comps.push_back({{"method", std::string(MethodName(m.method))},
                       {"epsilon", m.epsilon},
                       {"constant", m.constant},
                       {"u_alphabet", m.joint.variable(2).symbols()},
                       {"u_labels", m.u_labels},
                       {"joint", JointJson(m.joint)}});
    }
    j["mechanism"] = {{"method", method_name}, {"components", comps}};
    j["evaluation"] = MultiEvaluationJson(ev);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kComponentEpsilonOutOfRange) throw;
    j["mechanism"] = nullptr;
    j["compose_error"] = e.what();
  }
  Emit(DumpJson(j), c, out);
  return kExitOk;
}

std::vector<double> ParseGrid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  for (std::string part; std::getline(in, part, ':');) parts.push_back(part);
  double a = 0, b = 0;
  long steps = 0;
  try {
    if (parts.size() != 3) throw std::invalid_argument("");
    std::size_t used = 0;
    a = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("");
    b = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("");
    steps = std::stol(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw UsageError("--epsilon-grid expects a:b:steps, got '" + text + "'");
  }
  if (steps < 1 || a < 0 || b < a) {
    throw UsageError("--epsilon-grid needs 0 <= a <= b and steps >= 1");
  }
  std::vector<double> grid;
  for (long k = 0; k < steps; ++k) {
    grid.push_back(steps == 1 ? a : a + (b - a) * k / static_cast<double>(steps - 1));
  }
  return grid;
}

int Sweep(const ParsedInstance& p, Common c, const std::string& grid_spec,
          std::uint64_t seed, std::ostream& out, std::ostream& err) {
  const std::vector<double> grid = ParseGrid(grid_spec);
  if (c.format_option->count() == 0) c.format = "csv";
  const std::vector<std::string> columns{"epsilon", "l1", "l2", "l3",
                                         "l4",      "upper", "achieved"};
  std::vector<std::vector<std::optional<double>>> rows;
  for (double eps : grid) {
    std::vector<std::optional<double>> row{eps};
    if (p.single) {
      InstanceSingle inst = WithEpsilon(*p.single, eps);
      try {
        BoundsReportSingle b = SingleTaskBounds(inst);
        row.insert(row.end(), {b.l1, b.l2, b.l3, b.l4, b.upper,
                               BestConstructed(inst, seed)});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kEpsilonOutOfRange) throw;
        err << "sweep: skipping epsilon " << FormatDouble(eps)
            << " (not below I(S;h))\n";
        continue;
      }
    } else {
      InstanceMulti inst = MultiWithEpsilon(*p.multi, eps);
      BoundsReportMulti b = MultiBounds(inst);
      for (const auto& l : b.lowers) {
        row.push_back(l ? std::optional<double>(l->value) : std::nullopt);
      }
      row.push_back(b.upper);
      try {
        MultiMechanism mech = ComposeMechanism(inst, b.lowers[0]->allocation,
                                               MechanismMethod::kEfrl,
                                               {.mechanism = {.seed = seed}});
        row.push_back(EvaluateMulti(inst, mech).objective);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kComponentEpsilonOutOfRange) throw;
        row.push_back(std::nullopt);
      }
    }
    rows.push_back(std::move(row));
  }
  if (c.format == "csv") {
    std::string csv = CsvRow(columns);
    for (const auto& row : rows) {
      std::vector<std::string> cells;
      for (const auto& v : row) cells.push_back(Cell(v));
      csv += CsvRow(cells);
    }
    Emit(csv, c, out);
    return kExitOk;
  }
  Json j = Header("sweep", &p);
  j["seed"] = seed;
  Json list = Json::array();
  for (const auto& row : rows) {
    Json r;
    for (std::size_t k = 0; k < columns.size(); ++k) {
      r[columns[k]] = row[k] ? Json(*row[k]) : Json(nullptr);
    }
    list.push_back(r);
  }
  j["rows"] = list;
  Emit(DumpJson(j), c, out);
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Privacy mechanisms for private semantic communication", "privsem"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  Common common;
  std::string instance_path, method = "efrl", rule = "l1", grid;
  std::optional<std::uint64_t> seed_flag;
  std::size_t iters = 10000, restarts = 5, size = 0;

  auto* bounds = app.add_subcommand("bounds", "Lower and upper bounds of an instance");
  bounds->add_option("instance", instance_path, "Instance JSON file")->required();
  AddCommon(bounds, common);

  auto* mechanize = app.add_subcommand("mechanize", "Construct a mechanism");
  mechanize->add_option("instance", instance_path, "Instance JSON file")->required();
  mechanize->add_option("--method", method, "efrl, esfrl, sep3, sep4 or passthrough")
      ->check(CLI::IsMember({"efrl", "esfrl", "sep3", "sep4", "sep_l3", "sep_l4",
                             "passthrough"}));
  mechanize->add_option("--seed", seed_flag, "Seed for layout restarts");
  AddCommon(mechanize, common);

  auto* verify = app.add_subcommand("verify", "Sandwich check against a random search");
  verify->add_option("instance", instance_path, "Instance JSON file")->required();
  verify->add_option("--iters", iters, "Hill-climbing iterations per restart");
  verify->add_option("--restarts", restarts, "Search restarts")
      ->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed_flag, "Search seed");
  AddCommon(verify, common);

  auto* separations = app.add_subcommand("separations", "Splits of an alphabet size");
  separations->add_option("--size", size, "Alphabet size")->required()
      ->check(CLI::PositiveNumber);
  AddCommon(separations, common);

  auto* allocate = app.add_subcommand("multi-allocate", "Budget allocation and composition");
  allocate->add_option("instance", instance_path, "Instance JSON file")->required();
  allocate->add_option("--rule", rule, "l1, l2, l3 or l4")
      ->check(CLI::IsMember({"l1", "l2", "l3", "l4"}));
  allocate->add_option("--method", method, "efrl or esfrl")
      ->check(CLI::IsMember({"efrl", "esfrl"}));
  allocate->add_option("--seed", seed_flag, "Seed for layout restarts");
  AddCommon(allocate, common);

  auto* sweep = app.add_subcommand("sweep", "Bounds and achieved utility over an epsilon grid");
  sweep->add_option("instance", instance_path, "Instance JSON file")->required();
  sweep->add_option("--epsilon-grid", grid, "a:b:steps")->required();
  sweep->add_option("--seed", seed_flag, "Seed for layout restarts");
  AddCommon(sweep, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (separations->parsed()) return Separations(size, common, out);
    const ParsedInstance parsed = ParseInstanceFile(instance_path);
    const std::uint64_t seed = ResolveSeed(seed_flag, parsed.seed);
    if (bounds->parsed()) return Bounds(parsed, common, out);
    if (mechanize->parsed()) return Mechanize(parsed, common, method, seed, out);
    if (verify->parsed()) {
      return Verify(parsed, common, iters, restarts, seed, out, err);
    }
    if (allocate->parsed()) {
      return MultiAllocate(parsed, common, rule, method, seed, out);
    }
    if (sweep->parsed()) return Sweep(parsed, common, grid, seed, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace privsem
