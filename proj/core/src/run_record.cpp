// Copyright 2026 The prefopt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "prefopt/run_record.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"
#include "prefopt/errors.hpp"

namespace prefopt {

namespace {

using ordered_json = nlohmann::ordered_json;

template <typename T>
void put_optional(ordered_json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
std::optional<T> get_optional(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

const char* to_string(RunStatus s) noexcept {
  return s == RunStatus::kCompleted ? "completed" : "numerical_failure";
}

void write_steps_jsonl(std::ostream& out, const std::vector<StepRecord>& steps) {
  for (const auto& s : steps) {
    ordered_json j;
    j["step"] = s.step;
    j["weights"] = s.weights;
    put_optional(j, "arm", s.arm);
    if (!s.theta_samples.empty()) j["theta_samples"] = s.theta_samples;
    j["loss"] = s.loss;
    j["grad_norm"] = s.grad_norm;
    put_optional(j, "val_acc", s.val_acc);
    put_optional(j, "test_acc", s.test_acc);
    if (s.reward) {
      ordered_json r;
      r["acc_before"] = s.reward->acc_before;
      r["acc_after"] = s.reward->acc_after;
      r["r"] = s.reward->r;
      r["subsample_size"] = s.reward->subsample_size;
      j["reward"] = std::move(r);
    }
    if (!s.arm_means.empty()) j["arm_means"] = s.arm_means;
    out << j.dump() << '\n';
  }
}

std::vector<StepRecord> read_steps_jsonl(std::istream& in) {
  std::vector<StepRecord> steps;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      StepRecord s;
      s.step = j.at("step").get<std::size_t>();
      s.weights = j.at("weights").get<std::vector<double>>();
      s.arm = get_optional<std::size_t>(j, "arm");
      if (j.contains("theta_samples")) s.theta_samples = j.at("theta_samples").get<std::vector<double>>();
      s.loss = j.at("loss").get<double>();
      s.grad_norm = j.at("grad_norm").get<double>();
      s.val_acc = get_optional<double>(j, "val_acc");
      s.test_acc = get_optional<double>(j, "test_acc");
      if (j.contains("reward")) {
        const auto& r = j.at("reward");
        s.reward = RewardLog{r.at("acc_before").get<double>(), r.at("acc_after").get<double>(),
                             r.at("r").get<int>(), r.at("subsample_size").get<std::size_t>()};
      }
      if (j.contains("arm_means")) s.arm_means = j.at("arm_means").get<std::vector<double>>();
      steps.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return steps;
}

void write_summary_json(std::ostream& out, const RunSummary& s) {
  ordered_json j;
  j["status"] = to_string(s.status);
  put_optional(j, "failure_step", s.failure_step);
  if (!s.failure_message.empty()) j["failure_message"] = s.failure_message;
  j["method"] = s.method;
  j["seed"] = s.seed;
  j["num_steps"] = s.num_steps;
  j["ref_names"] = s.ref_names;
  put_optional(j, "initial_val_acc", s.initial_val_acc);
  put_optional(j, "initial_test_acc", s.initial_test_acc);
  put_optional(j, "final_val_acc", s.final_val_acc);
  put_optional(j, "final_test_acc", s.final_test_acc);
  if (!s.bandit_arms.empty()) {
    ordered_json arms = ordered_json::array();
    for (const auto& a : s.bandit_arms) {
      ordered_json arm;
      arm["alpha"] = a.alpha;
      arm["beta"] = a.beta;
      arm["pulls"] = a.pulls;
      arms.push_back(std::move(arm));
    }
    j["bandit"] = std::move(arms);
  }
  // Hex string: JSON numbers cannot carry all 64 bits portably.
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(s.policy_checksum));
  j["policy_checksum"] = hex;
  out << j.dump(2) << '\n';
}

RunSummary read_summary_json(std::istream& in) {
  try {
    nlohmann::json j;
    in >> j;
    RunSummary s;
    const auto status = j.at("status").get<std::string>();
    if (status == "completed") s.status = RunStatus::kCompleted;
    else if (status == "numerical_failure") s.status = RunStatus::kNumericalFailure;
    else throw InvalidInput("unknown run status '" + status + "'");
    s.failure_step = get_optional<std::size_t>(j, "failure_step");
    s.failure_message = j.value("failure_message", std::string{});
    s.method = j.at("method").get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.num_steps = j.at("num_steps").get<std::size_t>();
    s.ref_names = j.at("ref_names").get<std::vector<std::string>>();
    s.initial_val_acc = get_optional<double>(j, "initial_val_acc");
    s.initial_test_acc = get_optional<double>(j, "initial_test_acc");
    s.final_val_acc = get_optional<double>(j, "final_val_acc");
    s.final_test_acc = get_optional<double>(j, "final_test_acc");
    if (j.contains("bandit")) {
      for (const auto& a : j.at("bandit")) {
        s.bandit_arms.push_back({a.at("alpha").get<double>(), a.at("beta").get<double>(),
                                 a.at("pulls").get<std::size_t>()});
      }
    }
    s.policy_checksum = std::stoull(j.at("policy_checksum").get<std::string>(), nullptr, 16);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed run summary: ") + e.what());
  }
}

void save_run(const std::filesystem::path& dir, const TrainResult& result) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "steps.jsonl", std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write '" + (dir / "steps.jsonl").string() + "'");
    write_steps_jsonl(out, result.record.steps);
  }
  {
    std::ofstream out(dir / "summary.json", std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write '" + (dir / "summary.json").string() + "'");
    write_summary_json(out, result.record.summary);
  }
  save_checkpoint(dir / "policy.json", result.policy);
  ordered_json timing;
  timing["wall_clock_seconds"] = result.wall_clock_seconds;
  write_file(dir / "timing.json", timing.dump(2) + "\n");
}

RunRecord load_run(const std::filesystem::path& dir) {
  std::ifstream steps(dir / "steps.jsonl", std::ios::binary);
  std::ifstream summary(dir / "summary.json", std::ios::binary);
  if (!steps || !summary) throw InvalidInput("no run record in '" + dir.string() + "'");
  RunRecord rec;
  rec.steps = read_steps_jsonl(steps);
  rec.summary = read_summary_json(summary);
  return rec;
}

}  // namespace prefopt
