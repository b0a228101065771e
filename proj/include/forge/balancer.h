#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "forge/generator.h"

namespace forge {

struct BalanceConfig {
  std::uint64_t seed = 0;
  double answer_ratio = 1.5;  // r_a
  double param_ratio = 2.0;   // r_p
};

void validate_config(const BalanceConfig& cfg);

// Within each (task, template) group every answer class keeps at most
// ceil(r_a * m) records, m being the smallest nonempty class. Output keeps
// input order.
std::vector<QARecord> balance_answers(const std::vector<QARecord>& records, const BalanceConfig& cfg);

// Caps each binding combination at ceil(r_p * median combination count).
// Task C records are passed through untouched.
std::vector<QARecord> balance_parameters(const std::vector<QARecord>& records, const BalanceConfig& cfg);

// balance_answers followed by balance_parameters.
std::vector<QARecord> balance(const std::vector<QARecord>& records, const BalanceConfig& cfg);

struct GroupRatios {
  std::string task;
  std::string template_id;
  double answer_ratio_before = 1.0;  // max/min nonempty answer class
  double answer_ratio_after = 1.0;
  double param_ratio_before = 1.0;  // max/median combination count
  double param_ratio_after = 1.0;
};

struct TaskCounts {
  std::size_t before = 0;
  std::size_t after = 0;
  double reduction_factor = 1.0;  // before / after
};

struct BalanceReport {
  std::map<std::string, TaskCounts> tasks;
  std::vector<GroupRatios> groups;  // ordered by (task, template_id)
};

BalanceReport balance_report(const std::vector<QARecord>& before, const std::vector<QARecord>& after);
nlohmann::json report_to_json(const BalanceReport& report);

// Group statistics shared by the balancer and its report.
double answer_class_ratio(const std::vector<const QARecord*>& group);
double combination_ratio(const std::vector<const QARecord*>& group);

}  // namespace forge
