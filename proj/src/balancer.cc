#include "forge/balancer.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "forge/error.h"
#include "forge/hash.h"

namespace forge {

void validate_config(const BalanceConfig& cfg) {
  if (!(cfg.answer_ratio >= 1.0) || !(cfg.param_ratio >= 1.0)) {
    throw Error(ErrorCode::kMalformedInput, "balance ratio bounds must be >= 1");
  }
}

namespace {

using GroupKey = std::pair<std::string, std::string>;  // task, template_id

std::map<GroupKey, std::vector<std::size_t>> group_indices(const std::vector<QARecord>& records) {
  std::map<GroupKey, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    groups[{std::string(task_name(records[i].task)), records[i].template_id}].push_back(i);
  }
  return groups;
}

// Applies the cap to each class of a group, marking survivors in keep.
void cap_classes(const std::vector<QARecord>& records, const GroupKey& group, const std::string& stage,
                 const std::map<std::string, std::vector<std::size_t>>& classes, std::size_t cap,
                 std::uint64_t seed, std::vector<bool>& keep) {
  for (const auto& [label, members] : classes) {
    if (members.size() <= cap) continue;
    std::vector<std::size_t> sorted = members;
    std::sort(sorted.begin(), sorted.end(),
              [&](std::size_t a, std::size_t b) { return records[a].qid < records[b].qid; });
    auto rng = make_rng(seed, hash_fields({group.first, group.second, stage, label}));
    stable_shuffle(sorted, rng);
    for (std::size_t k = cap; k < sorted.size(); ++k) keep[sorted[k]] = false;
  }
}

std::size_t ceil_cap(double bound, double base) {
  return static_cast<std::size_t>(std::ceil(bound * base - 1e-9));
}

double median(std::vector<std::size_t> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return static_cast<double>(v[n / 2]);
  return 0.5 * static_cast<double>(v[n / 2 - 1] + v[n / 2]);
}

std::vector<QARecord> survivors(const std::vector<QARecord>& records, const std::vector<bool>& keep) {
  std::vector<QARecord> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (keep[i]) out.push_back(records[i]);
  }
  return out;
}

}  // namespace

std::vector<QARecord> balance_answers(const std::vector<QARecord>& records, const BalanceConfig& cfg) {
  validate_config(cfg);
  std::vector<bool> keep(records.size(), true);
  for (const auto& [key, idx] : group_indices(records)) {
    std::map<std::string, std::vector<std::size_t>> classes;
    for (auto i : idx) classes[records[i].answer.canonical()].push_back(i);
    std::size_t m = idx.size();
    for (const auto& [_, members] : classes) m = std::min(m, members.size());
    cap_classes(records, key, "answer", classes, ceil_cap(cfg.answer_ratio, static_cast<double>(m)), cfg.seed,
                keep);
  }
  return survivors(records, keep);
}

std::vector<QARecord> balance_parameters(const std::vector<QARecord>& records, const BalanceConfig& cfg) {
  validate_config(cfg);
  std::vector<bool> keep(records.size(), true);
  for (const auto& [key, idx] : group_indices(records)) {
    if (records[idx.front()].task == TaskId::kC) continue;
    std::map<std::string, std::vector<std::size_t>> combos;
    for (auto i : idx) combos[canonical_binding(records[i].binding)].push_back(i);
    std::vector<std::size_t> sizes;
    for (const auto& [_, members] : combos) sizes.push_back(members.size());
    const std::size_t cap = std::max<std::size_t>(1, ceil_cap(cfg.param_ratio, median(sizes)));
    cap_classes(records, key, "param", combos, cap, cfg.seed, keep);
  }
  return survivors(records, keep);
}

std::vector<QARecord> balance(const std::vector<QARecord>& records, const BalanceConfig& cfg) {
  return balance_parameters(balance_answers(records, cfg), cfg);
}

double answer_class_ratio(const std::vector<const QARecord*>& group) {
  std::map<std::string, std::size_t> counts;
  for (const auto* r : group) ++counts[r->answer.canonical()];
  if (counts.empty()) return 1.0;
  std::size_t lo = SIZE_MAX, hi = 0;
  for (const auto& [_, c] : counts) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  return static_cast<double>(hi) / static_cast<double>(lo);
}

double combination_ratio(const std::vector<const QARecord*>& group) {
  std::map<std::string, std::size_t> counts;
  for (const auto* r : group) ++counts[canonical_binding(r->binding)];
  if (counts.empty()) return 1.0;
  std::vector<std::size_t> sizes;
  for (const auto& [_, c] : counts) sizes.push_back(c);
  const double med = median(sizes);
  return static_cast<double>(*std::max_element(sizes.begin(), sizes.end())) / med;
}

BalanceReport balance_report(const std::vector<QARecord>& before, const std::vector<QARecord>& after) {
  BalanceReport report;
  std::map<GroupKey, std::pair<std::vector<const QARecord*>, std::vector<const QARecord*>>> groups;
  for (const auto& r : before) {
    ++report.tasks[std::string(task_name(r.task))].before;
    groups[{std::string(task_name(r.task)), r.template_id}].first.push_back(&r);
  }
  for (const auto& r : after) {
    ++report.tasks[std::string(task_name(r.task))].after;
    groups[{std::string(task_name(r.task)), r.template_id}].second.push_back(&r);
  }
  for (auto& [_, t] : report.tasks) {
    t.reduction_factor = t.after == 0 ? 0.0 : static_cast<double>(t.before) / static_cast<double>(t.after);
  }
  for (const auto& [key, sets] : groups) {
    GroupRatios g;
    g.task = key.first;
    g.template_id = key.second;
    g.answer_ratio_before = answer_class_ratio(sets.first);
    g.answer_ratio_after = answer_class_ratio(sets.second);
    g.param_ratio_before = combination_ratio(sets.first);
    g.param_ratio_after = combination_ratio(sets.second);
    report.groups.push_back(g);
  }
  return report;
}

nlohmann::json report_to_json(const BalanceReport& report) {
  nlohmann::json j;
  j["tasks"] = nlohmann::json::object();
  for (const auto& [task, t] : report.tasks) {
    j["tasks"][task] = {{"before", t.before}, {"after", t.after}, {"reduction_factor", t.reduction_factor}};
  }
  j["groups"] = nlohmann::json::array();
  for (const auto& g : report.groups) {
    j["groups"].push_back({{"task", g.task},
                           {"template_id", g.template_id},
                           {"answer_ratio_before", g.answer_ratio_before},
                           {"answer_ratio_after", g.answer_ratio_after},
                           {"param_ratio_before", g.param_ratio_before},
                           {"param_ratio_after", g.param_ratio_after}});
  }
  return j;
}

}  // namespace forge
