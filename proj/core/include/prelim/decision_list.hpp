#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "prelim/classifier.hpp"
#include "prelim/dataset.hpp"

namespace prelim {

struct Condition {
    std::size_t feature = 0;
    bool greater = false;  // false: x[f] <= threshold, true: x[f] > threshold
    double threshold = 0.0;

    bool matches(std::span<const double> row) const {
        const double v = row[feature];
        return greater ? v > threshold : v <= threshold;
    }
};

struct Rule {
    std::vector<Condition> conditions;  // empty conjunction fires always
    int label = 1;                      // learned rules always predict class 1

    bool covers(std::span<const double> row) const {
        for (const auto& c : conditions) {
            if (!c.matches(row)) return false;
        }
        return true;
    }
};

// Ordered if-then rules with a default class; the first firing rule predicts.
class DecisionList final : public RuleModel {
  public:
    DecisionList() = default;
    DecisionList(std::vector<Rule> rules, int default_class, std::size_t n_features);

    std::size_t n_features() const override { return n_features_; }
    double score_row(std::span<const double> row) const override;
    std::size_t complexity() const override { return rules_.size(); }
    std::string describe(const std::vector<std::string>& feature_names) const override;

    const std::vector<Rule>& rules() const { return rules_; }
    int default_class() const { return default_class_; }

  private:
    std::vector<Rule> rules_;
    int default_class_ = 0;
    std::size_t n_features_ = 0;
};

struct RuleLearnConfig {
    std::size_t max_rules = 8;
    bool weighted = false;
    std::uint64_t seed = 0;
    bool optimize = true;  // ripper only: run the revision pass
};

// Sequential covering for class 1: grow on 2/3 of the remaining rows by FOIL
// gain, prune on 1/3 by (p-n)/(p+n), stop when a rule's pruned precision
// drops to 0.5 or the rule cap is reached. Covered rows are removed after
// each rule. Single-class data yields an empty list whose default is the
// present class.
DecisionList irep_fit(const Dataset& d, const RuleLearnConfig& cfg = {});

// IREP core with description-length-based stopping (stop once the rule-set
// MDL exceeds the best seen by 64 bits) and one optimization pass that swaps
// each rule for the MDL-best of {original, replacement, revision}. The rule
// cap is enforced after optimization.
DecisionList ripper_fit(const Dataset& d, const RuleLearnConfig& cfg = {});

// Total description length (bits) of a rule set plus its exceptions on d.
double decision_list_mdl(const DecisionList& list, const Dataset& d);

}  // namespace prelim
