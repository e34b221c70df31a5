#include "prelim/decision_list.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "prelim/cart.hpp"
#include "prelim/csv.hpp"
#include "prelim/cv.hpp"
#include "prelim/errors.hpp"
#include "prelim/rng.hpp"

namespace prelim {

namespace {

constexpr double kMdlSlackBits = 64.0;
constexpr std::size_t kBuildRuleCap = 32;  // hard stop for the MDL-driven build loop

double log2_binomial(double n, double k) {
    if (k <= 0.0 || k >= n) return 0.0;
    return (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) /
           std::numbers::ln2;
}

struct LearnContext {
    const Matrix& x;
    std::span<const double> y;
    double w0 = 1.0;
    double w1 = 1.0;
    double condition_space_bits = 1.0;  // log2 of the number of possible conditions

    double weight_of(std::size_t row) const { return y[row] >= 0.5 ? w1 : w0; }
    bool positive(std::size_t row) const { return y[row] >= 0.5; }
};

// Weighted positive/negative mass of a row set.
std::pair<double, double> pos_neg(const LearnContext& ctx, std::span<const std::size_t> rows) {
    double p = 0.0;
    double n = 0.0;
    for (std::size_t r : rows) (ctx.positive(r) ? p : n) += ctx.weight_of(r);
    return {p, n};
}

std::vector<std::size_t> covered_rows(const Rule& rule, const LearnContext& ctx,
                                      std::span<const std::size_t> rows) {
    std::vector<std::size_t> out;
    for (std::size_t r : rows) {
        if (rule.covers(ctx.x.row(r))) out.push_back(r);
    }
    return out;
}

// One FOIL-gain growth episode: extend the rule until it covers no negative
// grow rows or no condition improves.
Rule grow_rule(const LearnContext& ctx, std::vector<std::size_t> covered, Rule rule) {
    while (true) {
        auto [p, n] = pos_neg(ctx, covered);
        if (n == 0.0 || p == 0.0) break;
        const double base_bits = std::log2(p / (p + n));

        double best_gain = 0.0;
        Condition best;
        bool found = false;

        std::vector<std::pair<double, std::size_t>> vals;
        vals.reserve(covered.size());
        for (std::size_t f = 0; f < ctx.x.cols(); ++f) {
            vals.clear();
            for (std::size_t r : covered) vals.emplace_back(ctx.x.at(r, f), r);
            std::sort(vals.begin(), vals.end());

            double pl = 0.0;
            double nl = 0.0;
            std::size_t i = 0;
            while (i < vals.size()) {
                const double v = vals[i].first;
                while (i < vals.size() && vals[i].first == v) {
                    const std::size_t r = vals[i].second;
                    (ctx.positive(r) ? pl : nl) += ctx.weight_of(r);
                    ++i;
                }
                if (i == vals.size()) break;
                const double threshold = v + 0.5 * (vals[i].first - v);

                // x <= threshold
                if (pl > 0.0) {
                    const double gain = pl * (std::log2(pl / (pl + nl)) - base_bits);
                    if (gain > best_gain) {
                        best_gain = gain;
                        best = Condition{f, false, threshold};
                        found = true;
                    }
                }
                // x > threshold
                const double pr = p - pl;
                const double nr = n - nl;
                if (pr > 0.0) {
                    const double gain = pr * (std::log2(pr / (pr + nr)) - base_bits);
                    if (gain > best_gain) {
                        best_gain = gain;
                        best = Condition{f, true, threshold};
                        found = true;
                    }
                }
            }
        }
        if (!found) break;

        rule.conditions.push_back(best);
        std::vector<std::size_t> next;
        next.reserve(covered.size());
        for (std::size_t r : covered) {
            if (best.matches(ctx.x.row(r))) next.push_back(r);
        }
        covered = std::move(next);
    }
    return rule;
}

// Pruning metric (p - n) / (p + n); rules covering nothing rank worst.
double prune_value(const LearnContext& ctx, const Rule& rule,
                   std::span<const std::size_t> prune_rows) {
    double p = 0.0;
    double n = 0.0;
    for (std::size_t r : prune_rows) {
        if (rule.covers(ctx.x.row(r))) (ctx.positive(r) ? p : n) += ctx.weight_of(r);
    }
    if (p + n == 0.0) return -1.0;
    return (p - n) / (p + n);
}

// Keep the prefix of conditions maximizing the prune metric; ties prefer the
// shorter (more general) prefix. min_len anchors revision candidates.
Rule prune_rule(const LearnContext& ctx, Rule rule, std::span<const std::size_t> prune_rows,
                std::size_t min_len = 0) {
    if (prune_rows.empty()) return rule;
    std::size_t best_len = rule.conditions.size();
    double best_v = prune_value(ctx, rule, prune_rows);
    Rule probe = rule;
    while (probe.conditions.size() > min_len) {
        probe.conditions.pop_back();
        const double v = prune_value(ctx, probe, prune_rows);
        if (v >= best_v) {
            best_v = v;
            best_len = probe.conditions.size();
        }
    }
    rule.conditions.resize(best_len);
    return rule;
}

// Stratified 2:1 grow/prune partition over the canonical row order.
void grow_prune_split(const LearnContext& ctx, std::span<const std::size_t> remaining,
                      Rng& rng, std::vector<std::size_t>& grow, std::vector<std::size_t>& prune) {
    grow.clear();
    prune.clear();
    std::vector<std::size_t> pos, neg;
    for (std::size_t r : remaining) (ctx.positive(r) ? pos : neg).push_back(r);
    rng.shuffle(pos);
    rng.shuffle(neg);
    for (const auto* cls : {&pos, &neg}) {
        const std::size_t cut = (cls->size() * 2 + 2) / 3;  // ceil(2/3)
        for (std::size_t i = 0; i < cls->size(); ++i) {
            (i < cut ? grow : prune).push_back((*cls)[i]);
        }
    }
    if (prune.empty()) prune.assign(grow.begin(), grow.end());
}

double ruleset_mdl(const LearnContext& ctx, const std::vector<Rule>& rules,
                   std::span<const std::size_t> all_rows) {
    double bits = 0.0;
    for (const auto& rule : rules) {
        const double k = static_cast<double>(rule.conditions.size());
        bits += 0.5 * (std::log2(k + 1.0) + k * ctx.condition_space_bits);
    }
    double covered = 0.0, fp = 0.0, uncovered = 0.0, fn = 0.0;
    for (std::size_t r : all_rows) {
        bool hit = false;
        for (const auto& rule : rules) {
            if (rule.covers(ctx.x.row(r))) {
                hit = true;
                break;
            }
        }
        if (hit) {
            covered += 1.0;
            fp += ctx.positive(r) ? 0.0 : 1.0;
        } else {
            uncovered += 1.0;
            fn += ctx.positive(r) ? 1.0 : 0.0;
        }
    }
    bits += std::log2(covered + 1.0) + log2_binomial(covered, fp);
    bits += std::log2(uncovered + 1.0) + log2_binomial(uncovered, fn);
    return bits;
}

LearnContext make_context(const Dataset& d, const RuleLearnConfig& cfg) {
    LearnContext ctx{d.x(), d.y()};
    if (cfg.weighted) {
        const auto [w0, w1] = minority_weights(d.y());
        ctx.w0 = w0;
        ctx.w1 = w1;
    }
    double possible = 0.0;
    for (std::size_t f = 0; f < d.n_cols(); ++f) {
        std::set<double> uniq;
        for (std::size_t r = 0; r < d.n_rows(); ++r) uniq.insert(d.x().at(r, f));
        possible += 2.0 * static_cast<double>(std::max<std::size_t>(1, uniq.size() - 1));
    }
    ctx.condition_space_bits = std::log2(std::max(2.0, possible));
    return ctx;
}

std::vector<std::size_t> initial_rows(const Dataset& d) {
    std::vector<std::size_t> rows = canonical_order(d.x(), d.y());
    return rows;
}

}  // namespace

DecisionList::DecisionList(std::vector<Rule> rules, int default_class, std::size_t n_features)
    : rules_(std::move(rules)), default_class_(default_class), n_features_(n_features) {}

double DecisionList::score_row(std::span<const double> row) const {
    for (const auto& rule : rules_) {
        if (rule.covers(row)) return static_cast<double>(rule.label);
    }
    return static_cast<double>(default_class_);
}

std::string DecisionList::describe(const std::vector<std::string>& feature_names) const {
    std::ostringstream out;
    out << "list rules=" << rules_.size() << " default=" << default_class_ << "\n";
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        out << "rule " << i + 1 << ": if ";
        if (rules_[i].conditions.empty()) {
            out << "true";
        } else {
            for (std::size_t c = 0; c < rules_[i].conditions.size(); ++c) {
                const Condition& cond = rules_[i].conditions[c];
                if (c > 0) out << " and ";
                out << feature_names[cond.feature] << (cond.greater ? " > " : " <= ")
                    << format_real(cond.threshold);
            }
        }
        out << " then " << rules_[i].label << "\n";
    }
    return out.str();
}

DecisionList irep_fit(const Dataset& d, const RuleLearnConfig& cfg) {
    if (!d.both_classes_present()) {
        return DecisionList({}, d.y().front() >= 0.5 ? 1 : 0, d.n_cols());
    }
    LearnContext ctx = make_context(d, cfg);
    Rng rng(mix_seed({cfg.seed, 0x13e9}));

    std::vector<Rule> rules;
    std::vector<std::size_t> remaining = initial_rows(d);
    std::vector<std::size_t> grow, prune;

    while (rules.size() < cfg.max_rules) {
        const auto [p_rem, n_rem] = pos_neg(ctx, remaining);
        if (p_rem == 0.0) break;
        grow_prune_split(ctx, remaining, rng, grow, prune);

        Rule rule = grow_rule(ctx, grow, Rule{});
        rule = prune_rule(ctx, rule, prune);

        // Pruned precision; when the rule fires on no prune row the grow set
        // decides, keeping the stop test defined.
        double p = 0.0, n = 0.0;
        for (std::size_t r : prune) {
            if (rule.covers(ctx.x.row(r))) (ctx.positive(r) ? p : n) += ctx.weight_of(r);
        }
        if (p + n == 0.0) {
            for (std::size_t r : grow) {
                if (rule.covers(ctx.x.row(r))) (ctx.positive(r) ? p : n) += ctx.weight_of(r);
            }
        }
        if (p + n == 0.0 || p / (p + n) <= 0.5) break;

        const auto covered = covered_rows(rule, ctx, remaining);
        if (covered.empty()) break;
        rules.push_back(std::move(rule));
        std::vector<std::size_t> next;
        next.reserve(remaining.size() - covered.size());
        std::set<std::size_t> covered_set(covered.begin(), covered.end());
        for (std::size_t r : remaining) {
            if (!covered_set.count(r)) next.push_back(r);
        }
        remaining = std::move(next);
    }
    return DecisionList(std::move(rules), 0, d.n_cols());
}

DecisionList ripper_fit(const Dataset& d, const RuleLearnConfig& cfg) {
    if (!d.both_classes_present()) {
        return DecisionList({}, d.y().front() >= 0.5 ? 1 : 0, d.n_cols());
    }
    LearnContext ctx = make_context(d, cfg);
    Rng rng(mix_seed({cfg.seed, 0x44b2}));
    const std::vector<std::size_t> all_rows = initial_rows(d);

    std::vector<Rule> rules;
    std::vector<std::size_t> remaining = all_rows;
    std::vector<std::size_t> grow, prune;
    double best_dl = ruleset_mdl(ctx, rules, all_rows);

    // Build with MDL stopping.
    while (rules.size() < kBuildRuleCap) {
        const auto [p_rem, n_rem] = pos_neg(ctx, remaining);
        if (p_rem == 0.0) break;
        grow_prune_split(ctx, remaining, rng, grow, prune);
        Rule rule = grow_rule(ctx, grow, Rule{});
        rule = prune_rule(ctx, rule, prune);
        const auto covered = covered_rows(rule, ctx, remaining);
        if (covered.empty()) break;

        rules.push_back(rule);
        const double dl = ruleset_mdl(ctx, rules, all_rows);
        if (dl > best_dl + kMdlSlackBits) {
            rules.pop_back();
            break;
        }
        best_dl = std::min(best_dl, dl);

        std::set<std::size_t> covered_set(covered.begin(), covered.end());
        std::vector<std::size_t> next;
        for (std::size_t r : remaining) {
            if (!covered_set.count(r)) next.push_back(r);
        }
        remaining = std::move(next);
    }

    // Reverse deletion: drop rules whose removal lowers the description length.
    for (std::size_t i = rules.size(); i-- > 0;) {
        std::vector<Rule> without = rules;
        without.erase(without.begin() + static_cast<std::ptrdiff_t>(i));
        if (ruleset_mdl(ctx, without, all_rows) < ruleset_mdl(ctx, rules, all_rows)) {
            rules = std::move(without);
        }
    }

    // One optimization round: replacement and revision candidates per rule,
    // judged by total MDL with the original kept when it ties.
    for (std::size_t i = 0; cfg.optimize && i < rules.size(); ++i) {
        std::vector<std::size_t> uncovered_by_others;
        for (std::size_t r : all_rows) {
            bool hit = false;
            for (std::size_t j = 0; j < rules.size(); ++j) {
                if (j != i && rules[j].covers(ctx.x.row(r))) {
                    hit = true;
                    break;
                }
            }
            if (!hit) uncovered_by_others.push_back(r);
        }
        if (uncovered_by_others.empty()) continue;
        grow_prune_split(ctx, uncovered_by_others, rng, grow, prune);

        Rule replacement = prune_rule(ctx, grow_rule(ctx, grow, Rule{}), prune);
        Rule revision = rules[i];
        {
            const auto covered = covered_rows(revision, ctx, grow);
            revision = grow_rule(ctx, covered, std::move(revision));
            revision = prune_rule(ctx, revision, prune, rules[i].conditions.size());
        }

        double best = ruleset_mdl(ctx, rules, all_rows);
        for (const Rule& candidate : {replacement, revision}) {
            std::vector<Rule> trial = rules;
            trial[i] = candidate;
            const double dl = ruleset_mdl(ctx, trial, all_rows);
            if (dl < best) {
                best = dl;
                rules[i] = candidate;
            }
        }
    }

    if (rules.size() > cfg.max_rules) rules.resize(cfg.max_rules);
    return DecisionList(std::move(rules), 0, d.n_cols());
}

double decision_list_mdl(const DecisionList& list, const Dataset& d) {
    LearnContext ctx = make_context(d, {});
    std::vector<std::size_t> rows(d.n_rows());
    std::iota(rows.begin(), rows.end(), 0);
    return ruleset_mdl(ctx, list.rules(), rows);
}

}  // namespace prelim
