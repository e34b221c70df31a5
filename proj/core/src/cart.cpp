#include "prelim/cart.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include "prelim/csv.hpp"
#include "prelim/errors.hpp"
#include "prelim/rng.hpp"

namespace prelim {

namespace {

// Relative gain floor: analytically-zero splits must not consume leaf budget.
constexpr double kMinGainShare = 1e-12;

// Weighted Gini mass of a (c0, c1) count pair: W * 2p(1-p) = 2*c0*w0*c1*w1/W.
double impurity_mass(double c0, double c1, double w0, double w1) {
    const double a = c0 * w0;
    const double b = c1 * w1;
    const double total = a + b;
    if (total <= 0.0) return 0.0;
    return 2.0 * a * b / total;
}

struct BestSplit {
    bool found = false;
    std::int32_t feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

struct Builder {
    const Matrix& x;
    std::span<const double> y;
    const CartConfig& cfg;
    Rng rng;
    std::vector<TreeNode> nodes;
    std::vector<std::vector<std::uint32_t>> node_rows;

    Builder(const Matrix& x_, std::span<const double> y_, const CartConfig& cfg_)
        : x(x_), y(y_), cfg(cfg_), rng(cfg_.seed) {}

    std::int32_t make_node(std::vector<std::uint32_t> rows) {
        double c1 = 0.0;
        for (std::uint32_t r : rows) c1 += y[r];
        const double c0 = static_cast<double>(rows.size()) - c1;
        TreeNode node;
        node.weight = c0 * cfg.weight0 + c1 * cfg.weight1;
        node.prob1 = node.weight > 0.0 ? c1 * cfg.weight1 / node.weight : 0.0;
        node.count = static_cast<std::uint32_t>(rows.size());
        nodes.push_back(node);
        node_rows.push_back(std::move(rows));
        return static_cast<std::int32_t>(nodes.size() - 1);
    }

    std::vector<std::size_t> candidate_features() {
        std::vector<std::size_t> feats(x.cols());
        std::iota(feats.begin(), feats.end(), 0);
        if (cfg.max_features == 0 || cfg.max_features >= x.cols()) return feats;
        // Partial Fisher-Yates, then ascending order for deterministic scans.
        for (std::size_t i = 0; i < cfg.max_features; ++i) {
            const std::size_t j = i + rng.index(feats.size() - i);
            std::swap(feats[i], feats[j]);
        }
        feats.resize(cfg.max_features);
        std::sort(feats.begin(), feats.end());
        return feats;
    }

    BestSplit find_split(std::int32_t id) {
        const auto& rows = node_rows[id];
        BestSplit best;
        if (rows.size() < 2) return best;
        if (cfg.min_internal_samples > 0 && rows.size() <= cfg.min_internal_samples) return best;

        double total1 = 0.0;
        for (std::uint32_t r : rows) total1 += y[r];
        const double total0 = static_cast<double>(rows.size()) - total1;
        if (total0 == 0.0 || total1 == 0.0) return best;  // pure node

        const double parent_mass = impurity_mass(total0, total1, cfg.weight0, cfg.weight1);
        const double gain_floor = kMinGainShare * nodes[id].weight;

        std::vector<std::pair<double, double>> vals;  // (value, label)
        vals.reserve(rows.size());
        for (const std::size_t f : candidate_features()) {
            vals.clear();
            for (std::uint32_t r : rows) vals.emplace_back(x.at(r, f), y[r]);
            std::sort(vals.begin(), vals.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            double left0 = 0.0;
            double left1 = 0.0;
            std::size_t i = 0;
            while (i < vals.size()) {
                // Aggregate the run of equal values so counts are exact
                // integers independent of row order.
                const double v = vals[i].first;
                double run1 = 0.0;
                std::size_t run = 0;
                while (i < vals.size() && vals[i].first == v) {
                    run1 += vals[i].second;
                    ++run;
                    ++i;
                }
                left1 += run1;
                left0 += static_cast<double>(run) - run1;
                if (i == vals.size()) break;  // no boundary after the last run

                const double right0 = total0 - left0;
                const double right1 = total1 - left1;
                const double gain = parent_mass -
                                    impurity_mass(left0, left1, cfg.weight0, cfg.weight1) -
                                    impurity_mass(right0, right1, cfg.weight0, cfg.weight1);
                if (gain > gain_floor && gain > best.gain) {
                    best.found = true;
                    best.feature = static_cast<std::int32_t>(f);
                    best.threshold = v + 0.5 * (vals[i].first - v);
                    best.gain = gain;
                }
            }
        }
        return best;
    }

    void expand(std::int32_t id, const BestSplit& split) {
        auto rows = std::move(node_rows[id]);
        std::vector<std::uint32_t> left_rows;
        std::vector<std::uint32_t> right_rows;
        for (std::uint32_t r : rows) {
            if (x.at(r, static_cast<std::size_t>(split.feature)) <= split.threshold) {
                left_rows.push_back(r);
            } else {
                right_rows.push_back(r);
            }
        }
        const std::int32_t left = make_node(std::move(left_rows));
        const std::int32_t right = make_node(std::move(right_rows));
        nodes[id].feature = split.feature;
        nodes[id].threshold = split.threshold;
        nodes[id].left = left;
        nodes[id].right = right;
    }
};

}  // namespace

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::size_t n_features)
    : nodes_(std::move(nodes)), n_features_(n_features) {}

double DecisionTree::score_row(std::span<const double> row) const {
    return nodes_[leaf_for(row)].prob1;
}

std::size_t DecisionTree::leaf_for(std::span<const double> row) const {
    check_width(row.size());
    std::size_t id = 0;
    while (!nodes_[id].is_leaf()) {
        const TreeNode& n = nodes_[id];
        id = row[static_cast<std::size_t>(n.feature)] <= n.threshold
                 ? static_cast<std::size_t>(n.left)
                 : static_cast<std::size_t>(n.right);
    }
    return id;
}

std::size_t DecisionTree::leaf_count() const {
    std::size_t leaves = 0;
    for (const auto& n : nodes_) leaves += n.is_leaf();
    return leaves;
}

std::string DecisionTree::describe(const std::vector<std::string>& feature_names) const {
    std::ostringstream out;
    out << "tree leaves=" << leaf_count() << "\n";
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const TreeNode& n = nodes_[i];
        if (n.is_leaf()) {
            out << i << ": leaf p1=" << format_real(n.prob1) << " n=" << n.count << "\n";
        } else {
            out << i << ": if " << feature_names[static_cast<std::size_t>(n.feature)]
                << " <= " << format_real(n.threshold) << " goto " << n.left << " else "
                << n.right << "\n";
        }
    }
    return out.str();
}

DecisionTree cart_fit(const Matrix& x, std::span<const double> y, const CartConfig& cfg) {
    if (x.rows() == 0 || x.cols() == 0) throw EmptyAfterFiltering("cart_fit: empty data");
    if (y.size() != x.rows()) throw LengthMismatch("cart_fit: rows vs targets");

    Builder b(x, y, cfg);
    std::vector<std::uint32_t> all(x.rows());
    std::iota(all.begin(), all.end(), 0);
    b.make_node(std::move(all));

    // Best-first expansion: largest impurity decrease first, node id breaks
    // ties so growth order is deterministic.
    struct Entry {
        double gain;
        std::int32_t id;
        BestSplit split;
    };
    auto cmp = [](const Entry& a, const Entry& b) {
        if (a.gain != b.gain) return a.gain < b.gain;
        return a.id > b.id;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> frontier(cmp);

    const BestSplit root = b.find_split(0);
    if (root.found) frontier.push({root.gain, 0, root});

    std::size_t leaves = 1;
    while (!frontier.empty() && (cfg.max_leaves == 0 || leaves < cfg.max_leaves)) {
        const Entry e = frontier.top();
        frontier.pop();
        b.expand(e.id, e.split);
        ++leaves;
        for (const std::int32_t child : {b.nodes[e.id].left, b.nodes[e.id].right}) {
            const BestSplit s = b.find_split(child);
            if (s.found) frontier.push({s.gain, child, s});
        }
    }
    return DecisionTree(std::move(b.nodes), x.cols());
}

DecisionTree cart_fit(const Dataset& d, const CartConfig& cfg) {
    return cart_fit(d.x(), d.y(), cfg);
}

std::pair<double, double> minority_weights(std::span<const double> y) {
    double ones = 0.0;
    for (double t : y) ones += t;
    const double zeros = static_cast<double>(y.size()) - ones;
    if (ones == 0.0 || zeros == 0.0) return {1.0, 1.0};
    const double n = static_cast<double>(y.size());
    return {n / (2.0 * zeros), n / (2.0 * ones)};
}

}  // namespace prelim
