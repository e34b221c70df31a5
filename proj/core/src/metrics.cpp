#include "prelim/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "prelim/errors.hpp"

namespace prelim {

namespace {

void check_lengths(std::size_t a, std::size_t b, const char* where) {
    if (a != b) {
        throw LengthMismatch(std::string(where) + ": " + std::to_string(a) + " vs " +
                             std::to_string(b));
    }
}

}  // namespace

double accuracy(std::span<const int> pred, std::span<const int> truth) {
    check_lengths(pred.size(), truth.size(), "accuracy");
    if (pred.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i];
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double balanced_accuracy(std::span<const int> pred, std::span<const int> truth) {
    check_lengths(pred.size(), truth.size(), "balanced_accuracy");
    std::size_t tp = 0, tn = 0, pos = 0, neg = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (truth[i] == 1) {
            ++pos;
            tp += pred[i] == 1;
        } else {
            ++neg;
            tn += pred[i] == 0;
        }
    }
    if (pos == 0 || neg == 0) return accuracy(pred, truth);
    const double tpr = static_cast<double>(tp) / static_cast<double>(pos);
    const double tnr = static_cast<double>(tn) / static_cast<double>(neg);
    return 0.5 * (tpr + tnr);
}

double fidelity(std::span<const int> wb_pred, std::span<const int> bb_pred) {
    check_lengths(wb_pred.size(), bb_pred.size(), "fidelity");
    return accuracy(wb_pred, bb_pred);
}

double wracc(double n, double n_plus, double big_n, double big_n_plus) {
    if (big_n <= 0.0 || n < 0.0 || n_plus < 0.0 || n_plus > n || n > big_n ||
        big_n_plus > big_n || big_n_plus < 0.0) {
        throw InvalidCounts("wracc: need 0 <= n_plus <= n <= N and N_plus <= N, N > 0");
    }
    if (n == 0.0) return 0.0;  // empty rule covers nothing, no gain
    return (n / big_n) * (n_plus / n - big_n_plus / big_n);
}

double relative_increase(double metric_wb, double metric_naive) {
    return metric_wb - metric_naive;
}

int majority_class(std::span<const double> targets) {
    double ones = 0.0;
    for (double t : targets) ones += t;
    const double zeros = static_cast<double>(targets.size()) - ones;
    return ones >= zeros ? 1 : 0;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw InvalidCounts("quantile of empty vector");
    std::sort(values.begin(), values.end());
    p = std::clamp(p, 0.0, 1.0);
    const double pos = p * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

std::string outcome_name(Outcome o) {
    switch (o) {
        case Outcome::win: return "win";
        case Outcome::draw: return "draw";
        case Outcome::loss: return "loss";
    }
    return "draw";
}

}  // namespace prelim
