#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace prelim {

// Fraction of predictions equal to truth. Throws LengthMismatch.
double accuracy(std::span<const int> pred, std::span<const int> truth);

// Mean of true-positive and true-negative rates. When one truth class is
// absent the value falls back to plain accuracy.
double balanced_accuracy(std::span<const int> pred, std::span<const int> truth);

// Agreement rate between white-box and black-box predictions.
double fidelity(std::span<const int> wb_pred, std::span<const int> bb_pred);

// Weighted relative accuracy (n/N)*(n_plus/n - N_plus/N). Counts generalize
// to real-valued target sums so probability-labeled rules reuse the same
// formula. Returns 0 when n == 0. Throws InvalidCounts when the precondition
// 0 <= n_plus <= n <= N, N_plus <= N, N > 0 fails.
double wracc(double n, double n_plus, double big_n, double big_n_plus);

// Difference of a white-box metric against the naive-classifier metric.
double relative_increase(double metric_wb, double metric_naive);

// Majority class of a binary target vector; exact ties break to class 1.
int majority_class(std::span<const double> targets);

// Linear-interpolation quantile (index position (n-1)*p on the sorted copy).
double quantile(std::vector<double> values, double p);

enum class Outcome { win, draw, loss };

std::string outcome_name(Outcome o);

// Per-experiment quality summary for one fitted white box.
struct QualityReport {
    double accuracy = 0.0;
    double balanced_accuracy = 0.0;
    double fidelity = 0.0;
    double wracc = 0.0;
    double rel_acc_inc = 0.0;
    double rel_ba_inc = 0.0;
    double rel_fid_inc = 0.0;
    std::size_t complexity = 0;
    Outcome outcome = Outcome::draw;
};

}  // namespace prelim
