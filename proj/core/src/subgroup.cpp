#include "prelim/subgroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "prelim/csv.hpp"
#include "prelim/cv.hpp"
#include "prelim/errors.hpp"
#include "prelim/metrics.hpp"
#include "prelim/rng.hpp"

namespace prelim {

namespace {

// Accumulated score sums can overshoot their count by an ulp; clamp before
// handing them to the strict wracc contract.
double safe_wracc(double n, double n_plus, double big_n, double big_n_plus) {
    n_plus = std::clamp(n_plus, 0.0, n);
    big_n_plus = std::clamp(big_n_plus, 0.0, big_n);
    return wracc(n, n_plus, big_n, big_n_plus);
}

void validate_targets(const Matrix& x, std::span<const double> targets) {
    if (x.rows() == 0 || x.cols() == 0) throw EmptyAfterFiltering("subgroup: empty data");
    if (targets.size() != x.rows()) throw LengthMismatch("subgroup: rows vs targets");
    for (double t : targets) {
        if (!(t >= 0.0 && t <= 1.0)) throw BadFormat("subgroup: target outside [0,1]");
    }
}

// Group of rows sharing one distinct feature value.
struct ValueGroup {
    double value = 0.0;
    double count = 0.0;
    double target_sum = 0.0;
};

std::vector<ValueGroup> group_by_value(const Matrix& x, std::span<const double> targets,
                                       std::span<const std::size_t> rows, std::size_t feature) {
    std::vector<std::pair<double, double>> vals;  // (value, target)
    vals.reserve(rows.size());
    for (std::size_t r : rows) vals.emplace_back(x.at(r, feature), targets[r]);
    std::sort(vals.begin(), vals.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<ValueGroup> groups;
    for (std::size_t i = 0; i < vals.size();) {
        ValueGroup g;
        g.value = vals[i].first;
        while (i < vals.size() && vals[i].first == g.value) {
            g.count += 1.0;
            g.target_sum += vals[i].second;
            ++i;
        }
        groups.push_back(g);
    }
    return groups;
}

// Segment score N*sum(t) - n*N_plus; maximizing it over contiguous value
// ranges maximizes WRAcc. Exact for 0/1 targets (integer arithmetic in
// doubles).
struct SegmentChoice {
    double score = -std::numeric_limits<double>::infinity();
    double count = 0.0;
    std::size_t lo = 0;
    std::size_t hi = 0;
    bool found = false;

    // Spec tie-breaks: higher score, then more rows covered, then the lower
    // left endpoint, then the lower right endpoint.
    bool better_than(const SegmentChoice& other) const {
        if (!other.found) return found;
        if (score != other.score) return score > other.score;
        if (count != other.count) return count > other.count;
        if (lo != other.lo) return lo < other.lo;
        return hi < other.hi;
    }
};

SegmentChoice best_segment(const std::vector<ValueGroup>& groups, double total_n,
                           double total_target) {
    SegmentChoice best;
    const std::size_t g = groups.size();
    if (g == 0) return best;

    std::vector<double> prefix_score(g + 1, 0.0);
    std::vector<double> prefix_count(g + 1, 0.0);
    for (std::size_t i = 0; i < g; ++i) {
        prefix_score[i + 1] =
            prefix_score[i] + total_n * groups[i].target_sum - groups[i].count * total_target;
        prefix_count[i + 1] = prefix_count[i] + groups[i].count;
    }

    // Best start index for each end: the minimal prefix score, preferring the
    // earliest index so covered mass is maximal on ties.
    std::size_t arg_min = 0;
    for (std::size_t end = 1; end <= g; ++end) {
        SegmentChoice cand;
        cand.found = true;
        cand.score = prefix_score[end] - prefix_score[arg_min];
        cand.count = prefix_count[end] - prefix_count[arg_min];
        cand.lo = arg_min;
        cand.hi = end - 1;
        if (cand.better_than(best)) best = cand;
        if (prefix_score[end] < prefix_score[arg_min]) arg_min = end;
    }
    return best;
}

std::vector<std::size_t> rows_in_box_except(const Box& box, const Matrix& x,
                                            std::size_t skip_feature) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        bool ok = true;
        for (std::size_t f = 0; f < x.cols() && ok; ++f) {
            if (f == skip_feature || !box.is_restricted(f)) continue;
            const double v = x.at(r, f);
            ok = v >= box.low(f) && v <= box.high(f);
        }
        if (ok) rows.push_back(r);
    }
    return rows;
}

}  // namespace

Box::Box(std::size_t n_features)
    : lows_(n_features, -std::numeric_limits<double>::infinity()),
      highs_(n_features, std::numeric_limits<double>::infinity()),
      restricted_(n_features, 0) {}

double Box::score_row(std::span<const double> row) const {
    return contains(row) ? 1.0 : 0.0;
}

std::size_t Box::complexity() const {
    std::size_t c = 0;
    for (char r : restricted_) c += r != 0;
    return c;
}

bool Box::contains(std::span<const double> row) const {
    for (std::size_t f = 0; f < lows_.size(); ++f) {
        if (!restricted_[f]) continue;
        if (row[f] < lows_[f] || row[f] > highs_[f]) return false;
    }
    return true;
}

void Box::restrict(std::size_t feature, double low, double high) {
    lows_[feature] = low;
    highs_[feature] = high;
    restricted_[feature] = 1;
}

void Box::release(std::size_t feature) {
    lows_[feature] = -std::numeric_limits<double>::infinity();
    highs_[feature] = std::numeric_limits<double>::infinity();
    restricted_[feature] = 0;
}

std::string Box::describe(const std::vector<std::string>& feature_names) const {
    std::ostringstream out;
    out << "box restricted=" << complexity() << "\n";
    for (std::size_t f = 0; f < lows_.size(); ++f) {
        if (!restricted_[f]) continue;
        out << feature_names[f] << " in [" << format_real(lows_[f]) << ", "
            << format_real(highs_[f]) << "]\n";
    }
    return out.str();
}

double box_wracc(const Box& box, const Matrix& x, std::span<const double> targets) {
    double n = 0.0;
    double n_plus = 0.0;
    double total_plus = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        total_plus += targets[r];
        if (box.contains(x.row(r))) {
            n += 1.0;
            n_plus += targets[r];
        }
    }
    return safe_wracc(n, n_plus, static_cast<double>(x.rows()), total_plus);
}

Box prim_fit(const Matrix& x, std::span<const double> targets, double alpha,
             std::size_t min_support) {
    if (!(alpha > 0.0 && alpha < 0.5)) throw InvalidAlpha("prim: alpha must be in (0, 0.5)");
    validate_targets(x, targets);

    const double total_n = static_cast<double>(x.rows());
    const double total_plus = std::accumulate(targets.begin(), targets.end(), 0.0);

    std::vector<std::size_t> active(x.rows());
    std::iota(active.begin(), active.end(), 0);

    Box current(x.cols());
    Box best = current;
    double best_wracc = safe_wracc(total_n, total_plus, total_n, total_plus);  // full box: 0
    double active_plus = total_plus;

    struct Peel {
        bool found = false;
        double wracc_after = -1.0;
        double count_after = 0.0;
        std::size_t feature = 0;
        bool from_low = true;
        double cutoff = 0.0;  // remove values <= cutoff (low) or >= cutoff (high)
    };

    while (active.size() >= 2) {
        const std::size_t k = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(alpha * static_cast<double>(active.size()))));

        Peel best_peel;
        std::vector<double> vals(active.size());
        for (std::size_t f = 0; f < x.cols(); ++f) {
            for (std::size_t i = 0; i < active.size(); ++i) vals[i] = x.at(active[i], f);

            for (const bool from_low : {true, false}) {
                // k-th order statistic from the matching end; selection, not
                // a full sort.
                const std::size_t pos = from_low ? k - 1 : vals.size() - k;
                std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(pos),
                                 vals.end());
                const double cutoff = vals[pos];
                double removed = 0.0;
                double removed_plus = 0.0;
                for (std::size_t i = 0; i < active.size(); ++i) {
                    const double v = x.at(active[i], f);
                    if (from_low ? v <= cutoff : v >= cutoff) {
                        removed += 1.0;
                        removed_plus += targets[active[i]];
                    }
                }
                const double remain = static_cast<double>(active.size()) - removed;
                if (remain < static_cast<double>(min_support)) continue;
                const double w =
                    safe_wracc(remain, active_plus - removed_plus, total_n, total_plus);
                Peel cand{true, w, remain, f, from_low, cutoff};
                const bool better =
                    !best_peel.found || cand.wracc_after > best_peel.wracc_after ||
                    (cand.wracc_after == best_peel.wracc_after &&
                     (cand.count_after > best_peel.count_after ||
                      (cand.count_after == best_peel.count_after &&
                       (cand.feature < best_peel.feature ||
                        (cand.feature == best_peel.feature && cand.from_low &&
                         !best_peel.from_low)))));
                if (better) best_peel = cand;
            }
        }
        if (!best_peel.found) break;

        std::vector<std::size_t> next;
        next.reserve(static_cast<std::size_t>(best_peel.count_after));
        for (std::size_t r : active) {
            const double v = x.at(r, best_peel.feature);
            const bool removed = best_peel.from_low ? v <= best_peel.cutoff : v >= best_peel.cutoff;
            if (!removed) next.push_back(r);
        }
        active = std::move(next);
        active_plus = 0.0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t r : active) {
            active_plus += targets[r];
            lo = std::min(lo, x.at(r, best_peel.feature));
            hi = std::max(hi, x.at(r, best_peel.feature));
        }
        current.restrict(best_peel.feature, lo, hi);

        const double w = safe_wracc(static_cast<double>(active.size()), active_plus,
                                    total_n, total_plus);
        if (w > best_wracc) {
            best_wracc = w;
            best = current;
        }
    }
    return best;
}

PrimFit prim_fit_cv(const Matrix& x, std::span<const double> targets, std::uint64_t seed,
                    std::size_t min_support) {
    validate_targets(x, targets);
    const auto folds = stratified_folds(x, targets, 5, mix_seed({seed, 0xa1fa}));
    const std::size_t n_folds = 1 + *std::max_element(folds.begin(), folds.end());

    double best_score = -std::numeric_limits<double>::infinity();
    double best_alpha = kPrimAlphaGrid[0];
    for (const double alpha : kPrimAlphaGrid) {
        double sum = 0.0;
        std::size_t scored = 0;
        for (std::size_t f = 0; f < n_folds; ++f) {
            std::vector<std::size_t> tr, va;
            for (std::size_t i = 0; i < folds.size(); ++i) (folds[i] == f ? va : tr).push_back(i);
            if (tr.size() < min_support || va.empty()) continue;
            const Matrix xtr = x.take_rows(tr);
            std::vector<double> ttr(tr.size());
            for (std::size_t i = 0; i < tr.size(); ++i) ttr[i] = targets[tr[i]];
            const Box box = prim_fit(xtr, ttr, alpha, min_support);

            const Matrix xva = x.take_rows(va);
            std::vector<double> tva(va.size());
            for (std::size_t i = 0; i < va.size(); ++i) tva[i] = targets[va[i]];
            sum += box_wracc(box, xva, tva);
            ++scored;
        }
        const double score = scored ? sum / static_cast<double>(scored)
                                    : -std::numeric_limits<double>::infinity();
        if (score > best_score) {
            best_score = score;
            best_alpha = alpha;
        }
    }
    return {prim_fit(x, targets, best_alpha, min_support), best_alpha};
}

std::vector<std::size_t> bi_budget_grid(std::size_t m) {
    const std::size_t z = std::min<std::size_t>(15, m);
    const std::size_t step = (z + 4) / 5;  // ceil(Z/5)
    std::vector<std::size_t> grid;
    for (std::size_t j = 0;; ++j) {
        const std::size_t take = j * step;
        if (take >= z) break;
        grid.push_back(z - take);
    }
    return grid;
}

Box bestinterval_fit(const Matrix& x, std::span<const double> targets,
                     std::size_t feature_budget) {
    if (feature_budget < 1) throw InvalidBudget("bestinterval: budget must be >= 1");
    validate_targets(x, targets);

    const double total_n = static_cast<double>(x.rows());
    const double total_plus = std::accumulate(targets.begin(), targets.end(), 0.0);

    Box box(x.cols());
    constexpr std::size_t kMaxPasses = 100;
    for (std::size_t pass = 0; pass < kMaxPasses; ++pass) {
        bool changed = false;

        // Candidate improvement for feature f given all other bounds fixed.
        struct Candidate {
            bool improves = false;
            bool full_range = false;
            double gain = 0.0;
            double lo = 0.0, hi = 0.0;
        };
        const auto scan = [&](std::size_t f) {
            Candidate cand;
            const auto active = rows_in_box_except(box, x, f);
            if (active.empty()) return cand;
            const auto groups = group_by_value(x, targets, active, f);
            const SegmentChoice seg = best_segment(groups, total_n, total_plus);
            if (!seg.found) return cand;

            // Current contribution of feature f: the segment of active rows
            // inside its present bounds.
            double cur_count = 0.0;
            double cur_plus = 0.0;
            for (std::size_t r : active) {
                const double v = x.at(r, f);
                if (!box.is_restricted(f) || (v >= box.low(f) && v <= box.high(f))) {
                    cur_count += 1.0;
                    cur_plus += targets[r];
                }
            }
            const double cur_score = total_n * cur_plus - cur_count * total_plus;
            if (seg.score <= cur_score) return cand;
            cand.improves = true;
            cand.gain = seg.score - cur_score;
            cand.full_range = seg.lo == 0 && seg.hi == groups.size() - 1;
            cand.lo = groups[seg.lo].value;
            cand.hi = groups[seg.hi].value;
            return cand;
        };

        // Already-restricted features are re-optimized in index order.
        for (std::size_t f = 0; f < x.cols(); ++f) {
            if (!box.is_restricted(f)) continue;
            const Candidate cand = scan(f);
            if (!cand.improves) continue;
            if (cand.full_range) {
                box.release(f);
            } else {
                box.restrict(f, cand.lo, cand.hi);
            }
            changed = true;
        }

        // One new feature may enter per pass: the unrestricted feature whose
        // optimal interval improves the box most.
        if (box.complexity() < feature_budget) {
            std::size_t best_f = x.cols();
            Candidate best;
            for (std::size_t f = 0; f < x.cols(); ++f) {
                if (box.is_restricted(f)) continue;
                const Candidate cand = scan(f);
                if (cand.improves && !cand.full_range &&
                    (best_f == x.cols() || cand.gain > best.gain)) {
                    best = cand;
                    best_f = f;
                }
            }
            if (best_f < x.cols()) {
                box.restrict(best_f, best.lo, best.hi);
                changed = true;
            }
        }
        if (!changed) break;
    }
    return box;
}

BiFit bestinterval_fit_cv(const Matrix& x, std::span<const double> targets, std::uint64_t seed,
                          std::size_t budget_cap) {
    validate_targets(x, targets);
    std::vector<std::size_t> grid = bi_budget_grid(x.cols());
    if (budget_cap > 0) {
        std::erase_if(grid, [&](std::size_t b) { return b > budget_cap; });
        if (grid.empty()) grid.push_back(budget_cap);
    }
    if (grid.size() == 1) return {bestinterval_fit(x, targets, grid.front()), grid.front()};

    const auto folds = stratified_folds(x, targets, 5, mix_seed({seed, 0xb1d6e7}));
    const std::size_t n_folds = 1 + *std::max_element(folds.begin(), folds.end());

    double best_score = -std::numeric_limits<double>::infinity();
    std::size_t best_budget = grid.front();
    for (const std::size_t budget : grid) {
        double sum = 0.0;
        std::size_t scored = 0;
        for (std::size_t f = 0; f < n_folds; ++f) {
            std::vector<std::size_t> tr, va;
            for (std::size_t i = 0; i < folds.size(); ++i) (folds[i] == f ? va : tr).push_back(i);
            if (tr.empty() || va.empty()) continue;
            const Matrix xtr = x.take_rows(tr);
            std::vector<double> ttr(tr.size());
            for (std::size_t i = 0; i < tr.size(); ++i) ttr[i] = targets[tr[i]];
            const Box box = bestinterval_fit(xtr, ttr, budget);

            const Matrix xva = x.take_rows(va);
            std::vector<double> tva(va.size());
            for (std::size_t i = 0; i < va.size(); ++i) tva[i] = targets[va[i]];
            sum += box_wracc(box, xva, tva);
            ++scored;
        }
        const double score = scored ? sum / static_cast<double>(scored)
                                    : -std::numeric_limits<double>::infinity();
        if (score > best_score) {
            best_score = score;
            best_budget = budget;
        }
    }
    return {bestinterval_fit(x, targets, best_budget), best_budget};
}

}  // namespace prelim
