#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "prelim/cart.hpp"
#include "prelim/dataset.hpp"
#include "prelim/decision_list.hpp"
#include "prelim/errors.hpp"
#include "prelim/metrics.hpp"
#include "prelim/rng.hpp"
#include "prelim/subgroup.hpp"
#include "prelim/whitebox.hpp"

using namespace prelim;

namespace {

Matrix column(const std::vector<double>& xs) {
    Matrix m(xs.size(), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) m.at(i, 0) = xs[i];
    return m;
}

double train_accuracy(const Classifier& model, const Matrix& x, const std::vector<double>& y) {
    const auto pred = model.predict(x);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == static_cast<int>(y[i]);
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

// Exhaustive oracle: best WRAcc over every closed interval with endpoints on
// observed values of a single feature.
double best_interval_wracc_oracle(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::vector<double> values = xs;
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    const double total_n = static_cast<double>(xs.size());
    const double total_plus = std::accumulate(ys.begin(), ys.end(), 0.0);
    double best = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        for (std::size_t j = i; j < values.size(); ++j) {
            double n = 0.0;
            double np = 0.0;
            for (std::size_t r = 0; r < xs.size(); ++r) {
                if (xs[r] >= values[i] && xs[r] <= values[j]) {
                    n += 1.0;
                    np += ys[r];
                }
            }
            best = std::max(best, wracc(n, np, total_n, total_plus));
        }
    }
    return best;
}

Dataset random_binary(std::size_t n, std::size_t m, Rng& rng) {
    Matrix x(n, m);
    std::vector<double> y(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < m; ++c) x.at(r, c) = rng.uniform();
        y[r] = (x.at(r, 0) > 0.45 && rng.uniform() > 0.15) ? 1.0 : 0.0;
    }
    bool has0 = false, has1 = false;
    for (double t : y) (t > 0.5 ? has1 : has0) = true;
    if (!has0) y[0] = 0.0;
    if (!has1) y[1] = 1.0;
    return Dataset(std::move(x), std::move(y), {});
}

}  // namespace

TEST_SUITE("whitebox") {

TEST_CASE("dtcv grid and caps") {
    CHECK(kDtcvLeafGrid == std::array<std::size_t, 7>{2, 4, 8, 16, 32, 64, 128});

    // Eight alternating stripes: a perfect tree needs exactly 8 leaves, so
    // unconstrained CV settles on the 8-leaf grid point.
    Rng rng(3);
    std::vector<double> xs(400), ys(400);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = rng.uniform();
        ys[i] = static_cast<int>(std::floor(xs[i] * 8.0)) % 2 == 0 ? 0.0 : 1.0;
    }
    const Dataset d(column(xs), ys, {});

    const DecisionTree free_tree = dt_variant_fit(d, WhiteBoxKind::dtcv, std::nullopt, false, 9);
    CHECK(free_tree.leaf_count() == 8);

    const DecisionTree capped = dt_variant_fit(d, WhiteBoxKind::dtcv, 4, false, 9);
    CHECK(capped.leaf_count() <= 4);
}

TEST_CASE("dtcomp honors the 8-leaf cap and dt honors min samples") {
    Rng rng(5);
    const Dataset d = random_binary(300, 3, rng);
    const DecisionTree comp = dt_variant_fit(d, WhiteBoxKind::dtcomp);
    CHECK(comp.leaf_count() <= 8);

    const DecisionTree dt = dt_variant_fit(d, WhiteBoxKind::dt);
    for (const auto& node : dt.nodes()) {
        if (!node.is_leaf()) CHECK(node.count > 10);
    }
}

TEST_CASE("irep learns the single perfect rule on separable 1-D data") {
    Rng rng(7);
    std::vector<double> xs(120), ys(120);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = rng.uniform();
        ys[i] = xs[i] > 0.7 ? 1.0 : 0.0;
    }
    // Oracle: a single threshold condition separates perfectly.
    double lo = 0.0, hi = 1.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (ys[i] == 0.0) lo = std::max(lo, xs[i]);
        if (ys[i] == 1.0) hi = std::min(hi, xs[i]);
    }
    REQUIRE(lo < hi);

    const Dataset d(column(xs), ys, {});
    const DecisionList list = irep_fit(d, {.seed = 11});
    CHECK(list.rules().size() == 1);
    REQUIRE(list.rules()[0].conditions.size() == 1);
    const Condition& c = list.rules()[0].conditions[0];
    CHECK(c.greater);
    CHECK(c.threshold >= lo);
    CHECK(c.threshold <= hi);
    CHECK(train_accuracy(list, d.x(), d.y()) == 1.0);
}

TEST_CASE("irep degenerate single-class data") {
    const Dataset zeros(column({0.1, 0.5, 0.9}), {0, 0, 0}, {});
    const DecisionList list = irep_fit(zeros);
    CHECK(list.rules().empty());
    CHECK(list.default_class() == 0);
    CHECK(list.complexity() == 0);

    const Dataset ones(column({0.1, 0.5, 0.9}), {1, 1, 1}, {});
    CHECK(irep_fit(ones).default_class() == 1);
}

TEST_CASE("rule cap binds on ten separated clusters") {
    // Ten pure positive clusters separated by negatives: axis-interval rules
    // cover one cluster each, so the cap of eight binds exactly.
    std::vector<double> xs, ys;
    Rng rng(13);
    for (int cluster = 0; cluster < 10; ++cluster) {
        const double center = 0.05 + 0.1 * cluster;
        for (int i = 0; i < 30; ++i) {
            xs.push_back(center + 0.012 * rng.uniform());
            ys.push_back(1.0);
        }
        for (int i = 0; i < 30; ++i) {
            xs.push_back(center + 0.05 + 0.02 * rng.uniform());
            ys.push_back(0.0);
        }
    }
    const Dataset d(column(xs), ys, {});
    const DecisionList irep = irep_fit(d, {.seed = 5});
    CHECK(irep.rules().size() == 8);
    const DecisionList ripper = ripper_fit(d, {.seed = 5});
    CHECK(ripper.rules().size() <= 8);
}

TEST_CASE("ripper reduces to one perfect rule on separable data") {
    Rng rng(17);
    std::vector<double> xs(90), ys(90);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = rng.uniform();
        ys[i] = xs[i] > 0.6 ? 1.0 : 0.0;
    }
    const Dataset d(column(xs), ys, {});
    const DecisionList irep = irep_fit(d, {.seed = 23});
    const DecisionList ripper = ripper_fit(d, {.seed = 23});
    CHECK(irep.rules().size() == 1);
    CHECK(ripper.rules().size() == 1);
    CHECK(train_accuracy(irep, d.x(), d.y()) == 1.0);
    CHECK(train_accuracy(ripper, d.x(), d.y()) == 1.0);
}

TEST_CASE("ripper optimization never increases training MDL") {
    Rng rng(19);
    for (int trial = 0; trial < 8; ++trial) {
        const Dataset d = random_binary(80 + rng.index(80), 1 + rng.index(3), rng);
        RuleLearnConfig raw;
        raw.seed = 100 + trial;
        raw.optimize = false;
        RuleLearnConfig opt = raw;
        opt.optimize = true;
        const double before = decision_list_mdl(ripper_fit(d, raw), d);
        const double after = decision_list_mdl(ripper_fit(d, opt), d);
        CHECK(after <= before + 1e-9);
    }
}

TEST_CASE("prim alpha grid matches the documented candidates") {
    const std::vector<double> grid(std::begin(kPrimAlphaGrid), std::end(kPrimAlphaGrid));
    CHECK(grid == std::vector<double>{0.03, 0.05, 0.07, 0.1, 0.13, 0.16, 0.2});
}

TEST_CASE("prim peels to the high-target box on the 100-point grid") {
    std::vector<double> xs(100), ys(100);
    for (int i = 0; i < 100; ++i) {
        xs[i] = i / 100.0;
        ys[i] = xs[i] >= 0.9 ? 1.0 : 0.0;
    }
    const Matrix x = column(xs);
    const Box box = prim_fit(x, ys, 0.1);

    // Exhaustive endpoint oracle on the same grid.
    const double oracle = best_interval_wracc_oracle(xs, ys);
    CHECK(oracle == doctest::Approx(0.09).epsilon(1e-12));

    CHECK(box_wracc(box, x, ys) == doctest::Approx(0.09).epsilon(1e-12));
    CHECK(box.is_restricted(0));
    CHECK(box.low(0) == doctest::Approx(0.9));
    CHECK(box.high(0) == doctest::Approx(0.99));

    SUBCASE("uniform targets return the full box") {
        std::vector<double> flat(100, 1.0);
        const Box full = prim_fit(x, flat, 0.1);
        CHECK(full.complexity() == 0);
        CHECK(box_wracc(full, x, flat) == 0.0);
    }

    SUBCASE("invalid alpha") {
        CHECK_THROWS_AS(prim_fit(x, ys, 0.0), InvalidAlpha);
        CHECK_THROWS_AS(prim_fit(x, ys, 0.5), InvalidAlpha);
    }
}

TEST_CASE("prim result is never worse than the full box") {
    Rng rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 40 + rng.index(100);
        Matrix x(n, 2);
        std::vector<double> t(n);
        for (std::size_t r = 0; r < n; ++r) {
            x.at(r, 0) = rng.uniform();
            x.at(r, 1) = rng.uniform();
            t[r] = rng.uniform() < 0.3 ? 1.0 : 0.0;
        }
        const Box box = prim_fit(x, t, 0.07);
        CHECK(box_wracc(box, x, t) >= 0.0);
    }
}

TEST_CASE("bi budget grid") {
    CHECK(bi_budget_grid(20) == std::vector<std::size_t>{15, 12, 9, 6, 3});
    CHECK(bi_budget_grid(15) == std::vector<std::size_t>{15, 12, 9, 6, 3});
    CHECK(bi_budget_grid(7) == std::vector<std::size_t>{7, 5, 3, 1});
    CHECK(bi_budget_grid(2) == std::vector<std::size_t>{2, 1});
    CHECK(bi_budget_grid(1) == std::vector<std::size_t>{1});
}

TEST_CASE("bestinterval matches the exhaustive 1-D oracle") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 10 + rng.index(50);
        std::vector<double> xs(n), ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = std::round(rng.uniform() * 20.0) / 20.0;  // duplicates on purpose
            ys[i] = rng.uniform() < 0.4 ? 1.0 : 0.0;
        }
        const Matrix x = column(xs);
        const Box box = bestinterval_fit(x, ys, 1);
        const double oracle = best_interval_wracc_oracle(xs, ys);
        CHECK(box_wracc(box, x, ys) == oracle);
    }
}

TEST_CASE("bestinterval respects a budget of one with signal in feature 2") {
    Rng rng(37);
    const std::size_t n = 200;
    Matrix x(n, 2);
    std::vector<double> t(n);
    for (std::size_t r = 0; r < n; ++r) {
        x.at(r, 0) = rng.uniform();
        x.at(r, 1) = rng.uniform();
        t[r] = (x.at(r, 1) >= 0.55 && x.at(r, 1) <= 0.8) ? 1.0 : 0.0;
    }
    const Box box = bestinterval_fit(x, t, 1);
    CHECK(box.complexity() == 1);
    CHECK(!box.is_restricted(0));
    CHECK(box.is_restricted(1));
    CHECK(box_wracc(box, x, t) > 0.1);

    CHECK_THROWS_AS(bestinterval_fit(x, t, 0), InvalidBudget);
}

TEST_CASE("complexity counts leaves, rules, restricted features") {
    const Dataset pure(column({0.1, 0.2}), {1, 1}, {});
    const DecisionTree leaf = cart_fit(pure, {});
    CHECK(complexity(leaf) == 1);

    const DecisionList empty({}, 0, 3);
    CHECK(complexity(empty) == 0);

    Box box(10);
    box.restrict(1, 0.0, 0.5);
    box.restrict(4, 0.2, 0.3);
    box.restrict(9, 0.5, 1.0);
    CHECK(complexity(box) == 3);
}

TEST_CASE("decision list prediction is order dependent") {
    // Witness: x = 0.3 falls under both rules; the first decides.
    Rule a{{Condition{0, false, 0.5}}, 1};  // x <= 0.5 -> 1
    Rule b{{Condition{0, true, 0.2}}, 0};   // x > 0.2  -> 0
    const DecisionList ab({a, b}, 1, 1);
    const DecisionList ba({b, a}, 1, 1);
    const std::vector<double> witness{0.3};
    CHECK(ab.predict_row(witness) == 1);
    CHECK(ba.predict_row(witness) == 0);
}

TEST_CASE("learners are invariant to row order") {
    Rng rng(41);
    const Dataset d = random_binary(120, 3, rng);

    std::vector<std::size_t> perm(d.n_rows());
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    const Dataset shuffled = d.subset(perm);

    Matrix probe(50, 3);
    for (std::size_t r = 0; r < probe.rows(); ++r) {
        for (std::size_t c = 0; c < 3; ++c) probe.at(r, c) = rng.uniform();
    }

    for (const WhiteBoxKind kind : {WhiteBoxKind::dtcomp, WhiteBoxKind::dtcv, WhiteBoxKind::irep,
                                    WhiteBoxKind::ripper, WhiteBoxKind::prim, WhiteBoxKind::bi}) {
        CAPTURE(whitebox_name(kind));
        WhiteBoxConfig cfg;
        cfg.kind = kind;
        cfg.seed = 77;
        const WhiteBoxFit base = fit_whitebox(d, cfg);
        const WhiteBoxFit perm_fit = fit_whitebox(shuffled, cfg);
        CHECK(base.model->score(probe) == perm_fit.model->score(probe));
        CHECK(base.model->describe(d.feature_names()) ==
              perm_fit.model->describe(d.feature_names()));
    }
}

TEST_CASE("serialization formats") {
    // if x1 <= 0.5: p1 = 0, else p1 = 1
    std::vector<TreeNode> nodes(3);
    nodes[0].feature = 0;
    nodes[0].threshold = 0.5;
    nodes[0].left = 1;
    nodes[0].right = 2;
    nodes[1].prob1 = 0.0;
    nodes[1].count = 2;
    nodes[2].prob1 = 1.0;
    nodes[2].count = 3;
    const DecisionTree tree(nodes, 2);
    CHECK(tree.describe({"x1", "x2"}) ==
          "tree leaves=2\n"
          "0: if x1 <= 0.5 goto 1 else 2\n"
          "1: leaf p1=0 n=2\n"
          "2: leaf p1=1 n=3\n");

    Rule r1{{Condition{0, true, 0.7}, Condition{1, false, 0.25}}, 1};
    const DecisionList list({r1}, 0, 2);
    CHECK(list.describe({"x1", "x2"}) ==
          "list rules=1 default=0\n"
          "rule 1: if x1 > 0.7 and x2 <= 0.25 then 1\n");

    Box box(2);
    box.restrict(1, 0.125, 0.875);
    CHECK(box.describe({"x1", "x2"}) ==
          "box restricted=1\n"
          "x2 in [0.125, 0.875]\n");
}

}  // TEST_SUITE
