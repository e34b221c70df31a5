#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "prelim/csv.hpp"
#include "prelim/dataset.hpp"
#include "prelim/errors.hpp"
#include "prelim/metrics.hpp"
#include "prelim/rng.hpp"
#include "prelim/scaler.hpp"
#include "prelim/split.hpp"

using namespace prelim;

namespace {

Dataset toy_dataset() {
    Matrix x = Matrix::from_rows({{0.0, 1.0}, {0.2, 0.8}, {0.4, 0.6}, {0.9, 0.1}});
    return Dataset(std::move(x), {0, 0, 1, 1}, {"a", "b"});
}

std::vector<int> to_int(std::initializer_list<int> v) {
    return {v};
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("dataset invariants") {
    CHECK_NOTHROW(toy_dataset());
    CHECK_THROWS_AS(Dataset(Matrix::from_rows({{1.0}}), {2.0}, {"a"}), BadFormat);
    CHECK_THROWS_AS(Dataset(Matrix::from_rows({{std::nan("")}}), {1.0}, {"a"}), BadFormat);
    CHECK_THROWS_AS(Dataset(Matrix(), {}, {}), EmptyAfterFiltering);
    CHECK_THROWS_AS(Dataset(Matrix::from_rows({{1.0}, {2.0}}), {1.0}, {"a"}), LengthMismatch);
    // Score targets accept the interior of [0,1].
    CHECK_NOTHROW(Dataset(Matrix::from_rows({{1.0}}), {0.25}, {"a"}, LabelKind::score));
    CHECK_THROWS_AS(Dataset(Matrix::from_rows({{1.0}}), {1.25}, {"a"}, LabelKind::score),
                    BadFormat);
}

TEST_CASE("preprocess keeps numeric columns with >= 20 unique values and drops missing rows") {
    // 40 rows; column a has 25 unique values, b has 30, c has 5. Two rows
    // carry a missing cell in a kept column.
    RawTable raw;
    raw.column_names = {"a", "b", "c", "label"};
    raw.columns.resize(4);
    for (int r = 0; r < 40; ++r) {
        raw.columns[0].push_back(std::to_string(r % 25) + ".5");
        raw.columns[1].push_back(std::to_string(r % 30) + ".25");
        raw.columns[2].push_back(std::to_string(r % 5));
        raw.columns[3].push_back(r % 2 == 0 ? "1" : "0");
    }
    raw.columns[0][7] = "";
    raw.columns[1][13] = "NA";

    const Dataset d = preprocess(raw, "label");
    CHECK(d.n_cols() == 2);          // c dropped: fewer than 20 unique values
    CHECK(d.n_rows() == 38);         // two incomplete rows dropped
    CHECK(d.feature_names() == std::vector<std::string>{"a", "b"});

    SUBCASE("clean table passes through unchanged") {
        RawTable clean;
        clean.column_names = {"a", "b", "y"};
        clean.columns.resize(3);
        for (int r = 0; r < 25; ++r) {
            clean.columns[0].push_back(std::to_string(r) + ".0");
            clean.columns[1].push_back(std::to_string(r) + ".5");
            clean.columns[2].push_back(r < 12 ? "0" : "1");
        }
        const Dataset c = preprocess(clean, "y");
        CHECK(c.n_rows() == 25);
        CHECK(c.n_cols() == 2);
        CHECK(c.x().at(3, 0) == doctest::Approx(3.0));
    }

    SUBCASE("all-categorical table fails") {
        RawTable cat;
        cat.column_names = {"s", "y"};
        cat.columns.resize(2);
        for (int r = 0; r < 30; ++r) {
            cat.columns[0].push_back("v" + std::to_string(r));
            cat.columns[1].push_back(r % 2 ? "1" : "0");
        }
        CHECK_THROWS_AS(preprocess(cat, "y"), EmptyAfterFiltering);
    }
}

TEST_CASE("make_splits carves minimally overlapping train sets") {
    SUBCASE("disjoint when K*n_train == N") {
        const SplitPlan plan = make_splits(1000, 100, 10, 7);
        std::vector<int> occurrences(1000, 0);
        for (const auto& [train, test] : plan.splits) {
            CHECK(train.size() == 100);
            CHECK(test.size() == 900);
            std::set<std::size_t> train_set(train.begin(), train.end());
            CHECK(train_set.size() == 100);
            for (std::size_t t : test) CHECK(train_set.count(t) == 0);
            for (std::size_t t : train) ++occurrences[t];
        }
        // ceil(10*100/1000) = 1: pairwise disjoint.
        for (int c : occurrences) CHECK(c <= 1);
    }

    SUBCASE("wrap-around respects the overlap bound") {
        const SplitPlan plan = make_splits(150, 100, 4, 3);
        std::vector<int> occurrences(150, 0);
        for (const auto& [train, test] : plan.splits) {
            CHECK(train.size() == 100);
            for (std::size_t t : train) ++occurrences[t];
        }
        const int bound = static_cast<int>(std::ceil(4.0 * 100.0 / 150.0));
        for (int c : occurrences) CHECK(c <= bound);
    }

    SUBCASE("single split") {
        const SplitPlan plan = make_splits(50, 10, 1, 3);
        CHECK(plan.splits.size() == 1);
        CHECK(plan.splits[0].first.size() == 10);
    }

    SUBCASE("errors") {
        CHECK_THROWS_AS(make_splits(100, 100, 5, 1), TooSmall);
        CHECK_THROWS_AS(make_splits(100, 0, 5, 1), TooSmall);
    }

    SUBCASE("same seed reproduces the plan exactly") {
        const SplitPlan a = make_splits(321, 45, 7, 99);
        const SplitPlan b = make_splits(321, 45, 7, 99);
        REQUIRE(a.splits.size() == b.splits.size());
        for (std::size_t i = 0; i < a.splits.size(); ++i) {
            CHECK(a.splits[i].first == b.splits[i].first);
            CHECK(a.splits[i].second == b.splits[i].second);
        }
        const SplitPlan c = make_splits(321, 45, 7, 100);
        CHECK(a.splits[0].first != c.splits[0].first);
    }
}

TEST_CASE("scaler maps train range to [0,1] without clipping test values") {
    Matrix x = Matrix::from_rows({{2.0}, {4.0}, {6.0}});
    const Dataset train(std::move(x), {0, 1, 0}, {"f"});
    const Scaler s = fit_scaler(train);

    const Dataset scaled = apply_scaler(s, train);
    CHECK(scaled.x().at(0, 0) == doctest::Approx(0.0));
    CHECK(scaled.x().at(1, 0) == doctest::Approx(0.5));
    CHECK(scaled.x().at(2, 0) == doctest::Approx(1.0));

    Matrix test = Matrix::from_rows({{8.0}});
    CHECK(s.transform(test).at(0, 0) == doctest::Approx(1.5));  // unclipped

    SUBCASE("constant feature maps to zero") {
        const Dataset c(Matrix::from_rows({{5.0}, {5.0}, {5.0}}), {0, 1, 0}, {"f"});
        const Scaler cs = fit_scaler(c);
        const Matrix out = cs.transform(c.x());
        for (std::size_t r = 0; r < 3; ++r) CHECK(out.at(r, 0) == 0.0);
    }

    SUBCASE("round trip within 1e-12 on non-constant features") {
        Rng rng(17);
        Matrix data(64, 3);
        for (std::size_t r = 0; r < 64; ++r) {
            data.at(r, 0) = rng.uniform(-5.0, 7.0);
            data.at(r, 1) = rng.normal(100.0, 15.0);
            data.at(r, 2) = rng.uniform();
        }
        std::vector<double> y(64, 0.0);
        y[0] = 1.0;
        const Dataset d(data, y, {"p", "q", "r"});
        const Scaler rs = fit_scaler(d);
        const Matrix back = rs.inverse_transform(rs.transform(d.x()));
        for (std::size_t r = 0; r < 64; ++r) {
            for (std::size_t c = 0; c < 3; ++c) {
                CHECK(std::abs(back.at(r, c) - d.x().at(r, c)) <= 1e-12 * std::max(1.0, std::abs(d.x().at(r, c))));
            }
        }
    }
}

TEST_CASE("accuracy and balanced accuracy") {
    CHECK(accuracy(to_int({1, 0, 1}), to_int({1, 0, 1})) == 1.0);
    CHECK(balanced_accuracy(to_int({1, 0, 1}), to_int({1, 0, 1})) == 1.0);

    // truth (1,1,0,0), pred (1,0,0,0): acc 0.75, BA (0.5 + 1.0)/2.
    const auto pred = to_int({1, 0, 0, 0});
    const auto truth = to_int({1, 1, 0, 0});
    CHECK(accuracy(pred, truth) == 0.75);
    CHECK(balanced_accuracy(pred, truth) == 0.75);

    // All-majority predictor on 80/20 data: acc 0.8, BA 0.5.
    std::vector<int> maj(10, 0);
    std::vector<int> t(10, 0);
    t[3] = t[7] = 1;
    CHECK(accuracy(maj, t) == doctest::Approx(0.8));
    CHECK(balanced_accuracy(maj, t) == doctest::Approx(0.5));

    // Single-class truth falls back to accuracy.
    CHECK(balanced_accuracy(to_int({1, 0, 1}), to_int({1, 1, 1})) == doctest::Approx(2.0 / 3.0));

    CHECK_THROWS_AS(accuracy(to_int({1}), to_int({1, 0})), LengthMismatch);
    CHECK_THROWS_AS(balanced_accuracy(to_int({1}), to_int({1, 0})), LengthMismatch);
}

TEST_CASE("fidelity") {
    CHECK(fidelity(to_int({1, 0, 1, 0}), to_int({1, 0, 1, 0})) == 1.0);
    CHECK(fidelity(to_int({1, 0}), to_int({0, 1})) == 0.0);
    CHECK(fidelity(to_int({1, 0, 1, 0}), to_int({1, 0, 1, 1})) == 0.75);
    CHECK_THROWS_AS(fidelity(to_int({1}), to_int({1, 0})), LengthMismatch);
}

TEST_CASE("wracc hand values and properties") {
    CHECK(wracc(10, 5, 10, 5) == 0.0);                      // rule covering everything
    CHECK(wracc(4, 4, 10, 5) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(wracc(0, 0, 10, 5) == 0.0);                       // empty rule convention
    CHECK_THROWS_AS(wracc(5, 6, 10, 5), InvalidCounts);     // n_plus > n
    CHECK_THROWS_AS(wracc(11, 5, 10, 5), InvalidCounts);    // n > N
    CHECK_THROWS_AS(wracc(1, 1, 0, 0), InvalidCounts);      // N = 0

    SUBCASE("antisymmetry under class relabeling") {
        Rng rng(5);
        for (int trial = 0; trial < 200; ++trial) {
            const double N = 1.0 + static_cast<double>(rng.index(50));
            const double Np = static_cast<double>(rng.index(static_cast<std::size_t>(N) + 1));
            const double n = static_cast<double>(rng.index(static_cast<std::size_t>(N) + 1));
            const double lo = std::max(0.0, n + Np - N);
            const double np = lo + static_cast<double>(
                                       rng.index(static_cast<std::size_t>(std::min(n, Np) - lo) + 1));
            const double lhs = wracc(n, np, N, Np);
            const double rhs = -wracc(n, n - np, N, N - Np);
            CHECK(std::abs(lhs - rhs) <= 1e-12);
        }
    }

    SUBCASE("bounded by (N+/N)(1 - N+/N) <= 0.25") {
        Rng rng(6);
        for (int trial = 0; trial < 200; ++trial) {
            const double N = 1.0 + static_cast<double>(rng.index(60));
            const double Np = static_cast<double>(rng.index(static_cast<std::size_t>(N) + 1));
            const double n = static_cast<double>(rng.index(static_cast<std::size_t>(N) + 1));
            const double lo = std::max(0.0, n + Np - N);
            const double np = lo + static_cast<double>(
                                       rng.index(static_cast<std::size_t>(std::min(n, Np) - lo) + 1));
            const double v = wracc(n, np, N, Np);
            const double bound = (Np / N) * (1.0 - Np / N);
            CHECK(v <= bound + 1e-12);
            CHECK(bound <= 0.25 + 1e-12);
        }
    }
}

TEST_CASE("relative increase") {
    CHECK(relative_increase(0.75, 0.6) == doctest::Approx(0.15));
    CHECK(relative_increase(0.6, 0.6) == 0.0);
    CHECK(relative_increase(0.5, 0.5) == 0.0);
    CHECK(relative_increase(0.4, 0.6) == doctest::Approx(-0.2));
}

TEST_CASE("majority class breaks ties to class 1") {
    const std::vector<double> tied{0, 1, 0, 1};
    CHECK(majority_class(tied) == 1);
    const std::vector<double> zeros{0, 0, 1};
    CHECK(majority_class(zeros) == 0);
}

TEST_CASE("dataset csv io round trip") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "prelim_core_test";
    fs::create_directories(dir);
    const fs::path file = dir / "toy.csv";

    const Dataset d = toy_dataset();
    write_dataset_csv(file, d.x(), d.y(), d.feature_names());
    const Dataset back = read_dataset_csv(file);
    CHECK(back.n_rows() == d.n_rows());
    CHECK(back.n_cols() == d.n_cols());
    CHECK(back.x() == d.x());
    CHECK(back.y() == d.y());
    CHECK(back.feature_names() == d.feature_names());

    SUBCASE("rejects a final column not named y") {
        std::ofstream out(dir / "bad.csv");
        out << "a,b\n1,2\n";
        out.close();
        CHECK_THROWS_AS(read_dataset_csv(dir / "bad.csv"), BadFormat);
    }

    SUBCASE("rejects non-binary target") {
        std::ofstream out(dir / "bad2.csv");
        out << "a,y\n1,2\n";
        out.close();
        CHECK_THROWS_AS(read_dataset_csv(dir / "bad2.csv"), BadFormat);
    }

    fs::remove_all(dir);
}

TEST_CASE("rng determinism and moments") {
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng c(7);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += c.uniform();
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));

    double nsum = 0.0, nsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = c.normal();
        nsum += z;
        nsq += z * z;
    }
    CHECK(nsum / n == doctest::Approx(0.0).epsilon(0.02));
    CHECK(nsq / n == doctest::Approx(1.0).epsilon(0.02));
}

}  // TEST_SUITE
