#include "prelim/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "prelim/errors.hpp"

namespace prelim {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool is_missing(const std::string& cell) {
    if (cell.empty()) return true;
    std::string low;
    low.reserve(cell.size());
    for (char ch : cell) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    return low == "na" || low == "n/a" || low == "nan" || low == "null" || low == "?";
}

std::optional<double> parse_double(const std::string& cell) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
    return value;
}

}  // namespace

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

RawTable read_raw_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw BadFormat("empty file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();

    RawTable table;
    table.column_names = split_line(line);
    if (table.column_names.empty()) throw BadFormat("no header columns: " + path.string());
    table.columns.resize(table.column_names.size());

    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != table.column_names.size()) {
            throw BadFormat(path.string() + ":" + std::to_string(row) + ": expected " +
                            std::to_string(table.column_names.size()) + " cells, got " +
                            std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) table.columns[c].push_back(std::move(cells[c]));
    }
    return table;
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
    RawTable raw = read_raw_csv(path);
    if (raw.column_names.size() < 2) throw BadFormat(path.string() + ": need features plus y");
    if (raw.column_names.back() != "y") {
        throw BadFormat(path.string() + ": final column must be named y, got '" +
                        raw.column_names.back() + "'");
    }
    const std::size_t m = raw.column_names.size() - 1;
    const std::size_t n = raw.n_rows();
    if (n == 0) throw BadFormat(path.string() + ": no data rows");

    Matrix x(n, m);
    std::vector<double> y(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < m; ++c) {
            const auto v = parse_double(raw.columns[c][r]);
            if (!v) {
                throw BadFormat(path.string() + ": non-numeric cell in column " +
                                raw.column_names[c] + ", row " + std::to_string(r + 2));
            }
            x.at(r, c) = *v;
        }
        const auto t = parse_double(raw.columns[m][r]);
        if (!t || (*t != 0.0 && *t != 1.0)) {
            throw BadFormat(path.string() + ": y must be 0 or 1, row " + std::to_string(r + 2));
        }
        y[r] = *t;
    }
    return Dataset(std::move(x), std::move(y),
                   {raw.column_names.begin(), raw.column_names.end() - 1});
}

void write_dataset_csv(std::ostream& out, const Matrix& x, const std::vector<double>& y,
                       const std::vector<std::string>& feature_names) {
    if (y.size() != x.rows()) throw LengthMismatch("write csv: rows vs targets");
    for (std::size_t c = 0; c < feature_names.size(); ++c) out << feature_names[c] << ',';
    out << "y\n";
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) out << format_real(x.at(r, c)) << ',';
        out << format_real(y[r]) << '\n';
    }
}

void write_dataset_csv(const std::filesystem::path& path, const Matrix& x,
                       const std::vector<double>& y,
                       const std::vector<std::string>& feature_names) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    write_dataset_csv(out, x, y, feature_names);
}

Dataset preprocess(const RawTable& raw, const std::string& target_column) {
    const std::size_t n = raw.n_rows();
    std::size_t target = raw.column_names.size();
    for (std::size_t c = 0; c < raw.column_names.size(); ++c) {
        if (raw.column_names[c] == target_column) target = c;
    }
    if (target == raw.column_names.size()) {
        throw BadFormat("preprocess: no column named '" + target_column + "'");
    }

    // Pass 1: keep numeric feature columns with at least 20 unique values.
    std::vector<std::size_t> kept;
    std::vector<std::vector<std::optional<double>>> parsed(raw.column_names.size());
    for (std::size_t c = 0; c < raw.column_names.size(); ++c) {
        if (c == target) continue;
        bool numeric = true;
        std::set<double> uniq;
        auto& col = parsed[c];
        col.resize(n);
        for (std::size_t r = 0; r < n; ++r) {
            const std::string& cell = raw.columns[c][r];
            if (is_missing(cell)) continue;
            const auto v = parse_double(cell);
            if (!v) {
                numeric = false;
                break;
            }
            col[r] = *v;
            uniq.insert(*v);
        }
        if (numeric && uniq.size() >= 20) kept.push_back(c);
    }
    if (kept.empty()) throw EmptyAfterFiltering("preprocess: no feature column survives");

    // Binarize the target: at most two distinct non-missing values, the
    // larger (numerically, else lexicographically) maps to 1.
    std::set<std::string> target_values;
    for (std::size_t r = 0; r < n; ++r) {
        if (!is_missing(raw.columns[target][r])) target_values.insert(raw.columns[target][r]);
    }
    if (target_values.empty() || target_values.size() > 2) {
        throw BadFormat("preprocess: target column is not binary (" +
                        std::to_string(target_values.size()) + " distinct values)");
    }
    std::string positive = *target_values.rbegin();
    if (target_values.size() == 2) {
        const auto a = parse_double(*target_values.begin());
        const auto b = parse_double(*target_values.rbegin());
        if (a && b) positive = *a > *b ? *target_values.begin() : *target_values.rbegin();
    }

    // Pass 2: drop rows missing any kept feature or the target.
    Matrix x;
    std::vector<double> y;
    std::vector<double> row(kept.size());
    for (std::size_t r = 0; r < n; ++r) {
        if (is_missing(raw.columns[target][r])) continue;
        bool complete = true;
        for (std::size_t i = 0; i < kept.size(); ++i) {
            const auto& v = parsed[kept[i]][r];
            if (!v) {
                complete = false;
                break;
            }
            row[i] = *v;
        }
        if (!complete) continue;
        x.append_row(row);
        y.push_back(raw.columns[target][r] == positive ? 1.0 : 0.0);
    }
    if (x.rows() == 0) throw EmptyAfterFiltering("preprocess: no row survives");

    std::vector<std::string> names;
    names.reserve(kept.size());
    for (std::size_t c : kept) names.push_back(raw.column_names[c]);
    return Dataset(std::move(x), std::move(y), std::move(names));
}

}  // namespace prelim
