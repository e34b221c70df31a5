#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "prelim/dataset.hpp"

namespace prelim {

// Raw tabular input: string cells, possibly missing or non-numeric.
struct RawTable {
    std::vector<std::string> column_names;
    std::vector<std::vector<std::string>> columns;  // column-major cells

    std::size_t n_rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

// Strict dataset CSV: header row, M numeric feature columns, final column
// named `y` holding 0/1 targets. UTF-8, '.' decimal separator.
Dataset read_dataset_csv(const std::filesystem::path& path);

void write_dataset_csv(std::ostream& out, const Matrix& x, const std::vector<double>& y,
                       const std::vector<std::string>& feature_names);
void write_dataset_csv(const std::filesystem::path& path, const Matrix& x,
                       const std::vector<double>& y,
                       const std::vector<std::string>& feature_names);

RawTable read_raw_csv(const std::filesystem::path& path);

// Filters a raw table down to a Dataset: drops non-numeric columns, drops
// numeric columns with fewer than 20 unique values, then drops rows with a
// missing value in any surviving column; the designated target column is
// binarized (larger value -> 1). Throws EmptyAfterFiltering when nothing
// survives and BadFormat when the target is not binary.
Dataset preprocess(const RawTable& raw, const std::string& target_column);

// Formats a real with 9 significant digits, the precision used by every
// file this library writes.
std::string format_real(double v);

}  // namespace prelim
