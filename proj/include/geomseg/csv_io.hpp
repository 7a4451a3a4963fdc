#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "geomseg/cost_model.hpp"

namespace geomseg {

/// Raw numeric table parsed from CSV: one row per time point.
struct NumericTable {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major
  std::vector<std::string> header;
};

/// Parses comma-separated numbers. A first line containing any non-numeric
/// field is treated as a header. Ragged rows, empty fields and non-numeric
/// values after the header raise InputError.
NumericTable parse_csv(std::istream& in);
NumericTable read_csv(const std::string& path);

/// Loads and validates against `model` (DomainError carries row/column).
TimeSeriesMatrix load_time_series(const std::string& path, const CostModel& model);

void write_matrix_csv(std::ostream& out, const TimeSeriesMatrix& data);

}  // namespace geomseg
