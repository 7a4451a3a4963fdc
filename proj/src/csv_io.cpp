#include "geomseg/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace geomseg {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view field, double& out) {
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  // nan and inf count as missing values.
  return ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(out);
}

}  // namespace

NumericTable parse_csv(std::istream& in) {
  NumericTable table;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (!parse_double(fields[k], row[k])) {
        numeric = false;
        break;
      }
    }
    if (first) {
      first = false;
      table.cols = fields.size();
      if (!numeric) {
        for (auto f : fields) table.header.emplace_back(f);
        continue;
      }
    }
    if (fields.size() != table.cols) {
      throw InputError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(table.cols) + " fields, found " +
                       std::to_string(fields.size()));
    }
    if (!numeric) {
      throw InputError("line " + std::to_string(line_no) + ": non-numeric or missing value");
    }
    table.values.insert(table.values.end(), row.begin(), row.end());
    ++table.rows;
  }
  if (table.rows == 0) throw InputError("no data rows");
  return table;
}

NumericTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return parse_csv(in);
}

TimeSeriesMatrix load_time_series(const std::string& path, const CostModel& model) {
  NumericTable t = read_csv(path);
  return TimeSeriesMatrix(t.rows, t.cols, std::move(t.values), model);
}

void write_matrix_csv(std::ostream& out, const TimeSeriesMatrix& data) {
  const bool integral = data.model().kind() != ModelKind::Gaussian;
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t t = 0; t < data.n(); ++t) {
    for (std::size_t k = 0; k < data.p(); ++k) {
      if (k) os << ',';
      if (integral) {
        os << static_cast<long long>(data.value(t, k));
      } else {
        os << data.value(t, k);
      }
    }
    os << '\n';
  }
  out << os.str();
}

}  // namespace geomseg
