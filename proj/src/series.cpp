#include "spikecov/series.hpp"

#include "spikecov/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace spikecov {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r\"");
    const auto e = cell.find_last_not_of(" \t\r\"");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "null";
}

}  // namespace

PriceSeries parse_series_csv(std::istream& in) {
  PriceSeries out;
  std::string line;
  if (!std::getline(in, line)) throw DataError("CSV: empty input");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_csv_line(line);
  if (header.size() < 2) throw DataError("CSV: header needs a date column and at least one ticker");
  out.tickers.assign(header.begin() + 1, header.end());
  const auto p = static_cast<Index>(out.tickers.size());

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (static_cast<Index>(cells.size()) != p + 1) {
      std::ostringstream msg;
      msg << "CSV row " << lineno << ": expected " << p + 1 << " cells, found " << cells.size();
      throw DataError(msg.str());
    }
    if (!out.dates.empty() && !(cells[0] > out.dates.back())) {
      std::ostringstream msg;
      msg << "CSV row " << lineno << ": dates must be strictly increasing ('" << cells[0] << "')";
      throw DataError(msg.str());
    }
    out.dates.push_back(cells[0]);
    std::vector<double> row(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) {
      const std::string& cell = cells[static_cast<std::size_t>(j + 1)];
      if (is_missing(cell)) {
        row[static_cast<std::size_t>(j)] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size() || !std::isfinite(v)) throw std::invalid_argument(cell);
        row[static_cast<std::size_t>(j)] = v;
      } catch (const std::exception&) {
        std::ostringstream msg;
        msg << "CSV row " << lineno << ", column " << j + 2 << " ('" << out.tickers[static_cast<std::size_t>(j)]
            << "'): non-numeric value '" << cell << "'";
        throw DataError(msg.str());
      }
    }
    rows.push_back(std::move(row));
  }
  out.values.resize(static_cast<Index>(rows.size()), p);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Index j = 0; j < p; ++j) out.values(static_cast<Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  }
  return out;
}

PriceSeries read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open CSV file '" + path + "'");
  return parse_series_csv(in);
}

PriceSeries log_returns(const PriceSeries& prices) {
  for (Index i = 0; i < prices.values.rows(); ++i) {
    for (Index j = 0; j < prices.values.cols(); ++j) {
      const double v = prices.values(i, j);
      if (!std::isnan(v) && !(v > 0.0)) {
        std::ostringstream msg;
        msg << "price must be positive (row " << i + 2 << ", ticker '"
            << prices.tickers[static_cast<std::size_t>(j)] << "')";
        throw DataError(msg.str());
      }
    }
  }
  PriceSeries out;
  out.tickers = prices.tickers;
  const Index t = prices.values.rows();
  if (t < 2) {
    out.values.resize(0, prices.values.cols());
    return out;
  }
  out.dates.assign(prices.dates.begin() + 1, prices.dates.end());
  out.values = (prices.values.bottomRows(t - 1).array() / prices.values.topRows(t - 1).array()).log();
  return out;
}

CompleteRows complete_rows(const Matrix& values, bool center) {
  std::vector<Index> keep;
  for (Index i = 0; i < values.rows(); ++i) {
    if (!values.row(i).array().isNaN().any()) keep.push_back(i);
  }
  CompleteRows out;
  out.dropped = static_cast<int>(values.rows() - static_cast<Index>(keep.size()));
  out.x.resize(static_cast<Index>(keep.size()), values.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) out.x.row(static_cast<Index>(r)) = values.row(keep[r]);
  if (center && out.x.rows() > 0) out.x.rowwise() -= out.x.colwise().mean();
  return out;
}

LoadedReturns load_returns(std::istream& in, InputMode mode, bool center) {
  PriceSeries table = parse_series_csv(in);
  if (mode == InputMode::prices) table = log_returns(table);
  CompleteRows rows = complete_rows(table.values, center);
  if (rows.x.rows() < 2) {
    throw DataError("fewer than 2 usable rows after dropping missing values");
  }
  return {ObservationMatrix(std::move(rows.x)), std::move(table), rows.dropped};
}

LoadedReturns load_returns(const std::string& csv_path, InputMode mode, bool center) {
  std::ifstream in(csv_path);
  if (!in) throw DataError("cannot open CSV file '" + csv_path + "'");
  return load_returns(in, mode, center);
}

}  // namespace spikecov
