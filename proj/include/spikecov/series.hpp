#pragma once

#include "spikecov/matrix_core.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace spikecov {

/// Date×ticker table read from CSV. Missing cells hold NaN. Used for both
/// prices and returns.
struct PriceSeries {
  std::vector<std::string> dates;
  std::vector<std::string> tickers;
  Matrix values;

  Index rows() const { return values.rows(); }
};

enum class InputMode { returns, prices };

/// Header row `date,TICK1,TICK2,...`; first column ISO-8601 dates in
/// strictly increasing order. Empty, `NA` and `NaN` cells are missing.
PriceSeries parse_series_csv(std::istream& in);
PriceSeries read_series_csv(const std::string& path);

/// r_t = log(p_t / p_{t−1}); missing if either price is missing.
/// Throws DataError on a nonpositive price.
PriceSeries log_returns(const PriceSeries& prices);

struct CompleteRows {
  Matrix x;
  int dropped = 0;
};

/// Listwise deletion of rows with any missing value, then optional
/// column centering.
CompleteRows complete_rows(const Matrix& values, bool center);

struct LoadedReturns {
  ObservationMatrix x;
  PriceSeries series;  // the return table before deletion
  int dropped = 0;
};

LoadedReturns load_returns(const std::string& csv_path, InputMode mode, bool center);
LoadedReturns load_returns(std::istream& in, InputMode mode, bool center);

}  // namespace spikecov
