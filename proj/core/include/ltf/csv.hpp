#pragma once

// Plain-text interchange: series input, fit output and reading a fit back.
//
// Series files hold one column (values) or two (index, value), an optional
// header row, and optional "#" comment lines. Fit files hold the columns
// t, y, mu_hat, nu_hat, beta followed by a blank line and a kink section.

#include <iosfwd>
#include <string>
#include <vector>

#include "ltf/series.hpp"

namespace ltf {

/// Splits one CSV record. Double-quoted fields may contain commas and
/// doubled quotes.
std::vector<std::string> split_csv_record(const std::string& line);

/// Parses a series. Throws ParseError carrying the 1-based line number.
TimeSeries read_series(std::istream& in);
TimeSeries read_series_file(const std::string& path);

/// Writes `metadata` lines prefixed with "# ", the per-time table, a blank
/// line and the kink section (time, sign, magnitude).
void write_fit_csv(std::ostream& out, const TimeSeries& y, const TrendFit& fit,
                   const KinkSet& kinks, const std::vector<std::string>& metadata = {});

/// Reads the mu_hat column of a fit file written by write_fit_csv.
std::vector<double> read_fit_mu(std::istream& in);
std::vector<double> read_fit_mu_file(const std::string& path);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace ltf
