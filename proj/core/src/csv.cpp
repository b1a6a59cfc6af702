#include "ltf/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>

#include "ltf/error.hpp"

namespace ltf {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) return std::nullopt;
  const char* begin = s.data();
  if (*begin == '+') ++begin;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

bool skippable(const std::string& line) {
  const std::string s = trim(line);
  return s.empty() || s.front() == '#';
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  return in;
}

}  // namespace

std::vector<std::string> split_csv_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

TimeSeries read_series(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  std::size_t columns = 0;
  bool seen_row = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    const auto fields = split_csv_record(line);
    if (fields.size() > 2)
      throw ParseError("line " + std::to_string(lineno) + ": expected 1 or 2 columns, got " +
                           std::to_string(fields.size()),
                       lineno);
    const auto value = parse_number(fields.back());
    if (!value) {
      if (!seen_row) {  // header
        seen_row = true;
        columns = fields.size();
        continue;
      }
      throw ParseError("line " + std::to_string(lineno) + ": not a number: '" +
                           trim(fields.back()) + "'",
                       lineno);
    }
    if (fields.size() == 2 && !parse_number(fields.front()))
      throw ParseError("line " + std::to_string(lineno) + ": bad index '" +
                           trim(fields.front()) + "'",
                       lineno);
    if (columns != 0 && fields.size() != columns)
      throw ParseError("line " + std::to_string(lineno) + ": column count changed", lineno);
    columns = fields.size();
    seen_row = true;
    values.push_back(*value);
  }
  try {
    return TimeSeries(std::move(values));
  } catch (const InvalidDimension& e) {
    throw ParseError(e.what(), lineno);
  }
}

TimeSeries read_series_file(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  return read_series(in);
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

void write_fit_csv(std::ostream& out, const TimeSeries& y, const TrendFit& fit,
                   const KinkSet& kinks, const std::vector<std::string>& metadata) {
  for (const auto& m : metadata) out << "# " << m << '\n';
  out << "t,y,mu_hat,nu_hat,beta\n";
  for (std::size_t i = 0; i < y.size(); ++i) {
    out << i + 1 << ',' << format_double(y[i]) << ',' << format_double(fit.mu_hat[i]) << ','
        << format_double(fit.nu_hat[i]) << ',';
    if (i >= 2) out << format_double(fit.beta_tail[i - 2]);
    out << '\n';
  }
  out << "\ntime,sign,magnitude\n";
  for (const auto& k : kinks.kinks())
    out << k.time << ',' << k.sign << ',' << format_double(k.magnitude) << '\n';
}

std::vector<double> read_fit_mu(std::istream& in) {
  std::vector<double> mu;
  std::string line;
  std::size_t lineno = 0;
  std::size_t mu_col = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (!s.empty() && s.front() == '#') continue;
    if (s.empty()) {
      if (have_header) break;  // kink section follows
      continue;
    }
    const auto fields = split_csv_record(line);
    if (!have_header) {
      for (std::size_t c = 0; c < fields.size(); ++c)
        if (trim(fields[c]) == "mu_hat") mu_col = c + 1;
      if (mu_col == 0) throw ParseError("line " + std::to_string(lineno) + ": no mu_hat column", lineno);
      have_header = true;
      continue;
    }
    if (fields.size() < mu_col)
      throw ParseError("line " + std::to_string(lineno) + ": missing mu_hat field", lineno);
    const auto v = parse_number(fields[mu_col - 1]);
    if (!v) throw ParseError("line " + std::to_string(lineno) + ": bad mu_hat value", lineno);
    mu.push_back(*v);
  }
  if (!have_header) throw ParseError("fit file has no header", lineno);
  return mu;
}

std::vector<double> read_fit_mu_file(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  return read_fit_mu(in);
}

}  // namespace ltf
