#include "ltf/select.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "ltf/csv.hpp"
#include "ltf/error.hpp"

namespace ltf {

Criterion parse_criterion(std::string_view name) {
  std::string lower;
  for (char c : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "sic") return Criterion::SIC;
  if (lower == "mc") return Criterion::MC;
  throw InvalidSpec("unknown criterion '" + std::string(name) + "' (expected sic or mc)");
}

std::string_view criterion_name(Criterion c) { return c == Criterion::SIC ? "sic" : "mc"; }

bool SelectionScore::finite() const noexcept { return std::isfinite(sic) && std::isfinite(mc); }

SelectionScore score(const TimeSeries& y, const TrendFit& fit, double tol_kink) {
  const std::size_t n = y.size();
  if (fit.mu_hat.size() != n) throw InvalidDimension("fit length does not match series");
  SelectionScore s;
  s.lambda = fit.lambda;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.mu_hat[i];
    s.rss += r * r;
  }
  s.k_hat = extract_kinks(fit, tol_kink).size();
  if (s.rss == 0.0) {
    s.sic = s.mc = -std::numeric_limits<double>::infinity();
    return s;
  }
  const double nd = static_cast<double>(n);
  const double k = static_cast<double>(s.k_hat);
  const double fit_term = std::log(s.rss / nd);
  const double logn_n = std::log(nd) / nd;
  s.sic = fit_term + (k + 2.0) * logn_n;
  s.mc = fit_term + k * (k + 1.0) * logn_n;
  return s;
}

std::size_t argmin_score(const std::vector<SelectionScore>& scores, Criterion criterion) {
  std::size_t best = scores.size();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!scores[i].finite()) continue;
    if (best == scores.size()) {
      best = i;
      continue;
    }
    const double v = scores[i].value(criterion);
    const double b = scores[best].value(criterion);
    if (v < b || (v == b && scores[i].lambda > scores[best].lambda)) best = i;
  }
  if (best == scores.size()) throw NoSelectableModel("no path entry has a finite score");
  return best;
}

Selection select(const LambdaPath& path, const TimeSeries& y, Criterion criterion,
                 double tol_kink) {
  if (path.empty()) throw NoSelectableModel("empty path");
  Selection out;
  out.scores.reserve(path.size());
  for (const auto& e : path.entries()) {
    out.scores.push_back(score(y, e.fit, tol_kink));
    if (!out.scores.back().finite()) ++out.excluded;
  }
  out.index = argmin_score(out.scores, criterion);
  out.lambda = path[out.index].lambda;
  out.fit = path[out.index].fit;
  return out;
}

void write_scores_csv(std::ostream& out, const std::vector<SelectionScore>& scores) {
  out << "lambda,rss,k_hat,sic,mc\n";
  for (const auto& s : scores)
    out << format_double(s.lambda) << ',' << format_double(s.rss) << ',' << s.k_hat << ','
        << format_double(s.sic) << ',' << format_double(s.mc) << '\n';
}

}  // namespace ltf
