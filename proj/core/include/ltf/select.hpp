#pragma once

// Tuning-parameter selection over a fitted path by two information
// criteria. With rss the residual sum of squares and k the kink count:
//
//   SIC = log(rss / n) + (k + 2) log(n) / n
//   MC  = log(rss / n) + k (k + 1) log(n) / n

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "ltf/series.hpp"

namespace ltf {

enum class Criterion { SIC, MC };

/// Parses "sic" / "mc" (case-insensitive). Throws InvalidSpec otherwise.
Criterion parse_criterion(std::string_view name);
std::string_view criterion_name(Criterion c);

struct SelectionScore {
  double lambda = 0.0;
  double rss = 0.0;
  std::size_t k_hat = 0;
  double sic = 0.0;  ///< -inf when rss == 0
  double mc = 0.0;   ///< -inf when rss == 0

  bool finite() const noexcept;
  double value(Criterion c) const noexcept { return c == Criterion::SIC ? sic : mc; }
};

SelectionScore score(const TimeSeries& y, const TrendFit& fit,
                     double tol_kink = kDefaultKinkTol);

struct Selection {
  std::size_t index = 0;  ///< position in the path
  double lambda = 0.0;
  TrendFit fit;
  std::vector<SelectionScore> scores;  ///< one per path entry, path order
  std::size_t excluded = 0;            ///< entries with rss == 0
};

/// Minimizes the criterion over entries with finite scores; ties go to the
/// larger lambda. Throws NoSelectableModel when no entry is finite.
Selection select(const LambdaPath& path, const TimeSeries& y, Criterion criterion,
                 double tol_kink = kDefaultKinkTol);

/// Index of the minimizing score, same rules as select().
std::size_t argmin_score(const std::vector<SelectionScore>& scores, Criterion criterion);

/// Columns lambda, rss, k_hat, sic, mc.
void write_scores_csv(std::ostream& out, const std::vector<SelectionScore>& scores);

}  // namespace ltf
