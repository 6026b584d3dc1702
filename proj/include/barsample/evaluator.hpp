#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "barsample/rational.hpp"
#include "barsample/sampler.hpp"

namespace barsample {

// fraction * delta_full, exact. Throws DomainError outside delta >= 0, 0 < fraction <= 1.
Rational theoretical_mean(std::int64_t delta_full, const Rational& fraction);

enum class Dispersion { Population, Sample };

// Count, sum and sum of squares of integer deltas. Partials combine exactly
// and associatively, so they can be folded per worker and merged.
struct Moments {
  std::int64_t n = 0;
  std::int64_t sum = 0;
  std::int64_t sum_sq = 0;

  void add(std::int64_t x) {
    ++n;
    sum += x;
    sum_sq += x * x;
  }
  Moments& merge(const Moments& o) {
    n += o.n;
    sum += o.sum;
    sum_sq += o.sum_sq;
    return *this;
  }

  double mean() const;
  double std_dev(Dispersion d = Dispersion::Population) const;
};

using Histogram = std::map<std::int64_t, std::int64_t>;  // delta -> frequency, bin width 1

struct Aggregate {
  std::int64_t n = 0;
  double mean = 0;
  double std_dev = 0;
  Histogram histogram;
};

// Throws StatsError on an empty list.
Aggregate aggregate(std::span<const std::int64_t> deltas, Dispersion dispersion = Dispersion::Population);

// Mean of |mu - empirical_mean| over the pairs. Throws StatsError when empty.
double delta_metric(std::span<const std::pair<double, double>> pairs);

// Arithmetic mean. Throws StatsError when empty.
double mean_of(std::span<const double> values);

// Number of samples whose measure set repeats an earlier sample's set.
std::int64_t detect_duplicates(std::span<const Sample> samples);

using BigInt = boost::multiprecision::cpp_int;

// Exact binomial coefficient. Throws DomainError unless 0 <= k <= n.
BigInt combinations(std::int64_t n, std::int64_t k);

struct PairStats {
  std::pair<std::string, std::string> pair;
  bool failed = false;         // not comparable at full-score level
  std::int64_t delta_full = 0;
  Rational mu{0};
  double empirical_mean = 0;
  double std_dev = 0;
  Histogram histogram;
  std::int64_t n_samples = 0;
  std::int64_t failed_comparisons = 0;
};

struct EvaluationSummary {
  std::string piece_id;
  Algorithm algorithm = Algorithm::RandSel;
  std::vector<PairStats> pair_stats;  // one per unordered edition pair
  std::optional<double> delta_metric;  // over pairs with samples
  std::optional<double> mean_sigma;    // unweighted mean of per-pair std_dev
  std::int64_t duplicates = 0;
  std::int64_t warnings = 0;
};

struct Bimodality {
  std::int64_t major_mode = 0;
  std::int64_t minor_mode = 0;
  double major_height = 0;
  double minor_height = 0;
  double trough = 0;
};

// Moving-average smoothing (odd window, clipped at the ends) over the dense
// range of the histogram.
std::vector<std::pair<std::int64_t, double>> smooth(const Histogram& h, int window);

// Two-mode test on the smoothed histogram: the global maximum plus the tallest
// other local maximum that is at least `min_ratio` of it and separated from it
// by a trough no higher than `max_trough_ratio` of the smaller mode.
std::optional<Bimodality> find_bimodality(const Histogram& h, int window, double min_ratio = 0.10,
                                          double max_trough_ratio = 0.50);

// Fixed two-decimal rendering used in every CSV.
std::string format2(double value);

}  // namespace barsample
