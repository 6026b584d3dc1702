#include "barsample/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "barsample/error.hpp"

namespace barsample {

Rational theoretical_mean(std::int64_t delta_full, const Rational& fraction) {
  if (delta_full < 0) throw DomainError("negative edit count");
  if (fraction <= 0 || fraction > 1) throw DomainError("fraction must be in (0, 1]");
  return fraction * Rational(delta_full);
}

double Moments::mean() const {
  if (n == 0) throw StatsError("no observations");
  return static_cast<double>(sum) / static_cast<double>(n);
}

double Moments::std_dev(Dispersion d) const {
  if (n == 0) throw StatsError("no observations");
  const auto nn = static_cast<__int128>(n);
  const __int128 scatter = nn * sum_sq - static_cast<__int128>(sum) * sum;  // n^2 * population variance
  const __int128 denom = d == Dispersion::Population ? nn * nn : nn * (nn - 1);
  if (denom == 0) return 0.0;
  return std::sqrt(static_cast<double>(scatter) / static_cast<double>(denom));
}

Aggregate aggregate(std::span<const std::int64_t> deltas, Dispersion dispersion) {
  if (deltas.empty()) throw StatsError("cannot aggregate an empty list");
  Moments m;
  Aggregate a;
  for (const auto d : deltas) {
    m.add(d);
    ++a.histogram[d];
  }
  a.n = m.n;
  a.mean = m.mean();
  a.std_dev = m.std_dev(dispersion);
  return a;
}

double delta_metric(std::span<const std::pair<double, double>> pairs) {
  if (pairs.empty()) throw StatsError("no edition pairs");
  double sum = 0;
  for (const auto& [mu, mean] : pairs) sum += std::abs(mu - mean);
  return sum / static_cast<double>(pairs.size());
}

double mean_of(std::span<const double> values) {
  if (values.empty()) throw StatsError("no values");
  double sum = 0;
  for (const double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::int64_t detect_duplicates(std::span<const Sample> samples) {
  std::set<std::vector<MeasureNumber>> seen;
  std::int64_t repeats = 0;
  for (const auto& s : samples) {
    auto key = s.measure_numbers;
    std::sort(key.begin(), key.end());
    if (!seen.insert(std::move(key)).second) ++repeats;
  }
  return repeats;
}

BigInt combinations(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0 || k > n) throw DomainError("combinations(" + std::to_string(n) + ", " + std::to_string(k) + ")");
  k = std::min(k, n - k);
  BigInt r = 1;
  // r stays an exact binomial after each step: C(n, i + 1) = C(n, i) * (n - i) / (i + 1).
  for (std::int64_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

std::vector<std::pair<std::int64_t, double>> smooth(const Histogram& h, int window) {
  std::vector<std::pair<std::int64_t, double>> out;
  if (h.empty()) return out;
  const std::int64_t lo = h.begin()->first;
  const std::int64_t hi = h.rbegin()->first;
  std::vector<double> dense(static_cast<std::size_t>(hi - lo + 1), 0.0);
  for (const auto& [v, f] : h) dense[static_cast<std::size_t>(v - lo)] = static_cast<double>(f);
  const int half = std::max(window, 1) / 2;
  const auto size = static_cast<std::int64_t>(dense.size());
  for (std::int64_t i = 0; i < size; ++i) {
    double sum = 0;
    int count = 0;
    for (std::int64_t j = std::max<std::int64_t>(0, i - half); j <= std::min(size - 1, i + half); ++j) {
      sum += dense[static_cast<std::size_t>(j)];
      ++count;
    }
    out.emplace_back(lo + i, sum / count);
  }
  return out;
}

std::optional<Bimodality> find_bimodality(const Histogram& h, int window, double min_ratio,
                                          double max_trough_ratio) {
  const auto s = smooth(h, window);
  if (s.size() < 3) return std::nullopt;

  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool rises = i == 0 || s[i].second > s[i - 1].second;
    const bool holds = i + 1 == s.size() || s[i].second >= s[i + 1].second;
    if (rises && holds && s[i].second > 0) peaks.push_back(i);
  }
  if (peaks.size() < 2) return std::nullopt;

  const auto global = *std::max_element(peaks.begin(), peaks.end(),
                                        [&](std::size_t a, std::size_t b) { return s[a].second < s[b].second; });
  std::optional<Bimodality> best;
  for (const auto p : peaks) {
    if (p == global) continue;
    const double height = s[p].second;
    if (height < min_ratio * s[global].second) continue;
    double trough = height;
    for (auto i = std::min(p, global); i <= std::max(p, global); ++i) trough = std::min(trough, s[i].second);
    if (trough > max_trough_ratio * height) continue;
    if (!best || height > best->minor_height)
      best = Bimodality{s[global].first, s[p].first, s[global].second, height, trough};
  }
  return best;
}

std::string format2(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  std::string out(buf);
  if (out == "-0.00") out = "0.00";
  return out;
}

}  // namespace barsample
