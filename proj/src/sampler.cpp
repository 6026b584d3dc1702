#include "barsample/sampler.hpp"

#include <algorithm>
#include <cctype>

#include "barsample/error.hpp"
#include "barsample/rng.hpp"

namespace barsample {

std::string_view display_name(Algorithm a) {
  switch (a) {
    case Algorithm::RandSel: return "randSel";
    case Algorithm::BarElCount: return "barElCount";
    case Algorithm::OnlyEl: return "onlyEl";
  }
  return "?";
}

std::string_view slug(Algorithm a) {
  switch (a) {
    case Algorithm::RandSel: return "randsel";
    case Algorithm::BarElCount: return "barelcount";
    case Algorithm::OnlyEl: return "onlyel";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto a : {Algorithm::RandSel, Algorithm::BarElCount, Algorithm::OnlyEl})
    if (lower == slug(a)) return a;
  throw ConfigError("unknown algorithm '" + std::string(text) + "' (expected randsel, barelcount or onlyel)");
}

std::string_view to_string(SampleWarning w) {
  switch (w) {
    case SampleWarning::BelowLowerBound: return "BelowLowerBound";
    case SampleWarning::AboveUpperBound: return "AboveUpperBound";
    case SampleWarning::WrongMeasureCount: return "WrongMeasureCount";
  }
  return "?";
}

void SamplingParams::validate() const {
  if (fraction <= 0 || fraction > 1) throw DomainError("fraction must be in (0, 1], got " + barsample::to_string(fraction));
  if (tolerance < 0 || tolerance >= 1)
    throw DomainError("tolerance must be in [0, 1), got " + barsample::to_string(tolerance));
  if (sample_size_override && *sample_size_override <= 0) throw DomainError("sample size must be positive");
}

std::int64_t required_sample_size(const MeasureCensus& census, const SamplingParams& params) {
  params.validate();
  const auto n = static_cast<std::int64_t>(census.size());
  if (n == 0) throw SizeError("census is empty");
  if (params.sample_size_override) {
    if (*params.sample_size_override > n)
      throw SizeError("sample size " + std::to_string(*params.sample_size_override) + " exceeds " +
                      std::to_string(n) + " measures");
    return *params.sample_size_override;
  }
  return ceil(params.fraction * Rational(n));
}

namespace {

struct Entry {
  MeasureNumber number;
  std::int64_t count;
};

std::vector<Entry> entries(const MeasureCensus& census) {
  std::vector<Entry> out;
  out.reserve(census.size());
  for (const auto& [n, c] : census.counts) out.push_back({n, c});
  return out;
}

// Moves a uniformly chosen entry from `from` to `to` and returns its count.
std::int64_t move_random(std::vector<Entry>& from, std::vector<Entry>* to, Rng& rng) {
  const auto i = rng.uniform_index(from.size());
  const Entry e = from[i];
  from[i] = from.back();
  from.pop_back();
  if (to != nullptr) to->push_back(e);
  return e.count;
}

Sample finish(Algorithm a, std::vector<Entry> selection, std::int64_t sum, std::uint64_t seed,
              std::optional<SampleWarning> warning) {
  Sample s{a, {}, sum, seed, warning};
  s.measure_numbers.reserve(selection.size());
  for (const auto& e : selection) s.measure_numbers.push_back(e.number);
  std::sort(s.measure_numbers.begin(), s.measure_numbers.end());
  return s;
}

std::optional<SampleWarning> bound_warning(std::int64_t sum, const Rational& lower, const Rational& upper) {
  if (Rational(sum) < lower) return SampleWarning::BelowLowerBound;
  if (Rational(sum) > upper) return SampleWarning::AboveUpperBound;
  return std::nullopt;
}

}  // namespace

Sample rand_sel(const MeasureCensus& census, const SamplingParams& params, std::uint64_t seed) {
  const auto required = static_cast<std::size_t>(required_sample_size(census, params));
  auto pool = entries(census);
  Rng rng(seed);
  // Partial Fisher-Yates: the first `required` slots become the draw.
  for (std::size_t i = 0; i < required; ++i) {
    const auto j = i + rng.uniform_index(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(required);
  std::int64_t sum = 0;
  for (const auto& e : pool) sum += e.count;
  return finish(Algorithm::RandSel, std::move(pool), sum, seed, std::nullopt);
}

Sample bar_el_count(const MeasureCensus& census, const SamplingParams& params, std::uint64_t seed) {
  const auto required = static_cast<std::size_t>(required_sample_size(census, params));
  const auto n_measures = static_cast<std::int64_t>(census.size());
  // Kept exact; the bounds are closed.
  const Rational required_elements =
      Rational(census.total) * Rational(static_cast<std::int64_t>(required), n_measures);
  const Rational lower = (Rational(1) - params.tolerance) * required_elements;
  const Rational upper = (Rational(1) + params.tolerance) * required_elements;
  const std::int64_t max_attempts = n_measures;

  auto available = entries(census);
  std::vector<Entry> selection;
  std::int64_t sum = 0;
  std::int64_t attempts = 0;
  Rng rng(seed);

  while (selection.size() != required || Rational(sum) < lower) {
    if (available.empty()) break;
    sum += move_random(available, &selection, rng);
    if (selection.size() > required) sum -= move_random(selection, &available, rng);
    ++attempts;
    while (Rational(sum) > upper) sum -= move_random(selection, &available, rng);
    if (attempts == max_attempts) break;
  }

  auto warning = bound_warning(sum, lower, upper);
  if (!warning && selection.size() != required) warning = SampleWarning::WrongMeasureCount;
  return finish(Algorithm::BarElCount, std::move(selection), sum, seed, warning);
}

Sample only_el(const MeasureCensus& census, const SamplingParams& params, std::uint64_t seed) {
  params.validate();
  if (census.empty()) throw SizeError("census is empty");
  const Rational required_elements(ceil(params.fraction * Rational(census.total)));
  const Rational lower = (Rational(1) - params.tolerance) * required_elements;
  const Rational upper = (Rational(1) + params.tolerance) * required_elements;
  const auto max_attempts = static_cast<std::int64_t>(census.size());

  auto available = entries(census);
  std::vector<Entry> selection;
  std::int64_t sum = 0;
  std::int64_t attempts = 0;
  Rng rng(seed);

  while (Rational(sum) < lower && attempts < max_attempts) {
    sum += move_random(available, &selection, rng);
    ++attempts;
  }
  // Evicted bars are not returned to the pool.
  while (Rational(sum) > upper) sum -= move_random(selection, nullptr, rng);

  return finish(Algorithm::OnlyEl, std::move(selection), sum, seed, bound_warning(sum, lower, upper));
}

Sample draw_sample(Algorithm algorithm, const MeasureCensus& census, const SamplingParams& params,
                   std::uint64_t seed) {
  switch (algorithm) {
    case Algorithm::RandSel: return rand_sel(census, params, seed);
    case Algorithm::BarElCount: return bar_el_count(census, params, seed);
    case Algorithm::OnlyEl: return only_el(census, params, seed);
  }
  throw ConfigError("unknown algorithm");
}

nlohmann::json to_json(const Sample& sample) {
  nlohmann::json j;
  j["algorithm"] = display_name(sample.algorithm);
  j["seed"] = sample.seed;
  j["measures"] = sample.measure_numbers;
  j["element_sum"] = sample.element_sum;
  j["warning"] = sample.warning ? nlohmann::json(to_string(*sample.warning)) : nlohmann::json(nullptr);
  return j;
}

}  // namespace barsample
