#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "barsample/rational.hpp"
#include "barsample/score.hpp"

namespace barsample {

enum class Algorithm { RandSel, BarElCount, OnlyEl };

// "randSel", "barElCount", "onlyEl".
std::string_view display_name(Algorithm a);
// "randsel", "barelcount", "onlyel" (file names, CLI values).
std::string_view slug(Algorithm a);
// Accepts either spelling, case-insensitively. Throws ConfigError.
Algorithm parse_algorithm(std::string_view text);

enum class SampleWarning {
  BelowLowerBound,
  AboveUpperBound,
  // Element sum in bounds but bar count off target when barElCount runs out
  // of attempts.
  WrongMeasureCount,
};

std::string_view to_string(SampleWarning w);

struct SamplingParams {
  Rational fraction{1, 10};
  Rational tolerance{5, 100};
  std::optional<std::int64_t> sample_size_override;

  // Throws DomainError unless 0 < fraction <= 1, 0 <= tolerance < 1 and any
  // override is positive.
  void validate() const;
};

struct Sample {
  Algorithm algorithm = Algorithm::RandSel;
  std::vector<MeasureNumber> measure_numbers;  // sorted, distinct
  std::int64_t element_sum = 0;
  std::uint64_t seed = 0;
  std::optional<SampleWarning> warning;

  friend bool operator==(const Sample&, const Sample&) = default;
};

// ceil(fraction * |census|) unless overridden. Throws SizeError when the
// census is empty or the override exceeds it.
std::int64_t required_sample_size(const MeasureCensus& census, const SamplingParams& params);

// Uniform draw of required_sample_size bars without replacement.
Sample rand_sel(const MeasureCensus& census, const SamplingParams& params, std::uint64_t seed);

// Fixed bar count with the element sum held within
// [(1 - tol), (1 + tol)] * total * required / |census|.
Sample bar_el_count(const MeasureCensus& census, const SamplingParams& params, std::uint64_t seed);

// Element sum within [(1 - tol), (1 + tol)] * ceil(fraction * total); bar count free.
Sample only_el(const MeasureCensus& census, const SamplingParams& params, std::uint64_t seed);

Sample draw_sample(Algorithm algorithm, const MeasureCensus& census, const SamplingParams& params,
                   std::uint64_t seed);

// One JSON-lines record: algorithm, seed, measures, element_sum, warning.
nlohmann::json to_json(const Sample& sample);

}  // namespace barsample
