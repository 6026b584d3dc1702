#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "barsample/diff.hpp"
#include "barsample/evaluator.hpp"
#include "barsample/sampler.hpp"
#include "barsample/score.hpp"

namespace barsample {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct EditionSource {
  std::string id;
  std::filesystem::path path;
};

struct DiffSource {
  enum class Kind { Native, MusicdiffLogs };
  Kind kind = Kind::Native;
  std::filesystem::path log_dir;  // MusicdiffLogs: holds <left>__<right>.log per pair
};

struct ExperimentConfig {
  std::string piece_id = "piece";
  std::vector<EditionSource> editions;
  std::string base_edition;  // census source for sampling
  std::int64_t repetitions = 10000;
  SamplingParams params;
  std::vector<Algorithm> algorithms{Algorithm::RandSel, Algorithm::BarElCount, Algorithm::OnlyEl};
  std::uint64_t master_seed = 0;
  std::filesystem::path output_dir = "results";
  DiffSource diff_source;
  int workers = 0;  // 0: OpenMP default
  std::optional<std::filesystem::path> whitelist;
  CompareOptions compare;
  Dispersion dispersion = Dispersion::Population;

  void validate() const;  // throws ConfigError
};

// Relative paths resolve against `base_dir`. Throws ConfigError.
ExperimentConfig parse_experiment_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Full-score comparison of one unordered edition pair.
struct PairComparison {
  std::size_t left = 0;  // indices into the edition list, left < right
  std::size_t right = 0;
  std::string left_id;
  std::string right_id;
  bool comparable = false;
  std::string failure_reason;
  std::int64_t delta_full = 0;
  std::unordered_map<MeasureNumber, std::int64_t> per_measure;  // every shared measure
};

// One entry per unordered pair in (i, j), i < j order. Pairs whose measure
// numbering differs are flagged and carry no counts.
std::vector<PairComparison> compare_full(std::span<const Score> editions, const CompareOptions& options = {});
std::vector<PairComparison> compare_full_from_logs(std::span<const Score> editions, const std::filesystem::path& log_dir);

// --- repetition kernel ------------------------------------------------------

enum class ComparisonStatus : std::uint8_t { Ok = 0, PairNotComparable = 1, MeasureMissing = 2 };

struct KernelInput {
  const MeasureCensus* census = nullptr;
  SamplingParams params;
  Algorithm algorithm = Algorithm::RandSel;
  std::uint64_t master_seed = 0;
  std::int64_t repetitions = 0;
  std::span<const PairComparison> pairs;
};

// Results of all repetitions for one algorithm; deltas and status are
// repetition-major (rep * pairs + pair).
struct RepetitionBatch {
  std::vector<Sample> samples;
  std::vector<std::int64_t> deltas;
  std::vector<ComparisonStatus> status;
};

// Seed of repetition `rep` for `algorithm`; independent of scheduling.
std::uint64_t repetition_seed(std::uint64_t master_seed, Algorithm algorithm, std::int64_t rep);

// Reference implementation, one repetition after another.
RepetitionBatch run_repetitions_serial(const KernelInput& in);
// Same results on any number of OpenMP threads (workers <= 0: runtime default).
RepetitionBatch run_repetitions_parallel(const KernelInput& in, int workers);

// --- orchestration ------------------------------------------------------------

struct ComparisonFailure {
  Algorithm algorithm;
  std::int64_t sample;
  std::string left_id;
  std::string right_id;
  std::string reason;
};

struct ExperimentResult {
  std::vector<EvaluationSummary> summaries;  // config.algorithms order
  std::map<Algorithm, std::vector<Sample>> samples;
  std::vector<PairComparison> full;
  std::vector<ComparisonFailure> failures;
  std::int64_t comparisons_attempted = 0;
  std::int64_t comparisons_emitted = 0;
};

enum class Execution { Serial, Parallel };

// Loads editions, draws samples, compares and aggregates. Throws ConfigError
// for unusable inputs (including editions that fail to parse).
ExperimentResult run_experiment(const ExperimentConfig& config, Execution execution = Execution::Parallel);

// Writes summary.csv, pairs_<alg>.csv, hist/<left>_<right>_<alg>.csv,
// failures.log and samples_<alg>.jsonl under config.output_dir.
void write_outputs(const ExperimentResult& result, const ExperimentConfig& config);

}  // namespace barsample
