#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "barsample/score.hpp"

namespace barsample {

enum class DifferenceMode { Uniform, DensityCorrelated, Propagating };

struct DifferencePlan {
  DifferenceMode mode = DifferenceMode::Uniform;
  std::int64_t total_differences = 0;
  int propagation_span = 1;  // elements per cluster (Propagating)
  std::uint64_t rng_seed = 0;
  // Propagating only: measures that receive the clusters, cycled in order.
  // Empty means clusters go to uniformly chosen measures.
  std::vector<MeasureNumber> anchor_measures;

  void validate() const;  // throws PlanError
  // {"mode": "uniform"|"density"|"propagating", "total": N, "span": k, "seed": s, "measures": [...]}
  static DifferencePlan from_json(const nlohmann::json& j);
};

// Synthetic two-staff score whose census equals `density_profile`, measures
// numbered from `first_number`. Every element carries a @label unique within
// its staff, so one attribute flip is always exactly one Modify.
// Throws DomainError on a negative density or a length mismatch.
Score generate_base_score(std::int64_t n_measures, std::span<const std::int64_t> density_profile,
                          std::string edition_id = "base", MeasureNumber first_number = 1);

struct PlantResult {
  Score mutated;
  std::map<MeasureNumber, std::int64_t> ground_truth;  // every measure, zeros included
};

// Flips one attribute per difference on distinct in-measure elements
// (stem.dir for notes and chords, curvedir for slurs and ties, place otherwise).
// Throws PlanError when the plan cannot be realised.
PlantResult plant_differences(const Score& base, const DifferencePlan& plan, std::string mutated_id = {});

// Plants several plans in sequence; no element is flipped twice.
PlantResult plant_layers(const Score& base, std::span<const DifferencePlan> layers, std::string mutated_id = {});

// --- corpus files -----------------------------------------------------------

struct SynthEdition {
  std::string id;
  std::vector<DifferencePlan> layers;
  std::int64_t extra_measures = 0;  // appended after the last base measure
};

struct SynthConfig {
  std::vector<std::int64_t> density;
  std::vector<SynthEdition> editions;
  std::filesystem::path output_dir;
  std::string piece_id = "synthetic";
};

// Throws ConfigError. Relative output_dir resolves against the plan's folder.
SynthConfig load_synth_config(const std::filesystem::path& path);
SynthConfig parse_synth_config(const nlohmann::json& j, const std::filesystem::path& base_dir);

// Writes <id>.xml and <id>_ground_truth.csv per edition plus an
// experiment.json that runs all three algorithms over the corpus. Returns the
// edition file paths.
std::vector<std::filesystem::path> write_synth_corpus(const SynthConfig& config);

}  // namespace barsample
