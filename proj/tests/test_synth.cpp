#include "barsample/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "barsample/diff.hpp"
#include "barsample/error.hpp"
#include "fixtures.hpp"

namespace barsample {
namespace {

std::vector<std::int64_t> ramp(std::size_t n, std::int64_t lo, std::int64_t step) {
  std::vector<std::int64_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<std::int64_t>(i % 13);
  return out;
}

void expect_agreement(const Score& base, const PlantResult& r, std::int64_t total) {
  const auto rep = diff_scores(base, r.mutated);
  EXPECT_EQ(rep.delta, total);
  EXPECT_EQ(rep.per_measure, r.ground_truth);
  for (const auto& op : rep.operations) EXPECT_EQ(op.kind, EditKind::Modify);
}

TEST(GenerateBaseScoreTest, CensusEqualsProfile) {
  const std::vector<std::int64_t> tens(10, 10);
  EXPECT_EQ(measure_census(generate_base_score(10, tens)).total, 100);

  std::vector<std::int64_t> profile = ramp(97, 10, 2);
  std::int64_t sum = 0;
  for (auto d : profile) sum += d;
  profile.back() += 2152 - sum;
  const auto score = generate_base_score(97, profile);
  const auto c = measure_census(score);
  EXPECT_EQ(c.total, 2152);
  for (std::size_t i = 0; i < profile.size(); ++i) EXPECT_EQ(c.counts.at(static_cast<MeasureNumber>(i + 1)), profile[i]);

  // Survives a round trip through the file format.
  EXPECT_EQ(measure_census(parse_score(emit(score), Whitelist::defaults())).counts, c.counts);

  EXPECT_TRUE(generate_base_score(0, std::vector<std::int64_t>{}).measures().empty());
  EXPECT_THROW(generate_base_score(2, std::vector<std::int64_t>{3, -1}), DomainError);
  EXPECT_THROW(generate_base_score(3, std::vector<std::int64_t>{3, 1}), DomainError);
}

TEST(GenerateBaseScoreTest, SmallDensitiesAndNumbering) {
  const std::vector<std::int64_t> profile{0, 1, 2, 3, 4, 5};
  const auto c = measure_census(generate_base_score(6, profile, "x", 0));
  EXPECT_EQ(c.counts.begin()->first, 0);
  for (std::size_t i = 0; i < profile.size(); ++i) EXPECT_EQ(c.counts.at(static_cast<MeasureNumber>(i)), profile[i]);
}

TEST(PlantDifferencesTest, ZeroDifferences) {
  const auto base = generate_base_score(20, ramp(20, 4, 1));
  const auto r = plant_differences(base, DifferencePlan{});
  EXPECT_EQ(diff_scores(base, r.mutated).delta, 0);
  EXPECT_EQ(emit(r.mutated), emit(base));
}

TEST(PlantDifferencesTest, UniformAgreesWithDiff) {
  const auto base = generate_base_score(97, ramp(97, 8, 3));
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    DifferencePlan plan;
    plan.total_differences = 100;
    plan.rng_seed = seed;
    expect_agreement(base, plant_differences(base, plan), 100);
  }
}

TEST(PlantDifferencesTest, DensityCorrelatedAgreesAndTracksDensity) {
  std::vector<std::int64_t> profile(60);
  for (std::size_t i = 0; i < profile.size(); ++i) profile[i] = 10 + static_cast<std::int64_t>(i % 10) * 6;
  const auto base = generate_base_score(60, profile);
  DifferencePlan plan;
  plan.mode = DifferenceMode::DensityCorrelated;
  plan.total_differences = 2000;
  plan.rng_seed = 4;
  const auto r = plant_differences(base, plan);
  expect_agreement(base, r, 2000);

  double mx = 0, my = 0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    mx += static_cast<double>(profile[i]);
    my += static_cast<double>(r.ground_truth.at(static_cast<MeasureNumber>(i + 1)));
  }
  mx /= 60, my /= 60;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double x = static_cast<double>(profile[i]) - mx;
    const double y = static_cast<double>(r.ground_truth.at(static_cast<MeasureNumber>(i + 1))) - my;
    sxy += x * y, sxx += x * x, syy += y * y;
  }
  EXPECT_GT(sxy / std::sqrt(sxx * syy), 0.5);
}

TEST(PlantDifferencesTest, PropagatingClustersStayInOneMeasure) {
  std::vector<std::int64_t> profile(30, 12);
  profile[9] = profile[10] = 40;
  const auto base = generate_base_score(30, profile);
  DifferencePlan plan;
  plan.mode = DifferenceMode::Propagating;
  plan.total_differences = 30;
  plan.propagation_span = 15;
  plan.anchor_measures = {10, 11};
  const auto r = plant_differences(base, plan);
  expect_agreement(base, r, 30);
  EXPECT_EQ(r.ground_truth.at(10), 15);
  EXPECT_EQ(r.ground_truth.at(11), 15);

  plan.anchor_measures.clear();
  plan.total_differences = 12;
  plan.propagation_span = 4;
  const auto free = plant_differences(base, plan);
  expect_agreement(base, free, 12);
  for (const auto& [m, c] : free.ground_truth) EXPECT_EQ(c % 4, 0) << "measure " << m;
}

TEST(PlantDifferencesTest, LayersNeverFlipTwice) {
  const auto base = generate_base_score(10, std::vector<std::int64_t>(10, 6));
  std::vector<DifferencePlan> layers(3);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].total_differences = 20;
    layers[i].rng_seed = i;
  }
  expect_agreement(base, plant_layers(base, layers), 60);
}

TEST(PlantDifferencesTest, InfeasiblePlans) {
  const auto base = generate_base_score(5, std::vector<std::int64_t>(5, 4));
  DifferencePlan plan;
  plan.total_differences = 21;
  EXPECT_THROW(plant_differences(base, plan), PlanError);
  plan.mode = DifferenceMode::Propagating;
  plan.total_differences = 5;
  plan.propagation_span = 5;  // staves hold at most 2 elements
  EXPECT_THROW(plant_differences(base, plan), PlanError);
  plan.propagation_span = 2;
  plan.anchor_measures = {99};
  EXPECT_THROW(plant_differences(base, plan), PlanError);
  plan.propagation_span = 0;
  EXPECT_THROW(plan.validate(), PlanError);
}

TEST(SynthCorpusTest, WritesEditionsTruthAndConfig) {
  test::TempDir dir("synth");
  const auto plan = nlohmann::json::parse(R"({
    "piece": "demo",
    "density": {"measures": 12, "uniform": [4, 9], "seed": 3, "overrides": {"5": 30}},
    "output_dir": "out",
    "editions": [
      {"id": "base"},
      {"id": "ed1", "layers": [{"mode": "uniform", "total": 7, "seed": 1}]},
      {"id": "ed2", "extra_measures": 1}
    ]
  })");
  const auto config = parse_synth_config(plan, dir.path());
  ASSERT_EQ(config.density.size(), 12u);
  EXPECT_EQ(config.density[4], 30);
  const auto paths = write_synth_corpus(config);
  ASSERT_EQ(paths.size(), 3u);

  const auto base = load_score(paths[0], Whitelist::defaults());
  const auto ed1 = load_score(paths[1], Whitelist::defaults());
  const auto ed2 = load_score(paths[2], Whitelist::defaults());
  EXPECT_EQ(base.edition_id(), "base");
  EXPECT_EQ(diff_scores(base, ed1).delta, 7);
  EXPECT_EQ(validate_alignment(ed2, base).only_left, std::vector<MeasureNumber>{13});
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "out" / "ed1_ground_truth.csv"));

  std::ifstream in(dir.path() / "out" / "experiment.json");
  const auto exp = nlohmann::json::parse(in);
  EXPECT_EQ(exp.at("base_edition"), "base");
  EXPECT_EQ(exp.at("editions").size(), 3u);
}

TEST(SynthCorpusTest, BadPlansAreConfigErrors) {
  EXPECT_THROW(parse_synth_config(nlohmann::json::parse(R"({"density": [1], "editions": []})"), "."), ConfigError);
  EXPECT_THROW(parse_synth_config(nlohmann::json::parse(R"({"density": [1], "editions": [{"id": "a"}, {"id": "a"}]})"), "."),
               ConfigError);
  EXPECT_THROW(parse_synth_config(
                   nlohmann::json::parse(R"({"density": [1], "editions": [{"id": "a", "layers": [{"mode": "x"}]}]})"), "."),
               ConfigError);
  EXPECT_THROW(parse_synth_config(nlohmann::json::parse(R"({"editions": [{"id": "a"}]})"), "."), ConfigError);
}

}  // namespace
}  // namespace barsample
