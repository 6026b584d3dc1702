// barsample command-line front end.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "barsample/diff.hpp"
#include "barsample/error.hpp"
#include "barsample/experiment.hpp"
#include "barsample/rng.hpp"
#include "barsample/sampler.hpp"
#include "barsample/score.hpp"
#include "barsample/synth.hpp"

namespace {

using namespace barsample;

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

Whitelist whitelist_from(const std::string& path) {
  return path.empty() ? Whitelist::defaults() : Whitelist::load(path);
}

std::set<MeasureNumber> parse_measure_list(const std::string& text) {
  std::set<MeasureNumber> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const auto v = std::stoll(item, &used);
      if (used != item.size() || v < 0) throw std::invalid_argument(item);
      out.insert(v);
    } catch (const std::exception&) {
      throw ConfigError("bad measure number '" + item + "' in --measures");
    }
  }
  return out;
}

int cmd_run(const std::string& config_path, std::optional<int> workers, bool serial) {
  auto config = load_experiment_config(config_path);
  if (workers) config.workers = *workers;
  const auto result = run_experiment(config, serial ? Execution::Serial : Execution::Parallel);
  write_outputs(result, config);

  std::cout << "piece " << config.piece_id << ": " << result.comparisons_emitted << " comparisons, "
            << result.failures.size() << " failed\n";
  bool any = false;
  for (const auto& s : result.summaries) {
    std::cout << "  " << display_name(s.algorithm) << ": delta "
              << (s.delta_metric ? format2(*s.delta_metric) : "NA") << ", sigma "
              << (s.mean_sigma ? format2(*s.mean_sigma) : "NA") << ", duplicates " << s.duplicates
              << ", warnings " << s.warnings << '\n';
    any = any || s.delta_metric.has_value();
  }
  std::cout << "outputs in " << config.output_dir.string() << '\n';
  if (!any) {
    std::cerr << "no edition pair could be aggregated; see failures.log\n";
    return kExitRuntime;
  }
  return 0;
}

int cmd_census(const std::string& file, const std::string& wl, bool by_kind) {
  const auto score = load_score(file, whitelist_from(wl));
  if (by_kind) {
    std::cout << "kind,count\n";
    for (const auto& [k, n] : kind_census(score)) std::cout << k << ',' << n << '\n';
    return 0;
  }
  const auto census = measure_census(score);
  std::cout << "measure,count\n";
  for (const auto& [m, n] : census.counts) std::cout << m << ',' << n << '\n';
  std::cout << "total," << census.total << '\n';
  return 0;
}

int cmd_diff(const std::string& left, const std::string& right, const std::string& measures,
             const std::string& wl, bool json) {
  const auto whitelist = whitelist_from(wl);
  const auto a = load_score(left, whitelist);
  const auto b = load_score(right, whitelist);
  std::optional<std::set<MeasureNumber>> selection;
  if (!measures.empty()) selection = parse_measure_list(measures);
  if (!selection) {
    const auto rep = validate_alignment(a, b);
    if (!rep.comparable())
      std::cerr << "warning: measure numbering differs (" << rep.only_left.size() << " only in " << a.edition_id()
                << ", " << rep.only_right.size() << " only in " << b.edition_id()
                << "); comparing shared measures\n";
  }
  const auto report = diff_scores(a, b, selection);
  if (json) {
    std::cout << report.to_json().dump(2) << '\n';
  } else {
    std::cout << report.to_csv() << "# delta " << report.delta << '\n';
  }
  return 0;
}

int cmd_sample(const std::string& file, const std::string& algorithm, std::uint64_t seed, const std::string& fraction,
               const std::string& tolerance, std::optional<std::int64_t> size, const std::string& emit_path,
               const std::string& wl) {
  const auto score = load_score(file, whitelist_from(wl));
  SamplingParams params;
  params.fraction = parse_rational(fraction);
  params.tolerance = parse_rational(tolerance);
  params.sample_size_override = size;
  const auto sample = draw_sample(parse_algorithm(algorithm), measure_census(score), params, seed);
  std::cout << to_json(sample).dump() << '\n';
  if (!emit_path.empty()) {
    std::ofstream out(emit_path, std::ios::binary);
    if (!out) throw Error("cannot write " + emit_path);
    out << emit(extract_sample_document(score, sample.measure_numbers));
  }
  return 0;
}

int cmd_synth(const std::string& plan) {
  const auto config = load_synth_config(plan);
  for (const auto& p : write_synth_corpus(config)) std::cout << p.string() << '\n';
  std::cout << (config.output_dir / "experiment.json").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sample measures from XML scores and evaluate how representative the samples are."};
  app.set_version_flag("--version", std::string("barsample ") + kToolkitVersion + " (rng " + kRngId + ")");
  app.require_subcommand(1);

  std::string config_path;
  std::optional<int> workers;
  bool serial = false;
  auto* run = app.add_subcommand("run", "Run the full sampling experiment");
  run->add_option("--config", config_path, "JSON experiment config")->required();
  run->add_option("--workers", workers, "Worker threads (overrides config)");
  run->add_flag("--serial", serial, "Use the serial reference kernel");

  std::string file, whitelist;
  bool by_kind = false;
  auto* census = app.add_subcommand("census", "Print the per-measure element census");
  census->add_option("file", file)->required();
  census->add_option("--whitelist", whitelist, "Element kinds, one per line");
  census->add_flag("--by-kind", by_kind, "Count per element kind instead");

  std::string left, right, measures;
  bool json = false;
  auto* diff = app.add_subcommand("diff", "Count edit operations between two editions");
  diff->add_option("left", left)->required();
  diff->add_option("right", right)->required();
  diff->add_option("--measures", measures, "Comma-separated measure numbers");
  diff->add_option("--whitelist", whitelist, "Element kinds, one per line");
  diff->add_flag("--json", json, "Full JSON report with operations");

  std::string algorithm, fraction = "1/10", tolerance = "5/100", emit_path;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> size;
  auto* sample = app.add_subcommand("sample", "Draw one sample of measures");
  sample->add_option("--algorithm", algorithm, "randsel | barelcount | onlyel")->required();
  sample->add_option("--seed", seed, "RNG seed")->required();
  sample->add_option("file", file)->required();
  sample->add_option("--fraction", fraction, "Sample fraction (default 1/10)");
  sample->add_option("--tolerance", tolerance, "Element tolerance (default 5/100)");
  sample->add_option("--size", size, "Fixed number of measures");
  sample->add_option("--emit", emit_path, "Write the sampled subdocument here");
  sample->add_option("--whitelist", whitelist, "Element kinds, one per line");

  std::string plan;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with planted differences");
  synth->add_option("--plan", plan, "JSON plan")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, workers, serial);
    if (*census) return cmd_census(file, whitelist, by_kind);
    if (*diff) return cmd_diff(left, right, measures, whitelist, json);
    if (*sample) return cmd_sample(file, algorithm, seed, fraction, tolerance, size, emit_path, whitelist);
    if (*synth) return cmd_synth(plan);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}
