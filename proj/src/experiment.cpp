#include "barsample/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>

#include "barsample/error.hpp"
#include "barsample/rng.hpp"

namespace barsample {

// ---------------------------------------------------------------------------
// Config

void ExperimentConfig::validate() const {
  if (editions.size() < 2) throw ConfigError("at least two editions are required");
  std::set<std::string> ids;
  for (const auto& e : editions)
    if (!ids.insert(e.id).second) throw ConfigError("duplicate edition id '" + e.id + "'");
  if (ids.count(base_edition) == 0) throw ConfigError("base_edition '" + base_edition + "' is not an edition id");
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (algorithms.empty()) throw ConfigError("no algorithms selected");
  try {
    params.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

namespace {

Rational rational_field(const nlohmann::json& v) {
  // Numbers go through their shortest decimal rendering, so 0.1 stays 1/10.
  return parse_rational(v.is_string() ? v.get<std::string>() : v.dump());
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  return p.is_absolute() ? p : base / p;
}

}  // namespace

ExperimentConfig parse_experiment_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  try {
    c.piece_id = j.value("piece", std::string("piece"));
    const auto& eds = j.contains("editions") ? j.at("editions") : j.at("edition_paths");
    for (const auto& e : eds) {
      if (e.is_string()) {
        const std::filesystem::path p = e.get<std::string>();
        c.editions.push_back({p.stem().string(), resolve(p, base_dir)});
      } else {
        c.editions.push_back({e.at("id").get<std::string>(), resolve(e.at("path").get<std::string>(), base_dir)});
      }
    }
    c.base_edition = j.contains("base_edition") ? j.at("base_edition").get<std::string>()
                                                : (c.editions.empty() ? std::string() : c.editions.front().id);
    c.repetitions = j.value("repetitions", std::int64_t{10000});
    if (j.contains("fraction")) c.params.fraction = rational_field(j.at("fraction"));
    if (j.contains("tolerance")) c.params.tolerance = rational_field(j.at("tolerance"));
    if (j.contains("sample_size") && !j.at("sample_size").is_null())
      c.params.sample_size_override = j.at("sample_size").get<std::int64_t>();
    if (j.contains("algorithms")) {
      c.algorithms.clear();
      for (const auto& a : j.at("algorithms")) c.algorithms.push_back(parse_algorithm(a.get<std::string>()));
    }
    c.master_seed = j.value("master_seed", std::uint64_t{0});
    c.output_dir = resolve(j.value("output_dir", std::string("results")), base_dir);
    c.workers = j.value("workers", 0);
    if (j.contains("whitelist")) c.whitelist = resolve(j.at("whitelist").get<std::string>(), base_dir);
    if (j.contains("compare")) c.compare = CompareOptions::from_json(j.at("compare"));
    if (j.contains("dispersion")) {
      const auto d = j.at("dispersion").get<std::string>();
      if (d == "population") {
        c.dispersion = Dispersion::Population;
      } else if (d == "sample") {
        c.dispersion = Dispersion::Sample;
      } else {
        throw ConfigError("dispersion must be 'population' or 'sample'");
      }
    }
    if (j.contains("diff_source")) {
      const auto& ds = j.at("diff_source");
      if (ds.is_string() && ds.get<std::string>() == "native") {
        c.diff_source.kind = DiffSource::Kind::Native;
      } else if (ds.is_object() && ds.contains("musicdiff_logs")) {
        c.diff_source.kind = DiffSource::Kind::MusicdiffLogs;
        c.diff_source.log_dir = resolve(ds.at("musicdiff_logs").get<std::string>(), base_dir);
      } else {
        throw ConfigError("diff_source must be \"native\" or {\"musicdiff_logs\": <dir>}");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_experiment_config(j, path.parent_path());
}

// ---------------------------------------------------------------------------
// Full comparisons

namespace {

std::string alignment_failure(const AlignmentReport& rep) {
  auto list = [](const std::vector<MeasureNumber>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size() && i < 5; ++i) s += (i ? " " : "") + std::to_string(v[i]);
    if (v.size() > 5) s += " ...";
    return s;
  };
  std::string r = "measure numbering differs";
  if (!rep.only_left.empty()) r += "; only left: " + list(rep.only_left);
  if (!rep.only_right.empty()) r += "; only right: " + list(rep.only_right);
  return r;
}

template <typename Fill>
std::vector<PairComparison> each_pair(std::span<const Score> editions, Fill fill) {
  if (editions.size() < 2) throw ConfigError("at least two editions are required");
  std::vector<PairComparison> out;
  for (std::size_t i = 0; i < editions.size(); ++i) {
    for (std::size_t j = i + 1; j < editions.size(); ++j) {
      PairComparison pc;
      pc.left = i;
      pc.right = j;
      pc.left_id = editions[i].edition_id();
      pc.right_id = editions[j].edition_id();
      const auto rep = validate_alignment(editions[i], editions[j]);
      if (!rep.comparable()) {
        pc.failure_reason = alignment_failure(rep);
      } else {
        pc.comparable = true;
        for (const auto n : rep.shared) pc.per_measure[n] = 0;
        fill(pc, editions[i], editions[j]);
      }
      out.push_back(std::move(pc));
    }
  }
  return out;
}

}  // namespace

std::vector<PairComparison> compare_full(std::span<const Score> editions, const CompareOptions& options) {
  return each_pair(editions, [&](PairComparison& pc, const Score& l, const Score& r) {
    const auto report = diff_scores(l, r, std::nullopt, options);
    pc.delta_full = report.delta;
    for (const auto& [n, c] : report.per_measure) pc.per_measure[n] = c;
  });
}

std::vector<PairComparison> compare_full_from_logs(std::span<const Score> editions, const std::filesystem::path& log_dir) {
  return each_pair(editions, [&](PairComparison& pc, const Score&, const Score&) {
    auto path = log_dir / (pc.left_id + "__" + pc.right_id + ".log");
    if (!std::filesystem::exists(path)) path = log_dir / (pc.right_id + "__" + pc.left_id + ".log");
    std::ifstream in(path);
    if (!in) {
      pc.comparable = false;
      pc.per_measure.clear();
      pc.failure_reason = "no musicdiff log for pair";
      return;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    const auto report = parse_musicdiff_log(buf.str());
    pc.delta_full = report.delta;
    for (const auto& [n, c] : report.per_measure) pc.per_measure[n] += c;
  });
}

// ---------------------------------------------------------------------------
// Kernel

std::uint64_t repetition_seed(std::uint64_t master_seed, Algorithm algorithm, std::int64_t rep) {
  return derive_seed(master_seed, static_cast<std::uint64_t>(algorithm), static_cast<std::uint64_t>(rep));
}

namespace {

RepetitionBatch allocate(const KernelInput& in) {
  if (in.census == nullptr) throw ConfigError("kernel input has no census");
  // Surface SizeError/DomainError before any worker starts.
  if (in.algorithm != Algorithm::OnlyEl) {
    required_sample_size(*in.census, in.params);
  } else {
    in.params.validate();
    if (in.census->empty()) throw SizeError("census is empty");
  }
  RepetitionBatch b;
  const auto cells = static_cast<std::size_t>(in.repetitions) * in.pairs.size();
  b.samples.resize(static_cast<std::size_t>(in.repetitions));
  b.deltas.assign(cells, 0);
  b.status.assign(cells, ComparisonStatus::Ok);
  return b;
}

// One unit of work: draw the sample and restrict every pair's counts to it.
void run_one(const KernelInput& in, std::int64_t rep, RepetitionBatch& out) {
  const auto r = static_cast<std::size_t>(rep);
  out.samples[r] = draw_sample(in.algorithm, *in.census, in.params, repetition_seed(in.master_seed, in.algorithm, rep));
  const auto& measures = out.samples[r].measure_numbers;
  const std::size_t row = r * in.pairs.size();
  for (std::size_t p = 0; p < in.pairs.size(); ++p) {
    const auto& pair = in.pairs[p];
    if (!pair.comparable) {
      out.status[row + p] = ComparisonStatus::PairNotComparable;
      continue;
    }
    std::int64_t delta = 0;
    for (const auto m : measures) {
      const auto it = pair.per_measure.find(m);
      if (it == pair.per_measure.end()) {
        out.status[row + p] = ComparisonStatus::MeasureMissing;
        break;
      }
      delta += it->second;
    }
    out.deltas[row + p] = delta;
  }
}

}  // namespace

RepetitionBatch run_repetitions_serial(const KernelInput& in) {
  auto out = allocate(in);
  for (std::int64_t rep = 0; rep < in.repetitions; ++rep) run_one(in, rep, out);
  return out;
}

RepetitionBatch run_repetitions_parallel(const KernelInput& in, int workers) {
  auto out = allocate(in);
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
  for (std::int64_t rep = 0; rep < in.repetitions; ++rep) {
    try {
      run_one(in, rep, out);
    } catch (...) {
#pragma omp critical(barsample_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

// ---------------------------------------------------------------------------
// Orchestration

namespace {

std::string failure_reason(ComparisonStatus s, const PairComparison& pair, const Sample& sample) {
  if (s == ComparisonStatus::PairNotComparable) return pair.failure_reason;
  for (const auto m : sample.measure_numbers)
    if (pair.per_measure.count(m) == 0) return "measure " + std::to_string(m) + " missing in pair";
  return "measure missing in pair";
}

EvaluationSummary summarize(const ExperimentConfig& config, Algorithm alg, const RepetitionBatch& batch,
                            std::span<const PairComparison> pairs, std::vector<ComparisonFailure>& failures) {
  EvaluationSummary s;
  s.piece_id = config.piece_id;
  s.algorithm = alg;
  s.duplicates = detect_duplicates(batch.samples);
  for (const auto& smp : batch.samples) s.warnings += smp.warning ? 1 : 0;

  const std::size_t P = pairs.size();
  std::vector<std::pair<double, double>> deviations;
  std::vector<double> sigmas;
  for (std::size_t p = 0; p < P; ++p) {
    const auto& pair = pairs[p];
    PairStats ps;
    ps.pair = {pair.left_id, pair.right_id};
    ps.failed = !pair.comparable;
    ps.delta_full = pair.delta_full;
    ps.mu = pair.comparable ? theoretical_mean(pair.delta_full, config.params.fraction) : Rational(0);
    std::vector<std::int64_t> deltas;
    deltas.reserve(batch.samples.size());
    for (std::size_t r = 0; r < batch.samples.size(); ++r) {
      const auto st = batch.status[r * P + p];
      if (st == ComparisonStatus::Ok) {
        deltas.push_back(batch.deltas[r * P + p]);
      } else {
        ++ps.failed_comparisons;
        failures.push_back({alg, static_cast<std::int64_t>(r), pair.left_id, pair.right_id,
                            failure_reason(st, pair, batch.samples[r])});
      }
    }
    if (!deltas.empty()) {
      const auto agg = aggregate(deltas, config.dispersion);
      ps.empirical_mean = agg.mean;
      ps.std_dev = agg.std_dev;
      ps.histogram = agg.histogram;
      ps.n_samples = agg.n;
      deviations.emplace_back(to_double(ps.mu), ps.empirical_mean);
      sigmas.push_back(ps.std_dev);
    }
    s.pair_stats.push_back(std::move(ps));
  }
  if (!deviations.empty()) {
    s.delta_metric = delta_metric(deviations);
    s.mean_sigma = mean_of(sigmas);
  }
  return s;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, Execution execution) {
  config.validate();
  const Whitelist wl = config.whitelist ? Whitelist::load(*config.whitelist) : Whitelist::defaults();

  std::vector<Score> editions;
  editions.reserve(config.editions.size());
  for (const auto& e : config.editions) {
    try {
      editions.push_back(load_score(e.path, wl, e.id));
    } catch (const ParseError& err) {
      throw ConfigError(std::string("edition '") + e.id + "': " + err.what());
    }
  }
  const auto base = std::find_if(editions.begin(), editions.end(),
                                 [&](const Score& s) { return s.edition_id() == config.base_edition; });
  const auto census = measure_census(*base);
  if (census.empty()) throw ConfigError("base edition '" + config.base_edition + "' has no measures");

  ExperimentResult result;
  result.full = config.diff_source.kind == DiffSource::Kind::Native
                    ? compare_full(editions, config.compare)
                    : compare_full_from_logs(editions, config.diff_source.log_dir);

  for (const auto alg : config.algorithms) {
    KernelInput in{&census, config.params, alg, config.master_seed, config.repetitions, result.full};
    RepetitionBatch batch;
    try {
      batch = execution == Execution::Serial ? run_repetitions_serial(in)
                                             : run_repetitions_parallel(in, config.workers);
    } catch (const SizeError& e) {
      throw ConfigError(e.what());
    }
    result.summaries.push_back(summarize(config, alg, batch, result.full, result.failures));
    result.comparisons_attempted += config.repetitions * static_cast<std::int64_t>(result.full.size());
    result.samples[alg] = std::move(batch.samples);
  }
  result.comparisons_emitted = result.comparisons_attempted - static_cast<std::int64_t>(result.failures.size());
  return result;
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

std::string opt2(const std::optional<double>& v) { return v ? format2(*v) : "NA"; }

}  // namespace

void write_outputs(const ExperimentResult& result, const ExperimentConfig& config) {
  const auto& dir = config.output_dir;
  std::filesystem::create_directories(dir / "hist");

  {
    auto out = open_out(dir / "summary.csv");
    out << "piece";
    for (const auto& s : result.summaries) out << ",delta_" << display_name(s.algorithm);
    for (const auto& s : result.summaries) out << ",sigma_" << display_name(s.algorithm);
    for (const auto& s : result.summaries) out << ",duplicates_" << display_name(s.algorithm);
    out << '\n' << config.piece_id;
    for (const auto& s : result.summaries) out << ',' << opt2(s.delta_metric);
    for (const auto& s : result.summaries) out << ',' << opt2(s.mean_sigma);
    for (const auto& s : result.summaries) out << ',' << s.duplicates;
    out << '\n';
  }

  for (const auto& s : result.summaries) {
    const std::string alg(slug(s.algorithm));
    auto out = open_out(dir / ("pairs_" + alg + ".csv"));
    out << "comp,left,right,delta_full,mu,empirical_mean,std_dev,n_samples,failed_comparisons,status\n";
    int comp = 0;
    for (const auto& ps : s.pair_stats) {
      ++comp;
      const bool failed = ps.failed || ps.n_samples == 0;
      out << comp << ',' << ps.pair.first << ',' << ps.pair.second << ',';
      if (ps.failed) {
        out << "NA,NA,";
      } else {
        out << ps.delta_full << ',' << format2(to_double(ps.mu)) << ',';
      }
      if (ps.n_samples > 0) {
        out << format2(ps.empirical_mean) << ',' << format2(ps.std_dev) << ',';
      } else {
        out << "NA,NA,";
      }
      out << ps.n_samples << ',' << ps.failed_comparisons << ',' << (failed ? "failed" : "ok") << '\n';

      if (ps.n_samples > 0) {
        auto h = open_out(dir / "hist" / (ps.pair.first + "_" + ps.pair.second + "_" + alg + ".csv"));
        h << "delta,frequency\n";
        for (const auto& [v, f] : ps.histogram) h << v << ',' << f << '\n';
      }
    }
  }

  {
    auto out = open_out(dir / "failures.log");
    for (const auto& f : result.failures)
      out << display_name(f.algorithm) << '\t' << f.sample << '\t' << f.left_id << '\t' << f.right_id << '\t'
          << f.reason << '\n';
  }

  for (const auto& [alg, samples] : result.samples) {
    auto out = open_out(dir / ("samples_" + std::string(slug(alg)) + ".jsonl"));
    for (const auto& smp : samples) out << to_json(smp).dump() << '\n';
  }
}

}  // namespace barsample
