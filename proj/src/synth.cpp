#include "barsample/synth.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "barsample/error.hpp"
#include "barsample/rng.hpp"

namespace barsample {

void DifferencePlan::validate() const {
  if (total_differences < 0) throw PlanError("total_differences must be >= 0");
  if (propagation_span < 1) throw PlanError("propagation_span must be >= 1");
}

DifferencePlan DifferencePlan::from_json(const nlohmann::json& j) {
  DifferencePlan p;
  const auto mode = j.value("mode", std::string("uniform"));
  if (mode == "uniform") {
    p.mode = DifferenceMode::Uniform;
  } else if (mode == "density" || mode == "density_correlated") {
    p.mode = DifferenceMode::DensityCorrelated;
  } else if (mode == "propagating") {
    p.mode = DifferenceMode::Propagating;
  } else {
    throw ConfigError("unknown difference mode '" + mode + "'");
  }
  p.total_differences = j.value("total", std::int64_t{0});
  p.propagation_span = j.value("span", 1);
  p.rng_seed = j.value("seed", std::uint64_t{0});
  if (j.contains("measures")) p.anchor_measures = j.at("measures").get<std::vector<MeasureNumber>>();
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------
// Base score

namespace {

constexpr const char* kPitchNames[] = {"c", "d", "e", "f", "g", "a", "b"};

void fill_staff(xml::Node& measure, xml::Node& staff, MeasureNumber m, int s, std::int64_t k) {
  auto& layer = staff.add_child("layer");
  layer.set_attribute("n", "1");
  const bool with_slur = k >= 3;
  const std::int64_t events = with_slur ? k - 1 : k;
  const std::string prefix = "m" + std::to_string(m) + "s" + std::to_string(s) + "e";
  for (std::int64_t i = 0; i < events; ++i) {
    const std::string id = prefix + std::to_string(i);
    if (i % 4 == 3) {
      auto& r = layer.add_child("rest");
      r.set_attribute("xml:id", id);
      r.set_attribute("label", id);
      r.set_attribute("dur", "8");
    } else {
      auto& n = layer.add_child("note");
      n.set_attribute("xml:id", id);
      n.set_attribute("label", id);
      n.set_attribute("pname", kPitchNames[i % 7]);
      n.set_attribute("oct", s == 1 ? "5" : "3");
      n.set_attribute("dur", "8");
      n.set_attribute("stem.dir", "up");
    }
  }
  if (with_slur) {
    auto& sl = measure.add_child("slur");
    const std::string id = prefix + "slur";
    sl.set_attribute("xml:id", id);
    sl.set_attribute("label", id);
    sl.set_attribute("staff", std::to_string(s));
    sl.set_attribute("startid", "#" + prefix + "0");
    sl.set_attribute("endid", "#" + prefix + std::to_string(events - 1));
    sl.set_attribute("curvedir", "above");
  }
}

}  // namespace

Score generate_base_score(std::int64_t n_measures, std::span<const std::int64_t> density_profile,
                          std::string edition_id, MeasureNumber first_number) {
  if (n_measures < 0 || static_cast<std::size_t>(n_measures) != density_profile.size())
    throw DomainError("density profile length " + std::to_string(density_profile.size()) + " != " +
                      std::to_string(n_measures) + " measures");
  if (first_number < 0) throw DomainError("measure numbers must be non-negative");
  for (const auto d : density_profile)
    if (d < 0) throw DomainError("negative density " + std::to_string(d));

  xml::Node mei{"mei", {{"xmlns", "http://www.music-encoding.org/ns/mei"}, {"meiversion", "5.0"}}, {}, {}};
  auto& head = mei.add_child("meiHead");
  head.add_child("fileDesc").add_child("titleStmt").add_child("title").text = edition_id;
  auto& score = mei.add_child("music").add_child("body").add_child("mdiv").add_child("score");
  auto& sd = score.add_child("scoreDef");
  sd.set_attribute("meter.count", "4");
  sd.set_attribute("meter.unit", "4");
  sd.set_attribute("key.sig", "0");
  auto& grp = sd.add_child("staffGrp");
  for (int s : {1, 2}) {
    auto& def = grp.add_child("staffDef");
    def.set_attribute("n", std::to_string(s));
    def.set_attribute("lines", "5");
    def.set_attribute("clef.shape", s == 1 ? "G" : "F");
    def.set_attribute("clef.line", s == 1 ? "2" : "4");
  }
  auto& section = score.add_child("section");
  for (std::size_t i = 0; i < density_profile.size(); ++i) {
    const MeasureNumber m = first_number + static_cast<MeasureNumber>(i);
    const std::int64_t d = density_profile[i];
    auto& measure = section.add_child("measure");
    measure.set_attribute("n", std::to_string(m));
    for (int s : {1, 2}) {
      auto& staff = measure.add_child("staff");
      staff.set_attribute("n", std::to_string(s));
    }
    // Staff nodes are filled after both exist so references stay valid.
    fill_staff(measure, measure.children[0], m, 1, (d + 1) / 2);
    fill_staff(measure, measure.children[1], m, 2, d / 2);
  }
  return score_from_document(std::move(mei), std::move(edition_id), Whitelist::defaults());
}

// ---------------------------------------------------------------------------
// Planting

namespace {

struct Target {
  xml::Node* node;
  bool flipped = false;
};

struct MeasureTargets {
  MeasureNumber number;
  std::vector<std::vector<Target>> staves;  // preorder within each staff

  std::int64_t unflipped() const {
    std::int64_t n = 0;
    for (const auto& s : staves)
      for (const auto& t : s) n += t.flipped ? 0 : 1;
    return n;
  }
};

void gather(xml::Node& node, const Whitelist& wl, int staff_n, std::map<int, std::vector<Target>>& out) {
  if (wl.contains(node.name)) out[staff_n].push_back({&node});
  for (auto& c : node.children) gather(c, wl, staff_n, out);
}

int staff_attr(const xml::Node& n) {
  const auto* a = n.attribute("staff");
  if (a == nullptr) return 0;
  try {
    return std::stoi(*a);
  } catch (const std::exception&) {
    return 0;
  }
}

void collect_measures(xml::Node& node, const Whitelist& wl, std::vector<MeasureTargets>& out) {
  if (node.name == "measure") {
    std::map<int, std::vector<Target>> staves;
    for (auto& c : node.children) {
      if (c.name == "staff") {
        const auto* n = c.attribute("n");
        const int sn = n ? std::stoi(*n) : 1;
        for (auto& cc : c.children) gather(cc, wl, sn, staves);
      } else {
        gather(c, wl, staff_attr(c), staves);
      }
    }
    MeasureTargets mt{std::stoll(*node.attribute("n")), {}};
    for (auto& [sn, v] : staves) mt.staves.push_back(std::move(v));
    out.push_back(std::move(mt));
    return;
  }
  if (node.name == "meiHead" || node.name == "scoreDef") return;
  for (auto& c : node.children) collect_measures(c, wl, out);
}

void flip(Target& t) {
  xml::Node& n = *t.node;
  std::string key = "place";
  const char* a = "above";
  const char* b = "below";
  if (n.name == "note" || n.name == "chord") {
    key = "stem.dir";
    a = "up";
    b = "down";
  } else if (n.name == "slur" || n.name == "tie") {
    key = "curvedir";
  }
  const auto* cur = n.attribute(key);
  n.set_attribute(key, (cur != nullptr && *cur == a) ? b : a);
  t.flipped = true;
}

// Flips one uniformly chosen unflipped element of `m`.
void flip_one(MeasureTargets& m, Rng& rng) {
  std::vector<Target*> free;
  for (auto& s : m.staves)
    for (auto& t : s)
      if (!t.flipped) free.push_back(&t);
  flip(*free[rng.uniform_index(free.size())]);
}

struct Run {
  std::size_t staff;
  std::size_t start;
};

std::vector<Run> runs_of(const MeasureTargets& m, std::int64_t length) {
  std::vector<Run> out;
  for (std::size_t s = 0; s < m.staves.size(); ++s) {
    const auto& st = m.staves[s];
    std::int64_t streak = 0;
    for (std::size_t i = 0; i < st.size(); ++i) {
      streak = st[i].flipped ? 0 : streak + 1;
      if (streak >= length) out.push_back({s, i + 1 - static_cast<std::size_t>(length)});
    }
  }
  return out;
}

void plant(std::vector<MeasureTargets>& measures, const DifferencePlan& plan,
           std::map<MeasureNumber, std::int64_t>& truth) {
  plan.validate();
  std::int64_t capacity = 0;
  for (const auto& m : measures) capacity += m.unflipped();
  if (plan.total_differences > capacity)
    throw PlanError("cannot plant " + std::to_string(plan.total_differences) + " differences on " +
                    std::to_string(capacity) + " free elements");

  Rng rng(plan.rng_seed);
  switch (plan.mode) {
    case DifferenceMode::Uniform:
    case DifferenceMode::DensityCorrelated: {
      std::vector<std::int64_t> weight(measures.size(), 1);
      if (plan.mode == DifferenceMode::DensityCorrelated)
        for (std::size_t i = 0; i < measures.size(); ++i) weight[i] = measures[i].unflipped();
      for (std::int64_t d = 0; d < plan.total_differences; ++d) {
        // Measures without free elements drop out of the draw.
        std::vector<std::size_t> open;
        std::int64_t total_weight = 0;
        for (std::size_t i = 0; i < measures.size(); ++i) {
          if (measures[i].unflipped() > 0 && weight[i] > 0) {
            open.push_back(i);
            total_weight += weight[i];
          }
        }
        auto pick = static_cast<std::int64_t>(rng.uniform_index(static_cast<std::uint64_t>(total_weight)));
        std::size_t chosen = open.back();
        for (const auto i : open) {
          if (pick < weight[i]) {
            chosen = i;
            break;
          }
          pick -= weight[i];
        }
        flip_one(measures[chosen], rng);
        ++truth[measures[chosen].number];
      }
      break;
    }
    case DifferenceMode::Propagating: {
      const std::int64_t span = plan.propagation_span;
      std::int64_t remaining = plan.total_differences;
      for (std::size_t cluster = 0; remaining > 0; ++cluster) {
        const std::int64_t len = std::min(span, remaining);
        MeasureTargets* target = nullptr;
        std::vector<Run> runs;
        if (!plan.anchor_measures.empty()) {
          const auto want = plan.anchor_measures[cluster % plan.anchor_measures.size()];
          const auto it = std::find_if(measures.begin(), measures.end(),
                                       [&](const MeasureTargets& m) { return m.number == want; });
          if (it == measures.end()) throw PlanError("anchor measure " + std::to_string(want) + " does not exist");
          target = &*it;
          runs = runs_of(*target, len);
          if (runs.empty())
            throw PlanError("measure " + std::to_string(want) + " has no run of " + std::to_string(len) +
                            " free elements");
        } else {
          std::vector<std::size_t> candidates;
          for (std::size_t i = 0; i < measures.size(); ++i)
            if (!runs_of(measures[i], len).empty()) candidates.push_back(i);
          if (candidates.empty()) throw PlanError("no measure has a run of " + std::to_string(len) + " free elements");
          target = &measures[candidates[rng.uniform_index(candidates.size())]];
          runs = runs_of(*target, len);
        }
        const Run r = runs[rng.uniform_index(runs.size())];
        for (std::int64_t i = 0; i < len; ++i) flip(target->staves[r.staff][r.start + static_cast<std::size_t>(i)]);
        truth[target->number] += len;
        remaining -= len;
      }
      break;
    }
  }
}

}  // namespace

PlantResult plant_layers(const Score& base, std::span<const DifferencePlan> layers, std::string mutated_id) {
  xml::Node doc = base.document();
  std::vector<MeasureTargets> measures;
  collect_measures(doc, base.whitelist(), measures);

  std::map<MeasureNumber, std::int64_t> truth;
  for (const auto& m : base.measures()) truth[m.number] = 0;
  for (const auto& plan : layers) plant(measures, plan, truth);

  if (mutated_id.empty()) mutated_id = base.edition_id() + "-mutated";
  return PlantResult{score_from_document(std::move(doc), std::move(mutated_id), base.whitelist()), std::move(truth)};
}

PlantResult plant_differences(const Score& base, const DifferencePlan& plan, std::string mutated_id) {
  return plant_layers(base, std::span<const DifferencePlan>(&plan, 1), std::move(mutated_id));
}

// ---------------------------------------------------------------------------
// Corpus files

namespace {

std::vector<std::int64_t> density_from_json(const nlohmann::json& j) {
  if (j.is_array()) return j.get<std::vector<std::int64_t>>();
  if (!j.is_object()) throw ConfigError("density must be an array or an object");
  const auto n = j.at("measures").get<std::int64_t>();
  if (n < 0) throw ConfigError("density.measures must be >= 0");
  std::vector<std::int64_t> out(static_cast<std::size_t>(n), 0);
  if (j.contains("constant")) {
    std::fill(out.begin(), out.end(), j.at("constant").get<std::int64_t>());
  } else if (j.contains("uniform")) {
    const auto range = j.at("uniform").get<std::vector<std::int64_t>>();
    if (range.size() != 2 || range[0] > range[1]) throw ConfigError("density.uniform must be [lo, hi]");
    Rng rng(j.value("seed", std::uint64_t{0}));
    for (auto& d : out) d = range[0] + static_cast<std::int64_t>(rng.uniform_index(static_cast<std::uint64_t>(range[1] - range[0] + 1)));
  } else {
    throw ConfigError("density object needs 'constant' or 'uniform'");
  }
  if (j.contains("overrides")) {
    for (const auto& [k, v] : j.at("overrides").items()) {
      const auto m = std::stoll(k);
      if (m < 1 || m > n) throw ConfigError("density override for missing measure " + k);
      out[static_cast<std::size_t>(m - 1)] = v.get<std::int64_t>();
    }
  }
  return out;
}

}  // namespace

SynthConfig parse_synth_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  try {
    SynthConfig c;
    c.density = density_from_json(j.at("density"));
    c.piece_id = j.value("piece", std::string("synthetic"));
    const auto out = std::filesystem::path(j.value("output_dir", std::string("synth")));
    c.output_dir = out.is_absolute() ? out : base_dir / out;
    for (const auto& e : j.at("editions")) {
      SynthEdition ed;
      ed.id = e.at("id").get<std::string>();
      ed.extra_measures = e.value("extra_measures", std::int64_t{0});
      if (e.contains("layers"))
        for (const auto& l : e.at("layers")) ed.layers.push_back(DifferencePlan::from_json(l));
      c.editions.push_back(std::move(ed));
    }
    if (c.editions.empty()) throw ConfigError("plan lists no editions");
    std::set<std::string> ids;
    for (const auto& e : c.editions)
      if (!ids.insert(e.id).second) throw ConfigError("duplicate edition id '" + e.id + "'");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid synth plan: ") + e.what());
  } catch (const PlanError& e) {
    throw ConfigError(std::string("invalid synth plan: ") + e.what());
  }
}

SynthConfig load_synth_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_synth_config(j, path.parent_path());
}

std::vector<std::filesystem::path> write_synth_corpus(const SynthConfig& config) {
  std::filesystem::create_directories(config.output_dir);
  std::vector<std::filesystem::path> paths;
  for (const auto& ed : config.editions) {
    auto density = config.density;
    const std::int64_t fill = density.empty() ? 0 : density.back();
    density.insert(density.end(), static_cast<std::size_t>(std::max<std::int64_t>(0, ed.extra_measures)), fill);
    const auto base = generate_base_score(static_cast<std::int64_t>(density.size()), density, ed.id);
    const auto planted = plant_layers(base, ed.layers, ed.id);

    const auto xml_path = config.output_dir / (ed.id + ".xml");
    std::ofstream(xml_path, std::ios::binary) << emit(planted.mutated);
    std::ofstream truth(config.output_dir / (ed.id + "_ground_truth.csv"), std::ios::binary);
    truth << "measure,planted\n";
    for (const auto& [m, c] : planted.ground_truth) truth << m << ',' << c << '\n';
    paths.push_back(xml_path);
  }

  nlohmann::json exp;
  exp["piece"] = config.piece_id;
  exp["editions"] = nlohmann::json::array();
  for (const auto& ed : config.editions) exp["editions"].push_back({{"id", ed.id}, {"path", ed.id + ".xml"}});
  exp["base_edition"] = config.editions.front().id;
  exp["repetitions"] = 10000;
  exp["fraction"] = "1/10";
  exp["tolerance"] = "5/100";
  exp["algorithms"] = {"randsel", "barelcount", "onlyel"};
  exp["master_seed"] = 1;
  exp["output_dir"] = "results";
  std::ofstream(config.output_dir / "experiment.json", std::ios::binary) << exp.dump(2) << '\n';
  return paths;
}

}  // namespace barsample
