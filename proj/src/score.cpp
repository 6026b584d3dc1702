#include "barsample/score.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "barsample/error.hpp"

namespace barsample {

// ---------------------------------------------------------------------------
// Whitelist

Whitelist Whitelist::defaults() {
  return Whitelist({"beam", "note", "rest", "artic", "tempo", "dynam", "dir", "slur", "chord",
                    "accid", "tie"});
}

Whitelist Whitelist::from_text(std::string_view text) {
  std::set<std::string> kinds;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    kinds.insert(line.substr(first, last - first + 1));
  }
  return Whitelist(std::move(kinds));
}

Whitelist Whitelist::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read whitelist " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

// ---------------------------------------------------------------------------
// Measure / Score accessors

std::vector<NotationElement> Measure::elements() const {
  std::vector<NotationElement> out;
  out.reserve(element_count());
  for (const auto& s : staves) out.insert(out.end(), s.elements.begin(), s.elements.end());
  return out;
}

std::size_t Measure::element_count() const {
  std::size_t n = 0;
  for (const auto& s : staves) n += s.elements.size();
  return n;
}

const Staff* Measure::staff(int n) const {
  for (const auto& s : staves)
    if (s.number == n) return &s;
  return nullptr;
}

const Measure* Score::find(MeasureNumber number) const {
  const auto it = index_.find(number);
  return it == index_.end() ? nullptr : &measures_[it->second];
}

std::vector<MeasureNumber> Score::measure_numbers() const {
  std::vector<MeasureNumber> out;
  out.reserve(measures_.size());
  for (const auto& m : measures_) out.push_back(m.number);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

constexpr std::string_view kIdAttr = "xml:id";

bool is_header(std::string_view name) {
  return name == "meiHead" || name == "scoreDef" || name == "staffDef" || name == "staffGrp";
}

bool is_beam_event(std::string_view name) {
  return name == "note" || name == "chord" || name == "rest" || name == "space" || name == "beam" ||
         name == "tuplet" || name == "bTrem" || name == "fTrem";
}

std::optional<std::int64_t> to_int(std::string_view s) {
  std::int64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

// First token of a space-separated @staff list.
int staff_of(const xml::Node& node, int fallback) {
  const auto* attr = node.attribute("staff");
  if (attr == nullptr) return fallback;
  std::string_view v = *attr;
  v = v.substr(0, v.find(' '));
  const auto n = to_int(v);
  return n ? static_cast<int>(*n) : fallback;
}

struct Anchor {
  MeasureNumber measure;
  int staff;
  int ordinal;  // index in the staff sequence, -1 for non-whitelisted nodes
};

struct Collector {
  const Whitelist& whitelist;
  std::unordered_map<std::string, Anchor> anchors;

  NotationElement make_element(const xml::Node& node) const {
    NotationElement e{node.name, {}};
    for (const auto& [k, v] : node.attributes)
      if (k != kIdAttr) e.attributes.emplace(k, v);
    return e;
  }

  void collect(const xml::Node& node, MeasureNumber measure, int staff_n,
               std::map<int, std::vector<NotationElement>>& staves, const char* beam_pos) {
    int ordinal = -1;
    if (whitelist.contains(node.name)) {
      auto& seq = staves[staff_n];
      auto e = make_element(node);
      if (beam_pos != nullptr) e.attributes["beam-pos"] = beam_pos;
      ordinal = static_cast<int>(seq.size());
      seq.push_back(std::move(e));
    }
    if (const auto* id = node.attribute(kIdAttr)) anchors.emplace(*id, Anchor{measure, staff_n, ordinal});

    if (node.name == "beam") {
      std::vector<const xml::Node*> events;
      for (const auto& c : node.children)
        if (is_beam_event(c.name)) events.push_back(&c);
      for (const auto& c : node.children) {
        const char* pos = nullptr;
        const auto it = std::find(events.begin(), events.end(), &c);
        if (it != events.end()) {
          const auto i = it - events.begin();
          pos = i == 0 ? "i" : (i + 1 == static_cast<std::ptrdiff_t>(events.size()) ? "t" : "m");
        }
        collect(c, measure, staff_n, staves, pos);
      }
    } else {
      for (const auto& c : node.children) collect(c, measure, staff_n, staves, nullptr);
    }
  }
};

MeasureNumber measure_number(const xml::Node& node) {
  const auto* n = node.attribute("n");
  if (n == nullptr) throw AttributeError("measure without @n");
  const auto v = to_int(*n);
  if (!v || *v < 0) throw AttributeError("measure @n is not a non-negative integer: '" + *n + "'");
  return *v;
}

struct Deferred {
  const xml::Node* node;
  std::string startid;
};

// Walks the tree in document order. Measures are collected into `out`;
// whitelisted elements outside measures that carry @startid are deferred.
void walk(const xml::Node& node, Collector& col, std::vector<Measure>& out,
          std::map<MeasureNumber, std::size_t>& index, std::vector<Deferred>& deferred) {
  if (node.name == "measure") {
    Measure m;
    m.number = measure_number(node);
    if (index.count(m.number) != 0)
      throw DuplicateMeasureError("duplicate measure @n=" + std::to_string(m.number));
    std::map<int, std::vector<NotationElement>> staves;
    int staff_pos = 0;
    for (const auto& c : node.children) {
      if (c.name == "staff") {
        ++staff_pos;
        const auto* n = c.attribute("n");
        const auto sn = n ? to_int(*n) : std::nullopt;
        const int staff_n = sn ? static_cast<int>(*sn) : staff_pos;
        staves[staff_n];  // keep empty staves
        for (const auto& cc : c.children) col.collect(cc, m.number, staff_n, staves, nullptr);
        if (const auto* id = c.attribute(kIdAttr)) col.anchors.emplace(*id, Anchor{m.number, staff_n, -1});
      } else {
        col.collect(c, m.number, staff_of(c, 0), staves, nullptr);
      }
    }
    for (auto& [n, seq] : staves) m.staves.push_back(Staff{n, std::move(seq)});
    index.emplace(m.number, out.size());
    out.push_back(std::move(m));
    return;
  }
  if (is_header(node.name)) return;
  if (col.whitelist.contains(node.name)) {
    if (const auto* sid = node.attribute("startid")) {
      deferred.push_back({&node, *sid});
      return;
    }
  }
  for (const auto& c : node.children) walk(c, col, out, index, deferred);
}

std::string strip_hash(std::string_view ref) {
  if (!ref.empty() && ref.front() == '#') ref.remove_prefix(1);
  return std::string(ref);
}

Staff& staff_slot(Measure& m, int n) {
  auto it = std::lower_bound(m.staves.begin(), m.staves.end(), n,
                             [](const Staff& s, int v) { return s.number < v; });
  if (it == m.staves.end() || it->number != n) it = m.staves.insert(it, Staff{n, {}});
  return *it;
}

}  // namespace

Score score_from_document(xml::Node document, std::string edition_id, const Whitelist& whitelist) {
  auto doc = std::make_shared<const xml::Node>(std::move(document));
  Score score(std::move(edition_id), doc, whitelist);

  Collector col{whitelist, {}};
  std::vector<Deferred> deferred;
  walk(*doc, col, score.measures_, score.index_, deferred);

  // Spanners written outside any measure count toward the measure of their start.
  for (const auto& d : deferred) {
    const auto it = col.anchors.find(strip_hash(d.startid));
    if (it == col.anchors.end()) continue;
    auto& m = score.measures_[score.index_.at(it->second.measure)];
    auto& st = staff_slot(m, staff_of(*d.node, it->second.staff));
    st.elements.push_back(col.make_element(*d.node));
  }

  for (auto& m : score.measures_) {
    for (auto& st : m.staves) {
      for (auto& e : st.elements) {
        for (const char* key : {"startid", "endid"}) {
          auto a = e.attributes.find(key);
          if (a == e.attributes.end()) continue;
          const auto it = col.anchors.find(strip_hash(a->second));
          if (it == col.anchors.end()) continue;
          const auto& an = it->second;
          a->second = "m" + std::to_string(an.measure) + ".s" + std::to_string(an.staff) +
                      (an.ordinal >= 0 ? "." + std::to_string(an.ordinal) : std::string());
        }
      }
    }
  }
  return score;
}

Score parse_score(std::string_view xml_document, const Whitelist& whitelist, std::string edition_id) {
  return score_from_document(xml::parse(xml_document), std::move(edition_id), whitelist);
}

Score load_score(const std::filesystem::path& path, const Whitelist& whitelist, std::string edition_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  if (edition_id.empty()) edition_id = path.stem().string();
  try {
    return parse_score(buf.str(), whitelist, std::move(edition_id));
  } catch (const ParseError& e) {
    // Keep the concrete type while adding the file name.
    if (dynamic_cast<const DuplicateMeasureError*>(&e)) throw DuplicateMeasureError(path.string() + ": " + e.what());
    if (dynamic_cast<const AttributeError*>(&e)) throw AttributeError(path.string() + ": " + e.what());
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string emit(const Score& score) { return xml::serialize(score.document()); }

// ---------------------------------------------------------------------------
// Census

MeasureCensus measure_census(const Score& score) {
  MeasureCensus c;
  for (const auto& m : score.measures()) {
    const auto n = static_cast<std::int64_t>(m.element_count());
    c.counts.emplace(m.number, n);
    c.total += n;
  }
  return c;
}

std::map<std::string, std::int64_t> kind_census(const Score& score) {
  std::map<std::string, std::int64_t> out;
  for (const auto& m : score.measures())
    for (const auto& s : m.staves)
      for (const auto& e : s.elements) ++out[e.kind];
  return out;
}

// ---------------------------------------------------------------------------
// Extraction

namespace {

void collect_ids(const xml::Node& node, std::unordered_set<std::string>& ids) {
  if (const auto* id = node.attribute(kIdAttr)) ids.insert(*id);
  for (const auto& c : node.children) collect_ids(c, ids);
}

void prune(xml::Node& node, const std::set<MeasureNumber>& keep,
           const std::unordered_set<std::string>& dropped_ids, const Whitelist& wl) {
  std::erase_if(node.children, [&](const xml::Node& c) {
    if (c.name == "measure") return keep.count(measure_number(c)) == 0;
    if (wl.contains(c.name)) {
      if (const auto* sid = c.attribute("startid")) return dropped_ids.count(strip_hash(*sid)) != 0;
    }
    return false;
  });
  for (auto& c : node.children)
    if (c.name != "measure" && !is_header(c.name)) prune(c, keep, dropped_ids, wl);
}

void dropped_measure_ids(const xml::Node& node, const std::set<MeasureNumber>& keep,
                         std::unordered_set<std::string>& ids) {
  for (const auto& c : node.children) {
    if (c.name == "measure") {
      if (keep.count(measure_number(c)) == 0) collect_ids(c, ids);
    } else if (!is_header(c.name)) {
      dropped_measure_ids(c, keep, ids);
    }
  }
}

}  // namespace

Score extract_sample_document(const Score& score, std::span<const MeasureNumber> selection) {
  std::set<MeasureNumber> keep;
  for (const auto n : selection) {
    if (!score.contains(n))
      throw SelectionError("measure " + std::to_string(n) + " not in edition '" + score.edition_id() + "'");
    keep.insert(n);
  }
  xml::Node doc = score.document();
  std::unordered_set<std::string> dropped;
  dropped_measure_ids(doc, keep, dropped);
  prune(doc, keep, dropped, score.whitelist());
  return score_from_document(std::move(doc), score.edition_id(), score.whitelist());
}

// ---------------------------------------------------------------------------
// Alignment

AlignmentReport validate_alignment(const Score& left, const Score& right) {
  auto l = left.measure_numbers();
  auto r = right.measure_numbers();
  std::sort(l.begin(), l.end());
  std::sort(r.begin(), r.end());
  AlignmentReport rep;
  std::set_intersection(l.begin(), l.end(), r.begin(), r.end(), std::back_inserter(rep.shared));
  std::set_difference(l.begin(), l.end(), r.begin(), r.end(), std::back_inserter(rep.only_left));
  std::set_difference(r.begin(), r.end(), l.begin(), l.end(), std::back_inserter(rep.only_right));
  return rep;
}

}  // namespace barsample
