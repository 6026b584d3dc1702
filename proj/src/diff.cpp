#include "barsample/diff.hpp"

#include <algorithm>
#include <regex>
#include <sstream>

#include "barsample/error.hpp"

namespace barsample {

std::string_view to_string(EditKind k) {
  switch (k) {
    case EditKind::Insert: return "insert";
    case EditKind::Delete: return "delete";
    case EditKind::Modify: return "modify";
  }
  return "?";
}

CompareOptions CompareOptions::from_json(const nlohmann::json& j) {
  CompareOptions opt;
  if (j.contains("ignore")) opt.ignored = j.at("ignore").get<std::set<std::string>>();
  if (j.contains("attributes"))
    for (const auto& [kind, attrs] : j.at("attributes").items()) opt.per_kind[kind] = attrs.get<std::set<std::string>>();
  return opt;
}

Token tokenize(const NotationElement& e, const CompareOptions& options) {
  Token t{e.kind, {}};
  const auto only = options.per_kind.find(e.kind);
  for (const auto& [k, v] : e.attributes) {
    if (options.ignored.count(k) != 0) continue;
    if (only != options.per_kind.end() && only->second.count(k) == 0) continue;
    t.attributes.emplace_back(k, v);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Alignment

namespace {

// Lexicographic score: lower cost first, then more modifies.
struct Cell {
  std::int64_t cost = 0;
  std::int64_t modifies = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
  bool better_than(const Cell& o) const {
    return cost != o.cost ? cost < o.cost : modifies > o.modifies;
  }
};

class Table {
 public:
  Table(std::span<const Token> l, std::span<const Token> r)
      : left_(l), right_(r), cols_(r.size() + 1), cells_((l.size() + 1) * (r.size() + 1)) {
    for (std::size_t i = 0; i <= l.size(); ++i) {
      for (std::size_t j = 0; j <= r.size(); ++j) {
        if (i == 0 && j == 0) continue;
        Cell best{};
        bool have = false;
        auto offer = [&](Cell c) {
          if (!have || c.better_than(best)) best = c, have = true;
        };
        if (auto d = diagonal(i, j)) offer(*d);
        if (i > 0) offer(Cell{at(i - 1, j).cost + 1, at(i - 1, j).modifies});
        if (j > 0) offer(Cell{at(i, j - 1).cost + 1, at(i, j - 1).modifies});
        cell(i, j) = best;
      }
    }
  }

  const Cell& at(std::size_t i, std::size_t j) const { return cells_[i * cols_ + j]; }

  std::optional<Cell> diagonal(std::size_t i, std::size_t j) const {
    if (i == 0 || j == 0) return std::nullopt;
    const Token& a = left_[i - 1];
    const Token& b = right_[j - 1];
    if (a.kind != b.kind) return std::nullopt;
    const Cell& p = at(i - 1, j - 1);
    return a.attributes == b.attributes ? p : Cell{p.cost + 1, p.modifies + 1};
  }

 private:
  Cell& cell(std::size_t i, std::size_t j) { return cells_[i * cols_ + j]; }

  std::span<const Token> left_;
  std::span<const Token> right_;
  std::size_t cols_;
  std::vector<Cell> cells_;
};

}  // namespace

std::int64_t edit_distance(std::span<const Token> left, std::span<const Token> right) {
  return Table(left, right).at(left.size(), right.size()).cost;
}

std::vector<AlignmentStep> align(std::span<const Token> left, std::span<const Token> right) {
  const Table t(left, right);
  std::vector<AlignmentStep> steps;
  std::size_t i = left.size();
  std::size_t j = right.size();
  while (i > 0 || j > 0) {
    const Cell here = t.at(i, j);
    if (auto d = t.diagonal(i, j); d && *d == here) {
      const bool equal = left[i - 1].attributes == right[j - 1].attributes;
      steps.push_back({equal ? StepKind::Match : StepKind::Modify, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && Cell{t.at(i - 1, j).cost + 1, t.at(i - 1, j).modifies} == here) {
      steps.push_back({StepKind::Delete, i - 1, 0});
      --i;
    } else {
      steps.push_back({StepKind::Insert, 0, j - 1});
      --j;
    }
  }
  std::reverse(steps.begin(), steps.end());
  return steps;
}

// ---------------------------------------------------------------------------
// Measures and scores

namespace {

std::string describe(const Token& t) {
  std::string s = t.kind;
  for (const auto& [k, v] : t.attributes) s += " " + k + "=" + v;
  return s;
}

std::string describe_change(const Token& a, const Token& b) {
  std::map<std::string, std::pair<std::string, std::string>> changes;
  for (const auto& [k, v] : a.attributes) changes[k].first = v;
  for (const auto& [k, v] : b.attributes) changes[k].second = v;
  std::string s = a.kind + ":";
  for (const auto& [k, v] : changes) {
    if (v.first == v.second) continue;
    s += " " + k + " '" + v.first + "' -> '" + v.second + "'";
  }
  return s;
}

std::vector<Token> tokens_of(const Staff* staff, const CompareOptions& options) {
  std::vector<Token> out;
  if (staff == nullptr) return out;
  out.reserve(staff->elements.size());
  for (const auto& e : staff->elements) out.push_back(tokenize(e, options));
  return out;
}

}  // namespace

std::vector<EditOperation> diff_measures(const Measure& left, const Measure& right, const CompareOptions& options) {
  std::set<int> staff_numbers;
  for (const auto& s : left.staves) staff_numbers.insert(s.number);
  for (const auto& s : right.staves) staff_numbers.insert(s.number);

  std::vector<EditOperation> ops;
  for (const int sn : staff_numbers) {
    const auto a = tokens_of(left.staff(sn), options);
    const auto b = tokens_of(right.staff(sn), options);
    for (const auto& step : align(a, b)) {
      switch (step.kind) {
        case StepKind::Match: break;
        case StepKind::Modify:
          ops.push_back({EditKind::Modify, left.number, sn, std::to_string(step.left),
                         describe_change(a[step.left], b[step.right])});
          break;
        case StepKind::Delete:
          ops.push_back({EditKind::Delete, left.number, sn, std::to_string(step.left), describe(a[step.left])});
          break;
        case StepKind::Insert:
          ops.push_back({EditKind::Insert, left.number, sn, std::to_string(step.right), describe(b[step.right])});
          break;
      }
    }
  }
  return ops;
}

DiffReport diff_scores(const Score& left, const Score& right, const std::optional<std::set<MeasureNumber>>& selection,
                       const CompareOptions& options) {
  DiffReport rep{left.edition_id(), right.edition_id(), {}, 0, {}};
  std::vector<MeasureNumber> numbers;
  if (selection) {
    for (const auto n : *selection) {
      if (!left.contains(n) || !right.contains(n)) {
        throw ComparabilityError("measure " + std::to_string(n) + " missing in '" +
                                 (left.contains(n) ? right.edition_id() : left.edition_id()) + "'");
      }
      numbers.push_back(n);
    }
  } else {
    numbers = validate_alignment(left, right).shared;
  }
  for (const auto n : numbers) {
    auto ops = diff_measures(*left.find(n), *right.find(n), options);
    rep.per_measure[n] = static_cast<std::int64_t>(ops.size());
    rep.delta += static_cast<std::int64_t>(ops.size());
    std::move(ops.begin(), ops.end(), std::back_inserter(rep.operations));
  }
  return rep;
}

nlohmann::json DiffReport::to_json() const {
  nlohmann::json j;
  j["left"] = left_id;
  j["right"] = right_id;
  j["delta"] = delta;
  nlohmann::json pm = nlohmann::json::object();
  for (const auto& [n, c] : per_measure) pm[std::to_string(n)] = c;
  j["per_measure"] = pm;
  auto& arr = j["operations"] = nlohmann::json::array();
  for (const auto& op : operations) {
    arr.push_back({{"kind", to_string(op.kind)},
                   {"measure", op.measure},
                   {"staff", op.staff},
                   {"position", op.position},
                   {"detail", op.detail}});
  }
  return j;
}

std::string DiffReport::to_csv() const {
  std::ostringstream out;
  out << "left_id,right_id,measure,count\n";
  for (const auto& [n, c] : per_measure) out << left_id << ',' << right_id << ',' << n << ',' << c << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// musicdiff logs

DiffReport parse_musicdiff_log(std::string_view text) {
  static const std::regex location(
      R"(@@\s*measure\s+(\d+)\s*,\s*staff\s+(\d+)\s*,\s*beat\s+([-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:/\d+)?)\s*@@)");
  static const std::regex insert_word(R"(\bins)", std::regex::icase);
  static const std::regex delete_word(R"(\bdel)", std::regex::icase);

  DiffReport rep;
  std::istringstream in{std::string(text)};
  std::string line;
  std::smatch m;
  while (std::getline(in, line)) {
    if (!std::regex_search(line, m, location)) continue;
    EditOperation op;
    op.measure = std::stoll(m[1].str());
    op.staff = std::stoi(m[2].str());
    op.position = m[3].str();
    const std::string rest = m.prefix().str() + " " + m.suffix().str();
    if (std::regex_search(rest, insert_word)) {
      op.kind = EditKind::Insert;
    } else if (std::regex_search(rest, delete_word)) {
      op.kind = EditKind::Delete;
    }
    op.detail = line;
    ++rep.per_measure[op.measure];
    ++rep.delta;
    rep.operations.push_back(std::move(op));
  }
  return rep;
}

}  // namespace barsample
